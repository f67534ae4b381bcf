"""Wind-direction tracking experiments for a tethered wing flying figure eights."""
from .errors import (
    ConfigError,
    CrosswindError,
    DegeneratePathError,
    ParameterError,
    SequencingError,
    SimulationCrash,
    SingularGeometryError,
    StallError,
)
from .path import Half, PathParams, classify_half, figure_eight, sample_path
from .traction import AeroParams, derive_constants, point_force
from .wind import DirectionSchedule, ShearParams, TurbulenceParams, WindEnvironment

__version__ = "0.1.0"
