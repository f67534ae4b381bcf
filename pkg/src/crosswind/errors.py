"""Exception types raised across the package."""


class CrosswindError(Exception):
    """Base class for all package errors."""


class ParameterError(CrosswindError, ValueError):
    """An argument lies outside its valid domain."""


class ConfigError(CrosswindError):
    """A scenario or configuration block is malformed.

    ``key`` and ``line`` locate the offending entry when known.
    """

    def __init__(self, message, key=None, line=None):
        self.key = key
        self.line = line
        where = []
        if key is not None:
            where.append(f"key '{key}'")
        if line is not None:
            where.append(f"line {line}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class DegeneratePathError(CrosswindError):
    """A sampled path has an empty left or right half."""


class StallError(CrosswindError):
    """Apparent wind speed is zero, aerodynamic forces are undefined."""


class SingularGeometryError(CrosswindError):
    """Apparent wind is parallel to the tether so the lift axis is undefined."""


class SequencingError(CrosswindError):
    """Measurements were fed out of time order."""


class SimulationCrash(CrosswindError):
    """The wing left the flyable elevation band.

    Attributes
    ----------
    t : float
        Simulation time of the event (s).
    state : WingState
        Last state before the abort.
    output : SimOutput or None
        Samples recorded up to the event.
    """

    def __init__(self, t, state, output=None, reason="crash"):
        self.t = t
        self.state = state
        self.output = output
        self.reason = reason
        super().__init__(
            f"{reason} at t={t:.3f} s (phi={state.phi:.4f}, theta={state.theta:.4f})"
        )
