"""Point-mass wing simulation under a path-following controller."""
from .controller import Controller, ControllerParams, LoopEvents, controller_step
from .model import (
    BodyParams,
    WingState,
    accelerations,
    aero_force,
    apparent_wind,
    local_basis,
    propagate,
    step,
    tension,
)
from .simulate import SimOutput, Simulator, default_environment, initial_state, simulate

__all__ = [
    "BodyParams", "Controller", "ControllerParams", "LoopEvents", "SimOutput", "Simulator", "WingState",
    "accelerations", "aero_force", "apparent_wind", "controller_step", "default_environment",
    "initial_state", "local_basis", "propagate", "simulate", "step", "tension",
]
