"""Path-following controller K.

Pure pursuit in the (phi, theta) chart: track the loop phase of the closest
reference point, aim at a point a fixed phase ahead, and roll in proportion
to the heading error. A per-loop integral trim shifts the reference so the
measured loop center settles on the commanded one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ParameterError
from ..path import PathParams
from . import _kernels as kern


@dataclass(frozen=True)
class ControllerParams:
    gain: float = 0.6
    psi_max: float = 0.5
    lookahead: float = 0.05
    theta_trim_gain: float = 0.5
    trim_limit: float = 0.2
    search_window: float = 0.15
    sample_time: float = 0.02

    def __post_init__(self):
        if not 0.0 < self.psi_max < 0.5 * math.pi:
            raise ParameterError(f"psi_max={self.psi_max} outside (0, pi/2)")
        if self.gain <= 0.0:
            raise ParameterError("gain must be positive")
        if not 0.0 < self.lookahead < 0.5:
            raise ParameterError("lookahead phase must lie in (0, 0.5)")
        if not 0.0 <= self.theta_trim_gain < 2.0:
            raise ParameterError("trim gain must lie in [0, 2)")
        if self.sample_time <= 0.0:
            raise ParameterError("sample_time must be positive")

    def as_array(self) -> np.ndarray:
        c = np.zeros(kern.N_CPRM)
        c[kern.C_GAIN] = self.gain
        c[kern.C_PSI_MAX] = self.psi_max
        c[kern.C_LOOKAHEAD] = self.lookahead
        c[kern.C_TRIM_GAIN] = self.theta_trim_gain
        c[kern.C_TRIM_LIMIT] = self.trim_limit
        c[kern.C_SEARCH] = self.search_window
        return c


def path_array(params: PathParams) -> np.ndarray:
    return np.array([params.phi_c, params.theta_c, params.phi_span, params.theta_span, params.beta])


@dataclass(frozen=True)
class LoopEvents:
    half_switch: bool
    loop_complete: bool


class Controller:
    """Stateful wrapper around the compiled guidance law."""

    def __init__(self, params: ControllerParams | None = None, phase: float = 0.0):
        self.params = params or ControllerParams()
        self.cprm = self.params.as_array()
        self.memory = np.zeros(kern.N_CST)
        self.memory[kern.S_PHASE] = phase

    @property
    def phase(self) -> float:
        return float(self.memory[kern.S_PHASE])

    @property
    def trim(self) -> tuple[float, float]:
        return float(self.memory[kern.S_TRIM_PHI]), float(self.memory[kern.S_TRIM_THETA])

    @property
    def loops(self) -> int:
        return int(self.memory[kern.S_LOOPS])

    def step(self, state, commanded: PathParams) -> tuple[float, LoopEvents]:
        """One sampling instant: returns the roll command and loop events."""
        psi, event = kern.guidance(
            state.phi, state.theta, state.phi_dot, state.theta_dot,
            path_array(commanded), self.cprm, self.memory,
        )
        return float(psi), LoopEvents(event == kern.EVENT_HALF, event == kern.EVENT_LOOP)


def controller_step(ctrl: Controller, measured, commanded: PathParams):
    return ctrl.step(measured, commanded)


def roll_command(heading_error: float, gain: float, psi_max: float) -> float:
    """Saturated proportional roll law used by the guidance."""
    return min(psi_max, max(-psi_max, gain * kern.wrap_angle(heading_error)))
