"""Closed-loop time-domain simulation of the wing under controller K."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ParameterError, SimulationCrash
from ..path import PathParams, figure_eight
from ..traction import derive_constants
from ..wind import DirectionSchedule, WindEnvironment, shear_speed
from . import _kernels as kern
from .controller import Controller, ControllerParams, path_array
from .model import BodyParams, WingState, env_arrays, pack_params

MAX_DT = 0.05


@dataclass
class SimOutput:
    """Sampled trajectory; every array has one entry per control sample."""

    t: np.ndarray
    phi: np.ndarray
    theta: np.ndarray
    phi_dot: np.ndarray
    theta_dot: np.ndarray
    psi: np.ndarray
    tension: np.ndarray
    slack: np.ndarray
    wind_speed: np.ndarray
    wind_direction: np.ndarray
    event: np.ndarray

    def __len__(self):
        return self.t.size

    @property
    def loop_indices(self) -> np.ndarray:
        """Sample indices at which a loop was completed."""
        return np.flatnonzero(self.event == kern.EVENT_LOOP)

    @property
    def half_indices(self) -> np.ndarray:
        return np.flatnonzero(self.event != 0)

    def slice(self, start: int, stop: int | None = None) -> "SimOutput":
        return SimOutput(**{k: v[start:stop] for k, v in self.__dict__.items()})

    @classmethod
    def concat(cls, parts) -> "SimOutput":
        parts = list(parts)
        return cls(**{k: np.concatenate([getattr(p, k) for p in parts]) for k in cls.__dataclass_fields__})

    def columns(self) -> dict:
        return dict(self.__dict__)


def initial_state(path: PathParams, env: WindEnvironment, body: BodyParams, t: float = 0.0,
                  phase: float = 0.0) -> WingState:
    """Wing at ``phase`` on ``path`` moving along it at crosswind speed.

    Speed is ``E * W(z) * cos(theta) * cos(phi - phi_w)``, the steady
    crosswind estimate.
    """
    r = body.aero.r
    phi, theta = (float(v) for v in figure_eight(path, phase))
    e_eq = derive_constants(body.aero).e_eq
    w = shear_speed(env.shear, r * math.sin(theta))
    speed = e_eq * w * math.cos(theta) * math.cos(phi - env.schedule(t))
    # path tangent in the (cos(theta) dphi, dtheta) metric
    w = 2.0 * math.pi * phase
    dp = 2.0 * math.pi * path.phi_span * math.cos(w)
    dq = -4.0 * math.pi * path.theta_span * math.cos(2.0 * w)
    cb, sb = math.cos(path.beta), math.sin(path.beta)
    dp, dq = cb * dp - sb * dq, sb * dp + cb * dq
    ux, uy = math.cos(theta) * dp, dq
    norm = math.hypot(ux, uy)
    return WingState(phi, theta, r, speed * ux / norm / (r * math.cos(theta)), speed * uy / norm / r)


class Simulator:
    """Steps the wing and controller in compiled chunks.

    The commanded path can be changed between chunks with :meth:`command`;
    the controller's phase and trim carry over.
    """

    def __init__(
        self,
        env: WindEnvironment,
        body: BodyParams | None = None,
        controller: ControllerParams | None = None,
        path: PathParams | None = None,
        dt: float = 0.02,
        state: WingState | None = None,
        t0: float = 0.0,
        phase: float = 0.0,
    ):
        self.env = env
        self.body = body or BodyParams()
        self.controller = Controller(controller, phase)
        ts = self.controller.params.sample_time
        if not 0.0 < dt <= MAX_DT:
            raise ParameterError(f"dt={dt} outside (0, {MAX_DT}]")
        substeps = ts / dt
        if abs(substeps - round(substeps)) > 1e-9 or round(substeps) < 1:
            raise ParameterError(f"sample_time={ts} must be a multiple of dt={dt}")
        self.substeps = int(round(substeps))
        self.dt = dt
        self.path = path or PathParams(0.0, 0.4, 0.24, 0.1)
        self.prm = pack_params(self.body, env)
        self.dir_t, self.dir_v, self.turb = env_arrays(env)
        state = state or initial_state(self.path, env, self.body, t0, phase)
        self.x = state.as_array()
        self.t = t0
        self.crashed = False

    @property
    def sample_time(self) -> float:
        return self.substeps * self.dt

    @property
    def state(self) -> WingState:
        return WingState.from_array(self.x, self.body.aero.r)

    def command(self, path: PathParams):
        self.path = path

    def _buffers(self, n):
        return (
            np.empty(n), np.empty((n, 4)), np.empty(n), np.empty(n),
            np.empty(n, dtype=np.int64), np.empty(n), np.empty(n), np.empty(n, dtype=np.int64),
        )

    def advance(self, n_samples: int, stop_on_loop: bool = False) -> SimOutput:
        """Run up to ``n_samples`` control samples (fewer when a loop ends).

        Raises
        ------
        SimulationCrash
            When the wing leaves the elevation band; ``output`` holds the
            samples recorded up to the crash.
        """
        if self.crashed:
            raise SimulationCrash(self.t, self.state, reason="simulator already crashed")
        bufs = self._buffers(n_samples)
        n, status, t = kern.advance(
            self.t, self.x, self.dt, self.substeps, n_samples, stop_on_loop,
            self.prm, self.dir_t, self.dir_v, self.turb,
            path_array(self.path), self.controller.cprm, self.controller.memory, *bufs,
        )
        out_t, out_x, out_psi, out_f, out_slack, out_ws, out_wd, out_event = bufs
        out = SimOutput(
            out_t[:n], out_x[:n, 0].copy(), out_x[:n, 1].copy(), out_x[:n, 2].copy(), out_x[:n, 3].copy(),
            out_psi[:n], out_f[:n], out_slack[:n].astype(bool), out_ws[:n], out_wd[:n], out_event[:n],
        )
        self.t = t
        if status == kern.STATUS_CRASH:
            self.crashed = True
            raise SimulationCrash(t, self.state, output=out, reason="left elevation band")
        return out

    def next_loop(self, max_samples: int = 10000) -> SimOutput:
        """Run until the controller reports a completed loop."""
        return self.advance(max_samples, stop_on_loop=True)

    def run(self, duration: float) -> SimOutput:
        n = int(round(duration / self.sample_time))
        return self.advance(n)


def simulate(
    env: WindEnvironment,
    body: BodyParams | None = None,
    controller: ControllerParams | None = None,
    path: PathParams | None = None,
    duration: float = 60.0,
    dt: float = 0.02,
    state: WingState | None = None,
    phase: float = 0.0,
) -> SimOutput:
    """Fly ``path`` for ``duration`` seconds and return the sampled trajectory."""
    if duration <= 0.0:
        raise ParameterError("duration must be positive")
    sim = Simulator(env, body, controller, path, dt, state, phase=phase)
    return sim.run(duration)


def default_environment(phi_w: float = 0.0, duration: float = 300.0, **kwargs) -> WindEnvironment:
    return WindEnvironment.build(schedule=DirectionSchedule.constant(phi_w), duration=duration, **kwargs)
