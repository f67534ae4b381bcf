"""Point-mass wing on a constant-radius sphere.

State ``(phi, theta, r, phi_dot, theta_dot, r_dot)`` with ``r`` fixed by the
tether. Ground frame: ``e_x``, ``e_y`` horizontal, ``e_z`` up; the wing sits at
``r (cos theta cos phi, cos theta sin phi, sin theta)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from ..errors import ParameterError, SimulationCrash, SingularGeometryError, StallError
from ..traction import AeroParams, derive_constants
from ..wind import WindEnvironment, WindSample
from . import _kernels as kern

G_EARTH = 9.81


@dataclass(frozen=True)
class WingState:
    phi: float
    theta: float
    r: float
    phi_dot: float = 0.0
    theta_dot: float = 0.0
    r_dot: float = 0.0

    def __post_init__(self):
        if self.r <= 0.0:
            raise ParameterError(f"r={self.r} must be positive")
        if self.r_dot != 0.0:
            raise ParameterError("tether length is constant, r_dot must be 0")

    def as_array(self) -> np.ndarray:
        return np.array([self.phi, self.theta, self.phi_dot, self.theta_dot])

    @classmethod
    def from_array(cls, x, r: float) -> "WingState":
        return cls(float(x[0]), float(x[1]), r, float(x[2]), float(x[3]))


@dataclass(frozen=True)
class BodyParams:
    mass: float = 2.45
    tether_lin_density: float = 0.01
    gravity: float = G_EARTH
    aero: AeroParams = field(default_factory=AeroParams)

    def __post_init__(self):
        for name in ("mass", "tether_lin_density", "gravity"):
            if getattr(self, name) <= 0.0:
                raise ParameterError(f"{name}={getattr(self, name)} must be positive")

    @property
    def effective_mass(self) -> float:
        """Wing mass plus half the tether mass."""
        return self.mass + 0.5 * self.tether_lin_density * self.aero.r


def local_basis(phi: float, theta: float):
    """Unit vectors ``(e_r, e_theta, e_phi)`` in the ground frame."""
    cp, sp = math.cos(phi), math.sin(phi)
    ct, st = math.cos(theta), math.sin(theta)
    e_r = np.array([ct * cp, ct * sp, st])
    e_theta = np.array([-st * cp, -st * sp, ct])
    e_phi = np.array([-sp, cp, 0.0])
    return e_r, e_theta, e_phi


def velocity(state: WingState) -> np.ndarray:
    """Ground-frame wing velocity at constant tether length."""
    _, e_theta, e_phi = local_basis(state.phi, state.theta)
    return state.r * state.theta_dot * e_theta + state.r * math.cos(state.theta) * state.phi_dot * e_phi


def apparent_wind(state: WingState, wind: WindSample) -> np.ndarray:
    """Apparent wind ``W_a = W - p_dot`` in the ground frame (m/s)."""
    return np.asarray(wind.vector, dtype=float) - velocity(state)


def pack_params(body: BodyParams, env: WindEnvironment, aero_on=True, gravity_on=True) -> np.ndarray:
    """Flat parameter vector consumed by the compiled kernels."""
    aero = body.aero
    c_d_eq = derive_constants(aero).c_d_eq
    prm = np.zeros(kern.N_PRM)
    prm[kern.P_R] = aero.r
    prm[kern.P_MEFF] = body.effective_mass
    prm[kern.P_G] = body.gravity
    prm[kern.P_Q] = 0.5 * aero.rho * aero.area
    prm[kern.P_CL] = aero.c_l
    prm[kern.P_CDEQ] = c_d_eq
    prm[kern.P_W0] = env.shear.w0
    prm[kern.P_Z0] = env.shear.z0
    prm[kern.P_ALPHA] = env.shear.alpha
    prm[kern.P_TURB_DT] = env.turbulence_dt
    prm[kern.P_AERO] = 1.0 if aero_on else 0.0
    prm[kern.P_GRAV] = 1.0 if gravity_on else 0.0
    return prm


def env_arrays(env: WindEnvironment):
    return (
        np.ascontiguousarray(env.schedule.times, dtype=float),
        np.ascontiguousarray(env.schedule.values, dtype=float),
        np.ascontiguousarray(env.turbulence_series, dtype=float),
    )


def aero_force(state: WingState, wind: WindSample, psi: float, aero: AeroParams) -> np.ndarray:
    """Drag along the apparent wind plus lift rolled by ``psi`` (N, ground frame).

    Lift at zero roll points along ``e_r`` projected perpendicular to the
    apparent wind; roll rotates it about the apparent wind axis.
    """
    e_r, e_theta, e_phi = local_basis(state.phi, state.theta)
    w_a = apparent_wind(state, wind)
    a_r, a_phi, a_th = float(w_a @ e_r), float(w_a @ e_phi), float(w_a @ e_theta)
    prm = np.zeros(kern.N_PRM)
    prm[kern.P_Q] = 0.5 * aero.rho * aero.area
    prm[kern.P_CL] = aero.c_l
    prm[kern.P_CDEQ] = derive_constants(aero).c_d_eq
    f_r, f_phi, f_th, code = kern.aero_local(a_r, a_phi, a_th, psi, prm)
    if code == 1:
        raise StallError("apparent wind speed is zero")
    if code == 2:
        raise SingularGeometryError("apparent wind parallel to the tether")
    return f_r * e_r + f_phi * e_phi + f_th * e_theta


def tension(state: WingState, wind: WindSample, psi: float, body: BodyParams) -> tuple[float, bool]:
    """Tether force from the radial balance; returns ``(F, slack)``.

    ``F = F_aero . e_r - m g sin(theta) + m r (theta_dot^2 + cos^2 theta phi_dot^2)``
    clamped at zero, ``slack`` set when the clamp was active.
    """
    m = body.effective_mass
    e_r, _, _ = local_basis(state.phi, state.theta)
    w_a = apparent_wind(state, wind)
    f_r = 0.0
    if float(w_a @ w_a) > 0.0:
        f_r = float(aero_force(state, wind, psi, body.aero) @ e_r)
    ct = math.cos(state.theta)
    f = (
        f_r
        - m * body.gravity * math.sin(state.theta)
        + m * state.r * (state.theta_dot**2 + ct**2 * state.phi_dot**2)
    )
    if f < 0.0:
        return 0.0, True
    return f, False


def accelerations(state: WingState, psi: float, env: WindEnvironment, body: BodyParams, t: float = 0.0,
                  aero_on=True, gravity_on=True) -> tuple[float, float]:
    """Angular accelerations ``(phi_ddot, theta_ddot)``."""
    prm = pack_params(body, env, aero_on, gravity_on)
    return kern.accelerations(t, state.phi, state.theta, state.phi_dot, state.theta_dot, psi, prm, *env_arrays(env))


def step(state: WingState, psi: float, env: WindEnvironment, body: BodyParams, t: float, dt: float) -> WingState:
    """Advance one RK4 step of length ``dt`` with roll ``psi`` held."""
    if not 0.0 < dt <= 0.05:
        raise ParameterError(f"dt={dt} outside (0, 0.05]")
    x = state.as_array()
    kern.rk4(t, x, dt, psi, pack_params(body, env), *env_arrays(env))
    new = WingState.from_array(x, state.r)
    if not kern.THETA_MIN < new.theta < kern.THETA_MAX or not np.isfinite(new.theta):
        raise SimulationCrash(t + dt, new, reason="left elevation band")
    return new


def propagate(state: WingState, psi: float, env: WindEnvironment, body: BodyParams, t: float, dt: float, n: int,
              aero_on=True, gravity_on=True) -> WingState:
    """``n`` RK4 steps with no elevation check, for numerical studies."""
    x = state.as_array()
    kern.propagate(t, x, dt, n, psi, pack_params(body, env, aero_on, gravity_on), *env_arrays(env))
    return WingState.from_array(x, state.r)
