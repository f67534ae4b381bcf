"""Quasi-static traction force of a wing flying crosswind.

The point force is ``F = C * v(theta) * m(phi - phi_w)`` with
``v(theta) = W(theta)^2 cos^2(theta)`` and ``m(x) = cos^2(x)``; everything
else here averages it over sampled paths.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConfigError, DegeneratePathError, ParameterError
from .path import PathParams, as_arrays, left_mask, sample_path
from .wind import ShearParams

ANALYSIS_SAMPLES = 400


@dataclass(frozen=True)
class AeroParams:
    """Wing and tether aerodynamics; defaults are the small-prototype values."""

    rho: float = 1.225
    area: float = 9.0
    c_l: float = 0.8
    c_d: float = 0.134
    c_d_line: float = 1.2
    n_lines: int = 3
    d_line: float = 0.003
    r: float = 30.0

    def __post_init__(self):
        for name in ("rho", "area", "c_l", "c_d", "n_lines", "d_line", "r"):
            if getattr(self, name) <= 0:
                raise ParameterError(f"{name}={getattr(self, name)} must be positive")
        if self.c_d_line < 0:
            raise ParameterError(f"c_d_line={self.c_d_line} must be non-negative")
        if self.c_l / self.c_d <= 1.0:
            raise ParameterError("lift-to-drag ratio must exceed 1")


@dataclass(frozen=True)
class TractionConstants:
    a_line: float
    c_d_eq: float
    e_eq: float
    c_big: float
    r: float


def derive_constants(aero: AeroParams) -> TractionConstants:
    """Equivalent drag, efficiency and the force constant ``C`` (kg/m)."""
    a_line = aero.n_lines * aero.r * aero.d_line
    c_d_eq = aero.c_d + aero.c_d_line * a_line / (4.0 * aero.area)
    e_eq = aero.c_l / c_d_eq
    c_big = 0.5 * aero.rho * aero.area * aero.c_l * e_eq**2 * (1.0 + 1.0 / e_eq**2) ** 1.5
    return TractionConstants(a_line, c_d_eq, e_eq, c_big, aero.r)


def elevation_factor(shear: ShearParams, r: float, theta):
    """``v(theta) = W(r sin theta)^2 cos^2 theta``."""
    theta = np.asarray(theta, dtype=float)
    w = shear.w0 * (r * np.sin(theta) / shear.z0) ** shear.alpha
    return (w * np.cos(theta)) ** 2


def point_force(const: TractionConstants, shear: ShearParams, phi, theta, phi_w: float):
    """Traction force at wing location(s) ``(phi, theta)``; scalar or array."""
    phi = np.asarray(phi, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if np.any((theta <= 0.0) | (theta >= 0.5 * math.pi)):
        raise ParameterError("theta outside the wind window (0, pi/2)")
    if np.any(np.abs(phi - phi_w) >= 0.5 * math.pi):
        raise ParameterError("|phi - phi_w| must stay below pi/2")
    out = const.c_big * elevation_factor(shear, const.r, theta) * np.cos(phi - phi_w) ** 2
    return float(out) if out.ndim == 0 else out


def average_force(const, shear, path, phi_w: float) -> float:
    """Mean point force over the samples of ``path``."""
    phi, theta = as_arrays(path)
    return float(np.mean(point_force(const, shear, phi, theta, phi_w)))


def half_forces(const, shear, path, phi_w: float, phi_c: float) -> tuple[float, float]:
    """Mean force over left (``phi >= phi_c``) and right half samples."""
    phi, theta = as_arrays(path)
    left = left_mask(phi, phi_c)
    if left.all() or not left.any():
        raise DegeneratePathError("path has an empty half")
    force = point_force(const, shear, phi, theta, phi_w)
    return float(np.mean(force[left])), float(np.mean(force[~left]))


def delta_force(const, shear, path, phi_w: float, phi_c: float) -> float:
    """Left-minus-right half-path average force."""
    f_left, f_right = half_forces(const, shear, path, phi_w, phi_c)
    return f_left - f_right


def delta_force_estimate(const, shear, path, phi_w: float, phi_c: float) -> float:
    """Closed-form ``-(C/2) sin(2 (phi_c - phi_w)) B`` for horizontal paths.

    ``B`` sums ``v(theta) sin(2 |phi_delta|)`` averaged over each half.
    """
    phi, theta = as_arrays(path)
    left = left_mask(phi, phi_c)
    if left.all() or not left.any():
        raise DegeneratePathError("path has an empty half")
    term = elevation_factor(shear, const.r, theta) * np.sin(2.0 * np.abs(phi - phi_c))
    b = np.mean(term[left]) + np.mean(term[~left])
    return float(-0.5 * const.c_big * math.sin(2.0 * (phi_c - phi_w)) * b)


def optimal_location(shear: ShearParams, phi_w: float = 0.0) -> tuple[float, float]:
    """Location of maximal point force: ``(phi_w, arctan(sqrt(alpha)))``."""
    return phi_w, math.atan(math.sqrt(shear.alpha))


SWEEPABLE = ("phi_offset", "theta_c", "phi_span", "theta_span", "beta")


@dataclass(frozen=True)
class SweepAxis:
    name: str
    start: float
    stop: float
    count: int

    def __post_init__(self):
        if self.name not in SWEEPABLE:
            raise ConfigError(f"cannot sweep '{self.name}'", key=self.name)
        if self.count < 1:
            raise ConfigError("sweep range is empty", key=self.name)

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class SweepSpec:
    """One or two swept path parameters around ``base``.

    ``phi_offset`` sweeps ``phi_c - phi_w``; when it is not swept the base
    path's own ``phi_c`` is used.
    """

    base: PathParams
    axes: Sequence[SweepAxis]
    phi_w: float = 0.0
    n_samples: int = ANALYSIS_SAMPLES
    normalize: bool = True

    def __post_init__(self):
        if not 1 <= len(self.axes) <= 2:
            raise ConfigError("a sweep takes one or two axes")


def sweep(const: TractionConstants, shear: ShearParams, spec: SweepSpec) -> dict:
    """Evaluate average force and left-right difference over a sweep grid.

    Rows are emitted row-major (first axis slowest).

    Returns
    -------
    dict
        Column name -> numpy array: the swept values, ``f_bar``,
        ``delta_f`` and ``f_bar_norm`` (``f_bar`` over the table maximum).
    """
    names = [ax.name for ax in spec.axes]
    grids = [ax.values() for ax in spec.axes]
    rows = []
    for combo in itertools.product(*grids):
        changes = {}
        for name, value in zip(names, combo):
            if name == "phi_offset":
                changes["phi_c"] = spec.phi_w + value
            else:
                changes[name] = value
        params = spec.base.replace(**changes)
        path = sample_path(params, spec.n_samples, offset=0.5)
        f_bar = average_force(const, shear, path, spec.phi_w)
        d_f = delta_force(const, shear, path, spec.phi_w, params.phi_c)
        rows.append((*combo, f_bar, d_f))
    table = np.array(rows, dtype=float)
    out = {name: table[:, i] for i, name in enumerate(names)}
    out["f_bar"] = table[:, len(names)]
    out["delta_f"] = table[:, len(names) + 1]
    scale = np.max(out["f_bar"]) if spec.normalize else 1.0
    out["f_bar_norm"] = out["f_bar"] / scale
    return out


def analysis_path(params: PathParams, n: int = ANALYSIS_SAMPLES):
    """Midpoint-sampled path used for all quasi-static averages."""
    return sample_path(params, n, offset=0.5)
