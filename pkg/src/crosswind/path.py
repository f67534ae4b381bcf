"""Figure-eight path parametrization in the (phi, theta) chart.

A path is fixed by its center ``(phi_c, theta_c)``, half spans and an
inclination ``beta``. The nominal shape is a 1:2 Lissajous curve

    phi_delta(s)   =  phi_span   * sin(2 pi s)
    theta_delta(s) = -theta_span * sin(4 pi s)

rotated rigidly by ``beta`` about the center. Phase ``s`` runs over
``[0, 1)``; the wing dives through the center at ``s = 0`` and ``s = 0.5``
and climbs on both lateral extremes (up-loop).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from .errors import ParameterError

_HALF_PI = 0.5 * math.pi
# slack on the wind-window span bound, so configs typed with rounded decimals pass
_SPAN_EPS = 1e-12


@dataclass(frozen=True)
class PathParams:
    """Commanded path ``(phi_c, theta_c, phi_span, theta_span, beta)``, angles in rad."""

    phi_c: float
    theta_c: float
    phi_span: float
    theta_span: float
    beta: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.theta_c < _HALF_PI:
            raise ParameterError(f"theta_c={self.theta_c} outside (0, pi/2)")
        if self.phi_span <= 0.0:
            raise ParameterError(f"phi_span={self.phi_span} must be positive")
        if self.theta_span <= 0.0:
            raise ParameterError(f"theta_span={self.theta_span} must be positive")
        limit = min(self.theta_c, _HALF_PI - self.theta_c)
        if self.theta_span > limit + _SPAN_EPS:
            raise ParameterError(
                f"theta_span={self.theta_span} leaves the wind window "
                f"(max {limit:.6g} at theta_c={self.theta_c})"
            )
        if not -_HALF_PI <= self.beta <= _HALF_PI:
            raise ParameterError(f"beta={self.beta} outside [-pi/2, pi/2]")

    def replace(self, **changes) -> "PathParams":
        fields = dict(
            phi_c=self.phi_c,
            theta_c=self.theta_c,
            phi_span=self.phi_span,
            theta_span=self.theta_span,
            beta=self.beta,
        )
        fields.update(changes)
        return PathParams(**fields)


class PathPoint(NamedTuple):
    phi: float
    theta: float
    phase: float


class Half(enum.Enum):
    LEFT = "L"
    RIGHT = "R"


def _offsets(params: PathParams, s):
    """Rotated offsets from the path center for phase(s) ``s``."""
    two_pi_s = 2.0 * np.pi * np.asarray(s, dtype=float)
    d_phi = params.phi_span * np.sin(two_pi_s)
    d_theta = -params.theta_span * np.sin(2.0 * two_pi_s)
    if params.beta == 0.0:
        return d_phi, d_theta
    cb, sb = math.cos(params.beta), math.sin(params.beta)
    return cb * d_phi - sb * d_theta, sb * d_phi + cb * d_theta


def figure_eight(params: PathParams, s):
    """Vectorized path evaluation, returns ``(phi, theta)`` arrays."""
    d_phi, d_theta = _offsets(params, s)
    return params.phi_c + d_phi, params.theta_c + d_theta


def figure_eight_point(params: PathParams, s: float) -> PathPoint:
    """Evaluate the commanded figure eight at loop phase ``s``.

    Parameters
    ----------
    params : PathParams
        Commanded path.
    s : float
        Loop phase in ``[0, 1)``.

    Returns
    -------
    PathPoint
    """
    if not 0.0 <= s < 1.0:
        raise ParameterError(f"phase s={s} outside [0, 1)")
    phi, theta = figure_eight(params, s)
    return PathPoint(float(phi), float(theta), float(s))


@dataclass(frozen=True)
class SampledPath:
    """A path discretized into arrays of azimuth, elevation and phase."""

    phi: np.ndarray
    theta: np.ndarray
    phase: np.ndarray

    def __len__(self):
        return len(self.phi)

    def __iter__(self) -> Iterator[PathPoint]:
        for p, t, s in zip(self.phi, self.theta, self.phase):
            yield PathPoint(float(p), float(t), float(s))

    def __getitem__(self, k) -> PathPoint:
        return PathPoint(float(self.phi[k]), float(self.theta[k]), float(self.phase[k]))


def sample_path(params: PathParams, n: int, offset: float = 0.0) -> SampledPath:
    """Sample ``n`` points at phases ``(k + offset) / n``, ``k = 0..n-1``.

    ``offset=0`` puts samples exactly on both center crossings, which the
    ``phi_delta >= 0`` convention assigns to the left half. Force analyses use
    ``offset=0.5`` (midpoint rule) so the two halves mirror each other exactly.
    """
    if n < 4:
        raise ParameterError(f"need at least 4 samples, got {n}")
    if not 0.0 <= offset < 1.0:
        raise ParameterError(f"offset={offset} outside [0, 1)")
    phase = (np.arange(n) + offset) / n
    phi, theta = figure_eight(params, phase)
    return SampledPath(phi, theta, phase)


def as_arrays(path) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(phi, theta)`` arrays from a SampledPath or a sequence of points."""
    if isinstance(path, SampledPath):
        return path.phi, path.theta
    pts: Sequence = list(path)
    if not pts:
        raise ParameterError("empty path")
    arr = np.asarray([(p[0], p[1]) for p in pts], dtype=float)
    return arr[:, 0], arr[:, 1]


def classify_half(point, phi_c: float) -> Half:
    """Left iff ``phi - phi_c >= 0``."""
    return Half.LEFT if point[0] - phi_c >= 0.0 else Half.RIGHT


def left_mask(phi, phi_c: float) -> np.ndarray:
    """Vectorized :func:`classify_half`; True marks left-half samples."""
    return np.asarray(phi, dtype=float) - phi_c >= 0.0
