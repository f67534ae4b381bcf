"""Wind field: power-law shear, scheduled direction, longitudinal turbulence."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .errors import ConfigError, ParameterError

DEFAULT_LENGTH_SCALE = 50.0


@dataclass(frozen=True)
class ShearParams:
    """Power-law profile ``W(z) = w0 * (z / z0) ** alpha``."""

    w0: float = 5.0
    z0: float = 4.0
    alpha: float = 0.1

    def __post_init__(self):
        if self.w0 < 0.0:
            raise ParameterError(f"w0={self.w0} must be non-negative")
        if self.z0 <= 0.0:
            raise ParameterError(f"z0={self.z0} must be positive")
        if not 0.0 < self.alpha < 1.0:
            raise ParameterError(f"alpha={self.alpha} outside (0, 1)")


def shear_speed(shear: ShearParams, z):
    """Horizontal wind speed at altitude ``z`` (m); scalar or array."""
    z_arr = np.asarray(z, dtype=float)
    if np.any(z_arr < 0.0):
        raise ParameterError("altitude must be non-negative")
    out = shear.w0 * (z_arr / shear.z0) ** shear.alpha
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class TurbulenceParams:
    intensity: float = 0.0
    length_scale: float = DEFAULT_LENGTH_SCALE
    seed: int = 0
    enabled: bool = False

    def __post_init__(self):
        if not 0.0 <= self.intensity <= 0.5:
            raise ParameterError(f"intensity={self.intensity} outside [0, 0.5]")
        if self.length_scale <= 0.0:
            raise ParameterError(f"length_scale={self.length_scale} must be positive")


def kaimal_psd(f, sigma: float, length_scale: float, mean_speed: float):
    """One-sided Kaimal spectrum ``sigma^2 (4L/U) / (1 + 6 f L / U)^(5/3)``."""
    f = np.asarray(f, dtype=float)
    lu = length_scale / mean_speed
    return sigma**2 * 4.0 * lu / (1.0 + 6.0 * f * lu) ** (5.0 / 3.0)


def generate_turbulence(params: TurbulenceParams, mean_speed: float, duration: float, dt: float):
    """Synthesize a longitudinal gust series ``W_delta(k * dt)``.

    Random-phase inverse-spectrum synthesis on the Kaimal spectrum. Bin
    amplitudes are rescaled so the series variance equals
    ``(intensity * mean_speed)**2`` exactly; without that the bins below
    ``1/duration`` would be missing from the total.

    Parameters
    ----------
    params : TurbulenceParams
    mean_speed : float
        Mean wind speed ``U`` (m/s) setting both ``sigma = I U`` and the
        spectrum's time scale.
    duration, dt : float
        Series covers ``[0, duration]`` with spacing ``dt`` (s). The series is
        periodic with period ``len(series) * dt``.

    Returns
    -------
    numpy.ndarray
    """
    if duration <= 0.0 or dt <= 0.0:
        raise ParameterError("duration and dt must be positive")
    n = int(math.ceil(duration / dt)) + 1
    n += n % 2
    sigma = params.intensity * mean_speed
    if sigma == 0.0 or mean_speed <= 0.0:
        return np.zeros(n)
    rng = np.random.default_rng(params.seed)
    k = np.arange(1, n // 2)
    df = 1.0 / (n * dt)
    amp = np.sqrt(2.0 * kaimal_psd(k * df, sigma, params.length_scale, mean_speed) * df)
    amp *= sigma / math.sqrt(0.5 * np.sum(amp**2))
    phases = rng.uniform(0.0, 2.0 * math.pi, size=k.size)
    spec = np.zeros(n // 2 + 1, dtype=complex)
    spec[1 : n // 2] = 0.5 * n * amp * np.exp(1j * phases)
    return np.fft.irfft(spec, n)


class DirectionSchedule:
    """Piecewise-linear wind direction ``phi_W(t)`` with constant extrapolation."""

    def __init__(self, breakpoints: Sequence[Sequence[float]] = ((0.0, 0.0),)):
        pts = [(float(t), float(v)) for t, v in breakpoints]
        if not pts:
            raise ConfigError("direction schedule needs at least one breakpoint")
        times = [t for t, _ in pts]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ConfigError("direction breakpoints must have strictly increasing times")
        self.times = np.array(times)
        self.values = np.array([v for _, v in pts])

    @classmethod
    def constant(cls, phi_w: float) -> "DirectionSchedule":
        return cls([(0.0, phi_w)])

    def __call__(self, t):
        out = np.interp(t, self.times, self.values)
        return float(out) if np.ndim(out) == 0 else out

    def __repr__(self):
        return f"DirectionSchedule({list(zip(self.times.tolist(), self.values.tolist()))})"


def direction_schedule(breakpoints) -> DirectionSchedule:
    return DirectionSchedule(breakpoints)


class WindSample(NamedTuple):
    speed: float
    direction: float
    vector: np.ndarray


@dataclass
class WindEnvironment:
    """Immutable-after-build wind description used by the simulator.

    ``turbulence_series`` holds ``W_delta`` sampled at ``turbulence_dt``; an
    empty array means calm (no gusts).
    """

    shear: ShearParams = field(default_factory=ShearParams)
    schedule: DirectionSchedule = field(default_factory=DirectionSchedule)
    turbulence: TurbulenceParams = field(default_factory=TurbulenceParams)
    turbulence_series: np.ndarray = field(default_factory=lambda: np.zeros(0))
    turbulence_dt: float = 0.02
    mean_speed: float = 0.0

    @classmethod
    def build(
        cls,
        shear: ShearParams | None = None,
        schedule: DirectionSchedule | None = None,
        turbulence: TurbulenceParams | None = None,
        duration: float = 300.0,
        dt: float = 0.02,
        tether_length: float = 30.0,
        mean_speed: float | None = None,
    ) -> "WindEnvironment":
        """Precompute the gust series for ``duration`` seconds.

        ``mean_speed`` defaults to the shear speed at the optimal elevation
        ``arctan(sqrt(alpha))`` for the given tether length.
        """
        shear = shear or ShearParams()
        schedule = schedule or DirectionSchedule()
        turbulence = turbulence or TurbulenceParams()
        if mean_speed is None:
            z_ref = tether_length * math.sin(math.atan(math.sqrt(shear.alpha)))
            mean_speed = shear_speed(shear, z_ref)
        series = np.zeros(0)
        if turbulence.enabled and turbulence.intensity > 0.0:
            series = generate_turbulence(turbulence, mean_speed, duration, dt)
        return cls(shear, schedule, turbulence, series, dt, mean_speed)

    def gust(self, t: float) -> float:
        series = self.turbulence_series
        if series.size == 0:
            return 0.0
        x = (t / self.turbulence_dt) % series.size
        i = int(x)
        w = x - i
        return float((1.0 - w) * series[i] + w * series[(i + 1) % series.size])


def wind_at(env: WindEnvironment, t: float, position) -> WindSample:
    """Wind at time ``t`` and wing position ``(phi, theta, r)``."""
    _, theta, r = position
    if not 0.0 < theta < 0.5 * math.pi:
        raise ParameterError(f"theta={theta} outside the wind window")
    speed = max(0.0, shear_speed(env.shear, r * math.sin(theta)) + env.gust(t))
    direction = env.schedule(t)
    vector = np.array([speed * math.cos(direction), speed * math.sin(direction), 0.0])
    return WindSample(speed, direction, vector)
