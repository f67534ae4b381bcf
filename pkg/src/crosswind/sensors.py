"""Measurement error models for angle encoders and the tether force sensor."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError


@dataclass
class AngleSensor:
    """Encoder pair for ``(phi, theta)``: uniform quantization then noise.

    The grid is ``2 pi / 2**resolution_bits`` with round-to-nearest.
    """

    resolution_bits: int = 10
    noise_std: float = 0.0
    seed: int = 0
    rng: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        if not 8 <= self.resolution_bits <= 24:
            raise ParameterError(f"resolution_bits={self.resolution_bits} outside [8, 24]")
        if self.noise_std < 0.0:
            raise ParameterError("noise_std must be non-negative")
        self.rng = np.random.default_rng(self.seed)

    @property
    def step(self) -> float:
        return 2.0 * math.pi / 2**self.resolution_bits

    def quantize(self, angle):
        return np.round(np.asarray(angle, dtype=float) / self.step) * self.step

    def measure(self, phi, theta):
        """Corrupted ``(phi, theta)``; scalars or equal-length arrays."""
        phi_q, theta_q = self.quantize(phi), self.quantize(theta)
        if self.noise_std > 0.0:
            phi_q = phi_q + self.rng.normal(0.0, self.noise_std, np.shape(phi_q))
            theta_q = theta_q + self.rng.normal(0.0, self.noise_std, np.shape(theta_q))
        if np.ndim(phi_q) == 0:
            return float(phi_q), float(theta_q)
        return phi_q, theta_q


@dataclass
class ForceSensor:
    """Load cell with gain error, fixed offset and additive noise (N)."""

    gain_error: float = 0.0
    offset: float = 0.0
    noise_std: float = 0.0
    seed: int = 0
    rng: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        if not abs(self.gain_error) < 1.0:
            raise ParameterError(f"|gain_error|={abs(self.gain_error)} must be below 1")
        if self.noise_std < 0.0:
            raise ParameterError("noise_std must be non-negative")
        self.rng = np.random.default_rng(self.seed)

    def measure(self, f):
        """``f (1 + gain_error) + offset + noise`` for scalar or array ``f``."""
        f = np.asarray(f, dtype=float)
        if np.any(f < 0.0):
            raise ParameterError("force must be non-negative")
        out = f * (1.0 + self.gain_error) + self.offset
        if self.noise_std > 0.0:
            out = out + self.rng.normal(0.0, self.noise_std, f.shape)
        return float(out) if out.ndim == 0 else out


def measure_angles(sensor: AngleSensor, phi, theta):
    return sensor.measure(phi, theta)


def measure_force(sensor: ForceSensor, f):
    return sensor.measure(f)


def ideal_sensors() -> tuple[AngleSensor, ForceSensor]:
    """24-bit noiseless encoders and a perfect load cell."""
    return AngleSensor(24, 0.0), ForceSensor()
