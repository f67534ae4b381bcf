"""Variance bookkeeping for the Kaimal synthesis.

Integrates the one-sided Kaimal spectrum analytically over the band a
finite record resolves, showing how much variance an unscaled
inverse-FFT synthesis would miss. Run: python3 oracles/turbulence.py
"""
import math

from scipy.integrate import quad


def kaimal(f, sigma, length, speed):
    lu = length / speed
    return sigma**2 * 4 * lu / (1 + 6 * f * lu) ** (5 / 3)


def main():
    intensity, speed, length = 0.05, 5.4, 50.0
    duration, dt = 300.0, 0.02
    sigma = intensity * speed
    n = math.ceil(duration / dt) + 1
    n += n % 2
    df = 1 / (n * dt)
    total = quad(kaimal, 0, math.inf, args=(sigma, length, speed))[0]
    resolved = quad(kaimal, 0.5 * df, (n // 2 - 0.5) * df, args=(sigma, length, speed))[0]
    print("sigma", sigma, "sigma^2", sigma**2, "integral over all f", total)
    print("resolved fraction", resolved / total, "unscaled std", math.sqrt(resolved))
    print("acceptance band", 0.9 * sigma, 1.1 * sigma)


if __name__ == "__main__":
    main()
