"""Independent reference values for the quasi-static force model.

Uses mpmath at 30 digits for closed-form quantities and scipy quadrature
over the continuous figure eight for path averages, so nothing here shares
code or sampling with the package. Run: python3 oracles/quasistatic.py
"""
import math

import mpmath as mp
from scipy.integrate import quad

mp.mp.dps = 30

RHO, AREA, CL, CD, CDL, NL, DL, R = 1.225, 9, 0.8, 0.134, 1.2, 3, 0.003, 30
W0, Z0, ALPHA = 5, 4, 0.1


def constants():
    a_l = mp.mpf(NL) * R * mp.mpf("0.003")
    cdeq = mp.mpf("0.134") + mp.mpf("1.2") * a_l / (4 * AREA)
    e = mp.mpf("0.8") / cdeq
    c = mp.mpf("0.5") * mp.mpf("1.225") * AREA * mp.mpf("0.8") * e**2 * (1 + 1 / e**2) ** mp.mpf("1.5")
    return a_l, cdeq, e, c


def v(theta):
    w = W0 * (R * math.sin(theta) / Z0) ** ALPHA
    return (w * math.cos(theta)) ** 2


def path(s, pc, tc, a, b):
    return pc + a * math.sin(2 * math.pi * s), tc - b * math.sin(4 * math.pi * s)


def f_avg(pc, tc, a, b, c):
    def integrand(s):
        p, t = path(s, pc, tc, a, b)
        return c * v(t) * math.cos(p) ** 2
    return quad(integrand, 0, 1, limit=200, epsabs=1e-10)[0]


def delta_f(pc, tc, a, b, c):
    # left half is s in (0, 0.5) where sin(2 pi s) > 0
    def integrand(s):
        p, t = path(s, pc, tc, a, b)
        return c * v(t) * math.cos(p) ** 2
    left = quad(integrand, 0, 0.5, limit=200)[0] / 0.5
    right = quad(integrand, 0.5, 1, limit=200)[0] / 0.5
    return left - right


def main():
    a_l, cdeq, e, c = constants()
    print("A_l", a_l, "C_Deq", cdeq, "E_eq", e, "C", c)
    theta_star = mp.atan(mp.sqrt(mp.mpf("0.1")))
    z = 30 * mp.sin(theta_star)
    w = 5 * (z / 4) ** mp.mpf("0.1")
    vstar = (w * mp.cos(theta_star)) ** 2
    print("theta*", theta_star, "z*", z, "W(z*)", w, "v(theta*)", vstar, "F*", c * vstar)
    print("W(9.0483)", 5 * (mp.mpf("9.0483") / 4) ** mp.mpf("0.1"))

    # grid search for the elevation optimum at 1e-4 resolution
    best = max((v(k * 1e-4), k * 1e-4) for k in range(1, int((math.pi / 2) / 1e-4)))
    print("grid theta*", best[1])

    c = float(c)
    ts = float(theta_star)
    base = f_avg(0, ts, 0.3, 0.1, c)
    for label, pc, tc in (("20deg phi", math.radians(20), ts), ("45deg phi", math.radians(45), ts),
                          ("20deg both", math.radians(20), ts + math.radians(20))):
        print("loss", label, 1 - f_avg(pc, tc, 0.3, 0.1, c) / base)
    print("phi span 0.1->0.5 at theta_c=0.2, theta_span 0.1:",
          1 - f_avg(0, 0.2, 0.5, 0.1, c) / f_avg(0, 0.2, 0.1, 0.1, c))
    print("theta span 0.04->0.2 at theta_c=0.2, phi_span 0.3:",
          1 - f_avg(0, 0.2, 0.3, 0.2, c) / f_avg(0, 0.2, 0.3, 0.04, c))
    for a in (0.1, 0.3, 0.5):
        print("delta_f at offset 0.3, phi_span", a, delta_f(0.3, ts, a, 0.1, c))
    print("delta_f at offset 0.2 (spans 0.3/0.1)", delta_f(0.2, ts, 0.3, 0.1, c))


if __name__ == "__main__":
    main()
