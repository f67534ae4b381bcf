"""Independent reference for the point-mass dynamics.

Integrates the wing in Cartesian coordinates with the tether as an ideal
constraint (tension from the radial balance) using scipy's DOP853 at tight
tolerances, then converts back to (phi, theta). Shares no code with the
package. Run: python3 oracles/dynamics.py
"""
import math

import numpy as np
from scipy.integrate import solve_ivp
from scipy.special import ellipk

R, M = 30.0, 2.45 + 0.5 * 0.01 * 30.0
G = 9.81
Q = 0.5 * 1.225 * 9.0
CL = 0.8
CDEQ = 0.134 + 1.2 * (3 * 30 * 0.003) / (4 * 9.0)


def wind(p):
    z = p[2]
    speed = 5.0 * (z / 4.0) ** 0.1 if z > 0 else 0.0
    return np.array([speed, 0.0, 0.0])


def aero(p, v, psi):
    e_r = p / np.linalg.norm(p)
    wa = wind(p) - v
    s = np.linalg.norm(wa)
    u = wa / s
    l0 = e_r - (e_r @ u) * u
    l0 /= np.linalg.norm(l0)
    lift_dir = math.cos(psi) * l0 + math.sin(psi) * np.cross(u, l0)
    return Q * s * s * (CDEQ * u + CL * lift_dir)


def rhs(t, y, psi, with_aero=True):
    p, v = y[:3], y[3:]
    f = np.array([0.0, 0.0, -M * G])
    if with_aero:
        f = f + aero(p, v, psi)
    e_r = p / np.linalg.norm(p)
    # ideal tether: remove the radial part and add centripetal acceleration
    a = f / M - ((f @ e_r) / M + (v @ v) / np.linalg.norm(p)) * e_r
    return np.concatenate([v, a])


def to_cartesian(phi, theta, phi_dot, theta_dot):
    e_r = np.array([math.cos(theta) * math.cos(phi), math.cos(theta) * math.sin(phi), math.sin(theta)])
    e_th = np.array([-math.sin(theta) * math.cos(phi), -math.sin(theta) * math.sin(phi), math.cos(theta)])
    e_ph = np.array([-math.sin(phi), math.cos(phi), 0.0])
    return np.concatenate([R * e_r, R * theta_dot * e_th + R * math.cos(theta) * phi_dot * e_ph])


def to_spherical(y):
    p, v = y[:3], y[3:]
    theta = math.asin(p[2] / np.linalg.norm(p))
    phi = math.atan2(p[1], p[0])
    e_th = np.array([-math.sin(theta) * math.cos(phi), -math.sin(theta) * math.sin(phi), math.cos(theta)])
    e_ph = np.array([-math.sin(phi), math.cos(phi), 0.0])
    return phi, theta, (v @ e_ph) / (R * math.cos(theta)), (v @ e_th) / R


def angular_accel(phi, theta, phi_dot, theta_dot, psi):
    y = to_cartesian(phi, theta, phi_dot, theta_dot)
    a = rhs(0.0, y, psi)[3:]
    e_th = np.array([-math.sin(theta) * math.cos(phi), -math.sin(theta) * math.sin(phi), math.cos(theta)])
    e_ph = np.array([-math.sin(phi), math.cos(phi), 0.0])
    # a . e_theta = r theta_dd + r sin cos phi_dot^2 ; a . e_phi = r cos phi_dd - 2 r sin theta_dot phi_dot
    theta_dd = (a @ e_th) / R - math.sin(theta) * math.cos(theta) * phi_dot**2
    phi_dd = ((a @ e_ph) / R + 2 * math.sin(theta) * theta_dot * phi_dot) / math.cos(theta)
    return phi_dd, theta_dd


def main():
    x0 = (0.1, 0.4, 0.9, 0.2)
    psi = 0.1
    print("accelerations at", x0, "psi", psi, angular_accel(*x0, psi))
    print("accelerations at (0.0, 0.5, 1.0, 0.0) psi 0", angular_accel(0.0, 0.5, 1.0, 0.0, 0.0))
    sol = solve_ivp(rhs, (0, 1.0), to_cartesian(*x0), method="DOP853", rtol=1e-13, atol=1e-12, args=(psi,))
    print("state after 1 s", [f"{v:.15g}" for v in to_spherical(sol.y[:, -1])])
    amp = 0.05
    period = 4 * math.sqrt(R / G) * ellipk(math.sin(amp / 2) ** 2)
    print("pendulum amplitude", amp, "period", f"{period:.12g}", "small-angle", 2 * math.pi * math.sqrt(R / G))


if __name__ == "__main__":
    main()
