"""Compiled inner loops: wind lookup, point-mass dynamics, RK4, guidance.

Everything here works on scalars and flat float arrays so it compiles under
numba's nopython mode. Array layouts are fixed by the index constants below
and packed by :mod:`crosswind.sim.simulate`.
"""
import math

import numpy as np
from numba import njit

# physical parameter vector
P_R, P_MEFF, P_G, P_Q, P_CL, P_CDEQ, P_W0, P_Z0, P_ALPHA, P_TURB_DT, P_AERO, P_GRAV = range(12)
N_PRM = 12

# controller gains
C_GAIN, C_PSI_MAX, C_LOOKAHEAD, C_TRIM_GAIN, C_TRIM_LIMIT, C_SEARCH = range(6)
N_CPRM = 6

# controller memory
S_PHASE, S_TRIM_PHI, S_TRIM_THETA, S_SUM_PHI, S_SUM_THETA, S_COUNT, S_LOOPS, S_PSI = range(8)
N_CST = 8

# commanded path
K_PHI_C, K_THETA_C, K_PHI_SPAN, K_THETA_SPAN, K_BETA = range(5)

THETA_MIN = 0.01
THETA_MAX = 0.5 * math.pi - 0.01

EVENT_HALF = 1
EVENT_LOOP = 2

STATUS_DONE = 0
STATUS_LOOP = 1
STATUS_CRASH = 2
STATUS_FULL = 3

_TWO_PI = 2.0 * math.pi


@njit(cache=True, nogil=True)
def interp_clamped(t, xs, ys):
    n = xs.shape[0]
    if n == 1 or t <= xs[0]:
        return ys[0]
    if t >= xs[n - 1]:
        return ys[n - 1]
    lo = 0
    hi = n - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if xs[mid] <= t:
            lo = mid
        else:
            hi = mid
    w = (t - xs[lo]) / (xs[hi] - xs[lo])
    return (1.0 - w) * ys[lo] + w * ys[hi]


@njit(cache=True, nogil=True)
def gust(t, turb, turb_dt):
    n = turb.shape[0]
    if n == 0:
        return 0.0
    x = (t / turb_dt) % n
    i = int(x)
    w = x - i
    return (1.0 - w) * turb[i] + w * turb[(i + 1) % n]


@njit(cache=True, nogil=True)
def wind(t, theta, prm, dir_t, dir_v, turb):
    """Wind speed and direction at time t and elevation theta."""
    z = prm[P_R] * math.sin(theta)
    base = 0.0
    if z > 0.0:
        base = prm[P_W0] * (z / prm[P_Z0]) ** prm[P_ALPHA]
    speed = base + gust(t, turb, prm[P_TURB_DT])
    if speed < 0.0:
        speed = 0.0
    return speed, interp_clamped(t, dir_t, dir_v)


@njit(cache=True, nogil=True)
def apparent_local(phi, theta, phi_dot, theta_dot, speed, direction, r):
    """Apparent wind in the right-handed local basis (e_r, e_phi, e_theta)."""
    d = phi - direction
    w_r = speed * math.cos(theta) * math.cos(d)
    w_phi = -speed * math.sin(d)
    w_th = -speed * math.sin(theta) * math.cos(d)
    return w_r, w_phi - r * math.cos(theta) * phi_dot, w_th - r * theta_dot


@njit(cache=True, nogil=True)
def aero_local(a_r, a_phi, a_th, psi, prm):
    """Drag plus rolled lift in the local basis.

    Returns (F_r, F_phi, F_theta, code); code 1 flags zero apparent wind,
    code 2 an apparent wind parallel to e_r. Both return zero force.
    """
    speed2 = a_r * a_r + a_phi * a_phi + a_th * a_th
    if speed2 < 1e-18:
        return 0.0, 0.0, 0.0, 1
    speed = math.sqrt(speed2)
    u_r = a_r / speed
    u_phi = a_phi / speed
    u_th = a_th / speed
    # lift axis at zero roll: e_r projected off the apparent wind
    l_norm2 = 1.0 - u_r * u_r
    if l_norm2 < 1e-18:
        return 0.0, 0.0, 0.0, 2
    l_norm = math.sqrt(l_norm2)
    l_r = (1.0 - u_r * u_r) / l_norm
    l_phi = -u_r * u_phi / l_norm
    l_th = -u_r * u_th / l_norm
    # u x l in (r, phi, theta) order
    x_r = u_phi * l_th - u_th * l_phi
    x_phi = u_th * l_r - u_r * l_th
    x_th = u_r * l_phi - u_phi * l_r
    cp = math.cos(psi)
    sp = math.sin(psi)
    qv = prm[P_Q] * speed2
    lift = qv * prm[P_CL]
    drag = qv * prm[P_CDEQ]
    f_r = drag * u_r + lift * (cp * l_r + sp * x_r)
    f_phi = drag * u_phi + lift * (cp * l_phi + sp * x_phi)
    f_th = drag * u_th + lift * (cp * l_th + sp * x_th)
    return f_r, f_phi, f_th, 0


@njit(cache=True, nogil=True)
def forces(t, phi, theta, phi_dot, theta_dot, psi, prm, dir_t, dir_v, turb):
    """Aerodynamic force components at a state (zero when aero is disabled)."""
    if prm[P_AERO] == 0.0:
        return 0.0, 0.0, 0.0
    speed, direction = wind(t, theta, prm, dir_t, dir_v, turb)
    a_r, a_phi, a_th = apparent_local(phi, theta, phi_dot, theta_dot, speed, direction, prm[P_R])
    f_r, f_phi, f_th, _ = aero_local(a_r, a_phi, a_th, psi, prm)
    return f_r, f_phi, f_th


@njit(cache=True, nogil=True)
def accelerations(t, phi, theta, phi_dot, theta_dot, psi, prm, dir_t, dir_v, turb):
    r = prm[P_R]
    m = prm[P_MEFF]
    g = prm[P_G] * prm[P_GRAV]
    _, f_phi, f_th = forces(t, phi, theta, phi_dot, theta_dot, psi, prm, dir_t, dir_v, turb)
    st = math.sin(theta)
    ct = math.cos(theta)
    a_th = (f_th - m * g * ct) / m
    a_phi = f_phi / m
    theta_dd = a_th / r - st * ct * phi_dot * phi_dot
    phi_dd = a_phi / (r * ct) + 2.0 * (st / ct) * theta_dot * phi_dot
    return phi_dd, theta_dd


@njit(cache=True, nogil=True)
def tension(t, phi, theta, phi_dot, theta_dot, psi, prm, dir_t, dir_v, turb):
    """Radial force balance; returns (tension >= 0, slack flag)."""
    r = prm[P_R]
    m = prm[P_MEFF]
    g = prm[P_G] * prm[P_GRAV]
    f_r, _, _ = forces(t, phi, theta, phi_dot, theta_dot, psi, prm, dir_t, dir_v, turb)
    ct = math.cos(theta)
    f = f_r - m * g * math.sin(theta) + m * r * (theta_dot * theta_dot + ct * ct * phi_dot * phi_dot)
    if f < 0.0:
        return 0.0, 1
    return f, 0


@njit(cache=True, nogil=True)
def rk4(t, x, dt, psi, prm, dir_t, dir_v, turb):
    """One RK4 step of x = (phi, theta, phi_dot, theta_dot) with roll held."""
    p0, q0, pd0, qd0 = x[0], x[1], x[2], x[3]
    h = 0.5 * dt
    a1, b1 = accelerations(t, p0, q0, pd0, qd0, psi, prm, dir_t, dir_v, turb)
    p1, q1, pd1, qd1 = p0 + h * pd0, q0 + h * qd0, pd0 + h * a1, qd0 + h * b1
    a2, b2 = accelerations(t + h, p1, q1, pd1, qd1, psi, prm, dir_t, dir_v, turb)
    p2, q2, pd2, qd2 = p0 + h * pd1, q0 + h * qd1, pd0 + h * a2, qd0 + h * b2
    a3, b3 = accelerations(t + h, p2, q2, pd2, qd2, psi, prm, dir_t, dir_v, turb)
    p3, q3, pd3, qd3 = p0 + dt * pd2, q0 + dt * qd2, pd0 + dt * a3, qd0 + dt * b3
    a4, b4 = accelerations(t + dt, p3, q3, pd3, qd3, psi, prm, dir_t, dir_v, turb)
    k = dt / 6.0
    x[0] = p0 + k * (pd0 + 2.0 * pd1 + 2.0 * pd2 + pd3)
    x[1] = q0 + k * (qd0 + 2.0 * qd1 + 2.0 * qd2 + qd3)
    x[2] = pd0 + k * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
    x[3] = qd0 + k * (b1 + 2.0 * b2 + 2.0 * b3 + b4)


@njit(cache=True, nogil=True)
def propagate(t, x, dt, n, psi, prm, dir_t, dir_v, turb):
    """n RK4 steps without the elevation-band check."""
    for i in range(n):
        rk4(t + i * dt, x, dt, psi, prm, dir_t, dir_v, turb)


@njit(cache=True, nogil=True)
def lissajous(s, phi_c, theta_c, a, b, beta):
    w = _TWO_PI * s
    dp = a * math.sin(w)
    dt = -b * math.sin(2.0 * w)
    if beta != 0.0:
        cb = math.cos(beta)
        sb = math.sin(beta)
        return phi_c + cb * dp - sb * dt, theta_c + sb * dp + cb * dt
    return phi_c + dp, theta_c + dt


@njit(cache=True, nogil=True)
def wrap_angle(x):
    return (x + math.pi) % _TWO_PI - math.pi


@njit(cache=True, nogil=True)
def guidance(phi, theta, phi_dot, theta_dot, path, cprm, cst):
    """Pure-pursuit roll command toward a point ahead on the reference path.

    The reference is the commanded figure eight shifted by the controller's
    trim. Advances the phase estimate in ``cst`` and returns
    ``(psi, event)`` where event is 0, EVENT_HALF or EVENT_LOOP.
    """
    phi_c = path[K_PHI_C] + cst[S_TRIM_PHI]
    theta_c = path[K_THETA_C] + cst[S_TRIM_THETA]
    a = path[K_PHI_SPAN]
    b = path[K_THETA_SPAN]
    beta = path[K_BETA]
    ct = math.cos(theta)

    s_old = cst[S_PHASE]
    window = cprm[C_SEARCH]
    best = 1e300
    s_best = s_old
    n_coarse = 24
    for j in range(n_coarse + 1):
        s = s_old + window * j / n_coarse
        p, q = lissajous(s, phi_c, theta_c, a, b, beta)
        d = (ct * (p - phi)) ** 2 + (q - theta) ** 2
        if d < best:
            best = d
            s_best = s
    h = window / n_coarse
    lo = max(s_old, s_best - h)
    for j in range(21):
        s = lo + 2.0 * h * j / 20
        p, q = lissajous(s, phi_c, theta_c, a, b, beta)
        d = (ct * (p - phi)) ** 2 + (q - theta) ** 2
        if d < best:
            best = d
            s_best = s
    s_new = max(s_old, s_best)
    cst[S_PHASE] = s_new

    event = 0
    cst[S_SUM_PHI] += phi
    cst[S_SUM_THETA] += theta
    cst[S_COUNT] += 1.0
    if math.floor(s_new) > math.floor(s_old):
        event = EVENT_LOOP
        n = cst[S_COUNT]
        lim = cprm[C_TRIM_LIMIT]
        g = cprm[C_TRIM_GAIN]
        tp = cst[S_TRIM_PHI] + g * (path[K_PHI_C] - cst[S_SUM_PHI] / n)
        tq = cst[S_TRIM_THETA] + g * (path[K_THETA_C] - cst[S_SUM_THETA] / n)
        cst[S_TRIM_PHI] = min(lim, max(-lim, tp))
        cst[S_TRIM_THETA] = min(lim, max(-lim, tq))
        cst[S_SUM_PHI] = 0.0
        cst[S_SUM_THETA] = 0.0
        cst[S_COUNT] = 0.0
        cst[S_LOOPS] += 1.0
    elif math.floor(2.0 * s_new) > math.floor(2.0 * s_old):
        event = EVENT_HALF

    p_t, q_t = lissajous(s_new + cprm[C_LOOKAHEAD], phi_c, theta_c, a, b, beta)
    desired = math.atan2(q_t - theta, ct * (p_t - phi))
    if ct * ct * phi_dot * phi_dot + theta_dot * theta_dot < 1e-12:
        err = 0.0
    else:
        err = wrap_angle(desired - math.atan2(theta_dot, ct * phi_dot))
    psi = cprm[C_GAIN] * err
    lim = cprm[C_PSI_MAX]
    psi = min(lim, max(-lim, psi))
    cst[S_PSI] = psi
    return psi, event


@njit(cache=True, nogil=True)
def advance(
    t0, x, dt, substeps, n_max, stop_on_loop,
    prm, dir_t, dir_v, turb, path, cprm, cst,
    out_t, out_x, out_psi, out_f, out_slack, out_ws, out_wd, out_event,
):
    """Run the guidance/dynamics loop for up to ``n_max`` control samples.

    Each sample records the state, roll command, tension and wind at the
    sampling instant, then integrates ``substeps`` RK4 steps with the roll
    held. Returns ``(n_recorded, status, t)``.
    """
    t = t0
    for k in range(n_max):
        t = t0 + k * substeps * dt
        psi, event = guidance(x[0], x[1], x[2], x[3], path, cprm, cst)
        f, slack = tension(t, x[0], x[1], x[2], x[3], psi, prm, dir_t, dir_v, turb)
        ws, wd = wind(t, x[1], prm, dir_t, dir_v, turb)
        out_t[k] = t
        out_x[k, 0] = x[0]
        out_x[k, 1] = x[1]
        out_x[k, 2] = x[2]
        out_x[k, 3] = x[3]
        out_psi[k] = psi
        out_f[k] = f
        out_slack[k] = slack
        out_ws[k] = ws
        out_wd[k] = wd
        out_event[k] = event
        for i in range(substeps):
            rk4(t + i * dt, x, dt, psi, prm, dir_t, dir_v, turb)
            if not (THETA_MIN < x[1] < THETA_MAX) or not np.isfinite(x[1]):
                return k + 1, STATUS_CRASH, t + (i + 1) * dt
        if stop_on_loop and event == EVENT_LOOP:
            return k + 1, STATUS_LOOP, t0 + (k + 1) * substeps * dt
    return n_max, STATUS_DONE, t0 + n_max * substeps * dt
