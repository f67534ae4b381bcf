"""Batch experiments on the point-mass simulator and the quasi-static model."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .adaptation import AdaptConfig, QuasiStaticPlant, run_stub
from .path import PathParams, left_mask
from .sensors import AngleSensor, ForceSensor
from .sim import BodyParams, ControllerParams, SimOutput, simulate
from .traction import AeroParams, analysis_path, average_force, delta_force, derive_constants
from .wind import DirectionSchedule, ShearParams, TurbulenceParams, WindEnvironment


@dataclass(frozen=True)
class SimSetup:
    """Everything a fixed-command simulation run needs besides the path."""

    shear: ShearParams = field(default_factory=ShearParams)
    body: BodyParams = field(default_factory=BodyParams)
    controller: ControllerParams = field(default_factory=ControllerParams)
    phi_w: float = 0.0
    duration: float = 60.0
    dt: float = 0.02
    skip_loops: int = 5

    def environment(self, turbulence: TurbulenceParams | None = None) -> WindEnvironment:
        return WindEnvironment.build(
            self.shear, DirectionSchedule.constant(self.phi_w), turbulence,
            duration=self.duration, dt=self.dt, tether_length=self.body.aero.r,
        )


def per_loop_forces(out: SimOutput, phi_c: float, skip_loops: int = 0):
    """Per-loop average tension and left-minus-right difference.

    Loops are delimited by the controller's loop events; the partial loop
    before the first event and the trailing partial loop are dropped, as are
    ``skip_loops`` further loops at the start.

    Returns
    -------
    f_bar, delta_f : numpy.ndarray
    """
    ends = out.loop_indices
    f_bar, d_f = [], []
    for a, b in zip(ends[skip_loops:-1], ends[skip_loops + 1 :]):
        phi = out.phi[a + 1 : b + 1]
        f = out.tension[a + 1 : b + 1]
        left = left_mask(phi, phi_c)
        if left.all() or not left.any():
            continue
        f_bar.append(f.mean())
        d_f.append(f[left].mean() - f[~left].mean())
    return np.array(f_bar), np.array(d_f)


def fixed_command_stats(setup: SimSetup, path: PathParams, turbulence: TurbulenceParams | None = None):
    """Mean over loops of ``(f_bar, delta_f)`` for one commanded path."""
    out = simulate(setup.environment(turbulence), setup.body, setup.controller, path, setup.duration, setup.dt)
    f_bar, d_f = per_loop_forces(out, path.phi_c, setup.skip_loops)
    return float(f_bar.mean()), float(d_f.mean())


def cross_model_grid(setup: SimSetup, base: PathParams, offsets, theta_cs, n_samples: int = 400) -> dict:
    """Simulated and quasi-static ``F_bar``/``Delta F_bar`` on an (offset, theta_c) grid.

    Arrays are shaped ``(len(offsets), len(theta_cs))``.
    """
    offsets = np.asarray(offsets, dtype=float)
    theta_cs = np.asarray(theta_cs, dtype=float)
    const = derive_constants(setup.body.aero)
    shape = (offsets.size, theta_cs.size)
    out = {k: np.zeros(shape) for k in ("sim_f_bar", "sim_delta_f", "qs_f_bar", "qs_delta_f")}
    for i, off in enumerate(offsets):
        for j, th in enumerate(theta_cs):
            path = base.replace(phi_c=setup.phi_w + off, theta_c=th)
            out["sim_f_bar"][i, j], out["sim_delta_f"][i, j] = fixed_command_stats(setup, path)
            ap = analysis_path(path, n_samples)
            out["qs_f_bar"][i, j] = average_force(const, setup.shear, ap, setup.phi_w)
            out["qs_delta_f"][i, j] = delta_force(const, setup.shear, ap, setup.phi_w, path.phi_c)
    out["offsets"] = offsets
    out["theta_cs"] = theta_cs
    return out


def grid_argmax(values, offsets, theta_cs) -> tuple[float, float]:
    i, j = np.unravel_index(np.argmax(values), np.shape(values))
    return float(offsets[i]), float(theta_cs[j])


def zero_crossing(x, y) -> float:
    """First sign change of ``y(x)`` located by linear interpolation; NaN if none."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(y == 0.0):
        return float(x[np.flatnonzero(y == 0.0)[0]])
    k = np.flatnonzero(np.diff(np.sign(y)) != 0)
    if k.size == 0:
        return float("nan")
    k = k[0]
    return float(x[k] - y[k] * (x[k + 1] - x[k]) / (y[k + 1] - y[k]))


def inclination_study(setup: SimSetup, base: PathParams, betas, offsets) -> dict:
    """Aligned ``F_bar`` and the ``Delta F_bar`` zero crossing for each inclination."""
    offsets = np.asarray(offsets, dtype=float)
    f_aligned, crossing = [], []
    for beta in betas:
        path = base.replace(beta=beta)
        f_aligned.append(fixed_command_stats(setup, path.replace(phi_c=setup.phi_w))[0])
        d_f = [fixed_command_stats(setup, path.replace(phi_c=setup.phi_w + o))[1] for o in offsets]
        crossing.append(zero_crossing(offsets, d_f))
    return {"beta": np.asarray(betas, dtype=float), "f_bar_aligned": np.array(f_aligned),
            "zero_crossing": np.array(crossing)}


def windowed_means(values, n_avg: int) -> np.ndarray:
    """Means of consecutive non-overlapping windows of ``n_avg`` values."""
    values = np.asarray(values, dtype=float)
    n = values.size // n_avg
    return values[: n * n_avg].reshape(n, n_avg).mean(axis=1)


def _turbulent_loops(setup: SimSetup, path: PathParams, intensity: float, seed: int):
    turb = TurbulenceParams(intensity, seed=seed, enabled=True)
    out = simulate(setup.environment(turb), setup.body, setup.controller, path, setup.duration, setup.dt)
    return per_loop_forces(out, path.phi_c, setup.skip_loops)[1]


def turbulence_band_study(setup: SimSetup, base: PathParams, offsets, seeds, n_avgs=(1, 3, 5, 8),
                          intensity: float = 0.05, threads: int = 1) -> dict:
    """Width of the azimuth band where averaged ``Delta F_bar`` has ambiguous sign.

    Each (offset, seed) pair flies the fixed command for ``setup.duration``.
    Per-loop differences are averaged over non-overlapping windows of
    ``n_avg`` loops. Across all seeds the largest and smallest windowed value
    at each offset form an upper and a lower envelope; the band runs from the
    lower envelope's zero crossing to the upper one's.

    Returns
    -------
    dict
        ``n_avg``, ``band``, ``lower_edge``, ``upper_edge`` arrays plus the
        per-offset envelopes ``upper`` and ``lower`` shaped
        ``(len(n_avgs), len(offsets))``.
    """
    offsets = np.asarray(offsets, dtype=float)
    jobs = [(o, s) for o in offsets for s in seeds]

    def work(job):
        off, seed = job
        return _turbulent_loops(setup, base.replace(phi_c=setup.phi_w + off), intensity, seed)

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            loops = list(pool.map(work, jobs))
    else:
        loops = [work(j) for j in jobs]
    upper = np.zeros((len(n_avgs), offsets.size))
    lower = np.zeros_like(upper)
    for k, n_avg in enumerate(n_avgs):
        for i in range(offsets.size):
            chunks = [windowed_means(loops[i * len(seeds) + j], n_avg) for j in range(len(seeds))]
            vals = np.concatenate(chunks)
            upper[k, i] = vals.max()
            lower[k, i] = vals.min()
    lo_edge = np.array([zero_crossing(offsets, row) for row in lower])
    hi_edge = np.array([zero_crossing(offsets, row) for row in upper])
    return {
        "n_avg": np.asarray(n_avgs), "band": hi_edge - lo_edge, "lower_edge": lo_edge, "upper_edge": hi_edge,
        "upper": upper, "lower": lower, "offsets": offsets,
    }


def sensor_study(plant: QuasiStaticPlant, config: AdaptConfig, phi_c: float, theta_c: float, n_decisions: int,
                 angle_sensor: AngleSensor, force_sensor: ForceSensor):
    """Paired decision logs: ideal measurements versus corrupted ones."""
    clean = run_stub(plant, config, phi_c, theta_c, n_decisions)
    noisy_plant = QuasiStaticPlant(plant.const, plant.shear, plant.base, plant.phi_w, plant.n_samples,
                                   angle_sensor, force_sensor)
    noisy = run_stub(noisy_plant, config, phi_c, theta_c, n_decisions)
    return clean.decision_log, noisy.decision_log


def same_decisions(a, b, tol: float = 1e-9) -> bool:
    """Decision logs agree in phase and commanded center at every step."""
    if len(a) != len(b):
        return False
    return all(
        x.phase == y.phase and abs(x.phi_c - y.phi_c) <= tol and abs(x.theta_c - y.theta_c) <= tol
        for x, y in zip(a, b)
    )


def sign_preservation(const, shear: ShearParams, base: PathParams, offsets, force_sensor: ForceSensor,
                      angle_sensor: AngleSensor | None = None, n_samples: int = 500, phi_w: float = 0.0):
    """Signs of true and sensor-corrupted ``Delta F_bar`` over azimuth offsets."""
    true_sign, meas_sign = [], []
    for off in offsets:
        path = analysis_path(base.replace(phi_c=phi_w + off), n_samples)
        true_sign.append(np.sign(delta_force(const, shear, path, phi_w, phi_w + off)))
        plant = QuasiStaticPlant(const, shear, base, phi_w, n_samples, angle_sensor, force_sensor)
        phi, _, f = plant.loop_samples(phi_w + off, base.theta_c)
        left = left_mask(phi, phi_w + off)
        meas_sign.append(np.sign(f[left].mean() - f[~left].mean()))
    return np.array(true_sign), np.array(meas_sign)


def default_constants(aero: AeroParams | None = None):
    return derive_constants(aero or AeroParams())


def optimal_theta(shear: ShearParams) -> float:
    return math.atan(math.sqrt(shear.alpha))
