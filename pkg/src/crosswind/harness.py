"""Runs a parsed scenario and returns its output tables."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .adaptation import DECISION_COLUMNS, QuasiStaticPlant, run_closed_loop
from .scenario import Scenario
from .sensors import AngleSensor, ForceSensor
from .sim import Simulator
from .studies import SimSetup, fixed_command_stats, same_decisions, sensor_study, sign_preservation, \
    turbulence_band_study
from .traction import SweepSpec, derive_constants, sweep
from .wind import TurbulenceParams, WindEnvironment

# bump a table's version whenever its column set changes
SCHEMA_VERSIONS = {
    "sweep": 1,
    "decisions": 1,
    "loops": 1,
    "summary": 1,
    "trajectory": 1,
    "bands": 1,
    "envelopes": 1,
    "sensor_decisions": 1,
    "sign": 1,
}

SWEEP_COLUMNS = ("f_bar", "delta_f", "f_bar_norm")
SWEEP_SIM_COLUMNS = ("sim_f_bar", "sim_delta_f")
LOOP_COLUMNS = ("loop", "t_end", "f_bar", "f_left", "f_right", "delta_f", "n_samples", "n_left", "n_right",
                "center_phi", "center_theta")
SUMMARY_COLUMNS = ("key", "value")
TRAJECTORY_COLUMNS = ("t", "phi", "theta", "phi_dot", "theta_dot", "psi", "tension", "slack", "wind_speed",
                      "wind_direction", "event")
BAND_COLUMNS = ("n_avg", "band", "lower_edge", "upper_edge")
ENVELOPE_COLUMNS = ("n_avg", "offset", "upper", "lower")
SENSOR_DECISION_COLUMNS = ("decision", "clean_phase", "clean_delta_f", "clean_f_bar", "clean_phi_c",
                           "clean_theta_c", "noisy_phase", "noisy_delta_f", "noisy_f_bar", "noisy_phi_c",
                           "noisy_theta_c", "match")
SIGN_COLUMNS = ("offset", "true_sign", "measured_sign")


@dataclass
class Table:
    columns: tuple
    rows: list


def _setup(sc: Scenario) -> SimSetup:
    return SimSetup(sc.shear, sc.body, sc.controller, sc.wind_direction(0.0), sc.simulation.duration,
                    sc.simulation.dt, sc.simulation.skip_loops)


def _run_sweep(sc: Scenario, threads: int) -> dict:
    exp = sc.experiment
    phi_w = sc.wind_direction(0.0)
    const = derive_constants(sc.aero)
    table = sweep(const, sc.shear, SweepSpec(sc.path, exp.axes, phi_w, exp.n_samples, exp.normalize))
    names = [ax.name for ax in exp.axes]
    columns = tuple(names) + SWEEP_COLUMNS
    data = [table[c] for c in columns]
    if exp.point_mass:
        setup = _setup(sc)
        sim_f, sim_d = [], []
        for i in range(data[0].size):
            changes = {}
            for name in names:
                value = float(table[name][i])
                if name == "phi_offset":
                    changes["phi_c"] = phi_w + value
                else:
                    changes[name] = value
            f, d = fixed_command_stats(setup, sc.path.replace(**changes))
            sim_f.append(f)
            sim_d.append(d)
        columns += SWEEP_SIM_COLUMNS
        data += [np.array(sim_f), np.array(sim_d)]
    return {"sweep": Table(columns, [list(r) for r in zip(*data)])}


def _run_adapt(sc: Scenario, threads: int) -> dict:
    exp = sc.experiment
    turb = TurbulenceParams(sc.turbulence.intensity, sc.turbulence.length_scale, sc.seeds.wind,
                            enabled=sc.turbulence.intensity > 0.0)
    env = WindEnvironment.build(sc.shear, sc.wind_direction, turb, sc.simulation.duration, sc.simulation.dt,
                                sc.aero.r)
    angle = force = None
    if exp.angle_sensor is not None:
        angle = AngleSensor(exp.angle_sensor.resolution_bits, exp.angle_sensor.noise_std, sc.seeds.sensors)
    if exp.force_sensor is not None:
        fs = exp.force_sensor
        force = ForceSensor(fs.gain_error, fs.offset, fs.noise_std, sc.seeds.sensors + 1)
    sim = Simulator(env, sc.body, sc.controller, sc.path, sc.simulation.dt)
    trace = run_closed_loop(sim, sc.adaptation, sc.path, sc.simulation.duration, angle, force)
    decisions = Table(DECISION_COLUMNS, [
        [d.index, d.t, d.phase, d.delta_f, d.f_bar, d.step_phi, d.step_theta, d.phi_c, d.theta_c]
        for d in trace.decisions
    ])
    loops = Table(LOOP_COLUMNS, [
        [i, r.t_end, r.f_bar, r.f_left, r.f_right, r.delta_f, r.n_samples, r.n_left, r.n_right,
         r.measured_center[0], r.measured_center[1]]
        for i, r in enumerate(trace.records)
    ])
    out = trace.output
    final = trace.final_state
    summary = [
        ("duration", sc.simulation.duration),
        ("samples", len(out)),
        ("loops", len(trace.records)),
        ("decisions", len(trace.decisions)),
        ("mean_tension", float(out.tension.mean())),
        ("slack_samples", int(out.slack.sum())),
        ("final_phi_c", final.phi_c),
        ("final_theta_c", final.theta_c),
        ("final_phi_w", sc.wind_direction(float(out.t[-1]))),
    ]
    tables = {"decisions": decisions, "loops": loops, "summary": Table(SUMMARY_COLUMNS, [list(r) for r in summary])}
    if exp.trajectory:
        cols = out.columns()
        tables["trajectory"] = Table(TRAJECTORY_COLUMNS, [list(r) for r in zip(*(cols[c] for c in TRAJECTORY_COLUMNS))])
    return tables


def _run_turbulence_study(sc: Scenario, threads: int) -> dict:
    exp = sc.experiment
    seeds = range(sc.seeds.wind, sc.seeds.wind + sc.seeds.count)
    setup = _setup(sc)
    res = turbulence_band_study(setup, sc.path, exp.offsets, seeds, exp.n_avgs, exp.intensity, threads)
    bands = Table(BAND_COLUMNS, [
        [int(n), b, lo, hi] for n, b, lo, hi in zip(res["n_avg"], res["band"], res["lower_edge"], res["upper_edge"])
    ])
    env_rows = []
    for k, n in enumerate(res["n_avg"]):
        for i, off in enumerate(res["offsets"]):
            env_rows.append([int(n), off, res["upper"][k, i], res["lower"][k, i]])
    return {"bands": bands, "envelopes": Table(ENVELOPE_COLUMNS, env_rows)}


def _run_sensor_study(sc: Scenario, threads: int) -> dict:
    exp = sc.experiment
    const = derive_constants(sc.aero)
    phi_w = sc.wind_direction(0.0)
    plant = QuasiStaticPlant(const, sc.shear, sc.path, phi_w, exp.n_samples)
    a, f = exp.angle_sensor, exp.force_sensor
    clean, noisy = sensor_study(
        plant, sc.adaptation, phi_w + exp.initial_offset, sc.path.theta_c, exp.n_decisions,
        AngleSensor(a.resolution_bits, a.noise_std, sc.seeds.sensors),
        ForceSensor(f.gain_error, f.offset, f.noise_std, sc.seeds.sensors + 1),
    )
    rows = []
    for c, n in zip(clean, noisy):
        rows.append([c.index, c.phase, c.delta_f, c.f_bar, c.phi_c, c.theta_c,
                     n.phase, n.delta_f, n.f_bar, n.phi_c, n.theta_c, int(same_decisions([c], [n]))])
    tables = {"sensor_decisions": Table(SENSOR_DECISION_COLUMNS, rows)}
    if exp.sign_offsets:
        true_s, meas_s = sign_preservation(
            const, sc.shear, sc.path, exp.sign_offsets,
            ForceSensor(f.gain_error, f.offset, f.noise_std, sc.seeds.sensors + 2),
            AngleSensor(a.resolution_bits, a.noise_std, sc.seeds.sensors + 3), exp.n_samples, phi_w,
        )
        tables["sign"] = Table(SIGN_COLUMNS, [[o, int(t), int(m)] for o, t, m in zip(exp.sign_offsets, true_s, meas_s)])
    return tables


_RUNNERS = {
    "sweep": _run_sweep,
    "adapt": _run_adapt,
    "turbulence_study": _run_turbulence_study,
    "sensor_study": _run_sensor_study,
}


def run_scenario(sc: Scenario, threads: int = 1) -> dict:
    """Execute ``sc``; returns ``{table name: Table}``.

    Raises
    ------
    SimulationCrash
        When a simulated run leaves the flyable region.
    """
    return _RUNNERS[sc.kind](sc, max(1, threads))


def format_value(x) -> str:
    """Fixed 9-significant-digit text for numbers; strings pass through."""
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    return f"{x:.9g}"
