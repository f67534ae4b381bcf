"""Real-time adaptation of the commanded path center.

Per-sample measurements are folded into loop records; every ``n_avg`` loops
the aggregated average force and left-right difference drive one step of a
coordinate search: azimuth steps while the halves disagree, elevation hill
climbing once they balance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import ParameterError, SequencingError
from .path import PathParams, left_mask, sample_path
from .sensors import AngleSensor, ForceSensor
from .traction import TractionConstants, point_force
from .wind import ShearParams

PHASE_PHI = "phi"
PHASE_THETA = "theta"


class StepRange(NamedTuple):
    min: float
    max: float
    initial: float


@dataclass(frozen=True)
class AdaptConfig:
    """Search tuning.

    ``delta_f_min`` is an absolute threshold in N; when it is ``None`` the
    threshold is ``delta_f_min_rel`` times the aggregated average force of
    the current decision.
    """

    delta_f_min: float | None = None
    delta_f_min_rel: float = 0.03
    n_avg: int = 3
    step_phi: StepRange = StepRange(0.005, 0.06, 0.02)
    step_theta: StepRange = StepRange(0.005, 0.04, 0.015)
    scale_c: float = 1.5
    theta_bounds: tuple[float, float] = (0.08, 1.2)

    def __post_init__(self):
        object.__setattr__(self, "step_phi", StepRange(*self.step_phi))
        object.__setattr__(self, "step_theta", StepRange(*self.step_theta))
        object.__setattr__(self, "theta_bounds", tuple(self.theta_bounds))
        if self.delta_f_min is not None and self.delta_f_min <= 0.0:
            raise ParameterError("delta_f_min must be positive")
        if self.delta_f_min is None and self.delta_f_min_rel <= 0.0:
            raise ParameterError("delta_f_min_rel must be positive")
        if self.n_avg < 1:
            raise ParameterError("n_avg must be at least 1")
        for name in ("step_phi", "step_theta"):
            lo, hi, init = getattr(self, name)
            if not 0.0 < lo <= init <= hi:
                raise ParameterError(f"{name} needs 0 < min <= initial <= max, got {(lo, hi, init)}")
        if self.scale_c <= 1.0:
            raise ParameterError("scale_c must exceed 1")
        lo, hi = self.theta_bounds
        if not 0.0 < lo < hi < 0.5 * math.pi:
            raise ParameterError(f"theta_bounds {self.theta_bounds} invalid")

    def threshold(self, f_bar: float) -> float:
        if self.delta_f_min is not None:
            return self.delta_f_min
        return self.delta_f_min_rel * abs(f_bar)


@dataclass(frozen=True)
class LoopRecord:
    f_bar: float
    f_left: float
    f_right: float
    delta_f: float
    n_samples: int
    n_left: int
    n_right: int
    measured_center: tuple[float, float]
    t_end: float = float("nan")


@dataclass(frozen=True)
class Aggregate:
    """Averages over ``n_avg`` closed loops that trigger one decision."""

    t: float
    f_bar: float
    delta_f: float
    records: tuple


@dataclass(frozen=True)
class Decision:
    index: int
    t: float
    phase: str
    delta_f: float
    f_bar: float
    step_phi: float
    step_theta: float
    phi_c: float
    theta_c: float


DECISION_COLUMNS = ("decision", "t", "phase", "delta_f", "f_bar", "step_phi", "step_theta", "phi_c", "theta_c")


@dataclass
class _OpenLoop:
    n: int = 0
    n_left: int = 0
    sum_f: float = 0.0
    sum_left: float = 0.0
    sum_phi: float = 0.0
    sum_theta: float = 0.0

    def close(self, t) -> LoopRecord:
        n_right = self.n - self.n_left
        f_left = self.sum_left / self.n_left if self.n_left else float("nan")
        f_right = (self.sum_f - self.sum_left) / n_right if n_right else float("nan")
        return LoopRecord(
            self.sum_f / self.n, f_left, f_right, f_left - f_right, self.n, self.n_left, n_right,
            (self.sum_phi / self.n, self.sum_theta / self.n), t,
        )


@dataclass
class AdaptState:
    """Commanded center, search memory, loop buffer and decision history.

    ``prev_delta_f`` is ``None`` until the first decision; the first azimuth
    step then keeps its initial size.
    """

    config: AdaptConfig
    phi_c: float
    theta_c: float
    prev_delta_f: float | None = None
    prev_f_bar: float = 0.0
    prev_theta_c: float = 0.0
    cur_step_phi: float = 0.0
    cur_step_theta: float = 0.0
    loop_buffer: list = field(default_factory=list)
    decision_log: list = field(default_factory=list)
    records: list = field(default_factory=list)
    last_t: float = -math.inf
    theta_bounds: tuple | None = None
    _open: _OpenLoop = field(default_factory=_OpenLoop, repr=False)

    def __post_init__(self):
        if self.theta_bounds is None:
            self.theta_bounds = self.config.theta_bounds

    @classmethod
    def initial(cls, config: AdaptConfig, phi_c: float, theta_c: float, theta_bounds=None) -> "AdaptState":
        lo, hi = theta_bounds or config.theta_bounds
        if not lo <= theta_c <= hi:
            raise ParameterError(f"initial theta_c={theta_c} outside {(lo, hi)}")
        return cls(
            config, phi_c, theta_c,
            prev_theta_c=theta_c - config.step_theta.initial,
            cur_step_phi=config.step_phi.initial,
            cur_step_theta=config.step_theta.initial,
            theta_bounds=(lo, hi),
        )

    def path(self, base: PathParams) -> PathParams:
        return base.replace(phi_c=self.phi_c, theta_c=self.theta_c)


def _aggregate(state: AdaptState, t: float) -> Aggregate | None:
    if len(state.loop_buffer) < state.config.n_avg:
        return None
    recs = tuple(state.loop_buffer)
    state.loop_buffer.clear()
    n_total = sum(r.n_samples for r in recs)
    f_bar = sum(r.f_bar * r.n_samples for r in recs) / n_total
    delta_f = float(np.mean([r.delta_f for r in recs]))
    return Aggregate(t, f_bar, delta_f, recs)


def _close_loop(state: AdaptState, t: float) -> Aggregate | None:
    if state._open.n == 0:
        return None
    rec = state._open.close(t)
    state._open = _OpenLoop()
    state.records.append(rec)
    state.loop_buffer.append(rec)
    return _aggregate(state, t)


def accumulate(state: AdaptState, t: float, phi, theta, f, loop_complete: bool = False) -> Aggregate | None:
    """Add one measured sample; returns an aggregate when a decision is due.

    The sample is classified against the commanded ``phi_c``. A sample that
    carries ``loop_complete`` is the last one of its loop.
    """
    if not t > state.last_t:
        raise SequencingError(f"sample time {t} does not follow {state.last_t}")
    state.last_t = t
    o = state._open
    o.n += 1
    o.sum_f += f
    o.sum_phi += phi
    o.sum_theta += theta
    if phi - state.phi_c >= 0.0:
        o.n_left += 1
        o.sum_left += f
    if loop_complete:
        return _close_loop(state, t)
    return None


def accumulate_block(state: AdaptState, t, phi, theta, f, loop_complete) -> list:
    """Vectorized :func:`accumulate` over arrays; returns triggered aggregates.

    Every sample of the block is classified against the ``phi_c`` held on
    entry, so feed blocks that end at a loop boundary when decisions may
    change the command.
    """
    t = np.asarray(t, dtype=float)
    if t.size == 0:
        return []
    if not t[0] > state.last_t or np.any(np.diff(t) <= 0.0):
        raise SequencingError("sample times must be strictly increasing")
    phi = np.asarray(phi, dtype=float)
    theta = np.asarray(theta, dtype=float)
    f = np.asarray(f, dtype=float)
    ends = np.flatnonzero(np.asarray(loop_complete, dtype=bool))
    out = []
    start = 0
    for stop in list(ends + 1) + [t.size]:
        if stop <= start:
            continue
        seg = slice(start, stop)
        left = left_mask(phi[seg], state.phi_c)
        o = state._open
        o.n += stop - start
        o.n_left += int(left.sum())
        o.sum_f += float(f[seg].sum())
        o.sum_left += float(f[seg][left].sum())
        o.sum_phi += float(phi[seg].sum())
        o.sum_theta += float(theta[seg].sum())
        state.last_t = float(t[stop - 1])
        if stop - 1 in ends:
            agg = _close_loop(state, state.last_t)
            if agg is not None:
                out.append(agg)
        start = stop
    return out


def _grow(step, rng: StepRange, c):
    return min(rng.max, c * step)


def _shrink(step, rng: StepRange, c):
    return max(rng.min, step / c)


def decide(state: AdaptState, config: AdaptConfig, f_bar: float, delta_f: float, t: float = float("nan")):
    """One coordinate-search step; updates ``state`` and returns ``(phi_c, theta_c)``.

    Parameters
    ----------
    state : AdaptState
        Commanded center and search memory; modified in place and the
        decision appended to ``state.decision_log``.
    config : AdaptConfig
    f_bar, delta_f : float
        Aggregated average force and left-minus-right difference (N).
    t : float, optional
        Time stamp for the log.

    Returns
    -------
    tuple of float
        New commanded ``(phi_c, theta_c)``.
    """
    c = config.scale_c
    theta_now = state.theta_c
    if abs(delta_f) > config.threshold(f_bar):
        phase = PHASE_PHI
        prev = state.prev_delta_f
        same_sign = prev is not None and (prev > 0.0 if delta_f > 0.0 else prev < 0.0)
        if prev is None:
            pass
        elif same_sign:
            state.cur_step_phi = _grow(state.cur_step_phi, config.step_phi, c)
        else:
            state.cur_step_phi = _shrink(state.cur_step_phi, config.step_phi, c)
        state.phi_c += state.cur_step_phi if delta_f > 0.0 else -state.cur_step_phi
    else:
        phase = PHASE_THETA
        descending = state.prev_theta_c > theta_now
        if state.prev_f_bar < f_bar:
            state.cur_step_theta = _grow(state.cur_step_theta, config.step_theta, c)
            step = -state.cur_step_theta if descending else state.cur_step_theta
        else:
            state.cur_step_theta = _shrink(state.cur_step_theta, config.step_theta, c)
            step = state.cur_step_theta if descending else -state.cur_step_theta
        lo, hi = state.theta_bounds
        state.theta_c = min(hi, max(lo, theta_now + step))
    state.prev_delta_f = delta_f
    state.prev_f_bar = f_bar
    state.prev_theta_c = theta_now
    state.decision_log.append(
        Decision(len(state.decision_log), t, phase, delta_f, f_bar,
                 state.cur_step_phi, state.cur_step_theta, state.phi_c, state.theta_c)
    )
    return state.phi_c, state.theta_c


@dataclass
class QuasiStaticPlant:
    """Force oracle without dynamics: a loop is the sampled commanded path.

    Each loop feeds ``n_samples`` path points, with their quasi-static point
    forces, through the sensors into the adaptation state.
    """

    const: TractionConstants
    shear: ShearParams
    base: PathParams
    phi_w: float = 0.0
    n_samples: int = 500
    angle_sensor: AngleSensor | None = None
    force_sensor: ForceSensor | None = None

    def loop_samples(self, phi_c: float, theta_c: float):
        path = sample_path(self.base.replace(phi_c=phi_c, theta_c=theta_c), self.n_samples, offset=0.5)
        phi, theta = path.phi, path.theta
        f = point_force(self.const, self.shear, phi, theta, self.phi_w)
        if self.angle_sensor is not None:
            phi, theta = self.angle_sensor.measure(phi, theta)
        if self.force_sensor is not None:
            f = self.force_sensor.measure(f)
        return phi, theta, f


def run_stub(plant: QuasiStaticPlant, config: AdaptConfig, phi_c: float, theta_c: float,
             n_decisions: int) -> AdaptState:
    """Drive :func:`decide` with the quasi-static plant for ``n_decisions``."""
    state = AdaptState.initial(config, phi_c, theta_c)
    t = 0.0
    while len(state.decision_log) < n_decisions:
        phi, theta, f = plant.loop_samples(state.phi_c, state.theta_c)
        n = phi.size
        times = t + np.arange(1, n + 1)
        t += n
        flags = np.zeros(n, dtype=bool)
        flags[-1] = True
        for agg in accumulate_block(state, times, phi, theta, f, flags):
            decide(state, config, agg.f_bar, agg.delta_f, agg.t)
    return state


@dataclass
class AdaptTrace:
    decisions: list
    records: list
    output: object = None
    final_state: AdaptState | None = None

    def decision_table(self) -> dict:
        return {
            name: np.array([getattr(d, attr) for d in self.decisions])
            for name, attr in zip(DECISION_COLUMNS, ("index",) + DECISION_COLUMNS[1:])
        }


GROUND_CLEARANCE = 0.1


def flyable_bounds(config: AdaptConfig, base: PathParams) -> tuple[float, float]:
    """``theta_bounds`` narrowed so the whole path keeps ``GROUND_CLEARANCE``
    rad above the horizon and below the zenith."""
    reach = abs(base.theta_span * math.cos(base.beta)) + abs(base.phi_span * math.sin(base.beta))
    lo, hi = config.theta_bounds
    lo = max(lo, reach + GROUND_CLEARANCE)
    hi = min(hi, 0.5 * math.pi - reach - GROUND_CLEARANCE)
    if lo >= hi:
        raise ParameterError("path spans leave no flyable elevation range")
    return lo, hi


def run_closed_loop(sim, config: AdaptConfig, initial: PathParams, duration: float,
                    angle_sensor: AngleSensor | None = None, force_sensor: ForceSensor | None = None,
                    keep_output: bool = True) -> AdaptTrace:
    """Fly the simulator while the adaptation layer retunes the commanded center.

    Controller K flies on the true state; the adaptation layer sees only
    sensor-corrupted angles and forces. Commands take effect at the next
    loop boundary.

    Raises
    ------
    SimulationCrash
        Propagated from the simulator.
    """
    from .sim._kernels import EVENT_LOOP
    from .sim.simulate import SimOutput

    state = AdaptState.initial(config, initial.phi_c, initial.theta_c, flyable_bounds(config, initial))
    sim.command(initial)
    n_total = int(round(duration / sim.sample_time))
    done = 0
    parts = []
    while done < n_total:
        chunk = sim.advance(n_total - done, stop_on_loop=True)
        done += len(chunk)
        if keep_output:
            parts.append(chunk)
        phi, theta = chunk.phi, chunk.theta
        if angle_sensor is not None:
            phi, theta = angle_sensor.measure(phi, theta)
        f = chunk.tension if force_sensor is None else force_sensor.measure(chunk.tension)
        for agg in accumulate_block(state, chunk.t, phi, theta, f, chunk.event == EVENT_LOOP):
            decide(state, config, agg.f_bar, agg.delta_f, agg.t)
        sim.command(state.path(initial))
    output = SimOutput.concat(parts) if parts else None
    return AdaptTrace(state.decision_log, state.records, output, state)
