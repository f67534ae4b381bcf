"""Scenario files: YAML documents describing one experiment.

Parsing goes through the YAML node graph so every error can name the key and
line it came from. Physical blocks may be omitted or left empty, in which
case the prototype defaults apply; the block named after the experiment
kind is required, and so is ``seeds`` for every kind that draws random
numbers.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .adaptation import AdaptConfig
from .errors import ConfigError, CrosswindError
from .path import PathParams
from .sim import BodyParams, ControllerParams
from .traction import SWEEPABLE, AeroParams, SweepAxis
from .wind import DirectionSchedule, ShearParams

KINDS = ("sweep", "adapt", "turbulence_study", "sensor_study")
TOP_LEVEL = (
    "kind", "output", "aero", "body", "shear", "turbulence", "wind_direction", "path", "controller",
    "adaptation", "simulation", "seeds",
) + KINDS

DEFAULT_PATH = PathParams(0.0, math.atan(math.sqrt(0.1)), 0.24, 0.1)


@dataclass(frozen=True)
class SimulationSettings:
    duration: float = 300.0
    dt: float = 0.02
    skip_loops: int = 2


@dataclass(frozen=True)
class TurbulenceSettings:
    intensity: float = 0.0
    length_scale: float = 50.0


@dataclass(frozen=True)
class Seeds:
    wind: int = 0
    sensors: int = 0
    count: int = 1


@dataclass(frozen=True)
class AngleSensorSpec:
    resolution_bits: int = 24
    noise_std: float = 0.0


@dataclass(frozen=True)
class ForceSensorSpec:
    gain_error: float = 0.0
    offset: float = 0.0
    noise_std: float = 0.0


@dataclass(frozen=True)
class SweepSettings:
    axes: tuple
    n_samples: int = 400
    normalize: bool = True
    point_mass: bool = False


@dataclass(frozen=True)
class AdaptSettings:
    angle_sensor: AngleSensorSpec | None = None
    force_sensor: ForceSensorSpec | None = None
    trajectory: bool = False


@dataclass(frozen=True)
class TurbulenceStudySettings:
    offsets: tuple
    n_avgs: tuple = (1, 3, 5, 8)
    intensity: float = 0.05


@dataclass(frozen=True)
class SensorStudySettings:
    initial_offset: float = 0.35
    n_decisions: int = 50
    n_samples: int = 500
    angle_sensor: AngleSensorSpec = AngleSensorSpec(10, 0.0)
    force_sensor: ForceSensorSpec = ForceSensorSpec(0.15, 250.0, 100.0)
    sign_offsets: tuple = ()


@dataclass(frozen=True)
class Scenario:
    kind: str
    output: str
    aero: AeroParams = field(default_factory=AeroParams)
    body: BodyParams = field(default_factory=BodyParams)
    shear: ShearParams = field(default_factory=ShearParams)
    turbulence: TurbulenceSettings = field(default_factory=TurbulenceSettings)
    wind_direction: DirectionSchedule = field(default_factory=DirectionSchedule)
    path: PathParams = DEFAULT_PATH
    controller: ControllerParams = field(default_factory=ControllerParams)
    adaptation: AdaptConfig = field(default_factory=AdaptConfig)
    simulation: SimulationSettings = field(default_factory=SimulationSettings)
    seeds: Seeds = field(default_factory=Seeds)
    experiment: object = None

    def with_seed(self, seed: int) -> "Scenario":
        return dataclasses.replace(self, seeds=dataclasses.replace(self.seeds, wind=seed, sensors=seed))


# --- node helpers -----------------------------------------------------------


def _line(node) -> int:
    return node.start_mark.line + 1


def _mapping(node, key: str) -> dict:
    """``{name: (key_node, value_node)}`` with duplicate detection."""
    if node is None or (isinstance(node, yaml.ScalarNode) and node.tag == "tag:yaml.org,2002:null"):
        return {}
    if not isinstance(node, yaml.MappingNode):
        raise ConfigError("expected a mapping", key=key, line=_line(node))
    out = {}
    for k, v in node.value:
        name = k.value
        if name in out:
            raise ConfigError(
                f"duplicate key, first defined on line {_line(out[name][0])}, again on line {_line(k)}",
                key=name, line=_line(k),
            )
        out[name] = (k, v)
    return out


def _check_keys(entries: dict, allowed, block: str):
    for name, (k, _) in entries.items():
        if name not in allowed:
            raise ConfigError(f"unknown key in '{block}'", key=name, line=_line(k))


def _scalar(node, key: str, kind):
    if not isinstance(node, yaml.ScalarNode):
        raise ConfigError("expected a scalar", key=key, line=_line(node))
    value = yaml.safe_load(yaml.serialize(node))
    if kind is bool:
        if not isinstance(value, bool):
            raise ConfigError("expected true or false", key=key, line=_line(node))
        return value
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError("expected an integer", key=key, line=_line(node))
        return value
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError("expected a number", key=key, line=_line(node))
        return float(value)
    if kind is str:
        if not isinstance(value, str):
            raise ConfigError("expected a string", key=key, line=_line(node))
        return value
    raise TypeError(kind)


def _number_list(node, key: str, length: int | None = None, kind=float) -> tuple:
    if not isinstance(node, yaml.SequenceNode):
        raise ConfigError("expected a list", key=key, line=_line(node))
    values = tuple(_scalar(n, key, kind) for n in node.value)
    if length is not None and len(values) != length:
        raise ConfigError(f"expected {length} values", key=key, line=_line(node))
    return values


def _build(cls, kwargs: dict, key: str, node):
    try:
        return cls(**kwargs)
    except ConfigError as exc:
        if exc.key is not None:
            raise
        raise ConfigError(exc.args[0], key=key, line=_line(node) if node is not None else None) from exc
    except (CrosswindError, ValueError, TypeError) as exc:
        raise ConfigError(str(exc), key=key, line=_line(node) if node is not None else None) from exc


def _flat_block(entries: dict, block: str, types: dict) -> dict:
    _check_keys(entries, types, block)
    return {name: _scalar(v, name, types[name]) for name, (_, v) in entries.items()}


def _dataclass_block(cls, top: dict, block: str, types: dict, **extra):
    k, node = top.get(block, (None, None))
    kwargs = _flat_block(_mapping(node, block), block, types)
    kwargs.update(extra)
    return _build(cls, kwargs, block, k)


def _sensor_blocks(entries: dict, block: str):
    angle = force = None
    if "angle_sensor" in entries:
        k, v = entries["angle_sensor"]
        kw = _flat_block(_mapping(v, "angle_sensor"), "angle_sensor", {"resolution_bits": int, "noise_std": float})
        angle = _build(AngleSensorSpec, kw, "angle_sensor", k)
        _validate_sensor(angle, k)
    if "force_sensor" in entries:
        k, v = entries["force_sensor"]
        kw = _flat_block(_mapping(v, "force_sensor"), "force_sensor",
                         {"gain_error": float, "offset": float, "noise_std": float})
        force = _build(ForceSensorSpec, kw, "force_sensor", k)
        _validate_sensor(force, k)
    return angle, force


def _validate_sensor(spec, key_node):
    from .sensors import AngleSensor, ForceSensor

    if isinstance(spec, AngleSensorSpec):
        _build(AngleSensor, dataclasses.asdict(spec), "angle_sensor", key_node)
    else:
        _build(ForceSensor, dataclasses.asdict(spec), "force_sensor", key_node)


# --- blocks -----------------------------------------------------------------

_AERO = {"rho": float, "area": float, "c_l": float, "c_d": float, "c_d_line": float, "n_lines": int,
         "d_line": float, "r": float}
_BODY = {"mass": float, "tether_lin_density": float, "gravity": float}
_SHEAR = {"w0": float, "z0": float, "alpha": float}
_TURB = {"intensity": float, "length_scale": float}
_PATH = {"phi_c": float, "theta_c": float, "phi_span": float, "theta_span": float, "beta": float}
_CTRL = {"gain": float, "psi_max": float, "lookahead": float, "theta_trim_gain": float, "trim_limit": float,
         "search_window": float, "sample_time": float}
_SIM = {"duration": float, "dt": float, "skip_loops": int}
_SEEDS = {"wind": int, "sensors": int, "count": int}


def _adaptation(top: dict) -> AdaptConfig:
    k, node = top.get("adaptation", (None, None))
    entries = _mapping(node, "adaptation")
    allowed = {"delta_f_min": float, "delta_f_min_rel": float, "n_avg": int, "scale_c": float}
    lists = {"step_phi": 3, "step_theta": 3, "theta_bounds": 2}
    _check_keys(entries, list(allowed) + list(lists), "adaptation")
    kw = {}
    for name, (_, v) in entries.items():
        kw[name] = _number_list(v, name, lists[name]) if name in lists else _scalar(v, name, allowed[name])
    return _build(AdaptConfig, kw, "adaptation", k)


def _wind_direction(top: dict) -> DirectionSchedule:
    if "wind_direction" not in top:
        return DirectionSchedule()
    k, node = top["wind_direction"]
    if isinstance(node, yaml.ScalarNode):
        return DirectionSchedule.constant(_scalar(node, "wind_direction", float))
    if not isinstance(node, yaml.SequenceNode) or not node.value:
        raise ConfigError("expected a number or a list of [t, phi_w] pairs", key="wind_direction", line=_line(k))
    points = [_number_list(p, "wind_direction", 2) for p in node.value]
    return _build(DirectionSchedule, {"breakpoints": points}, "wind_direction", k)


def _sweep(node, key_node) -> SweepSettings:
    entries = _mapping(node, "sweep")
    _check_keys(entries, ("axes", "n_samples", "normalize", "point_mass"), "sweep")
    if "axes" not in entries:
        raise ConfigError("missing required key", key="axes", line=_line(key_node))
    ak, an = entries["axes"]
    if not isinstance(an, yaml.SequenceNode) or not 1 <= len(an.value) <= 2:
        raise ConfigError("expected a list of one or two axes", key="axes", line=_line(ak))
    axes = []
    for item in an.value:
        kw = _flat_block(_mapping(item, "axes"), "axes", {"name": str, "start": float, "stop": float, "count": int})
        missing = {"name", "start", "stop", "count"} - set(kw)
        if missing:
            raise ConfigError(f"axis is missing {sorted(missing)}", key="axes", line=_line(item))
        if kw["name"] not in SWEEPABLE:
            raise ConfigError(f"cannot sweep '{kw['name']}', choose from {SWEEPABLE}", key="name", line=_line(item))
        axes.append(_build(SweepAxis, kw, "axes", item))
    kw = {name: _scalar(v, name, {"n_samples": int, "normalize": bool, "point_mass": bool}[name])
          for name, (_, v) in entries.items() if name != "axes"}
    return _build(SweepSettings, dict(kw, axes=tuple(axes)), "sweep", key_node)


def _adapt(node, key_node) -> AdaptSettings:
    entries = _mapping(node, "adapt")
    _check_keys(entries, ("angle_sensor", "force_sensor", "trajectory"), "adapt")
    angle, force = _sensor_blocks(entries, "adapt")
    traj = _scalar(entries["trajectory"][1], "trajectory", bool) if "trajectory" in entries else False
    return AdaptSettings(angle, force, traj)


def _range(node, key: str) -> tuple:
    kw = _flat_block(_mapping(node, key), key, {"start": float, "stop": float, "count": int})
    if set(kw) != {"start", "stop", "count"}:
        raise ConfigError("range needs start, stop and count", key=key, line=_line(node))
    if kw["count"] < 2 or kw["stop"] <= kw["start"]:
        raise ConfigError("range needs count >= 2 and stop > start", key=key, line=_line(node))
    step = (kw["stop"] - kw["start"]) / (kw["count"] - 1)
    return tuple(kw["start"] + i * step for i in range(kw["count"]))


def _turbulence_study(node, key_node) -> TurbulenceStudySettings:
    entries = _mapping(node, "turbulence_study")
    _check_keys(entries, ("offsets", "n_avgs", "intensity"), "turbulence_study")
    if "offsets" not in entries:
        raise ConfigError("missing required key", key="offsets", line=_line(key_node))
    kw = {"offsets": _range(entries["offsets"][1], "offsets")}
    if "n_avgs" in entries:
        kw["n_avgs"] = _number_list(entries["n_avgs"][1], "n_avgs", kind=int)
        if not kw["n_avgs"] or min(kw["n_avgs"]) < 1:
            raise ConfigError("n_avgs must be positive integers", key="n_avgs", line=_line(entries["n_avgs"][0]))
    if "intensity" in entries:
        kw["intensity"] = _scalar(entries["intensity"][1], "intensity", float)
        if not 0.0 < kw["intensity"] <= 0.5:
            raise ConfigError("intensity outside (0, 0.5]", key="intensity", line=_line(entries["intensity"][0]))
    return TurbulenceStudySettings(**kw)


def _sensor_study(node, key_node) -> SensorStudySettings:
    entries = _mapping(node, "sensor_study")
    keys = ("initial_offset", "n_decisions", "n_samples", "angle_sensor", "force_sensor", "sign_offsets")
    _check_keys(entries, keys, "sensor_study")
    kw = {}
    types = {"initial_offset": float, "n_decisions": int, "n_samples": int}
    for name in types:
        if name in entries:
            kw[name] = _scalar(entries[name][1], name, types[name])
    angle, force = _sensor_blocks(entries, "sensor_study")
    if angle is not None:
        kw["angle_sensor"] = angle
    if force is not None:
        kw["force_sensor"] = force
    if "sign_offsets" in entries:
        kw["sign_offsets"] = _range(entries["sign_offsets"][1], "sign_offsets")
    for name in ("n_decisions", "n_samples"):
        if kw.get(name, 1) < 1 or (name == "n_samples" and kw.get(name, 4) < 4):
            raise ConfigError("value too small", key=name, line=_line(entries[name][0]))
    return SensorStudySettings(**kw)


_EXPERIMENTS = {
    "sweep": _sweep,
    "adapt": _adapt,
    "turbulence_study": _turbulence_study,
    "sensor_study": _sensor_study,
}


def parse_scenario(text: str, default_output: str = "scenario") -> Scenario:
    """Parse and validate a scenario document.

    Raises
    ------
    ConfigError
        Malformed YAML, unknown or duplicate keys, missing blocks and
        parameter values outside their domain; the message names the key and
        line where known.
    """
    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ConfigError(f"invalid YAML: {getattr(exc, 'problem', exc)}",
                          line=mark.line + 1 if mark else None) from exc
    if root is None:
        raise ConfigError("scenario is empty")
    top = _mapping(root, "<root>")
    _check_keys(top, TOP_LEVEL, "<root>")
    if "kind" not in top:
        raise ConfigError("missing required key", key="kind", line=_line(root))
    kind = _scalar(top["kind"][1], "kind", str)
    if kind not in KINDS:
        raise ConfigError(f"unknown experiment kind '{kind}', choose from {KINDS}", key="kind",
                          line=_line(top["kind"][0]))
    for other in KINDS:
        if other != kind and other in top:
            raise ConfigError(f"block does not belong to kind '{kind}'", key=other, line=_line(top[other][0]))
    if kind not in top:
        raise ConfigError(f"missing required block for kind '{kind}'", key=kind, line=_line(root))
    if kind != "sweep" and "seeds" not in top:
        raise ConfigError(f"kind '{kind}' needs an explicit seeds block", key="seeds", line=_line(root))

    output = _scalar(top["output"][1], "output", str) if "output" in top else default_output
    if not output or "/" in output or output.startswith("."):
        raise ConfigError("output must be a plain file-name prefix", key="output",
                          line=_line(top["output"][0]) if "output" in top else None)
    aero = _dataclass_block(AeroParams, top, "aero", _AERO)
    body = _dataclass_block(BodyParams, top, "body", _BODY, aero=aero)
    shear = _dataclass_block(ShearParams, top, "shear", _SHEAR)
    turbulence = _dataclass_block(TurbulenceSettings, top, "turbulence", _TURB)
    if not 0.0 <= turbulence.intensity <= 0.5 or turbulence.length_scale <= 0.0:
        raise ConfigError("turbulence intensity must lie in [0, 0.5] and length_scale be positive",
                          key="turbulence", line=_line(top["turbulence"][0]))
    path_kw = dataclasses.asdict(DEFAULT_PATH)
    path_kw.update(_flat_block(_mapping(top.get("path", (None, None))[1], "path"), "path", _PATH))
    path = _build(PathParams, path_kw, "path", top.get("path", (None, None))[0])
    controller = _dataclass_block(ControllerParams, top, "controller", _CTRL)
    simulation = _dataclass_block(SimulationSettings, top, "simulation", _SIM)
    sk = top.get("simulation", (None, None))[0]
    if simulation.duration <= 0.0 or not 0.0 < simulation.dt <= 0.05 or simulation.skip_loops < 0:
        raise ConfigError("duration must be positive, dt in (0, 0.05], skip_loops >= 0", key="simulation",
                          line=_line(sk) if sk else None)
    ratio = controller.sample_time / simulation.dt
    if abs(ratio - round(ratio)) > 1e-9 or round(ratio) < 1:
        raise ConfigError("controller sample_time must be a multiple of dt", key="sample_time",
                          line=_line(sk) if sk else None)
    seeds = _dataclass_block(Seeds, top, "seeds", _SEEDS)
    if min(seeds.wind, seeds.sensors) < 0 or seeds.count < 1:
        raise ConfigError("seeds must be non-negative and count >= 1", key="seeds", line=_line(top["seeds"][0]))
    key_node, node = top[kind]
    experiment = _EXPERIMENTS[kind](node, key_node)
    return Scenario(
        kind, output, aero, body, shear, turbulence, _wind_direction(top), path, controller,
        _adaptation(top), simulation, seeds, experiment,
    )


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_bytes().decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ConfigError(f"{path} is not UTF-8") from exc
    return parse_scenario(text, default_output=path.stem)
