"""Session configuration: defaults, YAML parsing and strict validation.

An empty document yields the canonical experiment parameters (stiffnesses,
damping, drill speed, attention window and thresholds, scale factor).  Every
key is checked: unknown keys, malformed values and out-of-range numbers are
rejected with the dotted key path and, when available, the source line.
"""

from __future__ import annotations

import enum
import json
from dataclasses import asdict, dataclass, field

import yaml

from .errors import ConfigError


class Mode(enum.Enum):
    FULL_ROBOT = "full_robot"
    FULL_HUMAN = "full_human"
    SHARED = "shared"


# ---------------------------------------------------------------------------
# Config dataclasses (plain data; modules build their runtime objects from it)
# ---------------------------------------------------------------------------

@dataclass
class HapticConfig:
    k_x: float = 1000.0
    k_y: float = 1000.0
    k_z_max: float = 50.0
    damping: tuple = (10.0, 10.0, 50.0)
    mass: tuple = (0.1, 0.1, 0.1)
    v_drill: float = 0.001
    effector_mass: float = 0.1
    kinematics: str = "gantry"


@dataclass
class AttentionConfig:
    window: float = 2.0
    ema_time_constant: float = 0.5


@dataclass
class AllocationConfig:
    alpha0: float = 0.1
    alpha1: float = 0.9


@dataclass
class GmmConfig:
    refit_interval: float = 2.0
    buffer_horizon: float = 5.0
    min_fit_samples: int = 10


@dataclass
class RobotConfig:
    link_lengths: tuple = (0.4, 0.4, 0.2)
    home_joints_deg: tuple = (15.0, 40.0, 55.0)
    joint_limit_deg: float = 170.0
    k_p: float = 20.0


@dataclass
class CalibrationConfig:
    k_scale: float = 3.0
    # When true the vertebra->base transform is a translation computed so the
    # robot home tip coincides with the mapped task origin.
    auto_register: bool = True


@dataclass
class BoneLayerConfig:
    start: float
    end: float
    dry: float
    viscous: float


@dataclass
class BoneConfig:
    target_depth: float = 0.03
    # Desk-scale resistance: strong enough to shape the force traces, weak
    # enough that the autonomous feed stays within its timing tolerance.
    layers: tuple = (
        BoneLayerConfig(start=0.0, end=0.004, dry=0.001, viscous=0.4),
        BoneLayerConfig(start=0.004, end=0.03, dry=0.0004, viscous=0.16),
    )


@dataclass
class SafetyConfig:
    corridor_radius: float = 0.0005
    descent_gate_low: float = 0.8
    descent_gate_high: float = 0.9


@dataclass
class OperatorConfig:
    kind: str = "scripted"  # scripted | live
    approach_duration: float = 6.0
    distraction_duration: float = 20.0
    gaze_noise: float = 0.006
    drive_force: float = 0.12
    force_cap: float = 15.0
    fixation_hold: float = 0.35
    fixation_jitter: float = 0.0005
    eye_origin: tuple = (0.0, -0.5, -0.15)
    focus_extra_force: tuple = (0.0, 0.0, 0.0)
    stale_timeout: float = 0.2


@dataclass
class TelemetryConfig:
    rate: float = 60.0
    port: int = 8765


@dataclass
class SessionConfig:
    mode: Mode = Mode.SHARED
    dt: float = 0.001
    gaze_rate: float = 60.0
    seed: int = 0
    max_duration: float = 120.0
    attention_override: float | None = None
    haptic: HapticConfig = field(default_factory=HapticConfig)
    attention: AttentionConfig = field(default_factory=AttentionConfig)
    allocation: AllocationConfig = field(default_factory=AllocationConfig)
    gmm: GmmConfig = field(default_factory=GmmConfig)
    robot: RobotConfig = field(default_factory=RobotConfig)
    calibration: CalibrationConfig = field(default_factory=CalibrationConfig)
    bone: BoneConfig = field(default_factory=BoneConfig)
    safety: SafetyConfig = field(default_factory=SafetyConfig)
    operator: OperatorConfig = field(default_factory=OperatorConfig)
    telemetry: TelemetryConfig = field(default_factory=TelemetryConfig)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["mode"] = self.mode.value
        # Normalize tuples to lists so the dict equals its JSON round trip.
        return json.loads(json.dumps(d))

    def validate(self) -> "SessionConfig":
        _check(self.dt > 0, "session.dt", "timestep must be positive")
        _check(self.dt <= 0.01, "session.dt", "timestep must be at most 0.01 s")
        _check(self.gaze_rate > 0, "session.gaze_rate", "gaze rate must be positive")
        _check(
            self.gaze_rate <= 1.0 / self.dt,
            "session.gaze_rate",
            "gaze rate cannot exceed the tick rate",
        )
        _check(self.max_duration > 0, "session.max_duration", "must be positive")
        if self.attention_override is not None:
            _check(
                0.0 <= self.attention_override <= 1.0,
                "session.attention_override",
                "must lie in [0, 1]",
            )
        _check(
            0.0 <= self.allocation.alpha0 < self.allocation.alpha1 <= 1.0,
            "allocation",
            f"thresholds must satisfy 0 <= alpha0 < alpha1 <= 1, got "
            f"({self.allocation.alpha0}, {self.allocation.alpha1})",
        )
        _check(self.attention.window > 0, "attention.window", "must be positive")
        _check(
            self.attention.ema_time_constant > 0,
            "attention.ema_time_constant",
            "must be positive",
        )
        hp = self.haptic
        _check(
            hp.k_x > 0 and hp.k_y > 0 and hp.k_z_max > 0,
            "haptic",
            "stiffness values must be positive",
        )
        _check(all(d > 0 for d in hp.damping), "haptic.damping", "must be positive")
        _check(all(m > 0 for m in hp.mass), "haptic.mass", "must be positive")
        _check(hp.v_drill >= 0, "haptic.v_drill", "must be non-negative")
        _check(
            hp.kinematics in ("gantry", "arm3r"),
            "haptic.kinematics",
            f"unknown kinematics {hp.kinematics!r}",
        )
        _check(self.calibration.k_scale >= 1, "calibration.k_scale", "must be >= 1")
        _check(self.robot.k_p > 0, "robot.k_p", "must be positive")
        _check(self.bone.target_depth > 0, "bone.target_depth", "must be positive")
        for i, layer in enumerate(self.bone.layers):
            _check(
                layer.end > layer.start,
                f"bone.layers[{i}]",
                "layer must have positive thickness",
            )
            _check(
                layer.dry >= 0 and layer.viscous >= 0,
                f"bone.layers[{i}]",
                "coefficients must be non-negative",
            )
        sc = self.safety
        _check(sc.corridor_radius > 0, "safety.corridor_radius", "must be positive")
        _check(
            0.0 <= sc.descent_gate_low < sc.descent_gate_high <= 1.0,
            "safety",
            "descent gate thresholds must satisfy 0 <= low < high <= 1",
        )
        _check(
            self.operator.kind in ("scripted", "live"),
            "operator.kind",
            f"unknown operator kind {self.operator.kind!r}",
        )
        _check(self.telemetry.rate > 0, "telemetry.rate", "must be positive")
        return self


def _check(cond: bool, path: str, message: str) -> None:
    if not cond:
        raise ConfigError(message, path=path)


# ---------------------------------------------------------------------------
# YAML parsing with line tracking
# ---------------------------------------------------------------------------

class _LocatedDict(dict):
    """Mapping that remembers the source line of each key."""

    def __init__(self):
        super().__init__()
        self.key_lines: dict = {}


class _LineLoader(yaml.SafeLoader):
    pass


def _construct_mapping(loader, node):
    loader.flatten_mapping(node)
    mapping = _LocatedDict()
    for key_node, value_node in node.value:
        key = loader.construct_object(key_node, deep=True)
        mapping[key] = loader.construct_object(value_node, deep=True)
        mapping.key_lines[key] = key_node.start_mark.line + 1
    return mapping


_LineLoader.add_constructor(
    yaml.resolver.BaseResolver.DEFAULT_MAPPING_TAG, _construct_mapping
)


class _Section:
    """Strict view over one mapping level: reads are typed, leftovers are errors."""

    def __init__(self, data: dict, path: str):
        self.data = dict(data)
        self.lines = getattr(data, "key_lines", {})
        self.path = path

    def _line(self, key):
        return self.lines.get(key)

    def _full(self, key):
        return f"{self.path}.{key}" if self.path else str(key)

    def take(self, key, default, kind=float):
        if key not in self.data:
            return default
        raw = self.data.pop(key)
        line = self._line(key)
        if raw is None:
            return None
        try:
            if kind is float:
                if isinstance(raw, bool) or not isinstance(raw, (int, float)):
                    raise TypeError
                return float(raw)
            if kind is int:
                if isinstance(raw, bool) or not isinstance(raw, int):
                    raise TypeError
                return int(raw)
            if kind is bool:
                if not isinstance(raw, bool):
                    raise TypeError
                return raw
            if kind is str:
                if not isinstance(raw, str):
                    raise TypeError
                return raw
        except TypeError:
            raise ConfigError(
                f"expected {kind.__name__}, got {raw!r}", self._full(key), line
            ) from None
        raise AssertionError(f"unsupported kind {kind}")

    def take_vector(self, key, default, size=3):
        if key not in self.data:
            return default
        raw = self.data.pop(key)
        line = self._line(key)
        if (
            not isinstance(raw, (list, tuple))
            or len(raw) != size
            or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in raw)
        ):
            raise ConfigError(
                f"expected a list of {size} numbers, got {raw!r}",
                self._full(key),
                line,
            )
        return tuple(float(v) for v in raw)

    def subsection(self, key) -> "_Section":
        raw = self.data.pop(key, {})
        if raw is None:
            raw = {}
        if not isinstance(raw, dict):
            raise ConfigError(
                f"expected a mapping, got {raw!r}", self._full(key), self._line(key)
            )
        return _Section(raw, self._full(key))

    def take_list(self, key):
        raw = self.data.pop(key, None)
        if raw is None:
            return None
        if not isinstance(raw, list):
            raise ConfigError(
                f"expected a list, got {raw!r}", self._full(key), self._line(key)
            )
        return raw

    def finish(self):
        if self.data:
            key = next(iter(self.data))
            raise ConfigError(
                f"unknown key {key!r}", self._full(key), self._line(key)
            )


def parse_config(text: str) -> SessionConfig:
    """Parse a YAML document into a validated SessionConfig."""
    try:
        raw = yaml.load(text, Loader=_LineLoader)
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed YAML: {exc}") from exc
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError(f"top level must be a mapping, got {type(raw).__name__}")

    root = _Section(raw, "")
    session = root.subsection("session")
    mode_name = session.take("mode", Mode.SHARED.value, str)
    try:
        mode = Mode(mode_name)
    except ValueError:
        raise ConfigError(
            f"unknown mode {mode_name!r}; expected one of "
            f"{[m.value for m in Mode]}",
            "session.mode",
            session._line("mode"),
        ) from None

    cfg = SessionConfig(
        mode=mode,
        dt=session.take("dt", 0.001),
        gaze_rate=session.take("gaze_rate", 60.0),
        seed=session.take("seed", 0, int),
        max_duration=session.take("max_duration", 120.0),
        attention_override=session.take("attention_override", None),
    )
    session.finish()

    h = root.subsection("haptic")
    cfg.haptic = HapticConfig(
        k_x=h.take("k_x", 1000.0),
        k_y=h.take("k_y", 1000.0),
        k_z_max=h.take("k_z_max", 50.0),
        damping=h.take_vector("damping", (10.0, 10.0, 50.0)),
        mass=h.take_vector("mass", (0.1, 0.1, 0.1)),
        v_drill=h.take("v_drill", 0.001),
        effector_mass=h.take("effector_mass", 0.1),
        kinematics=h.take("kinematics", "gantry", str),
    )
    h.finish()

    a = root.subsection("attention")
    cfg.attention = AttentionConfig(
        window=a.take("window", 2.0),
        ema_time_constant=a.take("ema_time_constant", 0.5),
    )
    a.finish()

    al = root.subsection("allocation")
    cfg.allocation = AllocationConfig(
        alpha0=al.take("alpha0", 0.1),
        alpha1=al.take("alpha1", 0.9),
    )
    al.finish()

    g = root.subsection("gmm")
    cfg.gmm = GmmConfig(
        refit_interval=g.take("refit_interval", 2.0),
        buffer_horizon=g.take("buffer_horizon", 5.0),
        min_fit_samples=g.take("min_fit_samples", 10, int),
    )
    g.finish()

    r = root.subsection("robot")
    cfg.robot = RobotConfig(
        link_lengths=r.take_vector("link_lengths", (0.4, 0.4, 0.2)),
        home_joints_deg=r.take_vector("home_joints_deg", (15.0, 40.0, 55.0)),
        joint_limit_deg=r.take("joint_limit_deg", 170.0),
        k_p=r.take("k_p", 20.0),
    )
    r.finish()

    c = root.subsection("calibration")
    cfg.calibration = CalibrationConfig(
        k_scale=c.take("k_scale", 3.0),
        auto_register=c.take("auto_register", True, bool),
    )
    c.finish()

    b = root.subsection("bone")
    layers_raw = b.take_list("layers")
    if layers_raw is None:
        layers = BoneConfig().layers
    else:
        layers = []
        for i, item in enumerate(layers_raw):
            sec = _Section(
                item if isinstance(item, dict) else {}, f"bone.layers[{i}]"
            )
            if not isinstance(item, dict):
                raise ConfigError("expected a mapping", f"bone.layers[{i}]")
            layers.append(
                BoneLayerConfig(
                    start=sec.take("start", 0.0),
                    end=sec.take("end", 0.0),
                    dry=sec.take("dry", 0.0),
                    viscous=sec.take("viscous", 0.0),
                )
            )
            sec.finish()
        layers = tuple(layers)
    cfg.bone = BoneConfig(
        target_depth=b.take("target_depth", 0.03),
        layers=tuple(layers),
    )
    b.finish()

    s = root.subsection("safety")
    cfg.safety = SafetyConfig(
        corridor_radius=s.take("corridor_radius", 0.0005),
        descent_gate_low=s.take("descent_gate_low", 0.8),
        descent_gate_high=s.take("descent_gate_high", 0.9),
    )
    s.finish()

    o = root.subsection("operator")
    cfg.operator = OperatorConfig(
        kind=o.take("kind", "scripted", str),
        approach_duration=o.take("approach_duration", 6.0),
        distraction_duration=o.take("distraction_duration", 20.0),
        gaze_noise=o.take("gaze_noise", 0.006),
        drive_force=o.take("drive_force", 0.12),
        force_cap=o.take("force_cap", 15.0),
        fixation_hold=o.take("fixation_hold", 0.35),
        fixation_jitter=o.take("fixation_jitter", 0.0005),
        eye_origin=o.take_vector("eye_origin", (0.0, -0.5, -0.15)),
        focus_extra_force=o.take_vector("focus_extra_force", (0.0, 0.0, 0.0)),
        stale_timeout=o.take("stale_timeout", 0.2),
    )
    o.finish()

    t = root.subsection("telemetry")
    cfg.telemetry = TelemetryConfig(
        rate=t.take("rate", 60.0),
        port=t.take("port", 8765, int),
    )
    t.finish()

    root.finish()
    return cfg.validate()


def default_config() -> SessionConfig:
    return SessionConfig().validate()


def load_config_file(path: str) -> SessionConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())
