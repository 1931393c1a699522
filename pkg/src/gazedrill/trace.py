"""Per-tick trace records, metrics, and their newline-delimited persistence.

A trace file is NDJSON: the first line is a meta object (schema tag, config
echo, distraction interval, column documentation), every following line is
one tick.  Floats are serialized with ``repr`` round-tripping, so a trace
written and re-read reproduces the in-memory values bit for bit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

TRACE_SCHEMA = "gazedrill.trace/1"
METRICS_SCHEMA = "gazedrill.metrics/1"

# Field -> documentation, in serialization order.
TRACE_COLUMNS = {
    "t": "simulation time [s]",
    "w": "allocation weight in effect [0..1]",
    "abar": "filtered attention level in effect [0..1]",
    "alpha": "raw attention level in effect [0..1]",
    "haptic_x": "device tip position, task frame [m, 3]",
    "haptic_v": "device tip velocity, task frame [m/s, 3]",
    "robot_x": "robot drill position, robot base frame [m, 3]",
    "tip_task": "robot drill tip mapped to the task frame [m, 3]",
    "depth": "drill depth past the entry plane, task frame [m]",
    "f_sensor": "bone resistance at the drill, task frame [N, 3]",
    "f_fdbk": "feedback force rendered on the device, task frame [N, 3]",
    "f_operator": "operator hand force, task frame [N, 3]",
    "gaze_object": "label of the object the gaze ray hit",
    "gaze_kind": "fixation | saccade | unclassified",
    "phase": "operator script phase name",
    "events": "tick events (limit/corridor clamps, completion, faults)",
}


@dataclass
class TraceRecord:
    t: float
    w: float
    abar: float
    alpha: float
    haptic_x: tuple
    haptic_v: tuple
    robot_x: tuple
    tip_task: tuple
    depth: float
    f_sensor: tuple
    f_fdbk: tuple
    f_operator: tuple
    gaze_object: str
    gaze_kind: str
    phase: str
    events: list = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(
            {
                "t": self.t,
                "w": self.w,
                "abar": self.abar,
                "alpha": self.alpha,
                "haptic_x": list(self.haptic_x),
                "haptic_v": list(self.haptic_v),
                "robot_x": list(self.robot_x),
                "tip_task": list(self.tip_task),
                "depth": self.depth,
                "f_sensor": list(self.f_sensor),
                "f_fdbk": list(self.f_fdbk),
                "f_operator": list(self.f_operator),
                "gaze_object": self.gaze_object,
                "gaze_kind": self.gaze_kind,
                "phase": self.phase,
                "events": self.events,
            },
            separators=(",", ":"),
        )

    @staticmethod
    def from_dict(d: dict) -> "TraceRecord":
        known = {k: d[k] for k in TRACE_COLUMNS if k in d}
        for key in ("haptic_x", "haptic_v", "robot_x", "tip_task",
                    "f_sensor", "f_fdbk", "f_operator"):
            known[key] = tuple(known[key])
        return TraceRecord(**known)


@dataclass
class Metrics:
    """Safety and ergonomics metrics of one session."""

    distraction_movement: float
    distraction_position_std: float
    operator_impulse: float
    completion_time: float | None
    max_overshoot: float
    completed: bool

    def to_dict(self) -> dict:
        return {
            "schema": METRICS_SCHEMA,
            "distraction_movement": self.distraction_movement,
            "distraction_position_std": self.distraction_position_std,
            "operator_impulse": self.operator_impulse,
            "completion_time": self.completion_time,
            "max_overshoot": self.max_overshoot,
            "completed": self.completed,
        }

    @staticmethod
    def from_dict(d: dict) -> "Metrics":
        return Metrics(
            distraction_movement=d["distraction_movement"],
            distraction_position_std=d["distraction_position_std"],
            operator_impulse=d["operator_impulse"],
            completion_time=d["completion_time"],
            max_overshoot=d["max_overshoot"],
            completed=d["completed"],
        )


def trace_meta(config_dict: dict, distraction: tuple | None) -> dict:
    return {
        "schema": TRACE_SCHEMA,
        "columns": TRACE_COLUMNS,
        "distraction_interval": list(distraction) if distraction else None,
        "config": config_dict,
    }


def write_trace(path: str, meta: dict, records) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(meta, separators=(",", ":")) + "\n")
        for rec in records:
            fh.write(rec.to_json() + "\n")


def read_trace(path: str) -> tuple[dict, list[TraceRecord]]:
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ValueError(f"empty trace file: {path}")
    meta = json.loads(lines[0])
    if meta.get("schema") != TRACE_SCHEMA:
        raise ValueError(f"not a trace file (schema {meta.get('schema')!r})")
    records = [TraceRecord.from_dict(json.loads(line)) for line in lines[1:]]
    return meta, records


def write_metrics(path: str, metrics: Metrics) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(metrics.to_dict(), fh, indent=2)
        fh.write("\n")


def read_metrics(path: str) -> Metrics:
    with open(path, "r", encoding="utf-8") as fh:
        return Metrics.from_dict(json.load(fh))
