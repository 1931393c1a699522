"""Telemetry message schema and text-frame codec.

One JSON object per frame.  Every message carries the schema version and a
monotone per-stream sequence number.  Decoding ignores unknown fields (so
newer peers can add data) and returns None for malformed frames: the caller
drops the frame, counts the error and keeps the connection.

Message types
-------------
outbound  ``session_info``  static session facts for renderers
outbound  ``tick_state``    one decimated simulation tick
inbound   ``operator_input``  hand force + gaze ray from the console
inbound   ``control``       start | pause | reset | set_mode
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

SCHEMA_VERSION = 1


@dataclass
class SessionInfo:
    seq: int = 0
    mode: str = "shared"
    target_depth: float = 0.03
    layer_boundaries: list = field(default_factory=list)
    corridor_radius: float = 0.0005
    distraction_interval: list | None = None
    telemetry_rate: float = 60.0

    type_name = "session_info"


@dataclass
class TickState:
    seq: int = 0
    t: float = 0.0
    w: float = 0.0
    abar: float = 0.0
    depth: float = 0.0
    haptic_x: tuple = (0.0, 0.0, 0.0)
    robot_x: tuple = (0.0, 0.0, 0.0)
    tip_task: tuple = (0.0, 0.0, 0.0)
    f_sensor: tuple = (0.0, 0.0, 0.0)
    f_fdbk: tuple = (0.0, 0.0, 0.0)
    f_operator: tuple = (0.0, 0.0, 0.0)
    gaze_object: str = "background"
    gaze_point: tuple = (0.0, 0.0, 0.0)
    phase: str = ""
    status: str = "running"

    type_name = "tick_state"


@dataclass
class OperatorInput:
    seq: int = 0
    hand_force: tuple = (0.0, 0.0, 0.0)
    gaze_origin: tuple = (0.0, -0.5, -0.15)
    gaze_direction: tuple = (0.0, 1.0, 0.0)
    client_time: float = 0.0

    type_name = "operator_input"


@dataclass
class Control:
    seq: int = 0
    action: str = "start"  # start | pause | reset | set_mode
    mode: str | None = None

    type_name = "control"


MESSAGE_TYPES = {
    cls.type_name: cls for cls in (SessionInfo, TickState, OperatorInput, Control)
}

_VEC_FIELDS = {
    "haptic_x", "robot_x", "tip_task", "f_sensor", "f_fdbk", "f_operator",
    "hand_force", "gaze_origin", "gaze_direction", "gaze_point",
}

_CONTROL_ACTIONS = {"start", "pause", "reset", "set_mode"}


def encode(msg: Any) -> str:
    """Serialize a message to one text frame."""
    payload = {"schema": SCHEMA_VERSION, "type": msg.type_name}
    for key, value in vars(msg).items():
        payload[key] = list(value) if isinstance(value, tuple) else value
    return json.dumps(payload, separators=(",", ":"))


def decode(frame: str) -> Any | None:
    """Parse a text frame; None means the frame must be dropped."""
    try:
        payload = json.loads(frame)
    except (json.JSONDecodeError, UnicodeDecodeError):
        return None
    if not isinstance(payload, dict):
        return None
    cls = MESSAGE_TYPES.get(payload.get("type"))
    if cls is None:
        return None
    kwargs = {}
    for name in cls.__dataclass_fields__:
        if name not in payload:
            continue
        value = payload[name]
        if name in _VEC_FIELDS:
            if (
                not isinstance(value, list)
                or len(value) != 3
                or not all(isinstance(v, (int, float)) for v in value)
            ):
                return None
            value = tuple(float(v) for v in value)
        kwargs[name] = value
    try:
        msg = cls(**kwargs)
    except (TypeError, ValueError):
        return None
    if isinstance(msg, Control) and msg.action not in _CONTROL_ACTIONS:
        return None
    return msg


class SequenceCounter:
    """Strictly increasing sequence numbers for one outbound stream."""

    def __init__(self):
        self._next = 0

    def stamp(self, msg):
        msg.seq = self._next
        self._next += 1
        return msg
