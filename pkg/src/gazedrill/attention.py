"""Windowed attention level and the piecewise-linear allocation weight.

The attention level is the fraction of the trailing window spent in
fixations on surgery-relevant objects.  Each gaze point carries the interval
back to its predecessor; the interval of the first in-window point is clipped
at the window's left edge so the level can never exceed one.  A first-order
exponential filter smooths the level before it is mapped to the allocation
weight.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

from .errors import RejectedSampleError
from .scene import GazeKind, GazePoint, is_surgery_relevant


@dataclass
class AttentionState:
    """Sliding window of gaze points plus raw and filtered attention levels."""

    window_length: float = 2.0
    ema_time_constant: float = 0.5
    alpha: float = 0.0
    alpha_filtered: float = 0.0
    _points: deque = field(default_factory=deque)
    _ema_started: bool = False
    _last_update: float | None = None


def update_attention(state: AttentionState, p: GazePoint, now: float) -> float:
    """Insert a classified gaze point and return the filtered attention level."""
    if p.timestamp > now:
        raise RejectedSampleError(
            f"gaze point timestamp {p.timestamp} is ahead of now={now}"
        )
    pts = state._points
    if pts and p.timestamp <= pts[-1].timestamp:
        raise RejectedSampleError(
            f"non-increasing gaze timestamps: {pts[-1].timestamp} -> {p.timestamp}"
        )
    pts.append(p)

    edge = now - state.window_length
    # Evict stale points but keep one predecessor for interval computation.
    while len(pts) >= 2 and pts[1].timestamp <= edge:
        pts.popleft()

    total = 0.0
    prev_ts: float | None = None
    for q in pts:
        if prev_ts is not None and q.timestamp > edge:
            if q.kind is GazeKind.FIXATION and is_surgery_relevant(q):
                total += q.timestamp - max(prev_ts, edge)
        prev_ts = q.timestamp
    state.alpha = total / state.window_length

    if not state._ema_started:
        state.alpha_filtered = state.alpha
        state._ema_started = True
    else:
        dt = now - (state._last_update if state._last_update is not None else now)
        if dt > 0:
            blend = 1.0 - math.exp(-dt / state.ema_time_constant)
            state.alpha_filtered += blend * (state.alpha - state.alpha_filtered)
    state._last_update = now
    return state.alpha_filtered


@dataclass(frozen=True)
class AllocationParams:
    alpha0: float = 0.1
    alpha1: float = 0.9

    def __post_init__(self):
        if not 0.0 <= self.alpha0 < self.alpha1 <= 1.0:
            raise ValueError(
                f"thresholds must satisfy 0 <= alpha0 < alpha1 <= 1, "
                f"got ({self.alpha0}, {self.alpha1})"
            )


def allocation_weight(abar: float, params: AllocationParams) -> float:
    """Map the filtered attention level to the robot allocation weight."""
    if abar < params.alpha0:
        return 0.0
    if abar > params.alpha1:
        return 1.0
    w = (abar - params.alpha0) / (params.alpha1 - params.alpha0)
    return min(max(w, 0.0), 1.0)
