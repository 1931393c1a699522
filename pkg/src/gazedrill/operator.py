"""Scripted synthetic surgeon: gaze stream and hand forces for the protocol.

The scripted operator is a pure function of (script, time): every random draw
comes from a counter-based generator keyed on the script seed and indexed by
phase, fixation and sample, so identical queries always produce identical
output and replays are exact.

Gaze follows a fixate-and-jump pattern: the eye holds a noisy aim point for a
fixed dwell, then hops to a fresh one, producing the bimodal speed profile the
mixture segmentation expects.  Hand force is a downward drive that fades out
as robot assistance takes over, plus an optional constant disturbance used by
the safety scenarios.  During the distraction phase the gaze sits on the
distractor display and the hands leave the device entirely.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import Vec3, normalize, quat_from_to
from .scene import HEAD_FORWARD, GazeSample, ObjectLabel

# Stream tags for the counter-based generator.
_STREAM_FIXATION = 1
_STREAM_JITTER = 2
_STREAM_TARGET = 3


@dataclass(frozen=True)
class ScriptPhase:
    name: str
    duration: float
    gaze_target: ObjectLabel
    gaze_noise: float = 0.006  # rad, std-dev of the per-fixation aim offset
    hand_drive: bool = False
    extra_force: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if self.duration <= 0:
            raise ValueError("phase duration must be positive")


@dataclass
class OperatorScript:
    phases: list[ScriptPhase]
    seed: int
    eye_origin: Vec3 = field(default_factory=lambda: np.array([0.0, -0.5, -0.15]))
    targets: dict = field(default_factory=dict)  # ObjectLabel -> aim point
    fixation_hold: float = 0.35  # s between gaze hops
    fixation_jitter: float = 0.0005  # rad, within-fixation tremor
    drive_force: float = 0.12  # N, downward drive while the human is in control
    force_cap: float = 15.0  # N, overall hand-force magnitude limit
    # Assistance level below which the scripted hand pushes at full drive.
    drive_fade_high: float = 0.5
    drive_fade_low: float = 0.3

    def __post_init__(self):
        self.eye_origin = np.asarray(self.eye_origin, dtype=float)
        if not self.phases:
            raise ValueError("script needs at least one phase")

    def phase_at(self, t: float) -> tuple[int, ScriptPhase, float]:
        """(index, phase, local time); time beyond the end holds the last phase."""
        start = 0.0
        for i, phase in enumerate(self.phases):
            if t < start + phase.duration:
                return i, phase, t - start
            start += phase.duration
        last = len(self.phases) - 1
        return last, self.phases[last], t - (start - self.phases[last].duration)

    def total_duration(self) -> float:
        return sum(p.duration for p in self.phases)

    def distraction_interval(self) -> tuple[float, float] | None:
        start = 0.0
        for phase in self.phases:
            if phase.name == "distraction":
                return start, start + phase.duration
            start += phase.duration
        return None


@dataclass
class OperatorOutput:
    gaze: GazeSample
    hand_force: Vec3


def _rng(seed: int, c0: int, c1: int, c2: int, stream: int) -> np.random.Generator:
    return np.random.Generator(
        np.random.Philox(key=seed, counter=[c0, c1, c2, stream])
    )


def _perp_basis(d: Vec3) -> tuple[Vec3, Vec3]:
    ref = np.array([0.0, 0.0, 1.0]) if abs(d[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
    e1 = normalize(np.cross(d, ref))
    return e1, np.cross(d, e1)


def sample_gaze(script: OperatorScript, t: float) -> GazeSample:
    """Deterministic gaze sample at absolute time t."""
    phase_idx, phase, local_t = script.phase_at(t)
    fixation_idx = int(local_t / script.fixation_hold)

    aim = np.asarray(script.targets[phase.gaze_target], dtype=float)
    base_dir = normalize(aim - script.eye_origin)
    e1, e2 = _perp_basis(base_dir)

    fix_rng = _rng(script.seed, phase_idx, fixation_idx, 0, _STREAM_FIXATION)
    off = fix_rng.normal(0.0, phase.gaze_noise, size=2)
    fix_dir = normalize(base_dir + off[0] * e1 + off[1] * e2)

    sample_idx = int(round(t * 1e6))  # microsecond-quantized, exact for tick grids
    jit_rng = _rng(script.seed, sample_idx, phase_idx, 0, _STREAM_JITTER)
    jit = jit_rng.normal(0.0, script.fixation_jitter, size=2)
    direction = normalize(fix_dir + jit[0] * e1 + jit[1] * e2)

    return GazeSample(
        timestamp=t,
        eye_origin=script.eye_origin.copy(),
        orientation=quat_from_to(HEAD_FORWARD, direction),
    )


def hand_force(script: OperatorScript, t: float, assist_level: float) -> Vec3:
    """Deterministic hand force; the drive fades out as assistance rises."""
    _, phase, _ = script.phase_at(t)
    force = np.array(phase.extra_force, dtype=float)
    if phase.hand_drive:
        span = script.drive_fade_high - script.drive_fade_low
        fade = (script.drive_fade_high - assist_level) / span
        force = force + np.array(
            [0.0, 0.0, script.drive_force * min(max(fade, 0.0), 1.0)]
        )
    magnitude = float(np.linalg.norm(force))
    if magnitude > script.force_cap:
        force = force * (script.force_cap / magnitude)
    return force


def sample_operator(
    script: OperatorScript, t: float, assist_level: float = 0.0
) -> OperatorOutput:
    """Full operator output (gaze + hand force) at time t."""
    if t < 0:
        raise ValueError(f"operator time must be non-negative, got {t}")
    return OperatorOutput(
        gaze=sample_gaze(script, t),
        hand_force=hand_force(script, t, assist_level),
    )


def make_protocol_script(
    seed: int,
    targets: dict,
    eye_origin: Vec3 | None = None,
    approach_duration: float = 6.0,
    distraction_duration: float = 20.0,
    finish_duration: float = 600.0,
    gaze_noise: float = 0.006,
    drive_force: float = 0.12,
) -> OperatorScript:
    """Canonical session: focused approach, 20 s distraction, focus to the end."""
    phases = [
        ScriptPhase("approach", approach_duration, ObjectLabel.DRILL,
                    gaze_noise=gaze_noise, hand_drive=True),
        ScriptPhase("distraction", distraction_duration,
                    ObjectLabel.DISTRACTOR_DISPLAY, gaze_noise=gaze_noise,
                    hand_drive=False),
        ScriptPhase("finish", finish_duration, ObjectLabel.DRILL,
                    gaze_noise=gaze_noise, hand_drive=True),
    ]
    kwargs = {} if eye_origin is None else {"eye_origin": eye_origin}
    return OperatorScript(phases=phases, seed=seed, targets=targets,
                          drive_force=drive_force, **kwargs)
