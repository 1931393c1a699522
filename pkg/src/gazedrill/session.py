"""Fixed-timestep orchestration of the gaze -> attention -> control -> bone loop.

One deterministic clock drives everything: the interaction controllers run
every tick, the gaze pipeline fires on the ticks closest to the gaze rate,
and every tick appends one trace record.  The three experiment arms differ
only in how the attention snapshot entering the control laws is resolved:
the fixed modes pin it to 1 (full robot) or 0 (full human), shared mode uses
the measured values.  Pinning happens on the same code path as the shared
mode so fixed-mode traces and attention-pinned shared traces agree bitwise.

Safety layers owned by the session:

* lateral corridor: the command sent to the robot is clamped to a small
  radius around the planned axis, so no hand force can walk the drill off
  the path;
* descent gate: the autonomous feed offset engages only near full raw
  attention, so the drill stops descending almost immediately when the
  gaze leaves the surgical field instead of riding the smoothed weight down.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import attention as att
from . import bone as bone_mod
from . import gaze as gaze_mod
from . import haptic as hap
from . import operator as op_mod
from . import robot as rob
from .config import Mode, SessionConfig
from .errors import IntegrationFaultError
from .geometry import HomTransform, normalize, quat_from_to
from .kinematics import ThreeRevoluteArm, make_kinematics
from .scene import (
    HEAD_FORWARD,
    Box,
    Cylinder,
    GazeKind,
    GazeSample,
    ObjectLabel,
    SceneObject,
    project_gaze,
)
from .trace import Metrics, TraceRecord, trace_meta

DRILL_SHAFT_RADIUS = 0.013
DRILL_SHAFT_LENGTH = 0.12


# ---------------------------------------------------------------------------
# Scene construction
# ---------------------------------------------------------------------------

def build_desk_scene() -> tuple[list[SceneObject], dict]:
    """Default labelled scene (task frame, z down) plus gaze aim points."""
    drill = SceneObject(
        "drill",
        ObjectLabel.DRILL,
        Cylinder(
            base_center=np.zeros(3),
            axis=np.array([0.0, 0.0, -1.0]),
            radius=DRILL_SHAFT_RADIUS,
            length=DRILL_SHAFT_LENGTH,
        ),
    )
    objects = [
        drill,
        SceneObject(
            "path",
            ObjectLabel.DRILLING_PATH,
            Cylinder(
                base_center=np.zeros(3),
                axis=np.array([0.0, 0.0, 1.0]),
                radius=0.005,
                length=0.03,
            ),
        ),
        SceneObject(
            "vertebra",
            ObjectLabel.VERTEBRA,
            Box(center=np.array([0.0, 0.036, 0.04]),
                half_extents=np.array([0.06, 0.03, 0.05])),
        ),
        SceneObject(
            "distractor",
            ObjectLabel.DISTRACTOR_DISPLAY,
            Box(center=np.array([0.35, -0.15, -0.20]),
                half_extents=np.array([0.12, 0.02, 0.09])),
        ),
        SceneObject(
            "background",
            ObjectLabel.BACKGROUND,
            Box(center=np.zeros(3), half_extents=np.array([5.0, 5.0, 5.0])),
        ),
    ]
    targets = {
        ObjectLabel.DRILL: np.array([0.0, 0.0, -0.03]),
        ObjectLabel.DRILLING_PATH: np.array([0.0, 0.0, 0.015]),
        ObjectLabel.VERTEBRA: np.array([0.03, 0.036, 0.04]),
        ObjectLabel.DISTRACTOR_DISPLAY: np.array([0.35, -0.15, -0.20]),
        ObjectLabel.BACKGROUND: np.array([0.0, 3.0, 0.0]),
    }
    return objects, targets


# ---------------------------------------------------------------------------
# Operator sources
# ---------------------------------------------------------------------------

class ScriptedOperatorSource:
    """Adapter exposing the scripted surgeon to the engine."""

    def __init__(self, script: op_mod.OperatorScript):
        self.script = script

    def gaze(self, t: float) -> GazeSample:
        return op_mod.sample_gaze(self.script, t)

    def hand_force(self, t: float, assist_level: float) -> np.ndarray:
        return op_mod.hand_force(self.script, t, assist_level)

    def phase_name(self, t: float) -> str:
        return self.script.phase_at(t)[1].name

    def distraction_interval(self):
        return self.script.distraction_interval()


_AWAY_DIRECTION = np.array([0.0, 1.0, 0.0])  # over the scene into the background


class LiveOperatorSource:
    """Latest-value mailbox fed by the telemetry service.

    Input older than the staleness timeout degrades to zero force and a
    gaze ray into the background, so losing the client drops the system
    to full human control with the drill halted.
    """

    def __init__(self, eye_origin: np.ndarray, stale_timeout: float = 0.2,
                 clock=time.monotonic):
        self.default_eye = np.asarray(eye_origin, dtype=float)
        self.stale_timeout = stale_timeout
        self._clock = clock
        self._latest = None  # (receive_time, hand_force, origin, direction)

    def submit(self, hand_force, gaze_origin, gaze_direction) -> None:
        self._latest = (
            self._clock(),
            np.asarray(hand_force, dtype=float),
            np.asarray(gaze_origin, dtype=float),
            np.asarray(gaze_direction, dtype=float),
        )

    def _fresh(self):
        if self._latest is None:
            return None
        if self._clock() - self._latest[0] > self.stale_timeout:
            return None
        return self._latest

    def gaze(self, t: float) -> GazeSample:
        latest = self._fresh()
        if latest is None:
            origin, direction = self.default_eye, _AWAY_DIRECTION
        else:
            _, _, origin, direction = latest
        return GazeSample(
            timestamp=t,
            eye_origin=origin,
            orientation=quat_from_to(HEAD_FORWARD, normalize(direction)),
        )

    def hand_force(self, t: float, assist_level: float) -> np.ndarray:
        latest = self._fresh()
        return np.zeros(3) if latest is None else latest[1].copy()

    def phase_name(self, t: float) -> str:
        return "live"

    def distraction_interval(self):
        return None


# ---------------------------------------------------------------------------
# Engine
# ---------------------------------------------------------------------------

@dataclass
class SessionResult:
    records: list
    metrics: Metrics
    meta: dict
    completed: bool
    fault: str | None = None


class SessionEngine:
    def __init__(self, config: SessionConfig, operator_source=None):
        config.validate()
        self.config = config
        self.dt = config.dt

        # Haptic device.
        hap_kin = make_kinematics(
            config.haptic.kinematics, tuple(config.robot.link_lengths)
        )
        self.hparams = hap.HapticParams(
            mass=np.array(config.haptic.mass),
            damping=np.array(config.haptic.damping),
            k_x=config.haptic.k_x,
            k_y=config.haptic.k_y,
            k_z_max=config.haptic.k_z_max,
            v_drill=config.haptic.v_drill,
            effector_mass=config.haptic.effector_mass,
            kinematics=hap_kin,
        )
        self.hstate = hap.HapticState.at_rest(self.hparams)

        # Robot arm and calibration.
        self.arm = ThreeRevoluteArm(*config.robot.link_lengths)
        q_home = np.deg2rad(np.array(config.robot.home_joints_deg))
        self.rstate = rob.RobotState.from_joints(q_home, self.arm)
        self.joint_limit = math.radians(config.robot.joint_limit_deg)
        if config.calibration.auto_register:
            t_v2b = HomTransform.translation(*self.rstate.x_ur)
        else:
            t_v2b = HomTransform.identity()
        self.calibration = rob.Calibration(
            t_vertebrae_to_base=t_v2b,
            t_task_to_vertebrae=HomTransform.identity(),
            k_scale=config.calibration.k_scale,
            k_p=np.full(self.arm.n_joints, config.robot.k_p),
        )

        # Bone model (task frame).
        self.bone = bone_mod.BoneModel(
            layers=[
                bone_mod.BoneLayer(la.start, la.end, la.viscous, la.dry)
                for la in config.bone.layers
            ],
            target_depth=config.bone.target_depth,
        )
        self.contact = bone_mod.DrillContact(depth=0.0, feed_velocity=0.0)

        # Gaze and attention pipeline.
        self.scene, self.targets = build_desk_scene()
        self._drill_obj = self.scene[0]
        self.gmm = gaze_mod.GmmState(
            refit_interval=config.gmm.refit_interval,
            buffer_horizon=config.gmm.buffer_horizon,
            min_fit_samples=config.gmm.min_fit_samples,
        )
        self.attention = att.AttentionState(
            window_length=config.attention.window,
            ema_time_constant=config.attention.ema_time_constant,
        )
        self.alloc = att.AllocationParams(
            config.allocation.alpha0, config.allocation.alpha1
        )

        # Operator.
        if operator_source is not None:
            self.operator = operator_source
        elif config.operator.kind == "live":
            self.operator = LiveOperatorSource(
                np.array(config.operator.eye_origin),
                stale_timeout=config.operator.stale_timeout,
            )
        else:
            script = op_mod.make_protocol_script(
                seed=config.seed,
                targets=self.targets,
                eye_origin=np.array(config.operator.eye_origin),
                approach_duration=config.operator.approach_duration,
                distraction_duration=config.operator.distraction_duration,
                gaze_noise=config.operator.gaze_noise,
                drive_force=config.operator.drive_force,
            )
            script.force_cap = config.operator.force_cap
            script.fixation_hold = config.operator.fixation_hold
            script.fixation_jitter = config.operator.fixation_jitter
            extra = tuple(config.operator.focus_extra_force)
            if any(extra):
                script.phases = [
                    p if p.name == "distraction"
                    else op_mod.ScriptPhase(
                        p.name, p.duration, p.gaze_target, p.gaze_noise,
                        p.hand_drive, extra,
                    )
                    for p in script.phases
                ]
            self.operator = ScriptedOperatorSource(script)

        # Mode resolution: fixed modes pin the attention snapshot.
        if config.mode is Mode.FULL_ROBOT:
            self.attention_pin = 1.0
        elif config.mode is Mode.FULL_HUMAN:
            self.attention_pin = 0.0
        else:
            self.attention_pin = config.attention_override

        # Loop state.
        self.tick_index = 0
        self.records: list[TraceRecord] = []
        self.f_sensor = np.zeros(3)
        self.prev_depth = 0.0
        self.prev_gaze_point = None
        self.last_gaze_object = ObjectLabel.BACKGROUND
        self.last_gaze_kind = GazeKind.UNCLASSIFIED
        self.w = 0.0
        self.completed = False
        self.fault: str | None = None
        self.completion_time: float | None = None

    # ------------------------------------------------------------------

    def _gaze_due(self, k: int) -> bool:
        rate = self.config.gaze_rate
        before = math.floor((k - 1) * self.dt * rate + 1e-9) if k > 0 else -1
        return math.floor(k * self.dt * rate + 1e-9) > before

    def _descent_gate(self, alpha_eff: float) -> float:
        lo = self.config.safety.descent_gate_low
        hi = self.config.safety.descent_gate_high
        return min(max((alpha_eff - lo) / (hi - lo), 0.0), 1.0)

    def _corridor_clamp(self, x_task: np.ndarray) -> tuple[np.ndarray, bool]:
        radius = self.config.safety.corridor_radius
        lateral = math.hypot(x_task[0], x_task[1])
        if lateral <= radius:
            return x_task, False
        scale = radius / lateral
        return np.array([x_task[0] * scale, x_task[1] * scale, x_task[2]]), True

    # ------------------------------------------------------------------

    def step(self) -> TraceRecord:
        """Advance the coupled system by one tick and record it."""
        if self.completed or self.fault:
            raise RuntimeError("session already finished")
        k = self.tick_index
        t = k * self.dt
        events: list[str] = []

        # Gaze pipeline at the gaze rate.
        if self._gaze_due(k):
            self._drill_obj.shape.base_center = np.asarray(
                self.tip_task(), dtype=float
            )
            sample = self.operator.gaze(t)
            point = project_gaze(sample, self.scene)
            if self.prev_gaze_point is not None:
                point = gaze_mod.classify_fixation(
                    self.gmm, point, self.prev_gaze_point
                )
            self.prev_gaze_point = point
            att.update_attention(self.attention, point, t)
            self.last_gaze_object = point.object
            self.last_gaze_kind = point.kind

        # Attention snapshot in effect (pinned in the fixed modes).
        if self.attention_pin is not None:
            alpha_eff = abar_eff = float(self.attention_pin)
        else:
            alpha_eff = self.attention.alpha
            abar_eff = self.attention.alpha_filtered
        self.w = att.allocation_weight(abar_eff, self.alloc)
        gate = self._descent_gate(alpha_eff)

        # Operator hand force (the scripted hand senses the assistance level).
        f_operator = self.operator.hand_force(t, self.w)

        # Shared interaction controller on the device.
        x_d_full = hap.desired_position(self.hstate.x, self.hparams)
        x_d = np.array([
            x_d_full[0],
            x_d_full[1],
            self.hstate.x[2] + gate * (x_d_full[2] - self.hstate.x[2]),
        ])
        f_fdbk = hap.scale_feedback(self.f_sensor, self.w)
        cmd = hap.ImpedanceCommand(w=self.w, x_d=x_d, f_fdbk=f_fdbk)
        u = hap.haptic_control(self.hstate, cmd, self.hparams)
        tau_ext = hap.task_force_to_torque(self.hstate, f_operator, self.hparams)
        self.hstate = hap.step_dynamics(self.hstate, u, tau_ext, self.dt, self.hparams)

        # Robot side: corridor clamp, pose mapping, resolved-rate servo.
        x_cmd, clamped = self._corridor_clamp(self.hstate.x)
        if clamped:
            events.append("corridor_clamp")
        x_d_ur = rob.map_haptic_to_robot(x_cmd, self.calibration)
        u_r = rob.servo_control(self.rstate, x_d_ur, self.calibration, self.arm)
        self.rstate, hit_limit = rob.step_robot(
            self.rstate, u_r, self.dt, self.arm, self.joint_limit
        )
        if hit_limit:
            events.append("joint_limit")

        # Bone interaction at the drill tip (task frame).
        tip = self.tip_task()
        depth = float(
            np.dot(tip - self.bone.entry_point, self.bone.axis)
        )
        feed = (depth - self.prev_depth) / self.dt
        self.prev_depth = depth
        self.contact = bone_mod.advance_cut(self.contact, depth, feed)
        self.f_sensor = bone_mod.drilling_force(self.contact, self.bone)

        status = bone_mod.check_completion(self.contact, self.bone)
        if status is bone_mod.DrillStatus.COMPLETE:
            self.completed = True
            self.completion_time = t
            events.append("complete")

        record = TraceRecord(
            t=t,
            w=self.w,
            abar=abar_eff,
            alpha=alpha_eff,
            haptic_x=tuple(self.hstate.x),
            haptic_v=tuple(self.hstate.x_dot),
            robot_x=tuple(self.rstate.x_ur),
            tip_task=tuple(tip),
            depth=depth,
            f_sensor=tuple(self.f_sensor),
            f_fdbk=tuple(f_fdbk),
            f_operator=tuple(np.asarray(f_operator, dtype=float)),
            gaze_object=self.last_gaze_object.value,
            gaze_kind=self.last_gaze_kind.value,
            phase=self.operator.phase_name(t),
            events=events,
        )
        self.records.append(record)
        self.tick_index += 1
        return record

    def tip_task(self) -> np.ndarray:
        return rob.map_robot_to_task(self.rstate.x_ur, self.calibration)

    @property
    def done(self) -> bool:
        return (
            self.completed
            or self.fault is not None
            or self.tick_index * self.dt >= self.config.max_duration
        )

    def run(self, on_record=None) -> SessionResult:
        while not self.done:
            try:
                record = self.step()
            except IntegrationFaultError as exc:
                self.fault = str(exc)
                if self.records:
                    self.records[-1].events.append(f"fault: {exc}")
                break
            if on_record is not None:
                on_record(record)
        return self.result()

    def result(self) -> SessionResult:
        interval = self.operator.distraction_interval()
        if self.records:
            metrics = compute_metrics(
                self.records,
                interval,
                target_depth=self.bone.target_depth,
            )
        else:
            # Aborted before the first tick: empty partial trace.
            metrics = Metrics(0.0, 0.0, 0.0, None, 0.0, False)
        meta = trace_meta(self.config.to_dict(), interval)
        return SessionResult(
            records=self.records,
            metrics=metrics,
            meta=meta,
            completed=self.completed,
            fault=self.fault,
        )


def run_session(config: SessionConfig, operator_source=None,
                on_record=None) -> SessionResult:
    return SessionEngine(config, operator_source=operator_source).run(on_record)


# ---------------------------------------------------------------------------
# Metrics and the three-mode comparison
# ---------------------------------------------------------------------------

def compute_metrics(records, distraction_interval, target_depth: float) -> Metrics:
    """Safety and ergonomics metrics from a (possibly re-read) trace."""
    if not records:
        raise ValueError("cannot compute metrics of an empty trace")

    movement = 0.0
    std_rms = 0.0
    if distraction_interval is not None:
        t0, t1 = distraction_interval
        if t1 <= t0:
            raise ValueError(f"empty distraction interval [{t0}, {t1}]")
        tips = np.array(
            [r.tip_task for r in records if t0 <= r.t <= t1], dtype=float
        )
        # A session may legitimately finish before the scripted distraction;
        # an interval the trace never reached contributes no movement.
        if len(tips) > 0:
            movement = float(np.sum(np.linalg.norm(np.diff(tips, axis=0), axis=1)))
            std_rms = float(np.sqrt(np.mean(np.var(tips, axis=0))))

    times = np.array([r.t for r in records])
    force_mag = np.array([np.linalg.norm(r.f_operator) for r in records])
    impulse = float(np.trapezoid(force_mag, times)) if len(records) > 1 else 0.0

    completion_time = None
    for r in records:
        if "complete" in r.events:
            completion_time = r.t
            break
    max_depth = max(r.depth for r in records)
    return Metrics(
        distraction_movement=movement,
        distraction_position_std=std_rms,
        operator_impulse=impulse,
        completion_time=completion_time,
        max_overshoot=max(0.0, max_depth - target_depth),
        completed=completion_time is not None,
    )


def compare_modes(config: SessionConfig) -> dict:
    """Run the three collaboration settings with identical seeds and scripts."""
    import copy

    results = {}
    for mode in (Mode.FULL_ROBOT, Mode.FULL_HUMAN, Mode.SHARED):
        cfg = copy.deepcopy(config)
        cfg.mode = mode
        cfg.attention_override = None
        results[mode.value] = run_session(cfg)
    return results
