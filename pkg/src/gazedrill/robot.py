"""Simulated patient-side drilling robot: pose mapping and resolved-rate servo.

The desired tip position comes from the hand-held device through a three-stage
homogeneous chain (task space -> vertebra frame -> scale division -> robot
base).  A proportional resolved-rate law through the thresholded Jacobian
pseudoinverse drives the kinematic arm toward it.  The tracking error is
computed as (x_d - x); with a positive gain this converges, which is the
role the mapping and servo are meant to play.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import (
    HomTransform,
    Matrix,
    Vec3,
    apply_homogeneous,
    compose,
    pseudoinverse,
)
from .kinematics import ThreeRevoluteArm

DEFAULT_JOINT_LIMIT = np.deg2rad(170.0)


@dataclass
class Calibration:
    """Fixed registration between task space, vertebra model and robot base."""

    t_vertebrae_to_base: HomTransform
    t_task_to_vertebrae: HomTransform
    k_scale: float = 3.0
    k_p: np.ndarray = field(default_factory=lambda: np.full(3, 20.0))

    def __post_init__(self):
        if self.k_scale < 1.0:
            raise ValueError(f"k_scale must be >= 1, got {self.k_scale}")
        self.k_p = np.asarray(self.k_p, dtype=float)
        if np.any(self.k_p <= 0):
            raise ValueError("servo gains must be positive")
        self._chain = compose(
            self.t_vertebrae_to_base,
            compose(HomTransform.scale(self.k_scale), self.t_task_to_vertebrae),
        )
        self._chain_inv = self._chain.inverse()

    @staticmethod
    def identity(k_scale: float = 3.0, k_p: float = 20.0) -> "Calibration":
        return Calibration(
            t_vertebrae_to_base=HomTransform.identity(),
            t_task_to_vertebrae=HomTransform.identity(),
            k_scale=k_scale,
            k_p=np.full(3, k_p),
        )


@dataclass
class RobotState:
    q: np.ndarray
    x_ur: Vec3

    @staticmethod
    def from_joints(q: np.ndarray, arm: ThreeRevoluteArm) -> "RobotState":
        q = np.asarray(q, dtype=float)
        return RobotState(q=q, x_ur=arm.forward(q))


def map_haptic_to_robot(x: Vec3, cal: Calibration) -> Vec3:
    """Task-space device position -> robot-base drill target (scaled down)."""
    return apply_homogeneous(cal._chain, x)


def map_robot_to_task(x_ur: Vec3, cal: Calibration) -> Vec3:
    """Robot-base tip position expressed back in the task frame (scaled up)."""
    return apply_homogeneous(cal._chain_inv, x_ur)


def servo_control(
    state: RobotState, x_d_ur: Vec3, cal: Calibration, arm: ThreeRevoluteArm
) -> np.ndarray:
    """Joint velocities K_p J^+(q) (x_d - x); rank-deficiency is thresholded."""
    if not np.all(np.isfinite(x_d_ur)):
        raise ValueError("non-finite robot position command")
    j_pinv = pseudoinverse(arm.jacobian(state.q))
    return cal.k_p * (j_pinv @ (x_d_ur - state.x_ur))


def step_robot(
    state: RobotState,
    u: np.ndarray,
    dt: float,
    arm: ThreeRevoluteArm,
    joint_limit: float = DEFAULT_JOINT_LIMIT,
) -> tuple[RobotState, bool]:
    """Integrate joint velocities; returns (state, limit_clamped)."""
    if not 0.0 < dt <= 0.01:
        raise ValueError(f"dt must lie in (0, 0.01], got {dt}")
    q = state.q + np.asarray(u, dtype=float) * dt
    clamped_q = np.clip(q, -joint_limit, joint_limit)
    hit_limit = bool(np.any(clamped_q != q))
    return RobotState(q=clamped_q, x_ur=arm.forward(clamped_q)), hit_limit


def jacobian_finite_difference(arm: ThreeRevoluteArm, q: np.ndarray,
                               eps: float = 1e-7) -> Matrix:
    """Column-wise finite-difference Jacobian, used as the consistency oracle."""
    q = np.asarray(q, dtype=float)
    cols = []
    for i in range(len(q)):
        dq = np.zeros_like(q)
        dq[i] = eps
        cols.append((arm.forward(q + dq) - arm.forward(q - dq)) / (2 * eps))
    return np.column_stack(cols)
