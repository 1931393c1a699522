"""Simulated 3-DOF hand-held haptic device and its shared interaction controller.

Task frame: origin at the drilling entry point, z pointing down along the
planned drilling axis, so descending into bone means increasing z and the
bone's resistance has negative z.

The plant is M(theta) theta_dd + g(theta) = tau_ext + u with constant
diagonal M and no Coriolis term; the controller compensates gravity with the
same model, so the interesting dynamics are entirely the virtual impedance:

    u = J^T(theta) (K(w) (x_d - x) - D x_dot + f_fdbk) + g(theta)

K(w) = diag(k_x, k_y, w k_z_max) keeps the device stiff laterally at any
weight and frees the drilling axis as the weight drops to zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import IntegrationFaultError
from .geometry import Matrix, Vec3
from .kinematics import CartesianGantry, make_kinematics

GRAVITY_ACCEL = 9.81  # m/s^2, along task +z (down)


@dataclass
class HapticParams:
    mass: np.ndarray = field(default_factory=lambda: np.array([0.1, 0.1, 0.1]))
    damping: np.ndarray = field(default_factory=lambda: np.array([10.0, 10.0, 50.0]))
    k_x: float = 1000.0
    k_y: float = 1000.0
    k_z_max: float = 50.0
    v_drill: float = 0.001
    effector_mass: float = 0.1  # kg, point mass used by the gravity model
    kinematics: object = field(default_factory=CartesianGantry)

    def __post_init__(self):
        self.mass = np.asarray(self.mass, dtype=float)
        self.damping = np.asarray(self.damping, dtype=float)
        if np.any(self.mass <= 0) or np.any(self.damping <= 0):
            raise ValueError("mass and damping diagonals must be positive")
        if self.k_x <= 0 or self.k_y <= 0 or self.k_z_max <= 0:
            raise ValueError("stiffness parameters must be positive")

    @staticmethod
    def from_kinematics_name(name: str, **kwargs) -> "HapticParams":
        return HapticParams(kinematics=make_kinematics(name), **kwargs)


@dataclass
class HapticState:
    theta: np.ndarray
    theta_dot: np.ndarray
    x: Vec3
    x_dot: Vec3

    @staticmethod
    def at_rest(params: HapticParams, theta: np.ndarray | None = None) -> "HapticState":
        kin = params.kinematics
        theta = np.zeros(kin.n_joints) if theta is None else np.asarray(theta, float)
        x = kin.forward(theta)
        return HapticState(theta=theta, theta_dot=np.zeros(kin.n_joints), x=x,
                           x_dot=np.zeros(3))


@dataclass
class ImpedanceCommand:
    w: float
    x_d: Vec3
    f_fdbk: Vec3

    def __post_init__(self):
        if not 0.0 <= self.w <= 1.0:
            raise ValueError(f"allocation weight must lie in [0, 1], got {self.w}")


# ---------------------------------------------------------------------------
# Control terms
# ---------------------------------------------------------------------------

def stiffness_matrix(w: float, params: HapticParams) -> Matrix:
    """K(w) = diag(k_x, k_y, w k_z_max)."""
    if not 0.0 <= w <= 1.0:
        raise ValueError(f"allocation weight must lie in [0, 1], got {w}")
    return np.diag([params.k_x, params.k_y, w * params.k_z_max])


def desired_position(x: Vec3, params: HapticParams) -> Vec3:
    """Equilibrium point that yields a steady descent at v_drill under w = 1.

    x and y are pinned to the drilling axis; the z target leads the current
    position by v_drill * d_z / k_z_max.
    """
    offset = params.v_drill * params.damping[2] / params.k_z_max
    return np.array([0.0, 0.0, x[2] + offset])


def scale_feedback(f_sensor: Vec3, w: float) -> Vec3:
    """f_fdbk = (1 - 0.5 w) f_sensor: feedback softens as autonomy rises."""
    if not 0.0 <= w <= 1.0:
        raise ValueError(f"allocation weight must lie in [0, 1], got {w}")
    return (1.0 - 0.5 * w) * np.asarray(f_sensor, dtype=float)


def gravity_torque(theta: np.ndarray, params: HapticParams) -> np.ndarray:
    """Gravitational joint torques for a point effector mass (task z is down)."""
    f_gravity = np.array([0.0, 0.0, params.effector_mass * GRAVITY_ACCEL])
    j = params.kinematics.jacobian(theta)
    return -j.T @ f_gravity


def haptic_control(
    state: HapticState, cmd: ImpedanceCommand, params: HapticParams
) -> np.ndarray:
    """Driving torques: impedance about x_d plus feedback force and gravity."""
    k = stiffness_matrix(cmd.w, params)
    f_task = k @ (cmd.x_d - state.x) - params.damping * state.x_dot + cmd.f_fdbk
    j = params.kinematics.jacobian(state.theta)
    return j.T @ f_task + gravity_torque(state.theta, params)


# ---------------------------------------------------------------------------
# Plant
# ---------------------------------------------------------------------------

def step_dynamics(
    state: HapticState,
    u: np.ndarray,
    tau_ext: np.ndarray,
    dt: float,
    params: HapticParams,
) -> HapticState:
    """Semi-implicit Euler step of M theta_dd + g(theta) = tau_ext + u."""
    if not 0.0 < dt <= 0.01:
        raise ValueError(f"dt must lie in (0, 0.01], got {dt}")
    u = np.asarray(u, dtype=float)
    tau_ext = np.asarray(tau_ext, dtype=float)
    if not (np.all(np.isfinite(u)) and np.all(np.isfinite(tau_ext))):
        raise IntegrationFaultError("non-finite torque input to haptic plant")
    accel = (tau_ext + u - gravity_torque(state.theta, params)) / params.mass
    theta_dot = state.theta_dot + accel * dt
    theta = state.theta + theta_dot * dt
    if not np.all(np.isfinite(theta)):
        raise IntegrationFaultError("haptic state diverged")
    kin = params.kinematics
    x = kin.forward(theta)
    x_dot = kin.jacobian(theta) @ theta_dot
    return HapticState(theta=theta, theta_dot=theta_dot, x=x, x_dot=x_dot)


def task_force_to_torque(
    state: HapticState, f_task: Vec3, params: HapticParams
) -> np.ndarray:
    """Map an operator hand force in the task frame to joint torques."""
    return params.kinematics.jacobian(state.theta).T @ np.asarray(f_task, float)
