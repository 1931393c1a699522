"""Forward kinematics and Jacobians for the two simulated devices.

Two models cover everything the controllers need:

* ``CartesianGantry`` -- 3 prismatic axes, joint coordinates are meters and
  the Jacobian is the identity.  Default for the hand-held device.
* ``ThreeRevoluteArm`` -- base yaw plus two pitch joints with link lengths
  (l1 vertical offset, l2, l3).  Default for the patient-side arm, and an
  option for the hand-held device when a nontrivial J^T is wanted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import Matrix, Vec3


class CartesianGantry:
    """x = theta; J = I (joint space is task space, in meters)."""

    n_joints = 3

    def forward(self, theta: np.ndarray) -> Vec3:
        return np.array(theta, dtype=float)

    def jacobian(self, theta: np.ndarray) -> Matrix:
        return np.eye(3)


@dataclass
class ThreeRevoluteArm:
    """Spatial 3R chain: q0 yaw about base z, q1/q2 pitch about local y.

    Tip position (base frame, z up):
        r = l2 cos q1 + l3 cos(q1 + q2)
        x = cos q0 * r, y = sin q0 * r, z = l1 + l2 sin q1 + l3 sin(q1 + q2)
    """

    l1: float = 0.4
    l2: float = 0.4
    l3: float = 0.2

    n_joints = 3

    def forward(self, q: np.ndarray) -> Vec3:
        q0, q1, q2 = q
        r = self.l2 * np.cos(q1) + self.l3 * np.cos(q1 + q2)
        return np.array([
            np.cos(q0) * r,
            np.sin(q0) * r,
            self.l1 + self.l2 * np.sin(q1) + self.l3 * np.sin(q1 + q2),
        ])

    def jacobian(self, q: np.ndarray) -> Matrix:
        q0, q1, q2 = q
        c0, s0 = np.cos(q0), np.sin(q0)
        c1, s1 = np.cos(q1), np.sin(q1)
        c12, s12 = np.cos(q1 + q2), np.sin(q1 + q2)
        r = self.l2 * c1 + self.l3 * c12
        dr_dq1 = -self.l2 * s1 - self.l3 * s12
        dr_dq2 = -self.l3 * s12
        return np.array([
            [-s0 * r, c0 * dr_dq1, c0 * dr_dq2],
            [c0 * r, s0 * dr_dq1, s0 * dr_dq2],
            [0.0, self.l2 * c1 + self.l3 * c12, self.l3 * c12],
        ])


def make_kinematics(name: str, lengths: tuple[float, float, float] = (0.4, 0.4, 0.2)):
    if name == "gantry":
        return CartesianGantry()
    if name == "arm3r":
        return ThreeRevoluteArm(*lengths)
    raise ValueError(f"unknown kinematics model {name!r}")
