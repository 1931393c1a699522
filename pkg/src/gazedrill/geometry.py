"""Vector, homogeneous-transform and pseudoinverse primitives shared by the controllers.

Conventions
-----------
* Vectors are plain ``numpy`` float arrays of shape (3,); ``vec3`` validates
  finiteness on construction.
* Homogeneous transforms are 4x4 with bottom row (0, 0, 0, s), s > 0.  Rigid
  calibration transforms keep s = 1; the only non-rigid stage allowed in a
  calibration chain is the pure scale ``diag(1, 1, 1, k)``, which divides the
  mapped point by k after the projective division.
* Quaternions are (w, x, y, z), unit norm.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateTransformError

Vec3 = np.ndarray
Matrix = np.ndarray

# Relative singular-value cutoff: below this fraction of the largest singular
# value a direction is treated as rank-deficient, which keeps joint velocities
# bounded near manipulator singularities.
SV_CUTOFF = 1e-10


def vec3(x: float, y: float, z: float) -> Vec3:
    v = np.array([x, y, z], dtype=float)
    if not np.all(np.isfinite(v)):
        raise ValueError(f"non-finite vector components: {v}")
    return v


def norm(v: Vec3) -> float:
    return float(np.linalg.norm(v))


def normalize(v: Vec3) -> Vec3:
    n = np.linalg.norm(v)
    if n == 0.0:
        raise ValueError("cannot normalize zero vector")
    return v / n


# ---------------------------------------------------------------------------
# Quaternions (w, x, y, z)
# ---------------------------------------------------------------------------

def quat_normalize(q: np.ndarray) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    return q / np.linalg.norm(q)


def quat_rotate(q: np.ndarray, v: Vec3) -> Vec3:
    """Rotate vector v by unit quaternion q = (w, x, y, z)."""
    w, x, y, z = q
    u = np.array([x, y, z])
    # v' = v + 2 w (u x v) + 2 (u x (u x v))
    uv = np.cross(u, v)
    return v + 2.0 * w * uv + 2.0 * np.cross(u, uv)


def quat_from_to(a: Vec3, b: Vec3) -> np.ndarray:
    """Shortest-arc unit quaternion rotating direction a onto direction b."""
    a = normalize(np.asarray(a, dtype=float))
    b = normalize(np.asarray(b, dtype=float))
    c = np.cross(a, b)
    d = float(np.dot(a, b))
    if d < -1.0 + 1e-12:
        # Antiparallel: rotate pi about any axis orthogonal to a.
        axis = np.cross(a, np.array([1.0, 0.0, 0.0]))
        if np.linalg.norm(axis) < 1e-9:
            axis = np.cross(a, np.array([0.0, 1.0, 0.0]))
        axis = normalize(axis)
        return np.array([0.0, axis[0], axis[1], axis[2]])
    q = np.array([1.0 + d, c[0], c[1], c[2]])
    return quat_normalize(q)


# ---------------------------------------------------------------------------
# Homogeneous transforms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HomTransform:
    """4x4 homogeneous transform with positive projective scale."""

    m: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.m, dtype=float)
        if m.shape != (4, 4):
            raise ValueError(f"homogeneous transform must be 4x4, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("non-finite transform entries")
        if not np.allclose(m[3, :3], 0.0, atol=1e-12) or m[3, 3] <= 0.0:
            raise ValueError(f"bottom row must be (0,0,0,s) with s>0, got {m[3]}")
        object.__setattr__(self, "m", m)

    # Constructors ---------------------------------------------------------

    @staticmethod
    def identity() -> "HomTransform":
        return HomTransform(np.eye(4))

    @staticmethod
    def translation(x: float, y: float, z: float) -> "HomTransform":
        m = np.eye(4)
        m[:3, 3] = (x, y, z)
        return HomTransform(m)

    @staticmethod
    def rotation(axis: str, angle: float) -> "HomTransform":
        c, s = np.cos(angle), np.sin(angle)
        r = np.eye(3)
        if axis == "x":
            r = np.array([[1, 0, 0], [0, c, -s], [0, s, c]])
        elif axis == "y":
            r = np.array([[c, 0, s], [0, 1, 0], [-s, 0, c]])
        elif axis == "z":
            r = np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]])
        else:
            raise ValueError(f"unknown axis {axis!r}")
        return HomTransform.from_rotation_translation(r, np.zeros(3))

    @staticmethod
    def from_rotation_translation(r: Matrix, t: Vec3) -> "HomTransform":
        r = np.asarray(r, dtype=float)
        if not np.allclose(r @ r.T, np.eye(3), atol=1e-9) or np.linalg.det(r) <= 0:
            raise ValueError("rotation block must be orthonormal with det +1")
        m = np.eye(4)
        m[:3, :3] = r
        m[:3, 3] = np.asarray(t, dtype=float)
        return HomTransform(m)

    @staticmethod
    def scale(k: float) -> "HomTransform":
        """diag(1, 1, 1, k): divides mapped points by k."""
        if k <= 0:
            raise ValueError(f"scale factor must be positive, got {k}")
        return HomTransform(np.diag([1.0, 1.0, 1.0, float(k)]))

    # Operations -----------------------------------------------------------

    @property
    def rotation_block(self) -> Matrix:
        return self.m[:3, :3]

    def rotate(self, v: Vec3) -> Vec3:
        """Apply only the linear (rotation) block to a direction vector."""
        return self.m[:3, :3] @ v

    def inverse(self) -> "HomTransform":
        return HomTransform(np.linalg.inv(self.m))


def compose(a: HomTransform, b: HomTransform) -> HomTransform:
    """Matrix product a.b: apply b first, then a."""
    return HomTransform(a.m @ b.m)


def apply_homogeneous(t: HomTransform, p: Vec3) -> Vec3:
    """Lift p to (x, y, z, 1), multiply, divide by the projective component."""
    ph = t.m @ np.array([p[0], p[1], p[2], 1.0])
    if ph[3] == 0.0:
        raise DegenerateTransformError("projective component is zero")
    return ph[:3] / ph[3]


# ---------------------------------------------------------------------------
# Pseudoinverse
# ---------------------------------------------------------------------------

def pseudoinverse(j: Matrix) -> Matrix:
    """Moore-Penrose pseudoinverse with relative singular-value thresholding."""
    j = np.asarray(j, dtype=float)
    if not np.all(np.isfinite(j)):
        raise ValueError("non-finite matrix entries")
    return np.linalg.pinv(j, rcond=SV_CUTOFF)
