"""Semantic scene primitives and gaze-ray projection.

The operator's visual world is a handful of labelled primitives (the enlarged
vertebra model, the drill, the planned path, the distractor display) enclosed
by one large background box that stands in for the spatial mesh of the real
room, so every gaze ray is guaranteed to hit something.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import RejectedSampleError
from .geometry import HomTransform, Vec3, normalize, quat_rotate

_NO_HIT = np.inf
_RAY_EPS = 1e-12

# Gaze direction in the head frame before the head pose is applied.
HEAD_FORWARD = np.array([0.0, 0.0, 1.0])


class ObjectLabel(enum.Enum):
    VERTEBRA = "vertebra"
    DRILL = "drill"
    DRILLING_PATH = "drilling_path"
    DISTRACTOR_DISPLAY = "distractor_display"
    BACKGROUND = "background"


SURGERY_RELEVANT = frozenset(
    {ObjectLabel.VERTEBRA, ObjectLabel.DRILL, ObjectLabel.DRILLING_PATH}
)


class GazeKind(enum.Enum):
    FIXATION = "fixation"
    SACCADE = "saccade"
    UNCLASSIFIED = "unclassified"


# ---------------------------------------------------------------------------
# Primitives
# ---------------------------------------------------------------------------

@dataclass
class Sphere:
    center: Vec3
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("sphere radius must be positive")
        self.center = np.asarray(self.center, dtype=float)

    def ray_hit(self, origin: Vec3, direction: Vec3) -> float:
        oc = origin - self.center
        b = float(np.dot(direction, oc))
        c = float(np.dot(oc, oc)) - self.radius**2
        disc = b * b - c
        if disc < 0:
            return _NO_HIT
        root = np.sqrt(disc)
        t0, t1 = -b - root, -b + root
        if t0 > _RAY_EPS:
            return t0
        if t1 > _RAY_EPS:
            return t1
        return _NO_HIT

    def surface_residual(self, p: Vec3) -> float:
        return float(np.linalg.norm(p - self.center) - self.radius)


@dataclass
class Box:
    """Axis-aligned box given by center and half extents."""

    center: Vec3
    half_extents: Vec3

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=float)
        self.half_extents = np.asarray(self.half_extents, dtype=float)
        if np.any(self.half_extents <= 0):
            raise ValueError("box half extents must be positive")

    def ray_hit(self, origin: Vec3, direction: Vec3) -> float:
        lo = self.center - self.half_extents
        hi = self.center + self.half_extents
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = 1.0 / direction
            t1 = (lo - origin) * inv
            t2 = (hi - origin) * inv
        # Parallel-axis rays: replace NaN slabs with +-inf bounds check.
        tmin_axes = np.where(np.isnan(t1), -np.inf, np.minimum(t1, t2))
        tmax_axes = np.where(np.isnan(t2), np.inf, np.maximum(t1, t2))
        for k in range(3):
            if direction[k] == 0.0 and not lo[k] <= origin[k] <= hi[k]:
                return _NO_HIT
        tmin = float(np.max(tmin_axes))
        tmax = float(np.min(tmax_axes))
        if tmax < tmin:
            return _NO_HIT
        if tmin > _RAY_EPS:
            return tmin
        if tmax > _RAY_EPS:
            return tmax  # the ray starts inside: exit face
        return _NO_HIT

    def surface_residual(self, p: Vec3) -> float:
        d = np.abs(p - self.center) - self.half_extents
        return float(np.max(d))


@dataclass
class Cylinder:
    """Finite capped cylinder from base_center along a unit axis."""

    base_center: Vec3
    axis: Vec3
    radius: float
    length: float

    def __post_init__(self):
        if self.radius <= 0 or self.length <= 0:
            raise ValueError("cylinder radius and length must be positive")
        self.base_center = np.asarray(self.base_center, dtype=float)
        self.axis = normalize(np.asarray(self.axis, dtype=float))

    def ray_hit(self, origin: Vec3, direction: Vec3) -> float:
        a_hat = self.axis
        oc = origin - self.base_center
        d_perp = direction - np.dot(direction, a_hat) * a_hat
        o_perp = oc - np.dot(oc, a_hat) * a_hat
        best = _NO_HIT

        a = float(np.dot(d_perp, d_perp))
        if a > 1e-16:
            b = float(np.dot(d_perp, o_perp))
            c = float(np.dot(o_perp, o_perp)) - self.radius**2
            disc = b * b - a * c
            if disc >= 0:
                root = np.sqrt(disc)
                for t in ((-b - root) / a, (-b + root) / a):
                    if t > _RAY_EPS:
                        h = float(np.dot(oc + t * direction, a_hat))
                        if 0.0 <= h <= self.length:
                            best = min(best, t)

        # End caps.
        denom = float(np.dot(direction, a_hat))
        if abs(denom) > 1e-16:
            for h_cap in (0.0, self.length):
                t = (h_cap - float(np.dot(oc, a_hat))) / denom
                if t > _RAY_EPS:
                    radial = oc + t * direction - h_cap * a_hat
                    if float(np.dot(radial, radial)) <= self.radius**2:
                        best = min(best, t)
        return best

    def surface_residual(self, p: Vec3) -> float:
        rel = p - self.base_center
        h = float(np.dot(rel, self.axis))
        radial = float(np.linalg.norm(rel - h * self.axis))
        side = abs(radial - self.radius) if 0.0 <= h <= self.length else np.inf
        cap = min(abs(h), abs(h - self.length)) if radial <= self.radius else np.inf
        return float(min(side, cap))


Shape = Sphere | Box | Cylinder


# ---------------------------------------------------------------------------
# Scene and gaze types
# ---------------------------------------------------------------------------

@dataclass
class SceneObject:
    id: str
    label: ObjectLabel
    shape: Shape


@dataclass
class GazeSample:
    """Raw tracker sample: head-frame gaze orientation plus head pose."""

    timestamp: float
    eye_origin: Vec3
    orientation: np.ndarray  # unit quaternion (w, x, y, z), head frame
    head_pose: HomTransform = field(default_factory=HomTransform.identity)

    def __post_init__(self):
        self.eye_origin = np.asarray(self.eye_origin, dtype=float)
        q = np.asarray(self.orientation, dtype=float)
        if abs(np.linalg.norm(q) - 1.0) > 1e-6:
            raise ValueError(f"gaze quaternion must be unit norm, got {q}")
        self.orientation = q


@dataclass(frozen=True)
class GazePoint:
    """World-space gaze projection with semantic label."""

    position: Vec3
    timestamp: float
    object: ObjectLabel
    kind: GazeKind = GazeKind.UNCLASSIFIED


def with_kind(p: GazePoint, kind: GazeKind) -> GazePoint:
    return replace(p, kind=kind)


# ---------------------------------------------------------------------------
# Projection
# ---------------------------------------------------------------------------

def gaze_ray(sample: GazeSample) -> tuple[Vec3, Vec3]:
    """World-frame origin and unit direction of a gaze sample."""
    dir_head = quat_rotate(sample.orientation, HEAD_FORWARD)
    dir_world = sample.head_pose.rotate(dir_head)
    return sample.eye_origin, normalize(dir_world)


def project_gaze(sample: GazeSample, scene: list[SceneObject]) -> GazePoint:
    """Nearest ray-primitive intersection along the world-frame gaze ray.

    The scene is expected to contain a background object that catches any
    ray, so a miss is a scene-construction bug rather than a runtime state.
    """
    origin, direction = gaze_ray(sample)
    best_t = _NO_HIT
    best_obj: SceneObject | None = None
    for obj in scene:
        t = obj.shape.ray_hit(origin, direction)
        if t < best_t:
            best_t = t
            best_obj = obj
    if best_obj is None:
        raise RejectedSampleError(
            "gaze ray hit nothing; scene lacks an enclosing background object"
        )
    return GazePoint(
        position=origin + best_t * direction,
        timestamp=sample.timestamp,
        object=best_obj.label,
        kind=GazeKind.UNCLASSIFIED,
    )


def is_surgery_relevant(p: GazePoint) -> bool:
    return p.object in SURGERY_RELEVANT
