"""Layered axial bone-resistance model standing in for the drill force sensor.

The drill advances along the task z axis; each layer resists with a dry term
plus a viscous term proportional to feed velocity, applied only while the tip
is at the cut front and advancing.  Material removal is irreversible: above
the deepest point reached the hole is already cut and the force is zero.

The dry term engages over a short feed-velocity ramp so the force stays
continuous in feed velocity.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .geometry import Vec3

# Feed speed over which the dry term ramps from 0 to its full value.
FEED_ENGAGE_SPEED = 1e-4  # m/s


class DrillStatus(enum.Enum):
    DRILLING = "drilling"
    COMPLETE = "complete"


@dataclass(frozen=True)
class BoneLayer:
    depth_start: float
    depth_end: float
    viscous: float  # N s / m
    dry: float  # N

    def __post_init__(self):
        if self.depth_end <= self.depth_start:
            raise ValueError("layer must have positive thickness")
        if self.viscous < 0 or self.dry < 0:
            raise ValueError("layer coefficients must be non-negative")


@dataclass
class BoneModel:
    layers: list[BoneLayer]
    target_depth: float = 0.03
    entry_point: Vec3 = field(default_factory=lambda: np.zeros(3))
    axis: Vec3 = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))

    def __post_init__(self):
        if self.target_depth <= 0:
            raise ValueError("target depth must be positive")
        if not self.layers:
            raise ValueError("bone model needs at least one layer")
        layers = sorted(self.layers, key=lambda la: la.depth_start)
        if abs(layers[0].depth_start) > 1e-12:
            raise ValueError("layers must start at depth 0")
        for a, b in zip(layers, layers[1:]):
            if abs(a.depth_end - b.depth_start) > 1e-12:
                raise ValueError("layers must be contiguous and non-overlapping")
        if layers[-1].depth_end < self.target_depth - 1e-12:
            raise ValueError("layers must cover the target depth")
        self.layers = layers
        self.entry_point = np.asarray(self.entry_point, dtype=float)
        self.axis = np.asarray(self.axis, dtype=float)

    def layer_at(self, depth: float) -> BoneLayer:
        for layer in self.layers:
            if depth < layer.depth_end:
                return layer
        return self.layers[-1]


@dataclass
class DrillContact:
    """Instantaneous tip state relative to the bone entry.

    ``cut_depth`` is the deepest point reached so far and never decreases.
    """

    depth: float
    feed_velocity: float
    cut_depth: float = 0.0

    @property
    def in_contact(self) -> bool:
        return self.depth >= 0.0 and self.depth >= self.cut_depth - 1e-12


def advance_cut(contact: DrillContact, depth: float, feed_velocity: float) -> DrillContact:
    """New contact state after the tip moved to ``depth``."""
    return DrillContact(
        depth=depth,
        feed_velocity=feed_velocity,
        cut_depth=max(contact.cut_depth, depth),
    )


def drilling_force(contact: DrillContact, model: BoneModel) -> Vec3:
    """Axial resistance in the task frame; zero unless cutting new material."""
    if contact.depth < 0.0 or not contact.in_contact:
        return np.zeros(3)
    feed = contact.feed_velocity
    if feed <= 0.0:
        return np.zeros(3)
    layer = model.layer_at(contact.depth)
    engagement = min(feed / FEED_ENGAGE_SPEED, 1.0)
    f_z = -(layer.dry * engagement + layer.viscous * feed)
    return np.array([0.0, 0.0, f_z])


def check_completion(contact: DrillContact, model: BoneModel) -> DrillStatus:
    if contact.cut_depth >= model.target_depth:
        return DrillStatus.COMPLETE
    return DrillStatus.DRILLING
