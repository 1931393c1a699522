"""Layered bone resistance and completion logic."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from gazedrill.bone import (
    BoneLayer,
    BoneModel,
    DrillContact,
    DrillStatus,
    advance_cut,
    check_completion,
    drilling_force,
)

CORTICAL = BoneLayer(depth_start=0.0, depth_end=0.004, viscous=2000.0, dry=5.0)
CANCELLOUS = BoneLayer(depth_start=0.004, depth_end=0.03, viscous=800.0, dry=2.0)


def two_layer_model():
    return BoneModel(layers=[CORTICAL, CANCELLOUS], target_depth=0.03)


class TestDrillingForce:
    def test_above_bone_is_free(self):
        model = two_layer_model()
        contact = DrillContact(depth=-0.001, feed_velocity=0.001, cut_depth=0.0)
        assert_allclose(drilling_force(contact, model), np.zeros(3))

    def test_cortical_closed_form(self):
        model = two_layer_model()
        contact = DrillContact(depth=0.002, feed_velocity=0.001, cut_depth=0.002)
        f = drilling_force(contact, model)
        assert_allclose(f, [0.0, 0.0, -7.0])

    def test_retracting_inside_cut_hole_is_free(self):
        model = two_layer_model()
        contact = DrillContact(depth=0.010, feed_velocity=-0.002, cut_depth=0.020)
        assert_allclose(drilling_force(contact, model), np.zeros(3))

    def test_advancing_inside_cut_hole_is_free(self):
        model = two_layer_model()
        contact = DrillContact(depth=0.010, feed_velocity=0.002, cut_depth=0.020)
        assert_allclose(drilling_force(contact, model), np.zeros(3))

    def test_resists_only_downward(self):
        model = two_layer_model()
        rng = np.random.default_rng(0)
        for _ in range(500):
            contact = DrillContact(
                depth=rng.uniform(-0.01, 0.04),
                feed_velocity=rng.uniform(-0.01, 0.01),
                cut_depth=rng.uniform(0.0, 0.03),
            )
            contact.cut_depth = max(contact.cut_depth, contact.depth)
            f = drilling_force(contact, model)
            assert f[2] <= 0.0
            assert f[0] == f[1] == 0.0

    def test_continuous_in_feed_velocity(self):
        model = two_layer_model()
        feeds = np.linspace(-1e-4, 5e-4, 1201)
        forces = [
            drilling_force(DrillContact(0.002, float(v), 0.002), model)[2]
            for v in feeds
        ]
        jumps = np.abs(np.diff(forces))
        assert jumps.max() < 0.05  # no dry-force step at feed = 0

    def test_layer_boundary_switches_coefficients(self):
        model = two_layer_model()
        inside_cortical = drilling_force(DrillContact(0.0039, 0.001, 0.0039), model)
        inside_cancellous = drilling_force(DrillContact(0.0041, 0.001, 0.0041), model)
        assert_allclose(inside_cortical[2], -7.0)
        assert_allclose(inside_cancellous[2], -2.8)


class TestAdvanceCut:
    def test_cut_depth_never_decreases(self):
        contact = DrillContact(depth=0.0, feed_velocity=0.0)
        contact = advance_cut(contact, 0.010, 0.001)
        assert contact.cut_depth == 0.010
        contact = advance_cut(contact, 0.005, -0.001)
        assert contact.cut_depth == 0.010
        assert contact.depth == 0.005
        assert not contact.in_contact


class TestCompletion:
    def test_below_target_still_drilling(self):
        model = two_layer_model()
        contact = DrillContact(0.0299, 0.001, 0.0299)
        assert check_completion(contact, model) is DrillStatus.DRILLING

    def test_at_target_complete(self):
        model = two_layer_model()
        contact = DrillContact(0.030, 0.001, 0.030)
        assert check_completion(contact, model) is DrillStatus.COMPLETE

    def test_overshoot_still_complete(self):
        model = two_layer_model()
        contact = DrillContact(0.04, 0.001, 0.04)
        assert check_completion(contact, model) is DrillStatus.COMPLETE


class TestModelValidation:
    def test_rejects_gap_between_layers(self):
        with pytest.raises(ValueError):
            BoneModel(
                layers=[
                    BoneLayer(0.0, 0.003, 100.0, 1.0),
                    BoneLayer(0.005, 0.03, 100.0, 1.0),
                ],
                target_depth=0.03,
            )

    def test_rejects_uncovered_target(self):
        with pytest.raises(ValueError):
            BoneModel(layers=[BoneLayer(0.0, 0.01, 100.0, 1.0)], target_depth=0.03)

    def test_rejects_negative_coefficients(self):
        with pytest.raises(ValueError):
            BoneLayer(0.0, 0.01, -5.0, 1.0)
