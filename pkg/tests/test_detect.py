import math

import numpy as np
import pytest
from conftest import half_cube_field, two_blade_field
from hypothesis import given, settings
from hypothesis import strategies as st

from georot.detect import DetectorConfig, algorithm1, algorithm2, remaining_misalignment, residual_error
from georot.field import (
    LinearField,
    RotationSpec,
    VectorField,
    apply_outer_rotation,
    coefficient_error,
    random_linear_field,
    random_rotation,
    sample_linear,
)
from georot.ga3 import E12, E13, E23, Bivector3, compose_rotation

DETECTORS = [algorithm1, algorithm2]


def linear_pair(seed, res=8, max_angle=math.pi):
    rng = np.random.default_rng([7, seed])
    f, rot = random_linear_field(rng), random_rotation(rng)
    rot = RotationSpec(rot.plane, min(rot.angle, max_angle))
    v = sample_linear(f, res)
    return f, rot, v, apply_outer_rotation(v, rot)


class TestConfig:
    @pytest.mark.parametrize("kw", [dict(epsilon=0), dict(epsilon=-1), dict(max_iterations=0), dict(disturbance_plane=Bivector3(1, 1, 0))])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            DetectorConfig(**kw)


class TestTrivial:
    @pytest.mark.parametrize("detect", DETECTORS)
    def test_identical_fields(self, detect):
        v = sample_linear(random_linear_field(1), 8)
        r = detect(v, v)
        assert r.converged and r.iterations == 1 and r.angle == 0
        assert not r.trace[0].disturbed
        np.testing.assert_array_equal(r.corrected.values, v.values)

    @pytest.mark.parametrize("detect", DETECTORS)
    def test_zero_reference_rejected(self, detect):
        z = VectorField((2,), np.zeros((2, 3)))
        with pytest.raises(ValueError, match="zero"):
            detect(z, VectorField((2,), np.ones((2, 3))))

    @pytest.mark.parametrize("detect", DETECTORS)
    def test_grid_mismatch(self, detect):
        with pytest.raises(ValueError, match="grid"):
            detect(VectorField((2,), np.ones((2, 3))), VectorField((3,), np.ones((3, 3))))

    def test_iteration_cap(self):
        _, _, v, u = linear_pair(3)
        r = algorithm1(v, u, DetectorConfig(epsilon=1e-14, max_iterations=3))
        assert not r.converged and r.iterations == 3 and len(r.trace) == 3

    def test_checkpoints(self):
        _, _, v, u = linear_pair(3)
        r = algorithm2(v, u, DetectorConfig(epsilon=1e-12, max_iterations=50), checkpoints=[0, 1, 10_000])
        assert r.snapshots[0] is u
        np.testing.assert_array_equal(r.snapshots[10_000].values, r.corrected.values)
        assert residual_error(r.snapshots[1], v)[1] == pytest.approx(r.trace[0].residual)


class TestHalfTurn:
    @pytest.mark.parametrize(
        "right, left, sign",
        [([1, 0.5, 0], [0, 0, 2.0], 1.0), ([1, 0.5, 0], [0, 0, 0.5], -1.0)],
        ids=["positive-real", "negative-real"],
    )
    @pytest.mark.parametrize("detect", DETECTORS)
    def test_disturbance_resolves_half_turn(self, detect, right, left, sign):
        v = half_cube_field(8, right, left)
        truth = RotationSpec(E12, math.pi)
        u = apply_outer_rotation(v, truth)
        r = detect(v, u, DetectorConfig(epsilon=1e-10))
        first = r.trace[0]
        assert first.disturbed
        assert first.observed_phi == (0.0 if sign > 0 else math.pi)
        assert r.converged
        assert r.angle == pytest.approx(math.pi, abs=1e-8)
        assert remaining_misalignment(truth, r.angle, r.plane) <= 1e-8
        assert residual_error(r.corrected, v)[1] < 1e-8

    @pytest.mark.parametrize("plane", [E12, E13, Bivector3(1, 1, 1).normalized()])
    def test_custom_disturbance_on_linear_field(self, plane):
        # diag(1, 2, 3) has e3 as a principal axis, so the e12 half-turn correlates to a real number
        v = sample_linear(LinearField(np.diag([1.0, 2.0, 3.0])), 8)
        truth = RotationSpec(E12, math.pi)
        u = apply_outer_rotation(v, truth)
        r = algorithm1(v, u, DetectorConfig(disturbance_angle=0.3, disturbance_plane=plane))
        assert r.trace[0].disturbed and r.trace[0].phi == 0.3 and r.trace[0].plane == plane
        assert r.converged
        assert remaining_misalignment(truth, r.angle, r.plane) <= 1e-8


class TestPlanar:
    @pytest.mark.parametrize("alpha", [0.2, 1.7, 3.0])
    @pytest.mark.parametrize("plane", [E12, E13, E23, Bivector3(1, -2, 2).normalized()])
    def test_single_corrective_step(self, alpha, plane, rng):
        n = plane.normal()
        values = rng.standard_normal((64, 3))
        values -= np.outer(values @ n, n)
        v = VectorField((4, 4, 4), values, (0.5,) * 3)
        u = apply_outer_rotation(v, RotationSpec(plane, alpha))
        r = algorithm1(v, u, DetectorConfig(epsilon=1e-12))
        assert r.trace[0].residual < 1e-13
        assert r.trace[0].phi == pytest.approx(alpha, abs=1e-12)
        # the second pass only confirms
        assert r.iterations == 2 and r.converged
        assert r.angle == pytest.approx(alpha, abs=1e-8)


class TestResidualError:
    def test_identical(self):
        f = sample_linear(random_linear_field(0), 4)
        assert residual_error(f, f) == (0.0, 0.0)

    def test_constant_offset(self):
        a = VectorField((5,), np.zeros((5, 3)))
        b = VectorField((5,), np.tile([1.0, 0, 0], (5, 1)))
        assert residual_error(a, b) == (5.0, 1.0)

    def test_two_blade_quarter_turn(self):
        v = two_blade_field(32)
        u = apply_outer_rotation(v, RotationSpec(E13, math.pi / 2))
        absolute, per = residual_error(u, v)
        assert absolute == pytest.approx(math.sqrt(2) * 16384, rel=1e-12)
        assert per == pytest.approx(math.sqrt(2) / 2, rel=1e-12)


class TestTwoBlade:
    @pytest.mark.parametrize("detect, max_iter", [(algorithm1, 60), (algorithm2, 3)])
    def test_recovers_quarter_turn(self, detect, max_iter):
        v = two_blade_field(8)
        u = apply_outer_rotation(v, RotationSpec(E13, math.pi / 2))
        r = detect(v, u, DetectorConfig(epsilon=1e-12))
        assert r.converged and r.iterations <= max_iter
        assert r.angle == pytest.approx(math.pi / 2, abs=1e-10)
        np.testing.assert_allclose(r.plane.to_array(), (-E13).to_array(), atol=1e-10)
        assert r.misalignment.plane.to_array() == pytest.approx(E13.to_array(), abs=1e-10)


class TestLinearFields:
    @pytest.mark.parametrize("seed", range(6))
    def test_algorithms_agree(self, seed):
        f, rot, v, u = linear_pair(seed, max_angle=math.pi - 0.05)
        cfg = DetectorConfig(epsilon=1e-12, max_iterations=5000)
        r1, r2 = algorithm1(v, u, cfg), algorithm2(v, u, cfg)
        assert r1.converged and r2.converged
        assert r2.iterations <= r1.iterations
        gap, _ = compose_rotation(r1.angle, r1.plane, r2.angle, -r2.plane)
        assert gap < 1e-8
        assert coefficient_error(r2.corrected, f) < 1e-16

    @settings(deadline=None, max_examples=20)
    @given(st.integers(0, 100_000))
    def test_misalignment_never_grows(self, seed):
        _, rot, v, u = linear_pair(seed, max_angle=math.pi - 0.01)
        r = algorithm1(v, u, DetectorConfig(epsilon=1e-10, max_iterations=5000))
        left = [remaining_misalignment(rot, t.alpha, t.total_plane) for t in r.trace]
        assert all(b <= a + 1e-8 for a, b in zip([rot.angle] + left, left))
        assert r.converged

    @settings(deadline=None, max_examples=20)
    @given(st.integers(0, 100_000))
    def test_detected_rotation_inverts_truth(self, seed):
        _, rot, v, u = linear_pair(seed, max_angle=math.pi - 0.01)
        r = algorithm2(v, u, DetectorConfig(epsilon=1e-12, max_iterations=200))
        assert r.converged
        assert remaining_misalignment(rot, r.angle, r.plane) < 1e-8
        assert r.misalignment.angle == pytest.approx(rot.angle, abs=1e-8)

    def test_trace_records_running_total(self):
        _, _, v, u = linear_pair(2)
        r = algorithm1(v, u, DetectorConfig(epsilon=1e-12))
        a, P = 0.0, E12
        for t in r.trace:
            a, P = compose_rotation(a, P, t.phi, t.plane)
            assert t.alpha == pytest.approx(a, abs=1e-12)
        assert r.angle == r.trace[-1].alpha
        assert [t.iteration for t in r.trace] == list(range(1, r.iterations + 1))
        assert r.trace[-1].phi <= 1e-12
