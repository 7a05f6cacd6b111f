import math

import numpy as np
import pytest

from utils.errors import InvalidInputError
from utils.geom_core import (ORIGIN, CircularArc, Disk, IntervalValue, Point2, Segment,
                             arc_min_distance_to_origin, chord_angle_eta, disk_measures,
                             endpoint_tangent_angle, normalize_angle)


class TestPrimitives:
    def test_point_rejects_non_finite(self):
        with pytest.raises(InvalidInputError):
            Point2(math.nan, 0.0)

    def test_segment_degenerate_requires_flag(self):
        p = Point2(0.3, 0.4)
        with pytest.raises(InvalidInputError):
            Segment(p, p)
        assert Segment(p, p, degenerate=True).length == 0.0

    def test_disk_rejects_non_positive_radius(self):
        with pytest.raises(InvalidInputError):
            Disk(ORIGIN, 0.0)

    def test_normalize_angle(self):
        assert normalize_angle(-math.pi / 2) == pytest.approx(1.5 * math.pi)
        assert 0.0 <= normalize_angle(2 * math.pi) < 2 * math.pi


@pytest.mark.parametrize("radius, perimeter, area", [
    (1.0, 2 * math.pi, math.pi),
    (0.5, math.pi, math.pi / 4),
    (0.0391, 0.24567, 0.0048029),
])
def test_disk_measures(radius, perimeter, area):
    p, a = disk_measures(Disk(ORIGIN, radius))
    assert p == pytest.approx(perimeter, rel=1e-4)
    assert a == pytest.approx(area, rel=1e-4)


class TestCircularArc:
    def test_equal_angles_mean_full_circle(self):
        arc = CircularArc(ORIGIN, 1.0, 0.3, 0.3)
        assert arc.sweep == pytest.approx(2 * math.pi)

    def test_degenerate_sweep_rejected(self):
        with pytest.raises(InvalidInputError):
            CircularArc(ORIGIN, 1.0, 0.0, 1e-14)

    def test_orientation_controls_sweep(self):
        ccw = CircularArc(ORIGIN, 1.0, 0.0, math.pi / 2, 'ccw')
        cw = CircularArc(ORIGIN, 1.0, 0.0, math.pi / 2, 'cw')
        assert ccw.sweep == pytest.approx(math.pi / 2)
        assert cw.sweep == pytest.approx(1.5 * math.pi)
        assert cw.point_at(0.5).as_tuple() == pytest.approx((-math.sqrt(0.5), -math.sqrt(0.5)))

    def test_param_of_and_endpoints(self):
        arc = CircularArc.from_sweep(Point2(0.5, 0.0), 0.25, 0.0, math.pi)
        assert arc.param_of(arc.point_at(0.25)) == pytest.approx(0.25)
        assert arc.param_of(Point2(0.5, -0.25)) is None
        assert arc.endpoint_kind(arc.end_point) == 'end'
        assert arc.is_free_boundary_admissible

    @pytest.mark.parametrize('start, sweep, orientation', [
        (0.2, 0.7, 'ccw'),
        (3.0, 2.5, 'ccw'),
        (-1.0, 4.0, 'cw'),
        (0.5, 0.3, 'cw'),
    ])
    def test_rebuilt_from_endpoint_angles(self, start, sweep, orientation):
        center = Point2(0.3, -0.2)
        arc = CircularArc.from_sweep(center, 0.4, start, sweep, orientation)
        a0 = math.atan2(arc.start_point.y - center.y, arc.start_point.x - center.x)
        a1 = math.atan2(arc.end_point.y - center.y, arc.end_point.x - center.x)
        rebuilt = CircularArc(center, 0.4, a0, a1, orientation)
        assert rebuilt.sweep == pytest.approx(sweep, abs=1e-12)
        assert rebuilt.start_point.as_tuple() == pytest.approx(arc.start_point.as_tuple(), abs=1e-12)
        assert rebuilt.end_point.as_tuple() == pytest.approx(arc.end_point.as_tuple(), abs=1e-12)
        assert rebuilt.point_at(0.5).as_tuple() == pytest.approx(arc.point_at(0.5).as_tuple(), abs=1e-12)


class TestArcMinDistance:
    def test_half_circle_centered_at_origin(self):
        arc = CircularArc.from_sweep(ORIGIN, 1.0, 0.0, math.pi)
        d, t = arc_min_distance_to_origin(arc)
        assert d == pytest.approx(1.0, abs=1e-12)
        assert 0.0 <= t <= 1.0

    def test_minimum_at_nearer_endpoint(self):
        # 中心 (0.5, 0)、半径 0.45 の円弧で |a| = 0.8、|b| = 0.9
        c, r = Point2(0.5, 0.0), 0.45
        t_a = math.acos((0.64 - 0.4525) / 0.45)
        t_b = math.acos((0.81 - 0.4525) / 0.45)
        arc = CircularArc.from_sweep(c, r, -t_a, t_a + t_b)
        assert arc.start_point.norm() == pytest.approx(0.8)
        assert arc.end_point.norm() == pytest.approx(0.9)
        d, t = arc_min_distance_to_origin(arc)
        assert d == pytest.approx(0.8, abs=1e-12)
        assert t == pytest.approx(0.0, abs=1e-9)

    def test_agrees_with_dense_sampling(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            rho = rng.uniform(0.2, 0.8)
            c = Point2.polar(rho, rng.uniform(0, 2 * math.pi))
            # 原点から離れた円弧に限る（距離関数が滑らか）
            arc = CircularArc.from_sweep(c, rng.uniform(0.05, 0.5 * rho), rng.uniform(0, 2 * math.pi),
                                         rng.uniform(0.1, 2 * math.pi - 0.1))
            pts = arc.points(np.linspace(0.0, 1.0, 100001))
            brute = float(np.min(np.hypot(pts[:, 0], pts[:, 1])))
            d, _ = arc_min_distance_to_origin(arc)
            assert d <= brute + 1e-9
            assert d == pytest.approx(brute, abs=1e-7)

    def test_nearly_degenerate_arc_returns_endpoint_distance(self):
        arc = CircularArc.from_sweep(Point2(0.5, 0.1), 0.2, 1.0, 1e-10)
        d, _ = arc_min_distance_to_origin(arc)
        assert d == pytest.approx(min(arc.start_point.norm(), arc.end_point.norm()), abs=1e-10)

    def test_requires_two_samples(self):
        arc = CircularArc.from_sweep(ORIGIN, 1.0, 0.0, 1.0)
        with pytest.raises(InvalidInputError):
            arc_min_distance_to_origin(arc, samples=1)


class TestAngles:
    def test_tangent_angle_toward_center(self):
        # 中心 (0,1) の単位円、原点を始点に反時計回り。接線は +x、中心側へ π/2 回すと +y
        arc = CircularArc.from_sweep(Point2(0.0, 1.0), 1.0, 1.5 * math.pi, math.pi / 2)
        assert arc.start_point.as_tuple() == pytest.approx((0.0, 0.0), abs=1e-12)
        alpha = endpoint_tangent_angle(arc, ORIGIN, Point2(0.0, 1.0))
        assert alpha == pytest.approx(math.pi / 2)

    def test_tangent_ray_gives_zero_or_pi(self):
        arc = CircularArc.from_sweep(Point2(0.0, 1.0), 1.0, 1.5 * math.pi, math.pi / 2)
        assert endpoint_tangent_angle(arc, ORIGIN, Point2(1.0, 0.0)) == pytest.approx(0.0, abs=1e-12)
        assert endpoint_tangent_angle(arc, ORIGIN, Point2(-1.0, 0.0)) == pytest.approx(math.pi)

    def test_non_endpoint_rejected(self):
        arc = CircularArc.from_sweep(ORIGIN, 1.0, 0.0, 1.0)
        with pytest.raises(InvalidInputError):
            endpoint_tangent_angle(arc, Point2(0.0, 0.0), Point2(1.0, 1.0))

    def test_eta_from_chord_length(self):
        arc = CircularArc.from_sweep(ORIGIN, 0.5, 0.0, math.pi)
        p0 = arc.start_point
        # |p − p0| = 0.5 となる点は中心角 π/3
        p = arc.point_at((math.pi / 3) / math.pi)
        assert p.distance_to(p0) == pytest.approx(0.5)
        assert chord_angle_eta(arc, p0, p) == pytest.approx(math.pi / 6)

    def test_eta_diameter_and_limit(self):
        arc = CircularArc.from_sweep(ORIGIN, 0.5, 0.0, math.pi)
        p0 = arc.start_point
        assert chord_angle_eta(arc, p0, arc.end_point) == pytest.approx(math.pi / 2)
        near = arc.point_at(1e-6)
        assert chord_angle_eta(arc, p0, near) < 1e-5


class TestIntervalValue:
    def test_enclose_widens_outward(self):
        v = IntervalValue.enclose(1.0, 1.0, ulps=2)
        assert v.lo < 1.0 < v.hi
        assert v.contains(1.0)

    def test_rejects_inverted(self):
        with pytest.raises(InvalidInputError):
            IntervalValue(1.0, 0.0)

    def test_arithmetic_contains_exact_result(self):
        a = IntervalValue(0.1, 0.2)
        b = IntervalValue(0.3, 0.4)
        assert (a + b).contains(0.5) and (a + b).contains(0.4)
        assert (b - a).is_subset_of(IntervalValue(0.09, 0.31))
        assert (1.0 - a).contains(0.85)
        assert a.scale(-2.0).contains(-0.3)
        assert a.certainly_less(b)
        assert not b.certainly_less(a)

    def test_dict_roundtrip(self):
        v = IntervalValue(0.25, 0.5)
        assert IntervalValue.from_dict(v.to_dict()) == v
