import math

import numpy as np
import pytest

from lvsim.fisher import (
    Covariance,
    FisherInfo,
    SingularInformationError,
    covariance,
    decision_ellipse,
    fim,
    mahalanobis_sq,
    verdict,
)
from lvsim.geometry import ChannelParams, Deployment, Hypothesis, Position, Rect, bearing, euclidean_distance


def _fim_from_bearings(ch, dep, pos, s, flip=False):
    """Information matrix assembled from explicit bearings, optionally with
    every bearing shifted by pi; oracle for the coordinate-offset form."""
    b = (10.0 * ch.gamma / (ch.sigma_db * math.log(10.0))) ** 2
    xx = xy = yy = 0.0
    for st in dep.stations:
        phi = bearing(st, pos) + (math.pi if flip else 0.0)
        d2 = euclidean_distance(st, pos) ** 2
        xx += math.cos(phi) ** 2 / d2
        xy += 0.5 * math.sin(2 * phi) / d2
        yy += math.sin(phi) ** 2 / d2
    return s * b * xx, s * b * xy, s * b * yy


class TestFim:
    def test_square_center_is_isotropic(self, fig1_channel, fig1_deployment):
        f = fim(fig1_channel, fig1_deployment, Position(0.0, 0.0), 1)
        b = (10.0 * 3.0 / (5.0 * math.log(10.0))) ** 2  # 6.79002...
        assert f.xx == pytest.approx(b * 1e-4, rel=1e-12)
        assert f.yy == pytest.approx(b * 1e-4, rel=1e-12)
        assert f.xy == pytest.approx(0.0, abs=1e-20)

    def test_sample_count_scales_linearly(self, fig1_channel, fig1_deployment, fig1_claimed):
        f1 = fim(fig1_channel, fig1_deployment, fig1_claimed, 1)
        f2 = fim(fig1_channel, fig1_deployment, fig1_claimed, 2)
        assert f2.xx == pytest.approx(2 * f1.xx, rel=1e-14)
        assert f2.xy == pytest.approx(2 * f1.xy, rel=1e-14)
        assert f2.yy == pytest.approx(2 * f1.yy, rel=1e-14)

    def test_single_station_rank_one(self, fig1_channel):
        dep = Deployment((Position(0.0, 0.0),), Rect(-10, -10, 10, 10))
        f = fim(fig1_channel, dep, Position(5.0, 3.0), 1)
        assert f.det() == pytest.approx(0.0, abs=1e-18)

    def test_matches_bearing_formula_and_pi_shift_invariance(
        self, fig1_channel, fig1_deployment
    ):
        rng = np.random.default_rng(1)
        for _ in range(20):
            pos = Position(*rng.uniform(-90, 90, 2))
            f = fim(fig1_channel, fig1_deployment, pos, 10)
            for flip in (False, True):
                xx, xy, yy = _fim_from_bearings(fig1_channel, fig1_deployment, pos, 10, flip)
                assert f.xx == pytest.approx(xx, rel=1e-10)
                assert f.xy == pytest.approx(xy, rel=1e-10, abs=1e-12)
                assert f.yy == pytest.approx(yy, rel=1e-10)

    def test_station_relabeling_invariance(self, fig1_channel, fig1_deployment, fig1_claimed):
        shuffled = Deployment(
            tuple(reversed(fig1_deployment.stations)), fig1_deployment.region
        )
        a = fim(fig1_channel, fig1_deployment, fig1_claimed, 3)
        b = fim(fig1_channel, shuffled, fig1_claimed, 3)
        assert (a.xx, a.xy, a.yy) == pytest.approx((b.xx, b.xy, b.yy), rel=1e-14)

    def test_independent_of_p0_and_d0(self, fig1_deployment, fig1_claimed):
        a = fim(ChannelParams(0.0, 1.0, 3.0, 5.0), fig1_deployment, fig1_claimed, 10)
        b = fim(ChannelParams(-40.0, 7.3, 3.0, 5.0), fig1_deployment, fig1_claimed, 10)
        assert (a.xx, a.xy, a.yy) == (b.xx, b.xy, b.yy)

    def test_rejects_station_coincidence(self, fig1_channel, fig1_deployment):
        with pytest.raises(ValueError):
            fim(fig1_channel, fig1_deployment, Position(100.0, 100.0), 1)


class TestCovariance:
    def test_diagonal_inverse(self):
        m = covariance(FisherInfo(2.0, 0.0, 4.0))
        assert m.xx == pytest.approx(0.5) and m.yy == pytest.approx(0.25) and m.xy == 0.0

    def test_rank_one_raises(self, fig1_channel):
        dep = Deployment((Position(0.0, 0.0),), Rect(-10, -10, 10, 10))
        f = fim(fig1_channel, dep, Position(5.0, 3.0), 1)
        with pytest.raises(SingularInformationError):
            covariance(f)

    def test_random_spd_roundtrip(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            a = rng.normal(size=(2, 2))
            mat = a @ a.T + 0.1 * np.eye(2)
            f = FisherInfo(mat[0, 0], mat[0, 1], mat[1, 1])
            m = covariance(f)
            prod = np.array(m.matrix) @ np.array(f.matrix)
            assert np.allclose(prod, np.eye(2), atol=1e-10)

    def test_covariance_requires_spd(self):
        with pytest.raises(ValueError):
            Covariance(1.0, 2.0, 1.0)  # det < 0
        with pytest.raises(ValueError):
            Covariance(-1.0, 0.0, 1.0)


class TestMahalanobis:
    def test_zero_at_claimed(self):
        m = Covariance(3.0, 0.5, 2.0)
        assert mahalanobis_sq(Position(7, -2), Position(7, -2), m) == 0.0

    def test_identity_covariance_gives_squared_euclidean(self):
        m = Covariance(1.0, 0.0, 1.0)
        assert mahalanobis_sq(Position(3, 4), Position(0, 0), m) == pytest.approx(25.0)

    def test_rotation_invariance(self):
        rng = np.random.default_rng(9)
        for _ in range(100):
            a = rng.normal(size=(2, 2))
            mat = a @ a.T + 0.2 * np.eye(2)
            offset = rng.normal(size=2) * 5
            theta = rng.uniform(0, 2 * math.pi)
            c, s = math.cos(theta), math.sin(theta)
            rot = np.array([[c, -s], [s, c]])
            mat_r = rot @ mat @ rot.T
            off_r = rot @ offset
            m = Covariance(mat[0, 0], mat[0, 1], mat[1, 1])
            m_r = Covariance(mat_r[0, 0], mat_r[0, 1], mat_r[1, 1])
            d1 = mahalanobis_sq(Position(*offset), Position(0, 0), m)
            d2 = mahalanobis_sq(Position(*off_r), Position(0, 0), m_r)
            assert d1 == pytest.approx(d2, rel=1e-9)


class TestDecisionEllipse:
    def test_identity_unit_circle(self):
        e = decision_ellipse(Position(0, 0), Covariance(1.0, 0.0, 1.0), 1.0)
        assert e.semi_axes == pytest.approx((1.0, 1.0))

    def test_quadrupled_threshold_doubles_axes(self):
        m = Covariance(4.0, 1.0, 2.0)
        e1 = decision_ellipse(Position(0, 0), m, 1.0)
        e4 = decision_ellipse(Position(0, 0), m, 4.0)
        assert e4.semi_axes[0] == pytest.approx(2 * e1.semi_axes[0], rel=1e-12)
        assert e4.semi_axes[1] == pytest.approx(2 * e1.semi_axes[1], rel=1e-12)

    def test_membership_agrees_with_mahalanobis(self):
        rng = np.random.default_rng(17)
        m = Covariance(9.0, 2.5, 4.0)
        center = Position(1.0, -2.0)
        t = 3.7
        e = decision_ellipse(center, m, t)
        a, b = e.semi_axes
        c, s = math.cos(e.orientation), math.sin(e.orientation)
        for _ in range(1000):
            p = Position(*(rng.uniform(-15, 15, 2)))
            dx, dy = p.x - center.x, p.y - center.y
            u = c * dx + s * dy
            v = -s * dx + c * dy
            q = (u / a) ** 2 + (v / b) ** 2
            if abs(q - 1.0) < 1e-9:
                continue  # skip boundary-ambiguous points
            assert (mahalanobis_sq(p, center, m) <= t) == (q <= 1.0)

    def test_rejects_nonpositive_threshold(self):
        with pytest.raises(ValueError):
            decision_ellipse(Position(0, 0), Covariance(1, 0, 1), 0.0)


class TestVerdict:
    def test_zero_distance_is_legitimate(self):
        assert verdict(0.0, 1.0) is Hypothesis.LEGITIMATE

    def test_boundary_is_legitimate(self):
        assert verdict(4.75, 4.75) is Hypothesis.LEGITIMATE

    def test_above_threshold_is_malicious(self):
        assert verdict(4.75 + 1e-12, 4.75) is Hypothesis.MALICIOUS

    def test_rejects_invalid_inputs(self):
        with pytest.raises(ValueError):
            verdict(-0.1, 1.0)
        with pytest.raises(ValueError):
            verdict(1.0, 0.0)
