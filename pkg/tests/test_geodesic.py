import math

import numpy as np
import pytest

from geoharm.errors import DomainError, StepSizeError
from geoharm.geodesic import (
    GeodesicState,
    arclength_to_radius,
    christoffel,
    geodesic_rhs,
    integrate_geodesic,
    metric_speed,
)
from geoharm.metric import RadialMetric, density, metric_antiderivative, radial_distance, random_expression_metric

HYP = RadialMetric.hyperbolic()
SPH = RadialMetric.spherical()
EUC = RadialMetric.euclidean()


def test_christoffel_examples():
    assert all(v == 0 for v in vars(christoffel(EUC, 0.3 + 0.2j)).values())
    assert all(v == 0 for v in vars(christoffel(SPH, 0j)).values())
    g = christoffel(HYP, 0.5)
    assert g.g111 == pytest.approx(4 / 3)
    assert g.g211 == 0
    assert g.g122 == pytest.approx(-4 / 3)


def test_rhs_examples():
    assert geodesic_rhs(EUC, GeodesicState(0.3, -0.2, 1.0, 2.0)) == (0.0, 0.0)
    ax, ay = geodesic_rhs(HYP, GeodesicState(0.5, 0.0, 1.0, 0.0))
    assert ax == pytest.approx(-4 / 3) and ay == 0
    assert geodesic_rhs(SPH, GeodesicState(0.0, 0.0, 0.4, 0.9)) == (0.0, 0.0)


def _log_rho_grad(metric, p, h=1e-6):
    def L(q):
        return math.log(float(density(metric, q)))

    return (L(p + h) - L(p - h)) / (2 * h), (L(p + 1j * h) - L(p - 1j * h)) / (2 * h)


def test_rhs_equals_christoffel_contraction_and_fd_oracle():
    rng = np.random.default_rng(1)
    metrics = [HYP, SPH, EUC] + [random_expression_metric(int(s), 1.0) for s in rng.integers(0, 2**32, 20)]
    for i in range(1000):
        m = metrics[i % len(metrics)]
        p = 0.8 * math.sqrt(rng.uniform()) * np.exp(2j * math.pi * rng.uniform())
        vx, vy = rng.normal(size=2)
        ax, ay = geodesic_rhs(m, GeodesicState(p.real, p.imag, vx, vy))
        cx, cy = christoffel(m, p).contract(vx, vy)
        assert ax == pytest.approx(cx, rel=1e-12, abs=1e-14)
        assert ay == pytest.approx(cy, rel=1e-12, abs=1e-14)
        # conformal metric: G^1_11 = d_x log rho, G^1_12 = d_y log rho, ...
        lx, ly = _log_rho_grad(m, p)
        ox = -(lx * vx * vx + 2 * ly * vx * vy - lx * vy * vy)
        oy = -(-ly * vx * vx + 2 * lx * vx * vy + ly * vy * vy)
        assert abs(ax - ox) <= 1e-5 * (1 + abs(ox))
        assert abs(ay - oy) <= 1e-5 * (1 + abs(oy))


def test_euclidean_straight_line():
    path = integrate_geodesic(EUC, GeodesicState(0, 0, 1, 0), 0.7)
    assert path.final.x == pytest.approx(0.7, abs=1e-14)
    assert path.final.y == 0


def test_hyperbolic_inverts_atanh():
    path = integrate_geodesic(HYP, GeodesicState(0, 0, 1, 0), math.atanh(0.5))
    assert path.final.x == pytest.approx(0.5, abs=1e-8)
    assert np.all(np.diff(path.s) > 0)


def test_radial_invariance_off_origin():
    path = integrate_geodesic(HYP, GeodesicState(0.25, 0, 1, 0), 3.0)
    assert np.max(np.abs(path.states[:, 1])) <= 1e-9
    assert np.max(np.abs(path.states[:, 3])) <= 1e-9


@pytest.mark.parametrize("metric", [HYP, SPH, random_expression_metric(9)])
def test_speed_conservation(metric):
    tol = 1e-9
    path = integrate_geodesic(metric, GeodesicState(0.1, 0.05, 0.6, 0.3), 1.0, tol=tol)
    sp = path.speeds(metric)
    assert np.max(np.abs(sp / path.metric_speed - 1)) <= 10 * tol


@pytest.mark.parametrize("metric", [HYP, SPH, random_expression_metric(4)])
def test_rotation_equivariance(metric):
    base = integrate_geodesic(metric, GeodesicState(0.2, 0.0, 0.8, 0.0), 1.0)
    th = 0.9
    u = complex(math.cos(th), math.sin(th))
    p, v = 0.2 * u, 0.8 * u
    rot = integrate_geodesic(metric, GeodesicState(p.real, p.imag, v.real, v.imag), 1.0)
    assert len(rot.s) == len(base.s)
    zb = (base.states[:, 0] + 1j * base.states[:, 1]) * u
    zr = rot.states[:, 0] + 1j * rot.states[:, 1]
    assert np.max(np.abs(zb - zr)) <= 1e-8


def test_arclength_matches_quadrature():
    for m in (HYP, SPH, random_expression_metric(12)):
        x0, v = 0.1, 0.5
        path = integrate_geodesic(m, GeodesicState(x0, 0, v, 0), 1.0, tol=1e-12)
        c = path.metric_speed
        assert abs(radial_distance(m, x0, path.final.x) - c * 1.0) <= 1e-8


def test_boundary_flag_and_pole():
    path = integrate_geodesic(HYP, GeodesicState(0, 0, 1, 0), 40.0)
    assert path.boundary_reached
    assert math.hypot(path.final.x, path.final.y) <= 1.0
    with pytest.raises(StepSizeError):
        integrate_geodesic(SPH, GeodesicState(0, 0, 1, 0), 3.0)


def test_bad_initial_data():
    with pytest.raises(DomainError):
        integrate_geodesic(HYP, GeodesicState(1.5, 0, 1, 0), 1.0)
    with pytest.raises(ValueError):
        integrate_geodesic(HYP, GeodesicState(0, 0, 1, 0), -1.0)


def test_metric_speed_formula():
    st = np.array([[0.5, 0.0, 0.3, 0.4]])
    assert metric_speed(HYP, st)[0] == pytest.approx(4 / 3 * 0.5)


def test_arclength_to_radius_examples():
    assert arclength_to_radius(HYP, 0.0, 0.5493061443340549) == pytest.approx(0.5, abs=1e-12)
    assert arclength_to_radius(SPH, 0.37, 0.0) == 0.37
    assert arclength_to_radius(EUC, 0.1, 0.2) == pytest.approx(0.3, abs=1e-12)
    x = arclength_to_radius(SPH, 0.2, -0.5)
    assert metric_antiderivative(SPH, x) - metric_antiderivative(SPH, 0.2) == pytest.approx(-0.5, abs=1e-10)
    with pytest.raises(DomainError):
        arclength_to_radius(SPH, 0.0, 2.0)
