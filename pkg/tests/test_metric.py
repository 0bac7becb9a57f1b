import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from geoharm.errors import DomainError
from geoharm.metric import (
    RadialMetric,
    density,
    geodesic_disk_contains,
    log_density_derivative,
    metric_antiderivative,
    metric_from_descriptor,
    parse_profile,
    profile_jet,
    radial_distance,
    random_expression_metric,
)

HYP = RadialMetric.hyperbolic()
SPH = RadialMetric.spherical()
EUC = RadialMetric.euclidean()


def test_builtin_profiles_are_expressions_of_t():
    hyp_expr = RadialMetric(parse_profile("1/(1-t)"), 1.0)
    t = np.linspace(0, 0.9, 11)
    np.testing.assert_allclose(profile_jet(hyp_expr, t)[0], profile_jet(HYP, t)[0], rtol=1e-15)


@pytest.mark.parametrize(
    "metric, t, expected",
    [(HYP, 0.0, (1.0, 1.0)), (SPH, 1.0, (0.5, -0.25)), (EUC, 0.7, (1.0, 0.0))],
)
def test_profile_jet_examples(metric, t, expected):
    h, dh = profile_jet(metric, t)
    assert (float(h), float(dh)) == pytest.approx(expected, abs=1e-15)


def test_profile_jet_domain():
    with pytest.raises(DomainError):
        profile_jet(HYP, 1.0)
    with pytest.raises(DomainError):
        profile_jet(HYP, -0.1)


def test_density_examples():
    assert density(HYP, 0j) == 1.0
    assert density(HYP, 0.5j) == pytest.approx(4 / 3)
    assert density(SPH, 1.0) == pytest.approx(0.5)
    with pytest.raises(DomainError):
        density(HYP, 1.0)
    with pytest.raises(DomainError):
        density(HYP, complex(math.nan, 0))


def test_log_density_derivative_examples():
    assert log_density_derivative(HYP, 0j) == 0
    assert log_density_derivative(HYP, 0.5) == pytest.approx(4 / 3)
    assert log_density_derivative(SPH, 0.5) == pytest.approx(-0.8)


@pytest.mark.parametrize("metric", [HYP, SPH, random_expression_metric(3)])
def test_log_density_derivative_fd_oracle(metric):
    rng = np.random.default_rng(0)
    for w in 0.6 * (rng.uniform(-1, 1, 10) + 1j * rng.uniform(-1, 1, 10)):
        h = 1e-5

        def L(p):
            return 2 * np.log(float(density(metric, p)))

        fx = (L(w + h) - L(w - h)) / (2 * h)
        fy = (L(w + 1j * h) - L(w - 1j * h)) / (2 * h)
        assert log_density_derivative(metric, w) == pytest.approx(0.5 * (fx - 1j * fy), abs=1e-8)


def test_antiderivative_examples():
    assert metric_antiderivative(HYP, 0.5) == pytest.approx(0.5493061443340549, abs=1e-12)
    assert metric_antiderivative(SPH, 1.0) == pytest.approx(math.pi / 4, abs=1e-12)
    assert metric_antiderivative(EUC, 0.7) == pytest.approx(0.7, abs=1e-15)


def test_antiderivative_closed_forms_many_radii():
    for s in np.linspace(0, 0.999, 1000):
        assert abs(metric_antiderivative(HYP, s) - math.atanh(s)) <= 1e-10
    for s in np.linspace(0, 20, 1000):
        assert abs(metric_antiderivative(SPH, s) - math.atan(s)) <= 1e-10


def test_antiderivative_is_odd():
    m = random_expression_metric(11)
    for s in (0.1, 0.7, 1.5):
        assert metric_antiderivative(m, -s) == -metric_antiderivative(m, s)


def test_radial_distance_examples():
    assert radial_distance(HYP, 0.0, 0.5) == pytest.approx(0.5493061443, abs=1e-10)
    assert radial_distance(SPH, 0.3, 0.3) == 0.0
    assert radial_distance(EUC, -0.2, 0.3) == pytest.approx(0.5, abs=1e-15)


@settings(max_examples=50, deadline=None)
@given(
    st.integers(0, 2**32 - 1),
    st.lists(st.floats(-0.95, 0.95), min_size=3, max_size=3),
)
def test_additivity_and_symmetry(seed, pts):
    m = random_expression_metric(seed, chart_radius=1.0)
    a, b, c = sorted(pts)
    ab, bc, ac = radial_distance(m, a, b), radial_distance(m, b, c), radial_distance(m, a, c)
    assert abs(ab + bc - ac) <= 1e-9
    assert radial_distance(m, c, a) == ac


def test_monotone_on_grid():
    for m in (HYP, SPH, EUC, random_expression_metric(5)):
        top = min(m.cutoff, 3.0)
        F = [metric_antiderivative(m, s) for s in np.linspace(0, top * 0.999, 200)]
        assert np.all(np.diff(F) > 0)


def test_ad_fd_agreement_random_profiles():
    rng = np.random.default_rng(2024)
    metrics = [HYP, SPH, EUC] + [random_expression_metric(int(s)) for s in rng.integers(0, 2**32, 100)]
    for m in metrics:
        top = min(m.cutoff, 2.0) ** 2 * 0.9
        t = rng.uniform(1e-3, top, 50)
        _, dh = profile_jet(m, t)
        k = 1e-3
        c1 = (m.profile(t + k) - m.profile(t - k)) / (2 * k)
        c2 = (m.profile(t + k / 2) - m.profile(t - k / 2)) / k
        fd = (4 * c2 - c1) / 3
        assert np.all(np.abs(dh - fd) <= 1e-6 * (1 + np.abs(dh)))


def test_geodesic_disk_contains_examples():
    assert geodesic_disk_contains(HYP, 1.0, 0j)
    assert not geodesic_disk_contains(HYP, 0.5, 0.5)
    assert geodesic_disk_contains(SPH, 1.0, 1j)


def test_total_length():
    assert SPH.total_length == pytest.approx(math.pi / 2, abs=1e-9)
    assert HYP.total_length > 14
    assert math.isinf(EUC.total_length)


def test_descriptor_round_trip_and_validation():
    m = metric_from_descriptor({"profile": "1/(1+t)", "chart_radius": "inf"})
    assert m.kind == "expression" and math.isinf(m.chart_radius)
    assert metric_from_descriptor("hyperbolic").chart_radius == 1.0
    with pytest.raises(ValueError):
        metric_from_descriptor({"profile": "hyperbolic", "colour": 1})
    with pytest.raises(ValueError):
        metric_from_descriptor({"profile": "hyperbolic", "chart_radius": -1})
