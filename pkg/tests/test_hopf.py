import math

import numpy as np
import pytest

from geoharm.errors import DomainError
from geoharm.harmonic import HarmonicFunction, TrigPolynomial, compose_geodesic_map, random_geodesic_map, sample_disk
from geoharm.hopf import (
    distance_via_parameter,
    distinguished_parameter,
    holomorphy_defect,
    hopf_coefficient,
    path_parameter,
    real_hopf_sqrt,
)
from geoharm.metric import RadialMetric, metric_antiderivative

HYP = RadialMetric.hyperbolic()
SPH = RadialMetric.spherical()
EUC = RadialMetric.euclidean()


def g_re(c):
    return HarmonicFunction(TrigPolynomial(0.0, (c,), ()))


TANH_RE = compose_geodesic_map("hyperbolic", g_re(1.0))
TAN_03 = compose_geodesic_map("spherical", g_re(0.3))


def zero(z):
    return 0.0 * np.asarray(z, dtype=complex)


def test_hopf_coefficient_examples():
    assert hopf_coefficient(EUC, lambda z: z * z, 0.3 + 0.1j) == pytest.approx(0, abs=1e-10)
    z = np.array([0.0, 0.5 - 0.3j, -0.7j])
    np.testing.assert_allclose(hopf_coefficient(HYP, TANH_RE, z), 0.25, atol=1e-10)
    assert hopf_coefficient(HYP, zero, 0.2) == 0


def test_holomorphy_defect_examples():
    assert holomorphy_defect(HYP, TANH_RE, 0.1 + 0.3j) <= 1e-6
    ctrl = lambda w: np.tanh(np.real(w) ** 2) + 0j  # noqa: E731
    assert holomorphy_defect(HYP, ctrl, 0.3) >= 1e-3
    assert holomorphy_defect(EUC, lambda w: w + 0.1 * np.conj(w), -0.2 + 0.2j) <= 1e-6


def test_real_hopf_sqrt_examples():
    z = np.array([0.0, 0.4j, -0.6 + 0.1j])
    np.testing.assert_allclose(real_hopf_sqrt(HYP, TANH_RE, z), 0.5, atol=1e-10)
    np.testing.assert_allclose(real_hopf_sqrt(SPH, TAN_03, z), 0.15, atol=1e-10)
    assert real_hopf_sqrt(HYP, zero, 0.3) == 0
    with pytest.raises(DomainError):
        real_hopf_sqrt(HYP, lambda w: w, 0.3 + 0.2j)


def test_families_holomorphy_and_square():
    rng = np.random.default_rng(21)
    z = sample_disk(rng, 500, 0.95)
    for kind, cap in (("hyperbolic", 2.0), ("spherical", 1.2)):
        metric = RadialMetric.builtin(kind)
        for seed in range(10):
            f = random_geodesic_map(kind, seed, 6, cap)
            assert np.max(holomorphy_defect(metric, f, z)) <= 1e-6
            a = hopf_coefficient(metric, f, z)
            s = real_hopf_sqrt(metric, f, z)
            assert np.all(np.abs(s * s - a) <= 1e-8 * (1 + np.abs(a)))


def test_distinguished_parameter_examples():
    assert distinguished_parameter(HYP, zero, 0.5j) == 0
    z = 0.6 + 0.2j
    assert distinguished_parameter(HYP, TANH_RE, z) == pytest.approx(z / 2, abs=1e-10)
    assert path_parameter(HYP, TANH_RE, [0, 1j * z.imag, z]) == pytest.approx(z / 2, abs=1e-10)
    with pytest.raises(DomainError):
        distinguished_parameter(HYP, TANH_RE, 1.2)


def test_distance_via_parameter_examples():
    assert distance_via_parameter(HYP, TANH_RE, 0.3j, 0.3j) == 0
    assert distance_via_parameter(HYP, TANH_RE, 0, 0.6) == pytest.approx(0.6, abs=1e-10)
    assert distance_via_parameter(SPH, TAN_03, 0, 0.5) == pytest.approx(0.15, abs=1e-10)


def test_distance_identity_and_path_independence():
    rng = np.random.default_rng(22)
    for kind, cap in (("hyperbolic", 2.0), ("spherical", 1.2)):
        metric = RadialMetric.builtin(kind)
        f = random_geodesic_map(kind, 5, 6, cap)
        zs, ws = sample_disk(rng, 15, 0.95), sample_disk(rng, 15, 0.95)
        for z1, z2 in zip(zs, ws):
            d = abs(metric_antiderivative(metric, float(f(z2))) - metric_antiderivative(metric, float(f(z1))))
            assert distance_via_parameter(metric, f, z1, z2) == pytest.approx(d, abs=1e-8)
            direct = distinguished_parameter(metric, f, z2)
            for path in ([0, 1j * z2.imag, z2], [0, z2.real, z2], [0, 0.5 * z2 + 0.3j * z2, z2]):
                assert abs(path_parameter(metric, f, path) - direct) <= 1e-9
