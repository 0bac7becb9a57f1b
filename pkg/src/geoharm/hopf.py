"""Hopf differential ``a(z) dz^2`` of a map and its distinguished parameter.

``a = rho^2(f) f_z conj(f_zbar)``. For a real map this is ``(rho(f) f_z)^2``,
and the antiderivative of ``rho(f) f_z`` along a path from 0 gives the
distinguished parameter whose real part reads off metric distances.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, QuadratureError
from .harmonic import DEFAULT_STEP, _real_values, clamp_step, wirtinger_jet
from .metric import RadialMetric, density
from .quadrature import gauss_legendre

DEFECT_STEP = 1e-2
GL_NODES = 64

_D1 = np.array([1.0, -8.0, 8.0, -1.0]) / 12.0
_D1_OFFS = np.array([-2.0, -1.0, 1.0, 2.0])


def hopf_coefficient(metric: RadialMetric, f: Callable, z, step: float = DEFAULT_STEP):
    jet = wirtinger_jet(f, z, step)
    rho = density(metric, jet.value)
    return rho * rho * jet.fz * np.conj(jet.fzbar)


def holomorphy_defect(
    metric: RadialMetric,
    f: Callable,
    z,
    step: float = DEFECT_STEP,
    jet_step: float = DEFAULT_STEP,
):
    """``|d a / d zbar|`` by 4th-order central differences of the Hopf coefficient.

    The outer stencil is clamped to leave room for the inner jet stencils.
    """
    z = np.asarray(z, dtype=complex)
    h = clamp_step(z, step, 1.0 - 3.0 * jet_step)
    shape = (4,) + (1,) * z.ndim
    offs = _D1_OFFS.reshape(shape)
    pts = np.concatenate([z + offs * h, z + 1j * offs * h])
    a = hopf_coefficient(metric, f, pts, jet_step)
    d1 = _D1.reshape(shape)
    ax = (d1 * a[:4]).sum(axis=0) / h
    ay = (d1 * a[4:]).sum(axis=0) / h
    return np.abs(0.5 * (ax + 1j * ay))


def real_hopf_sqrt(metric: RadialMetric, f: Callable, z, step: float = DEFAULT_STEP):
    """``rho(f) f_z`` for a real map; its square is the Hopf coefficient."""
    jet = wirtinger_jet(f, z, step)
    value = _real_values(jet.value)
    return density(metric, value) * jet.fz


def _segment_integral(metric, f, a: complex, b: complex, n: int, step: float) -> complex:
    x, w = gauss_legendre(n)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    vals = real_hopf_sqrt(metric, f, mid + half * x, step)
    return complex(half * (w @ vals))


def path_parameter(
    metric: RadialMetric,
    f: Callable,
    vertices: Sequence[complex],
    n: int = GL_NODES,
    step: float = DEFAULT_STEP,
) -> complex:
    """Integral of ``rho(f) f_z dz`` along the polygon through ``vertices``.

    Each edge uses an n-point Gauss-Legendre rule and is checked once against
    the same rule on its two halves; the halved value is returned.
    """
    total = 0.0 + 0.0j
    for a, b in zip(vertices[:-1], vertices[1:]):
        a, b = complex(a), complex(b)
        if a == b:
            continue
        whole = _segment_integral(metric, f, a, b, n, step)
        m = 0.5 * (a + b)
        halves = _segment_integral(metric, f, a, m, n, step) + _segment_integral(metric, f, m, b, n, step)
        if abs(whole - halves) > 1e-8 * (1.0 + abs(halves)):
            raise QuadratureError("Gauss-Legendre refinement check failed", abs(halves), abs(whole - halves))
        total += halves
    return total


def distinguished_parameter(
    metric: RadialMetric,
    f: Callable,
    z,
    n: int = GL_NODES,
    step: float = DEFAULT_STEP,
) -> complex:
    """Antiderivative of ``rho(f) f_z`` along ``[0, z]``, normalised to vanish at 0."""
    z = complex(z)
    if not abs(z) < 1:
        raise DomainError("point outside the unit disk")
    return path_parameter(metric, f, [0.0, z], n, step)


def distance_via_parameter(metric: RadialMetric, f: Callable, z1, z2, step: float = DEFAULT_STEP) -> float:
    """``2 |Re p(z2) - Re p(z1)|`` with ``p`` the distinguished parameter."""
    if complex(z1) == complex(z2):
        return 0.0
    p1 = distinguished_parameter(metric, f, z1, step=step)
    p2 = distinguished_parameter(metric, f, z2, step=step)
    return 2.0 * abs(p2.real - p1.real)
