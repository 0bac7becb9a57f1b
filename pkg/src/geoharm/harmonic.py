"""Harmonic functions on the unit disk and rho-harmonic maps into a diameter.

Maps are plain callables taking a complex numpy array and returning an
array of the same shape. All evaluators here are vectorised that way.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional, Tuple, Union

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DomainError
from .metric import (
    RadialMetric,
    density,
    log_density_derivative,
    metric_antiderivative,
)

TWO_PI = 2.0 * math.pi
SUP_GRID = 4096
DEFAULT_STEP = 1e-3
SPHERICAL_MARGIN = 1e-9


@dataclass(frozen=True)
class PiecewiseConstant:
    """Boundary values constant on consecutive arcs ``(start, end, value)``."""

    arcs: Tuple[Tuple[float, float, float], ...]

    def __post_init__(self):
        arcs = tuple((float(a), float(b), float(v)) for a, b, v in self.arcs)
        if not arcs:
            raise ValueError("at least one arc is required")
        for (a, b, v), nxt in zip(arcs, arcs[1:] + (None,)):
            if not b > a:
                raise ValueError(f"arc ({a}, {b}) is empty or reversed")
            if not math.isfinite(v):
                raise ValueError("arc values must be finite")
            if nxt is not None and abs(nxt[0] - b) > 1e-12:
                raise ValueError("arcs must be contiguous and ordered")
        if abs(arcs[-1][1] - arcs[0][0] - TWO_PI) > 1e-12:
            raise ValueError("arcs must cover the circle exactly once")
        object.__setattr__(self, "arcs", arcs)

    def sup_norm(self) -> float:
        return max(abs(v) for _, _, v in self.arcs)

    def boundary(self, theta):
        theta = np.mod(np.asarray(theta, dtype=float) - self.arcs[0][0], TWO_PI)
        out = np.zeros_like(theta)
        for a, b, v in self.arcs:
            lo, hi = a - self.arcs[0][0], b - self.arcs[0][0]
            out = np.where((theta >= lo) & (theta < hi), v, out)
        return out

    def extend(self, z):
        if len(self.arcs) == 1:
            return np.full(np.shape(z), self.arcs[0][2]) + 0.0 * np.real(z)
        total = 0.0
        for a, b, v in self.arcs:
            if v != 0.0:
                total = total + v * harmonic_measure(a, b, z)
        return total + 0.0 * np.real(z)


def harmonic_measure(start: float, end: float, z):
    """Harmonic measure at ``z`` of the arc from ``e^{i start}`` to ``e^{i end}``.

    The angle under which ``z`` sees the arc, ``alpha`` in ``(0, 2 pi)``, gives
    ``omega = alpha / pi - (end - start) / (2 pi)``.
    """
    if end - start >= TWO_PI:
        return np.ones(np.shape(z))
    ratio = (np.exp(1j * end) - z) / (np.exp(1j * start) - z)
    alpha = np.mod(np.angle(ratio), TWO_PI)
    return alpha / math.pi - (end - start) / TWO_PI


@dataclass(frozen=True)
class TrigPolynomial:
    """Boundary values ``a0 + sum_k a_k cos(k t) + b_k sin(k t)``."""

    a0: float
    a: Tuple[float, ...] = ()
    b: Tuple[float, ...] = ()

    def __post_init__(self):
        a = tuple(float(x) for x in self.a)
        b = tuple(float(x) for x in self.b)
        n = max(len(a), len(b))
        a += (0.0,) * (n - len(a))
        b += (0.0,) * (n - len(b))
        object.__setattr__(self, "a0", float(self.a0))
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        # g(z) = a0 + Re sum_k (a_k - i b_k) z^k, highest degree first for polyval
        c = np.array([complex(x, -y) for x, y in zip(a, b)][::-1] + [complex(self.a0)])
        object.__setattr__(self, "_poly", c)

    @property
    def degree(self) -> int:
        return len(self.a)

    def boundary(self, theta):
        return self.extend(np.exp(1j * np.asarray(theta, dtype=float)))

    def extend(self, z):
        return np.real(np.polyval(self._poly, z))

    @cached_property
    def _sup(self) -> float:
        if self.degree == 0:
            return abs(self.a0)
        return boundary_sup(lambda t: np.abs(self.boundary(t)))

    def sup_norm(self) -> float:
        return self._sup

    def scaled(self, lam: float) -> "TrigPolynomial":
        return TrigPolynomial(lam * self.a0, tuple(lam * x for x in self.a), tuple(lam * x for x in self.b))

    def shifted(self, c: float) -> "TrigPolynomial":
        return TrigPolynomial(self.a0 + c, self.a, self.b)

    def as_dict(self) -> dict:
        return {"a0": self.a0, "a": list(self.a), "b": list(self.b)}


BoundaryData = Union[PiecewiseConstant, TrigPolynomial]


def boundary_sup(modulus: Callable) -> float:
    """Max of a smooth ``modulus(theta)`` over the circle.

    Grid of ``SUP_GRID`` angles, then a bounded scalar search around the best
    grid angle so the result does not undershoot the true sup by the grid
    spacing.
    """
    theta = np.arange(SUP_GRID) * (TWO_PI / SUP_GRID)
    vals = modulus(theta)
    i = int(np.argmax(vals))
    d = TWO_PI / SUP_GRID
    res = minimize_scalar(
        lambda t: -float(modulus(np.array([t]))[0]),
        bounds=(theta[i] - d, theta[i] + d),
        method="bounded",
        options={"xatol": 1e-13},
    )
    return max(float(vals[i]), -float(res.fun))


def boundary_from_config(obj: dict) -> BoundaryData:
    """Parse ``{"arcs": [[t1, t2, v], ...]}`` or ``{"trig": {"a0", "a", "b"}}``."""
    if set(obj) == {"arcs"}:
        return PiecewiseConstant(tuple(tuple(arc) for arc in obj["arcs"]))
    if set(obj) == {"trig"}:
        t = obj["trig"]
        unknown = set(t) - {"a0", "a", "b"}
        if unknown:
            raise ValueError(f"unknown trig keys: {sorted(unknown)}")
        return TrigPolynomial(t.get("a0", 0.0), tuple(t.get("a", ())), tuple(t.get("b", ())))
    raise ValueError("boundary data needs exactly one of 'arcs' or 'trig'")


def _check_disk(z):
    if not np.all(np.isfinite(z)):
        raise DomainError("non-finite point")
    if np.any(np.abs(z) >= 1.0):
        raise DomainError("point outside the unit disk")


def poisson_extend(data: BoundaryData, z):
    """Harmonic extension of ``data`` into the disk, evaluated at ``z``."""
    _check_disk(z)
    return data.extend(z)


@dataclass(frozen=True)
class HarmonicFunction:
    """Real harmonic function on the unit disk.

    Either the Poisson extension of boundary data, or a closed form given by
    a tag, a vectorised callable and a known bound on ``|g|``.
    """

    source: Union[BoundaryData, str]
    _fn: Optional[Callable] = field(default=None, repr=False, compare=False)
    _bound: Optional[float] = field(default=None, compare=False)

    @classmethod
    def closed_form(cls, tag: str, fn: Callable, bound: float) -> "HarmonicFunction":
        return cls(tag, fn, float(bound))

    def __call__(self, z):
        z = np.asarray(z, dtype=complex) if np.ndim(z) else complex(z)
        _check_disk(z)
        if self._fn is not None:
            return self._fn(z)
        return self.source.extend(z)

    def sup_norm(self) -> float:
        if self._fn is not None:
            return self._bound
        return self.source.sup_norm()

    def scaled(self, lam: float) -> "HarmonicFunction":
        if not isinstance(self.source, TrigPolynomial):
            raise TypeError("scaling is defined for trigonometric boundary data")
        return HarmonicFunction(self.source.scaled(lam))


def extremal_boundary(r: float) -> PiecewiseConstant:
    """``+r`` on the upper semicircle, ``-r`` on the lower one."""
    return PiecewiseConstant(((0.0, math.pi, r), (math.pi, TWO_PI, -r)))


def extremal_function(r: float) -> HarmonicFunction:
    if not r > 0:
        raise ValueError("r must be positive")
    return HarmonicFunction(extremal_boundary(r))


def extremal_step(r: float, z):
    """Extremal competitor for the harmonic Schwarz bound; ``(4r/pi) arctan y`` at ``iy``."""
    return extremal_function(r)(z)


@dataclass(frozen=True)
class MapJet:
    value: complex
    fz: complex
    fzbar: complex
    fzzbar: complex


# 4th-order central stencils on offsets -2..2
_D1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_D2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0
_OFFS = np.array([-2.0, -1.0, 0.0, 1.0, 2.0])


def clamp_step(z, step: float, domain_radius: Optional[float] = 1.0):
    """FD step per point, shrunk so ``|z| + 5*step`` stays inside the domain."""
    if domain_radius is None or math.isinf(domain_radius):
        return np.full(np.shape(z), float(step)) if np.ndim(z) else float(step)
    room = domain_radius - np.abs(z)
    if np.any(room <= 0):
        raise DomainError("stencil exits domain")
    return np.minimum(step, room / 5.0)


def wirtinger_jet(
    f: Callable,
    z,
    step: float = DEFAULT_STEP,
    domain_radius: Optional[float] = 1.0,
) -> MapJet:
    """Wirtinger derivatives of ``f`` at ``z`` by 4th-order central differences.

    ``f_z = (f_x - i f_y)/2``, ``f_zbar = (f_x + i f_y)/2`` and
    ``f_zzbar`` is a quarter of the 4th-order Laplacian.
    """
    z = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(z)):
        raise DomainError("non-finite point")
    h = clamp_step(z, step, domain_radius)
    shape = (5,) + (1,) * z.ndim
    offs = _OFFS.reshape(shape)
    pts = np.concatenate([z + offs * h, z + 1j * offs * h])
    vals = np.asarray(f(pts))
    vx, vy = vals[:5], vals[5:]
    d1 = _D1.reshape(shape)
    d2 = _D2.reshape(shape)
    fx = (d1 * vx).sum(axis=0) / h
    fy = (d1 * vy).sum(axis=0) / h
    lap = ((d2 * vx).sum(axis=0) + (d2 * vy).sum(axis=0)) / (h * h)
    value = vx[2]
    fz = 0.5 * (fx - 1j * fy)
    fzbar = 0.5 * (fx + 1j * fy)
    return MapJet(value=value, fz=fz, fzbar=fzbar, fzzbar=0.25 * lap + 0j)


@dataclass(frozen=True)
class GeodesicMap:
    """``tanh(g)`` (hyperbolic) or ``tan(g)`` (spherical) for harmonic ``g``."""

    kind: str
    g: HarmonicFunction

    def __call__(self, z):
        v = self.g(z)
        return np.tanh(v) if self.kind == "hyperbolic" else np.tan(v)

    def pulled_back(self, z):
        """``F(f(z))``, which equals ``g(z)`` by construction."""
        return self.g(z)


def compose_geodesic_map(metric_kind: str, g: HarmonicFunction) -> GeodesicMap:
    if metric_kind not in ("hyperbolic", "spherical"):
        raise ValueError(f"no closed-form harmonic family for {metric_kind!r}")
    if metric_kind == "spherical" and g.sup_norm() >= math.pi / 2 - SPHERICAL_MARGIN:
        raise DomainError("sup|g| must stay below pi/2 for tan(g) to stay in the chart")
    return GeodesicMap(metric_kind, g)


def harmonic_residual(metric: RadialMetric, f: Callable, z, step: float = DEFAULT_STEP):
    """``f_zzbar + (d_w log rho^2)(f) f_z f_zbar``; zero for rho-harmonic ``f``."""
    jet = wirtinger_jet(f, z, step)
    return jet.fzzbar + log_density_derivative(metric, jet.value) * jet.fz * jet.fzbar


def _real_values(v):
    v = np.asarray(v)
    if np.iscomplexobj(v):
        if np.any(np.abs(v.imag) > 1e-12):
            raise DomainError("map is not real-valued")
        v = v.real
    return v


def pullback_harmonicity_defect(metric: RadialMetric, f: Callable, z, step: float = DEFAULT_STEP) -> float:
    """4th-order FD Laplacian of ``z -> F(f(z))`` at a single point."""
    z = complex(z)
    h = float(clamp_step(z, step))
    pts = np.array([z + o * h for o in _OFFS] + [z + 1j * o * h for o in _OFFS])
    vals = _real_values(f(pts))
    F = np.array([metric_antiderivative(metric, float(v)) for v in vals])
    return float((_D2 @ F[:5] + _D2 @ F[5:]) / (h * h))


def energy_density(metric: RadialMetric, f: Callable, z, step: float = DEFAULT_STEP):
    """``rho^2(f) (|f_z|^2 + |f_zbar|^2)``."""
    jet = wirtinger_jet(f, z, step)
    rho = density(metric, jet.value)
    return rho * rho * (np.abs(jet.fz) ** 2 + np.abs(jet.fzbar) ** 2)


def random_trig(seed: int, degree_cap: int, sup_cap: float) -> TrigPolynomial:
    if degree_cap < 1:
        raise ValueError("degree_cap must be at least 1")
    if sup_cap < 0:
        raise ValueError("sup_cap must be non-negative")
    rng = np.random.default_rng(seed)
    k = np.arange(1, degree_cap + 1)
    a = rng.standard_normal(degree_cap) / k
    b = rng.standard_normal(degree_cap) / k
    base = TrigPolynomial(0.0, tuple(a), tuple(b))
    if sup_cap == 0:
        return base.scaled(0.0)
    return base.scaled(sup_cap / base.sup_norm())


def random_harmonic(seed: int, degree_cap: int, sup_cap: float) -> HarmonicFunction:
    """Mean-zero harmonic function with boundary sup-norm ``sup_cap``.

    Deterministic in ``seed``. Coefficients decay like ``1/k``.
    """
    return HarmonicFunction(random_trig(seed, degree_cap, sup_cap))


def random_geodesic_map(kind: str, seed: int, degree_cap: int, sup_cap: float) -> GeodesicMap:
    return compose_geodesic_map(kind, random_harmonic(seed, degree_cap, sup_cap))


def sample_disk(rng: np.random.Generator, n: int, radius: float = 1.0) -> np.ndarray:
    """``n`` points uniform by area in ``|z| < radius``."""
    r = radius * np.sqrt(rng.uniform(0.0, 1.0, n))
    t = rng.uniform(0.0, TWO_PI, n)
    return r * np.exp(1j * t)

