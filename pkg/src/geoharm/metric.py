"""Radial conformal metrics ``rho(w) = h(|w|^2)`` on a disk chart ``|w| < R``.

Profiles ``h`` are expressions in ``t``; their derivative ``h'`` comes from
forward-mode dual numbers and nowhere else. Distances along a diameter use
the metric antiderivative ``F(s) = int_0^s h(x^2) dx`` computed by adaptive
Gauss-Kronrod quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Optional, Union

import numpy as np

from .dual import Dual
from .errors import DomainError, GeoharmError, QuadratureError
from .expr import Expression, parse_expression, random_positive_source
from .quadrature import adaptive_gk15

BUILTIN_PROFILES = {
    "hyperbolic": "1/(1-t)",
    "spherical": "1/(1+t)",
    "euclidean": "1",
}
BUILTIN_RADIUS = {"hyperbolic": 1.0, "spherical": math.inf, "euclidean": math.inf}

# evaluation is refused at |w| > R * (1 - BOUNDARY_CUTOFF)
BOUNDARY_CUTOFF = 1e-12
QUAD_RTOL = 1e-10
QUAD_ATOL = 1e-14


@dataclass(frozen=True)
class RadialProfile:
    """A profile ``h(t)``; ``expression`` is set only for user expressions."""

    kind: str
    expression: Optional[str] = None
    _expr: Expression = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind == "expression":
            if self.expression is None:
                raise ValueError("expression profile needs source text")
            src = self.expression
        elif self.kind in BUILTIN_PROFILES:
            if self.expression is not None:
                raise ValueError(f"builtin profile {self.kind!r} takes no expression")
            src = BUILTIN_PROFILES[self.kind]
        else:
            raise ValueError(f"unknown profile kind {self.kind!r}")
        object.__setattr__(self, "_expr", parse_expression(src))

    @property
    def source(self) -> str:
        return self._expr.source

    def __call__(self, t):
        return self._expr(t)

    def derivative_pair(self, t):
        """Raw (h, h') from dual evaluation; no domain checks."""
        out = self._expr(Dual(t, np.ones_like(t) if np.ndim(t) else 1.0))
        if isinstance(out, Dual):
            h, dh = out.a, out.b
        else:
            h, dh = out, 0.0
        if np.ndim(t):
            h = np.broadcast_to(h, np.shape(t)).astype(float)
            dh = np.broadcast_to(dh, np.shape(t)).astype(float)
        return h, dh


@lru_cache(maxsize=None)
def _builtin(name: str) -> "RadialMetric":
    if name not in BUILTIN_PROFILES:
        raise ValueError(f"unknown builtin metric {name!r}")
    return RadialMetric(RadialProfile(name), BUILTIN_RADIUS[name])


def parse_profile(source: str) -> RadialProfile:
    """Parse a user profile expression in ``t``."""
    return RadialProfile("expression", source)


def make_profile(name: str) -> RadialProfile:
    """Builtin name or expression source."""
    if name in BUILTIN_PROFILES:
        return RadialProfile(name)
    return parse_profile(name)


@dataclass(frozen=True)
class RadialMetric:
    profile: RadialProfile
    chart_radius: float

    def __post_init__(self):
        if not self.chart_radius > 0:
            raise ValueError("chart_radius must be positive")

    @classmethod
    def hyperbolic(cls) -> "RadialMetric":
        return cls(RadialProfile("hyperbolic"), 1.0)

    @classmethod
    def spherical(cls) -> "RadialMetric":
        return cls(RadialProfile("spherical"), math.inf)

    @classmethod
    def euclidean(cls) -> "RadialMetric":
        return cls(RadialProfile("euclidean"), math.inf)

    @classmethod
    def builtin(cls, name: str) -> "RadialMetric":
        """Shared instance, so the cached total length is computed once."""
        return _builtin(name)

    @property
    def kind(self) -> str:
        return self.profile.kind

    @property
    def cutoff(self) -> float:
        """Largest admissible |w|."""
        return self.chart_radius * (1.0 - BOUNDARY_CUTOFF)

    @cached_property
    def total_length(self) -> float:
        """Metric length of the radius ``[0, R)``; ``inf`` when divergent."""
        return total_length(self)

    def descriptor(self) -> dict:
        prof = self.profile.kind if self.profile.kind != "expression" else self.profile.expression
        radius = "inf" if math.isinf(self.chart_radius) else self.chart_radius
        return {"profile": prof, "chart_radius": radius}


def metric_from_descriptor(desc: Union[dict, str]) -> RadialMetric:
    """Build a metric from ``{"profile": ..., "chart_radius": ...}`` or a bare name."""
    if isinstance(desc, str):
        desc = {"profile": desc}
    unknown = set(desc) - {"profile", "chart_radius"}
    if unknown:
        raise ValueError(f"unknown metric keys: {sorted(unknown)}")
    profile = make_profile(desc["profile"])
    radius = desc.get("chart_radius")
    if radius is None:
        radius = BUILTIN_RADIUS.get(profile.kind, math.inf)
    elif radius == "inf":
        radius = math.inf
    return RadialMetric(profile, float(radius))


def random_expression_metric(seed: int, chart_radius: float = 2.0) -> RadialMetric:
    """Deterministic random expression metric, positive on the whole chart."""
    rng = np.random.default_rng(seed)
    return RadialMetric(parse_profile(random_positive_source(rng)), chart_radius)


def _check_finite(w):
    if not np.all(np.isfinite(w)):
        raise DomainError("non-finite point")


def _check_radius(metric: RadialMetric, r):
    if np.any(r > metric.cutoff):
        raise DomainError(f"|w| exceeds chart cutoff {metric.cutoff!r}")


def profile_jet(metric: RadialMetric, t):
    """``(h(t), h'(t))`` by dual-number evaluation; ``t`` may be an array."""
    t = np.asarray(t, dtype=float) if np.ndim(t) else float(t)
    _check_finite(t)
    if np.any(t < 0) or np.any(t > metric.cutoff ** 2):
        raise DomainError("t outside [0, R^2)")
    with np.errstate(all="ignore"):
        h, dh = metric.profile.derivative_pair(t)
    if not (np.all(np.isfinite(h)) and np.all(np.isfinite(dh)) and np.all(h > 0)):
        raise DomainError("profile evaluation hit a pole or non-positive value")
    return h, dh


def density(metric: RadialMetric, w):
    """``rho(w) = h(|w|^2)``."""
    _check_finite(w)
    r = np.abs(w)
    _check_radius(metric, r)
    return profile_jet(metric, r * r)[0]


def log_density_derivative(metric: RadialMetric, w):
    """``d/dw log rho^2(w) = 2 h'(|w|^2) conj(w) / h(|w|^2)``."""
    _check_finite(w)
    r = np.abs(w)
    _check_radius(metric, r)
    h, dh = profile_jet(metric, r * r)
    return 2.0 * dh * np.conj(w) / h


def _integrand(metric: RadialMetric):
    prof = metric.profile

    def f(x):
        with np.errstate(all="ignore"):
            v = np.broadcast_to(prof(x * x), np.shape(x))
        if not (np.all(np.isfinite(v)) and np.all(v > 0)):
            raise DomainError("profile evaluation hit a pole or non-positive value")
        return v

    return f


def metric_antiderivative(metric: RadialMetric, s: float, rtol: float = QUAD_RTOL) -> float:
    """``F(s) = int_0^s h(x^2) dx``, extended to ``s < 0`` as an odd function."""
    s = float(s)
    _check_finite(s)
    _check_radius(metric, abs(s))
    if s == 0.0:
        return 0.0
    val, _ = adaptive_gk15(_integrand(metric), 0.0, abs(s), rtol=rtol, atol=QUAD_ATOL)
    return val if s > 0 else -val


def radial_distance(metric: RadialMetric, s1: float, s2: float) -> float:
    """Intrinsic distance between signed radii ``s1, s2`` on one diameter."""
    if s1 == s2:
        return 0.0
    return abs(metric_antiderivative(metric, s2) - metric_antiderivative(metric, s1))


def geodesic_disk_contains(metric: RadialMetric, radius: float, w) -> bool:
    """Whether ``d_rho(0, w) < radius``; rotation invariance gives ``F(|w|)``."""
    if not radius > 0:
        raise DomainError("radius must be positive")
    _check_finite(w)
    return metric_antiderivative(metric, abs(w)) < radius


def total_length(metric: RadialMetric) -> float:
    """``int_0^R h(x^2) dx``; returns ``inf`` when the quadrature diverges."""
    if math.isfinite(metric.chart_radius):
        try:
            return metric_antiderivative(metric, metric.cutoff)
        except QuadratureError:
            return math.inf
    prof = metric.profile

    # x = u / (1 - u) maps [0, 1) onto [0, inf)
    def g(u):
        x = u / (1.0 - u)
        with np.errstate(all="ignore"):
            v = np.broadcast_to(prof(x * x), np.shape(u)) / (1.0 - u) ** 2
        if not (np.all(np.isfinite(v)) and np.all(v > 0)):
            raise DomainError("profile evaluation hit a pole or non-positive value")
        return v

    try:
        val, _ = adaptive_gk15(g, 0.0, 1.0 - BOUNDARY_CUTOFF, rtol=QUAD_RTOL, atol=QUAD_ATOL)
    except (QuadratureError, DomainError):
        return math.inf
    return val if val < 1e12 else math.inf

