"""Schwarz-type bounds evaluated as signed margins (right side minus left side).

Every bound for maps into a geodesic diameter uses the factor ``4r/pi``,
where ``r`` is the radius of the geodesic disk containing the image.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from .errors import DomainError, PreconditionError
from .harmonic import (
    GeodesicMap,
    HarmonicFunction,
    _real_values,
    boundary_sup,
    compose_geodesic_map,
    extremal_function,
    random_trig,
    sample_disk,
    wirtinger_jet,
)
from .metric import RadialMetric, density, metric_antiderivative

INEQUALITIES = (
    "classical_schwarz",
    "colonna",
    "thm1_distance",
    "thm1_gradient",
    "thm1_lipschitz",
    "qpo_distance",
    "qpo_gradient",
    "qpo_lipschitz",
)
MARGIN_TOL = 1e-9
SHARPNESS_TOL = 1e-8
REL_EPS = 1e-300
FOUR_OVER_PI = 4.0 / math.pi


@dataclass(frozen=True)
class BoundReport:
    inequality_id: str
    sample: Tuple[complex, ...]
    lhs: float
    rhs: float
    margin: float = field(init=False)
    rel_margin: float = field(init=False)

    def __post_init__(self):
        margin = self.rhs - self.lhs
        object.__setattr__(self, "margin", margin)
        object.__setattr__(self, "rel_margin", margin / max(self.rhs, REL_EPS))

    def passed(self, tol: float = MARGIN_TOL) -> bool:
        return self.margin >= -tol


def _report(ineq: str, sample, lhs, rhs) -> BoundReport:
    return BoundReport(ineq, tuple(complex(s) for s in sample), float(lhs), float(rhs))


def hyperbolic_distance(z, w) -> float:
    """``atanh |(z - w) / (1 - conj(z) w)|`` on the unit disk."""
    z, w = complex(z), complex(w)
    if not (abs(z) < 1 and abs(w) < 1):
        raise DomainError("points must lie in the unit disk")
    if z == w:
        return 0.0
    return math.atanh(abs((z - w) / (1.0 - z.conjugate() * w)))


def classical_schwarz_margin(f: HarmonicFunction, r: float, z) -> BoundReport:
    """``|f(z) - (1-|z|^2)/(1+|z|^2) f(0)| <= (4r/pi) arctan|z|``."""
    if f.sup_norm() > r * (1.0 + 1e-12):
        raise PreconditionError("range", f"boundary sup {f.sup_norm()!r} exceeds r={r!r}")
    z = complex(z)
    az2 = abs(z) ** 2
    lhs = abs(float(f(z)) - (1.0 - az2) / (1.0 + az2) * float(f(0.0)))
    return _report("classical_schwarz", (z,), lhs, FOUR_OVER_PI * r * math.atan(abs(z)))


def colonna_margin(f: Callable, r: float, z, w) -> BoundReport:
    """``|f(z) - f(w)| <= (4r/pi) d_h(z, w)`` for harmonic ``f`` into ``|w| < r``."""
    z, w = complex(z), complex(w)
    fz, fw = complex(f(np.array([z]))[0]), complex(f(np.array([w]))[0])
    if max(abs(fz), abs(fw)) > r * (1.0 + 1e-12):
        raise PreconditionError("range", "sampled image leaves the disk of radius r")
    return _report("colonna", (z, w), abs(fz - fw), FOUR_OVER_PI * r * hyperbolic_distance(z, w))


def _real_at(f: Callable, pts) -> np.ndarray:
    try:
        return _real_values(f(np.asarray(pts, dtype=complex)))
    except DomainError as exc:
        raise PreconditionError("real_valued", str(exc)) from None


def _check_radius(metric: RadialMetric, r: float, name: str = "radius_guard") -> None:
    if not r > 0:
        raise PreconditionError(name, "r must be positive")
    if not r < metric.total_length:
        raise PreconditionError(name, f"r={r!r} is not below the metric length {metric.total_length!r}")


def _check_anchor(f: Callable) -> None:
    v = _real_at(f, [0.0])[0]
    if abs(v) > 1e-12:
        raise PreconditionError("anchor", f"f(0) = {v!r} must vanish")


def _pulled(metric: RadialMetric, r: float, value: float) -> float:
    """``F(f(z))`` after checking that ``f(z)`` lies in the geodesic disk."""
    fv = metric_antiderivative(metric, value)
    if not abs(fv) < r:
        raise PreconditionError("image_in_disk", f"d(0, f(z)) = {abs(fv)!r} is not below r={r!r}")
    return fv


def thm1_distance_margin(metric: RadialMetric, f: Callable, r: float, z) -> BoundReport:
    """``d(f(z), f(0)) <= (4r/pi) arctan|z|`` with ``f(0) = 0``."""
    _check_radius(metric, r)
    _check_anchor(f)
    z = complex(z)
    lhs = abs(_pulled(metric, r, _real_at(f, [z])[0]))
    return _report("thm1_distance", (z,), lhs, FOUR_OVER_PI * r * math.atan(abs(z)))


def _gradient_lhs(metric: RadialMetric, f: Callable, r: float, z: complex, norm: str) -> float:
    jet = wirtinger_jet(f, z)
    value = float(_real_values(jet.value))
    _pulled(metric, r, value)
    if norm == "operator":
        df = abs(jet.fz) + abs(jet.fzbar)
        rho = density(metric, value)
    else:
        # |grad f| = 2 |f_z| for real f
        df = 2.0 * abs(jet.fz)
        rho = density(metric, abs(value))
    return float(rho * df)


def thm1_gradient_margin(metric: RadialMetric, f: Callable, r: float, z) -> BoundReport:
    """``rho(f(z)) |Df(z)| <= (4r/pi) / (1 - |z|^2)`` with ``|Df| = |f_z| + |f_zbar|``."""
    _check_radius(metric, r)
    _check_anchor(f)
    z = complex(z)
    lhs = _gradient_lhs(metric, f, r, z, "operator")
    return _report("thm1_gradient", (z,), lhs, FOUR_OVER_PI * r / (1.0 - abs(z) ** 2))


def thm1_lipschitz_margin(metric: RadialMetric, f: Callable, r: float, z1, z2) -> BoundReport:
    """``d(f(z1), f(z2)) <= (4r/pi) d_h(z1, z2)``."""
    _check_radius(metric, r)
    z1, z2 = complex(z1), complex(z2)
    v1, v2 = _real_at(f, [z1, z2])
    lhs = abs(_pulled(metric, r, v1) - _pulled(metric, r, v2))
    return _report("thm1_lipschitz", (z1, z2), lhs, FOUR_OVER_PI * r * hyperbolic_distance(z1, z2))


def qpo_margins(metric: RadialMetric, f: Callable, z, z1, z2, r_eff: float) -> List[BoundReport]:
    """The three bounds for real maps into a radial metric disk.

    ``r_eff`` is the radius of the geodesic disk about 0 containing the image;
    it must stay below the metric length of the chart radius.
    """
    _check_radius(metric, r_eff, "length_guard")
    _check_anchor(f)
    z, z1, z2 = complex(z), complex(z1), complex(z2)
    c = FOUR_OVER_PI * r_eff
    v = _real_at(f, [z])[0]
    dist = _report("qpo_distance", (z,), _pulled(metric, r_eff, abs(v)), c * math.atan(abs(z)))
    grad = _report(
        "qpo_gradient", (z,), _gradient_lhs(metric, f, r_eff, z, "gradient"), c / (1.0 - abs(z) ** 2)
    )
    v1, v2 = _real_at(f, [z1, z2])
    lip = _report(
        "qpo_lipschitz",
        (z1, z2),
        abs(_pulled(metric, r_eff, v1) - _pulled(metric, r_eff, v2)),
        c * hyperbolic_distance(z1, z2),
    )
    return [dist, grad, lip]


def extremal_map(metric_kind: str, r: float = 1.0) -> GeodesicMap:
    """``tanh`` or ``tan`` of the extremal step extension with level ``r``."""
    if metric_kind == "spherical":
        r = min(r, math.pi / 2 - 1e-3)
    return compose_geodesic_map(metric_kind, extremal_function(r))


def sharpness_probe(metric_kind: str, n_points: int, r: float = 1.0) -> dict:
    """Largest ``|margin|`` of the distance bound for the extremal family on ``iy``."""
    if n_points < 1:
        raise ValueError("n_points must be positive")
    metric = RadialMetric.builtin(metric_kind)
    f = extremal_map(metric_kind, r)
    r_used = f.g.sup_norm()
    ys = np.linspace(0.0, 0.99, n_points)
    margins = [thm1_distance_margin(metric, f, r_used, 1j * y).margin for y in ys]
    worst = max(abs(m) for m in margins)
    return {
        "metric": metric_kind,
        "n_points": n_points,
        "r": r_used,
        "max_abs_margin": worst,
        "tolerance": SHARPNESS_TOL,
        "passed": worst <= SHARPNESS_TOL,
    }


def gradient_sharpness(metric_kind: str, r: float = 1.0) -> BoundReport:
    """Gradient bound at the origin for the extremal family; tight up to FD error."""
    metric = RadialMetric.builtin(metric_kind)
    f = extremal_map(metric_kind, r)
    return thm1_gradient_margin(metric, f, f.g.sup_norm(), 0.0)


# ---------------------------------------------------------------- fuzzing


@dataclass(frozen=True)
class FuzzRow:
    inequality: str
    seed: int
    map_index: int
    z: complex
    w: Optional[complex]
    lhs: float
    rhs: float
    margin: float
    rel_margin: float


@dataclass
class FuzzSummary:
    seed: int
    metric_kind: str
    n_maps: int
    n_points: int
    degree_cap: int
    tolerance: float
    rows: List[FuzzRow]
    violations: List[dict]

    def stats(self) -> Dict[str, dict]:
        out: Dict[str, dict] = {}
        for ineq in INEQUALITIES:
            m = [row.margin for row in self.rows if row.inequality == ineq]
            if not m:
                continue
            out[ineq] = {
                "count": len(m),
                "min_margin": min(m),
                "mean_margin": math.fsum(m) / len(m),
                "passed": min(m) >= -self.tolerance,
            }
        return out

    @property
    def passed(self) -> bool:
        return not self.violations

    def as_dict(self) -> dict:
        return {
            "seed": self.seed,
            "metric": self.metric_kind,
            "n_maps": self.n_maps,
            "n_points": self.n_points,
            "degree_cap": self.degree_cap,
            "tolerance": self.tolerance,
            "inequalities": self.stats(),
            "violations": self.violations,
            "passed": self.passed,
        }


def _fuzz_one(seed: int, index: int, n_points: int, kind: str, degree_cap: int, tol: float):
    rng = np.random.default_rng(np.random.SeedSequence([seed, index]))
    metric = RadialMetric.builtin(kind)
    top = 3.0 if kind == "hyperbolic" else math.pi / 2 - 0.05
    cap = float(rng.uniform(0.05, top))
    g_src = random_trig(int(rng.integers(2**63)), degree_cap, cap)
    g = HarmonicFunction(g_src)
    f = compose_geodesic_map(kind, g)
    r = g.sup_norm()

    # shifted copy so the f(0) term of the classical bound is exercised
    shift = float(rng.uniform(-cap, cap))
    gc = HarmonicFunction(g_src.shifted(shift))
    rc = gc.sup_norm()

    g2_src = random_trig(int(rng.integers(2**63)), degree_cap, cap)

    def fc(z):
        return g_src.extend(z) + 1j * g2_src.extend(z)

    rcol = boundary_sup(lambda t: np.abs(fc(np.exp(1j * t))))

    zs = sample_disk(rng, n_points, 0.98)
    ws = sample_disk(rng, n_points, 0.98)
    recipe = {
        "g": g_src.as_dict(),
        "shift": shift,
        "g2": g2_src.as_dict(),
        "r": r,
        "r_classical": rc,
        "r_colonna": rcol,
    }
    rows: List[FuzzRow] = []
    violations: List[dict] = []
    for z, w in zip(zs, ws):
        z, w = complex(z), complex(w)
        reports = [
            classical_schwarz_margin(gc, rc, z),
            colonna_margin(fc, rcol, z, w),
            thm1_distance_margin(metric, f, r, z),
            thm1_gradient_margin(metric, f, r, z),
            thm1_lipschitz_margin(metric, f, r, z, w),
        ] + qpo_margins(metric, f, z, z, w, r)
        for rep in reports:
            row = FuzzRow(
                rep.inequality_id,
                seed,
                index,
                rep.sample[0],
                rep.sample[1] if len(rep.sample) > 1 else None,
                rep.lhs,
                rep.rhs,
                rep.margin,
                rep.rel_margin,
            )
            rows.append(row)
            if not rep.passed(tol):
                violations.append(
                    {
                        "inequality": rep.inequality_id,
                        "seed": seed,
                        "map_index": index,
                        "z": [z.real, z.imag],
                        "w": [w.real, w.imag],
                        "lhs": rep.lhs,
                        "rhs": rep.rhs,
                        "margin": rep.margin,
                        "map": recipe,
                    }
                )
    return rows, violations


def fuzz_bounds(
    seed: int,
    n_maps: int,
    n_points: int,
    metric_kind: str,
    degree_cap: int = 6,
    tol: float = MARGIN_TOL,
    workers: int = 1,
) -> FuzzSummary:
    """Evaluate all eight bounds on random rho-harmonic maps.

    Map ``i`` draws from the substream ``SeedSequence([seed, i])``, so the
    result does not depend on ``workers``.
    """
    if n_maps < 0 or n_points < 0:
        raise ValueError("counts must be non-negative")
    if metric_kind not in ("hyperbolic", "spherical"):
        raise ValueError("fuzzing needs the hyperbolic or spherical metric")
    args = [(seed, i, n_points, metric_kind, degree_cap, tol) for i in range(n_maps)]
    if workers > 1 and n_maps > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda a: _fuzz_one(*a), args))
    else:
        results = [_fuzz_one(*a) for a in args]
    rows: List[FuzzRow] = []
    violations: List[dict] = []
    for rs, vs in results:
        rows.extend(rs)
        violations.extend(vs)
    return FuzzSummary(seed, metric_kind, n_maps, n_points, degree_cap, tol, rows, violations)


def margins_for(ineq: str, metric: RadialMetric, f: Callable, r: float, z, w=0.0) -> BoundReport:
    """Dispatch one inequality id for a map into the diameter (used by sweeps)."""
    if ineq == "thm1_distance":
        return thm1_distance_margin(metric, f, r, z)
    if ineq == "thm1_gradient":
        return thm1_gradient_margin(metric, f, r, z)
    if ineq == "thm1_lipschitz":
        return thm1_lipschitz_margin(metric, f, r, z, w)
    if ineq in ("qpo_distance", "qpo_gradient", "qpo_lipschitz"):
        reps = qpo_margins(metric, f, z, z, w, r)
        return reps[("qpo_distance", "qpo_gradient", "qpo_lipschitz").index(ineq)]
    if ineq == "colonna":
        return colonna_margin(f, r, z, w)
    if ineq == "classical_schwarz":
        if not isinstance(f, HarmonicFunction):
            raise PreconditionError("range", "classical bound needs a harmonic function")
        return classical_schwarz_margin(f, r, z)
    raise ValueError(f"unknown inequality {ineq!r}")

