"""Verification suites driven by a run configuration.

Each suite returns a list of :class:`Check` rows. A check compares one
observed value with a tolerance; ``sense`` says which side passes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np

from . import report
from .errors import GeoharmError
from .geodesic import GeodesicState, integrate_geodesic, metric_speed
from .harmonic import (
    extremal_function,
    harmonic_residual,
    pullback_harmonicity_defect,
    random_geodesic_map,
    sample_disk,
    wirtinger_jet,
)
from .hopf import (
    distance_via_parameter,
    distinguished_parameter,
    holomorphy_defect,
    hopf_coefficient,
    path_parameter,
    real_hopf_sqrt,
)
from .metric import (
    RadialMetric,
    density,
    metric_antiderivative,
    metric_from_descriptor,
    profile_jet,
    radial_distance,
    random_expression_metric,
)
from .schwarz import (
    INEQUALITIES,
    colonna_margin,
    fuzz_bounds,
    gradient_sharpness,
    sharpness_probe,
    thm1_distance_margin,
    thm1_gradient_margin,
    thm1_lipschitz_margin,
)

# sup-norm caps that keep tanh/tan compositions well inside the chart
FAMILY_CAPS = {"hyperbolic": 2.0, "spherical": 1.2}
HARMONIC_RADIUS = 0.98
HOPF_RADIUS = 0.95


@dataclass(frozen=True)
class Check:
    check: str
    subject: str
    value: float
    tolerance: float
    sense: str = "le"  # "le": value <= tol; "ge": value >= tol

    @property
    def passed(self) -> bool:
        if not math.isfinite(self.value):
            return False
        if self.sense == "ge":
            return self.value >= self.tolerance
        return self.value <= self.tolerance

    def row(self) -> tuple:
        return (self.check, self.subject, float(self.value), float(self.tolerance), self.passed)

    def as_dict(self) -> dict:
        return {
            "check": self.check,
            "subject": self.subject,
            "value": float(self.value),
            "tolerance": float(self.tolerance),
            "sense": self.sense,
            "passed": self.passed,
        }


def _seed(cfg: dict, salt: int) -> int:
    return int(np.random.SeedSequence([cfg["fuzz"]["seed"], salt]).generate_state(1)[0])


# ---------------------------------------------------------------- metric


def _richardson_derivative(fn: Callable, t: np.ndarray, h: float) -> np.ndarray:
    def central(k):
        return (fn(t + k) - fn(t - k)) / (2.0 * k)

    return (4.0 * central(h / 2) - central(h)) / 3.0


def suite_metric(cfg: dict) -> List[Check]:
    tol = cfg["tolerances"]
    n = cfg["samples"]["n_radii"]
    checks: List[Check] = []
    for kind, oracle, top in (("hyperbolic", math.atanh, 0.999), ("spherical", math.atan, 10.0)):
        metric = RadialMetric.builtin(kind)
        radii = np.linspace(0.0, top, n + 1)[1:]
        err = max(abs(radial_distance(metric, 0.0, s) - oracle(s)) for s in radii)
        checks.append(Check("closed_form", kind, err, tol["closed_form"]))

    metrics = [(k, RadialMetric.builtin(k)) for k in ("hyperbolic", "spherical", "euclidean")]
    metrics += [
        (f"expression[{i}]", random_expression_metric(_seed(cfg, 100 + i)))
        for i in range(cfg["samples"]["n_random_metrics"])
    ]
    user = metric_from_descriptor(cfg["metric"])
    metrics.append(("config", user))
    for name, metric in metrics:
        top = min(metric.cutoff, 2.0) * 0.9
        t = np.linspace(0.05, top * top, 64)
        _, dh = profile_jet(metric, t)
        fd = _richardson_derivative(metric.profile, t, 1e-3)
        rel = float(np.max(np.abs(dh - fd) / np.maximum(1.0, np.abs(fd))))
        checks.append(Check("ad_fd", name, rel, tol["ad_fd"]))

        xs = np.linspace(-top, top, 41)
        F = np.array([metric_antiderivative(metric, x) for x in xs])
        checks.append(Check("monotone", name, float(np.min(np.diff(F))), 0.0, "ge"))
        a, b, c = xs[5], xs[22], xs[37]
        add = abs(radial_distance(metric, a, b) + radial_distance(metric, b, c) - radial_distance(metric, a, c))
        checks.append(Check("additivity", name, add, tol["closed_form"] * max(1.0, abs(F[-1]))))
    return checks


# ---------------------------------------------------------------- geodesic


def geodesic_metrics(cfg: dict, n_random: Optional[int] = None) -> List[tuple]:
    n_random = cfg["samples"]["n_random_metrics"] if n_random is None else n_random
    out = [(k, RadialMetric.builtin(k)) for k in ("hyperbolic", "spherical", "euclidean")]
    out += [(f"expression[{i}]", random_expression_metric(_seed(cfg, 200 + i))) for i in range(n_random)]
    return out


def certify_geodesic(metric: RadialMetric, s_max: float, tol: float, angle: float = 0.0) -> Dict[str, float]:
    """Radial geodesic from ``0.1 scale`` aimed at ``0.8 scale`` along ``angle``.

    The constant metric speed is chosen so the path covers the metric length
    between those radii in time ``s_max``; this keeps it inside the chart.
    Returns the transverse drift, relative speed drift and arc-length error.
    """
    scale = min(metric.chart_radius, 1.0)
    x0, x1 = 0.1 * scale, 0.8 * scale
    length = radial_distance(metric, x0, x1)
    c = length / s_max
    v = c / float(profile_jet(metric, x0 * x0)[0])
    u = complex(math.cos(angle), math.sin(angle))
    p0 = x0 * u
    init = GeodesicState(p0.real, p0.imag, v * u.real, v * u.imag)
    path = integrate_geodesic(metric, init, s_max, tol=tol)
    if path.boundary_reached:
        return {"transverse": math.inf, "speed": math.inf, "arclength": math.inf}
    xs, ys = path.states[:, 0], path.states[:, 1]
    # component normal to the direction u
    transverse = float(np.max(np.abs(-u.imag * xs + u.real * ys)))
    sp = metric_speed(metric, path.states)
    speed = float(np.max(np.abs(sp / path.metric_speed - 1.0)))
    fin = path.final
    radial_end = fin.x * u.real + fin.y * u.imag
    arc = abs(radial_distance(metric, x0, radial_end) - c * s_max)
    return {"transverse": transverse, "speed": speed, "arclength": arc}


def suite_geodesic(cfg: dict) -> List[Check]:
    tol = cfg["tolerances"]
    s_max = cfg["samples"]["geodesic_s_max"]
    itol = cfg["samples"]["integrator_tol"]
    checks: List[Check] = []
    for name, metric in geodesic_metrics(cfg):
        for angle in (0.0, 0.7):
            res = certify_geodesic(metric, s_max, itol, angle)
            subject = f"{name}@{angle:g}"
            checks.append(Check("geodesic_y", subject, res["transverse"], tol["geodesic_y"]))
            checks.append(Check("speed", subject, res["speed"], tol["speed"]))
            checks.append(Check("arclength", subject, res["arclength"], tol["arclength"]))
    return checks


# ---------------------------------------------------------------- harmonic


def family_maps(cfg: dict, kind: str, salt: int):
    n = cfg["samples"]["n_maps"]
    cap = cfg["fuzz"]["degree_cap"]
    return [random_geodesic_map(kind, _seed(cfg, salt + i), cap, FAMILY_CAPS[kind]) for i in range(n)]


def _points(cfg: dict, salt: int, radius: float) -> np.ndarray:
    rng = np.random.default_rng(_seed(cfg, salt))
    return sample_disk(rng, cfg["samples"]["n_points"], radius)


def control_map(z):
    """``tanh((Re z)^2)``: smooth but not rho-harmonic for the hyperbolic metric."""
    return np.tanh(np.real(z) ** 2) + 0j


def suite_harmonic(cfg: dict) -> List[Check]:
    tol = cfg["tolerances"]
    checks: List[Check] = []
    zs = _points(cfg, 300, HARMONIC_RADIUS)
    for kind in cfg["families"]:
        metric = RadialMetric.builtin(kind)
        maps = family_maps(cfg, kind, 1000)
        worst = max(float(np.max(np.abs(harmonic_residual(metric, f, zs)))) for f in maps)
        checks.append(Check("residual", kind, worst, tol["residual"]))
        few = zs[:10]
        pull = max(abs(pullback_harmonicity_defect(metric, f, z)) for f in maps[:3] for z in few)
        checks.append(Check("pullback_defect", kind, pull, tol["residual"]))
    hyp = RadialMetric.builtin("hyperbolic")
    ctrl = float(np.max(np.abs(harmonic_residual(hyp, control_map, zs))))
    checks.append(Check("control", "tanh((Re z)^2)", ctrl, tol["control"], "ge"))
    return checks


# ---------------------------------------------------------------- hopf


def alternate_paths(z: complex) -> List[List[complex]]:
    """Three polygonal routes from 0 to ``z`` other than the straight segment."""
    z = complex(z)
    return [
        [0.0, 1j * z.imag, z],
        [0.0, z.real, z],
        [0.0, 0.5 * z + 0.3j * z, z],
    ]


def suite_hopf(cfg: dict) -> List[Check]:
    tol = cfg["tolerances"]
    checks: List[Check] = []
    zs = _points(cfg, 400, HOPF_RADIUS)
    ws = _points(cfg, 401, HOPF_RADIUS)
    for kind in cfg["families"]:
        metric = RadialMetric.builtin(kind)
        maps = family_maps(cfg, kind, 2000)
        hol = max(float(np.max(holomorphy_defect(metric, f, zs))) for f in maps)
        checks.append(Check("holomorphy", kind, hol, tol["holomorphy"]))

        sq = 0.0
        for f in maps:
            a = hopf_coefficient(metric, f, zs)
            s = real_hopf_sqrt(metric, f, zs)
            sq = max(sq, float(np.max(np.abs(s * s - a) / np.maximum(1.0, np.abs(a)))))
        checks.append(Check("square", kind, sq, tol["square"]))

        ident = 0.0
        indep = 0.0
        for f in maps[:3]:
            for z1, z2 in list(zip(zs, ws))[:20]:
                # F(f) = g for these compositions, but go through F anyway
                d = abs(metric_antiderivative(metric, float(f(z2))) - metric_antiderivative(metric, float(f(z1))))
                ident = max(ident, abs(distance_via_parameter(metric, f, z1, z2) - d))
            for z in zs[:5]:
                direct = distinguished_parameter(metric, f, z)
                for path in alternate_paths(z):
                    indep = max(indep, abs(direct - path_parameter(metric, f, path)))
        checks.append(Check("distance_identity", kind, ident, tol["distance_identity"]))
        checks.append(Check("path_independence", kind, indep, tol["path_independence"]))
    return checks


# ---------------------------------------------------------------- schwarz


def colonna_ratio_errors(n: int, r: float = 1.0) -> tuple:
    """For the extremal step, ``lhs/rhs`` of the Colonna bound at ``(iy, 0)``.

    Returns the largest deviation from ``arctan y / atanh y`` and the largest
    ratio seen; the latter must stay below one.
    """
    f = extremal_function(r)
    ys = np.linspace(0.0, 0.99, n + 1)[1:]
    dev, top = 0.0, 0.0
    for y in ys:
        rep = colonna_margin(lambda z: f(z) + 0j, r, 1j * y, 0.0)
        ratio = rep.lhs / rep.rhs
        dev = max(dev, abs(ratio - math.atan(y) / math.atanh(y)))
        top = max(top, ratio)
    return dev, top


def mobius(c: complex) -> Callable:
    def phi(a):
        return (c + a) / (1.0 + np.conj(c) * a)

    return phi


def mobius_inverse(c: complex) -> Callable:
    return mobius(-c)


def covariance_error(metric: RadialMetric, f: Callable, r: float, c: complex, z1: complex, z2: complex) -> float:
    """Difference of the Lipschitz ``rel_margin`` for ``f`` and ``f o phi_c``."""
    phi, inv = mobius(c), mobius_inverse(c)

    def fc(a):
        return f(phi(np.asarray(a, dtype=complex)))

    base = thm1_lipschitz_margin(metric, f, r, z1, z2)
    moved = thm1_lipschitz_margin(metric, fc, r, complex(inv(z1)), complex(inv(z2)))
    return abs(base.rel_margin - moved.rel_margin)


def gradient_covariance_error(metric: RadialMetric, f: Callable, r: float, z: complex) -> float:
    """Gradient bound at ``z`` for ``f`` against the bound at 0 for ``f o phi_z``.

    Precomposing with the automorphism scales ``|Df|`` by ``1 - |z|^2``, so
    the two relative margins agree.
    """
    phi = mobius(z)

    def fz(a):
        return f(phi(np.asarray(a, dtype=complex)))

    at_z = thm1_gradient_margin(metric, f, r, z)
    jet = wirtinger_jet(fz, 0.0)
    value = float(np.real(jet.value))
    lhs0 = float(density(metric, value)) * (abs(jet.fz) + abs(jet.fzbar))
    rhs0 = 4.0 * r / math.pi
    return abs(at_z.rel_margin - (rhs0 - lhs0) / rhs0)


def suite_schwarz(cfg: dict) -> List[Check]:
    tol = cfg["tolerances"]
    checks: List[Check] = []
    dev, top = colonna_ratio_errors(cfg["samples"]["n_points"])
    checks.append(Check("colonna_ratio", "extremal", dev, tol["closed_form"]))
    checks.append(Check("colonna_strict", "extremal", top, 1.0 - 1e-12))
    zs = _points(cfg, 500, 0.9)
    ws = _points(cfg, 501, 0.9)
    cs = _points(cfg, 502, 0.7)
    for kind in cfg["families"]:
        metric = RadialMetric.builtin(kind)
        maps = family_maps(cfg, kind, 3000)[:3]
        err = 0.0
        for f in maps:
            r = f.g.sup_norm()
            for z1, z2, c in list(zip(zs, ws, cs))[:10]:
                err = max(err, covariance_error(metric, f, r, c, z1, z2))
                err = max(err, gradient_covariance_error(metric, f, r, c))
        checks.append(Check("covariance", kind, err, tol["covariance"]))

        consistency = 0.0
        for f in maps:
            r = f.g.sup_norm()
            for z in zs[:10]:
                rep = thm1_distance_margin(metric, f, r, z)
                consistency = max(consistency, abs(rep.lhs - distance_via_parameter(metric, f, 0.0, z)))
        checks.append(Check("lhs_consistency", kind, consistency, tol["distance_identity"]))
    return checks


# ---------------------------------------------------------------- sharpness


def suite_sharpness(cfg: dict) -> List[Check]:
    tol = cfg["tolerances"]
    checks: List[Check] = []
    for kind in cfg["families"]:
        probe = sharpness_probe(kind, cfg["samples"]["n_points"])
        checks.append(Check("sharpness", kind, probe["max_abs_margin"], tol["sharpness"]))
        rep = gradient_sharpness(kind)
        checks.append(Check("gradient_sharpness", kind, abs(rep.margin), tol["gradient_sharpness"]))
    return checks


# ---------------------------------------------------------------- fuzz


def run_fuzz(cfg: dict, workers: int) -> Dict[str, object]:
    fz = cfg["fuzz"]
    return {
        kind: fuzz_bounds(
            fz["seed"],
            fz["n_maps"],
            fz["n_points"],
            kind,
            fz["degree_cap"],
            cfg["tolerances"]["margin"],
            workers,
        )
        for kind in cfg["families"]
    }


def fuzz_checks(summaries: Dict[str, object], tol: float) -> List[Check]:
    checks = []
    for kind, summary in summaries.items():
        stats = summary.stats()
        for ineq in INEQUALITIES:
            if ineq in stats:
                checks.append(Check("min_margin", f"{kind}:{ineq}", stats[ineq]["min_margin"], -tol, "ge"))
    return checks


SUITE_FUNCS = {
    "metric": suite_metric,
    "geodesic": suite_geodesic,
    "harmonic": suite_harmonic,
    "hopf": suite_hopf,
    "schwarz": suite_schwarz,
    "sharpness": suite_sharpness,
}


def _safe(fn: Callable, cfg: dict, name: str) -> List[Check]:
    """Run a suite; a numerical failure becomes a failed check instead of a crash."""
    try:
        return fn(cfg)
    except (GeoharmError, ArithmeticError, ValueError) as exc:
        return [Check("error", f"{name}: {type(exc).__name__}: {exc}", math.inf, 0.0)]


def run_verify(cfg: dict, out_dir: Path, workers: int = 1) -> dict:
    """Run the selected suites, write reports into ``out_dir`` and return the summary."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    emit = cfg["emit"]
    suites: Dict[str, dict] = {}
    fuzz_json: Dict[str, dict] = {}
    for name in cfg["suites"]:
        if name == "fuzz":
            try:
                summaries = run_fuzz(cfg, workers)
            except (GeoharmError, ArithmeticError, ValueError) as exc:
                checks = [Check("error", f"fuzz: {type(exc).__name__}: {exc}", math.inf, 0.0)]
                summaries = {}
            else:
                checks = fuzz_checks(summaries, cfg["tolerances"]["margin"])
                for kind, summary in summaries.items():
                    fuzz_json[kind] = summary.as_dict()
                    if not summary.passed:
                        checks.append(Check("violations", kind, float(len(summary.violations)), 0.0))
                    if emit["csv"]:
                        report.write_csv(
                            out_dir / f"fuzz_{kind}.csv", report.FUZZ_HEADER, report.fuzz_rows(summary.rows)
                        )
        else:
            checks = _safe(SUITE_FUNCS[name], cfg, name)
        suites[name] = {
            "passed": all(c.passed for c in checks),
            "checks": [c.as_dict() for c in checks],
        }
        if emit["csv"]:
            report.write_csv(out_dir / f"{name}.csv", report.CHECK_HEADER, [c.row() for c in checks])
    summary = {
        "config": cfg,
        "suites": suites,
        "fuzz": fuzz_json,
        "passed": all(s["passed"] for s in suites.values()),
    }
    if emit["json"]:
        report.write_json(out_dir / "report.json", summary)
    return summary
