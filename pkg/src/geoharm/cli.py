"""``geoharm`` command line: verify, sweep, geodesic."""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import List, Optional

from . import __version__, report
from .config import ConfigError, load_config
from .errors import GeoharmError, StepSizeError
from .geodesic import GeodesicState, integrate_geodesic, metric_speed
from .harmonic import random_harmonic, compose_geodesic_map
from .metric import RadialMetric, density, metric_from_descriptor
from .schwarz import INEQUALITIES, extremal_map, margins_for
from .verify import run_verify

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _err(msg: str) -> None:
    print(f"geoharm: {msg}", file=sys.stderr)


def worker_count() -> int:
    """CPU count, capped by ``GEOHARM_THREADS`` when set."""
    n = os.cpu_count() or 1
    env = os.environ.get("GEOHARM_THREADS")
    if env:
        try:
            n = min(n, max(1, int(env)))
        except ValueError:
            _err(f"ignoring non-integer GEOHARM_THREADS={env!r}")
    return n


def _load(path: str, seed: Optional[int]) -> dict:
    cfg = load_config(path)
    if seed is not None:
        if not 0 <= seed < 2**64:
            raise ConfigError("--seed must be a 64-bit unsigned integer")
        cfg["fuzz"]["seed"] = seed
        cfg["sweep"]["seed"] = seed
    return cfg


def cmd_verify(args) -> int:
    cfg = _load(args.config, args.seed)
    out = Path(args.out or cfg["output_dir"])
    summary = run_verify(cfg, out, worker_count())
    for name, suite in summary["suites"].items():
        bad = [c for c in suite["checks"] if not c["passed"]]
        print(f"{name:10s} {'PASS' if suite['passed'] else 'FAIL'} ({len(suite['checks'])} checks)")
        for c in bad:
            print(f"  failed {c['check']} {c['subject']}: {c['value']!r} vs {c['tolerance']!r}")
    return EXIT_OK if summary["passed"] else EXIT_FAIL


# ---------------------------------------------------------------- sweep


def sweep_map(cfg: dict, ineq: str):
    """Map, metric and radius used by a sweep."""
    sw = cfg["sweep"]
    kind = sw["kind"]
    metric = RadialMetric.builtin(kind)
    if sw["family"] == "extremal":
        f = extremal_map(kind, sw["r"])
    else:
        cap = min(sw["r"], math.pi / 2 - 0.05) if kind == "spherical" else sw["r"]
        f = compose_geodesic_map(kind, random_harmonic(sw["seed"], sw["degree_cap"], cap))
    target = f.g if ineq in ("classical_schwarz", "colonna") else f
    return metric, target, f.g.sup_norm()


def sweep_grid(cfg: dict, ineq: str, n: int, workers: int = 1) -> List[tuple]:
    """Rows ``(i, j, z_re, z_im, lhs, rhs, margin, rel_margin, status)`` on cell centres."""
    metric, f, r = sweep_map(cfg, ineq)
    w = complex(*cfg["sweep"]["w"])
    tol = cfg["tolerances"]["margin"]
    centres = [-1.0 + (2 * k + 1) / n for k in range(n)]

    def row(j: int) -> List[tuple]:
        out = []
        for i in range(n):
            z = complex(centres[i], centres[j])
            if abs(z) > 1.0 - 1.0 / n:
                out.append((i, j, z.real, z.imag, None, None, None, None, "skipped"))
                continue
            try:
                rep = margins_for(ineq, metric, f, r, z, w)
            except GeoharmError:
                out.append((i, j, z.real, z.imag, None, None, None, None, "skipped"))
                continue
            status = "ok" if rep.passed(tol) else "violation"
            out.append((i, j, z.real, z.imag, rep.lhs, rep.rhs, rep.margin, rep.rel_margin, status))
        return out

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(row, range(n)))
    else:
        rows = [row(j) for j in range(n)]
    return [r for chunk in rows for r in chunk]


def cmd_sweep(args) -> int:
    if args.n < 2:
        raise ConfigError("--n must be at least 2")
    cfg = _load(args.config, args.seed)
    out = Path(args.out or cfg["output_dir"])
    out.mkdir(parents=True, exist_ok=True)
    rows = sweep_grid(cfg, args.ineq, args.n, worker_count())
    base = out / f"sweep_{args.ineq}"
    report.write_csv(base.with_suffix(".csv"), report.SWEEP_HEADER, rows)
    if args.svg or cfg["emit"]["svg"]:
        cells = [(r[0], r[1], r[6]) for r in rows]
        title = f"{args.ineq} {cfg['sweep']['family']} {cfg['sweep']['kind']}"
        svg = report.heatmap_svg(args.n, cells, title, cfg["tolerances"]["margin"])
        report.write_text(base.with_suffix(".svg"), svg)
    margins = [r[6] for r in rows if r[6] is not None]
    bad = sum(1 for r in rows if r[8] == "violation")
    if margins:
        print(f"{args.ineq}: {len(margins)} points, min margin {min(margins)!r}, violations {bad}")
    return EXIT_FAIL if bad else EXIT_OK


# ---------------------------------------------------------------- geodesic


def _metric_arg(text: str) -> RadialMetric:
    text = text.strip()
    if text.startswith("{"):
        try:
            desc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"--metric is not valid JSON: {exc}") from None
        if not isinstance(desc, dict) or "profile" not in desc:
            raise ConfigError("--metric JSON needs a 'profile' key")
        return metric_from_descriptor(desc)
    return metric_from_descriptor(text)


def geodesic_rows(metric: RadialMetric, x0: float, angle: float, s_max: float, tol: float):
    """Unit metric speed path from ``x0`` on the real axis, heading along ``angle``."""
    v = 1.0 / float(density(metric, x0))
    init = GeodesicState(x0, 0.0, v * math.cos(angle), v * math.sin(angle))
    path = integrate_geodesic(metric, init, s_max, tol=tol)
    speeds = metric_speed(metric, path.states)
    rows = [(float(s), *map(float, st), float(sp)) for s, st, sp in zip(path.s, path.states, speeds)]
    return rows, path.boundary_reached


def cmd_geodesic(args) -> int:
    metric = _metric_arg(args.metric)
    for name in ("x0", "angle", "smax", "tol"):
        if not math.isfinite(getattr(args, name)):
            raise ConfigError(f"--{name} must be finite")
    rows, boundary = geodesic_rows(metric, args.x0, args.angle, args.smax, args.tol)
    text = report.csv_text(report.PATH_HEADER, rows)
    if args.out:
        report.write_text(Path(args.out), text)
    else:
        sys.stdout.write(text)
    if boundary:
        _err(f"path reached the chart boundary at s={rows[-1][0]!r}")
    return EXIT_OK


# ---------------------------------------------------------------- main


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="geoharm", description="Harmonic maps into radial conformal metrics.")
    p.add_argument("--version", action="version", version=f"geoharm {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run verification suites from a config")
    v.add_argument("config")
    v.add_argument("--seed", type=int)
    v.add_argument("--out", help="output directory (overrides the config)")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("sweep", help="evaluate one bound on an n x n grid")
    s.add_argument("config")
    s.add_argument("--ineq", required=True, choices=INEQUALITIES)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--svg", action="store_true")
    s.add_argument("--seed", type=int)
    s.add_argument("--out", help="output directory (overrides the config)")
    s.set_defaults(func=cmd_sweep)

    g = sub.add_parser("geodesic", help="trace a geodesic and dump it as CSV")
    g.add_argument("--metric", required=True, help="builtin name, profile in t, or JSON descriptor")
    g.add_argument("--x0", type=float, required=True)
    g.add_argument("--angle", type=float, required=True)
    g.add_argument("--smax", type=float, required=True)
    g.add_argument("--tol", type=float, default=1e-10)
    g.add_argument("--out", help="CSV path (stdout if omitted)")
    g.set_defaults(func=cmd_geodesic)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except StepSizeError as exc:
        _err(f"integration failed: {exc}")
        return EXIT_FAIL
    except (ConfigError, GeoharmError, ValueError) as exc:
        _err(str(exc))
        return EXIT_USAGE
    except OSError as exc:
        _err(f"I/O error: {exc}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
