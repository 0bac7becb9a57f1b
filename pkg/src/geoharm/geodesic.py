"""Christoffel symbols and geodesic tracing for radial conformal metrics.

For ``g = h(|z|^2)^2 (dx^2 + dy^2)`` with ``h_x = 2x h'`` and ``h_y = 2y h'``::

    G^1_11 = G^2_12 =  h_x/h      G^2_22 = G^1_12 =  h_y/h
    G^2_11 = -h_y/h               G^1_22 = -h_x/h
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, StepSizeError
from .metric import RadialMetric, metric_antiderivative, profile_jet

# integration halts once |z| > R * (1 - GUARD)
GUARD = 1e-9


@dataclass(frozen=True)
class ChristoffelSymbols:
    g111: float
    g122: float
    g212: float
    g222: float
    g211: float
    g112: float

    def contract(self, vx: float, vy: float) -> Tuple[float, float]:
        """``-G^l_{mn} v^m v^n`` for l = 1, 2."""
        ax = -(self.g111 * vx * vx + 2.0 * self.g112 * vx * vy + self.g122 * vy * vy)
        ay = -(self.g211 * vx * vx + 2.0 * self.g212 * vx * vy + self.g222 * vy * vy)
        return ax, ay


@dataclass(frozen=True)
class GeodesicState:
    x: float
    y: float
    vx: float
    vy: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.vx, self.vy])

    @classmethod
    def from_array(cls, a) -> "GeodesicState":
        return cls(float(a[0]), float(a[1]), float(a[2]), float(a[3]))


@dataclass(frozen=True)
class GeodesicPath:
    """Accepted-step samples of a geodesic.

    ``states`` has one row ``(x, y, vx, vy)`` per entry of ``s``.
    """

    s: np.ndarray
    states: np.ndarray
    metric_speed: float
    boundary_reached: bool = False

    @property
    def samples(self) -> List[Tuple[float, GeodesicState]]:
        return [(float(si), GeodesicState.from_array(st)) for si, st in zip(self.s, self.states)]

    @property
    def final(self) -> GeodesicState:
        return GeodesicState.from_array(self.states[-1])

    def speeds(self, metric: RadialMetric) -> np.ndarray:
        return metric_speed(metric, self.states)


def _check_point(metric: RadialMetric, x: float, y: float) -> None:
    if not (math.isfinite(x) and math.isfinite(y)):
        raise DomainError("non-finite point")
    if math.hypot(x, y) > metric.cutoff:
        raise DomainError("point outside chart")


def christoffel(metric: RadialMetric, p: complex) -> ChristoffelSymbols:
    x, y = float(np.real(p)), float(np.imag(p))
    _check_point(metric, x, y)
    h, dh = profile_jet(metric, x * x + y * y)
    gx = 2.0 * x * dh / h
    gy = 2.0 * y * dh / h
    return ChristoffelSymbols(g111=gx, g122=-gx, g212=gx, g222=gy, g211=-gy, g112=gy)


def geodesic_rhs(metric: RadialMetric, state: GeodesicState) -> Tuple[float, float]:
    """Accelerations from the explicit radial geodesic system."""
    x, y, vx, vy = state.x, state.y, state.vx, state.vy
    _check_point(metric, x, y)
    h, dh = profile_jet(metric, x * x + y * y)
    k = dh / h
    q = vx * vx - vy * vy
    ax = -2.0 * x * k * q - 4.0 * y * k * vx * vy
    ay = 2.0 * y * k * q - 4.0 * x * k * vx * vy
    return ax, ay


def metric_speed(metric: RadialMetric, states) -> np.ndarray:
    """``h(|z|^2) * |v|`` for rows ``(x, y, vx, vy)``."""
    st = np.atleast_2d(np.asarray(states, dtype=float))
    h, _ = profile_jet(metric, st[:, 0] ** 2 + st[:, 1] ** 2)
    return h * np.hypot(st[:, 2], st[:, 3])


# Dormand-Prince 5(4)
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4


def _deriv(metric: RadialMetric, y: np.ndarray) -> np.ndarray:
    ax, ay = geodesic_rhs(metric, GeodesicState(y[0], y[1], y[2], y[3]))
    return np.array([y[2], y[3], ax, ay])


def integrate_geodesic(
    metric: RadialMetric,
    initial: GeodesicState,
    s_max: float,
    tol: float = 1e-9,
    max_steps: int = 1_000_000,
) -> GeodesicPath:
    """Integrate the geodesic system on ``[0, s_max]`` with Dormand-Prince 5(4).

    Step control is PI on the Euclidean norm of the error, so rotating the
    initial state rotates the whole step sequence. If the path leaves
    ``|z| <= R (1 - 1e-9)`` the partial path is returned with
    ``boundary_reached`` set.
    """
    if not s_max > 0 or not tol > 0:
        raise ValueError("s_max and tol must be positive")
    y = initial.as_array()
    _check_point(metric, y[0], y[1])
    if not np.all(np.isfinite(y)):
        raise DomainError("non-finite velocity")
    guard = metric.chart_radius * (1.0 - GUARD)
    speed0 = float(metric_speed(metric, y)[0])

    s = 0.0
    ss, ys = [0.0], [y.copy()]
    k1 = _deriv(metric, y)
    step = min(s_max, 1e-2)
    err_prev = 1e-4
    boundary = False
    for _ in range(max_steps):
        if s >= s_max:
            break
        step = min(step, s_max - s)
        if step <= 1e-14 * max(1.0, s):
            raise StepSizeError(f"step size underflow at s={float(s)!r}")
        ks = [k1]
        try:
            for i in range(1, 7):
                yi = y + step * sum(a * k for a, k in zip(_A[i], ks))
                ks.append(_deriv(metric, yi))
        except DomainError:
            step *= 0.25
            continue
        y_new = y + step * sum(b * k for b, k in zip(_B5[:6], ks[:6]))
        err_vec = step * sum(e * k for e, k in zip(_E, ks))
        scale = tol * (1.0 + np.linalg.norm(y))
        err = float(np.linalg.norm(err_vec)) / scale
        if not np.isfinite(err):
            step *= 0.25
            continue
        if err <= 1.0:
            if math.hypot(y_new[0], y_new[1]) > guard:
                boundary = True
                break
            s = s_max if s_max - (s + step) <= 1e-15 * s_max else s + step
            y = y_new
            k1 = ks[6]
            ss.append(s)
            ys.append(y.copy())
            err = max(err, 1e-10)
            fac = 0.9 * err ** (-0.7 / 5) * err_prev ** (0.4 / 5)
            step *= min(5.0, max(0.2, fac))
            err_prev = err
        else:
            step *= max(0.2, 0.9 * err ** (-1 / 5))
    else:
        raise StepSizeError("maximum number of steps exceeded")
    return GeodesicPath(np.array(ss), np.array(ys), speed0, boundary)


def arclength_to_radius(metric: RadialMetric, x0: float, s: float) -> float:
    """Signed radius ``x`` with ``F(x) - F(x0) = s`` on the diameter."""
    if s == 0:
        return float(x0)
    f0 = metric_antiderivative(metric, x0)
    sign = 1.0 if s > 0 else -1.0
    end = sign * metric.cutoff
    if math.isinf(end):
        end = sign * max(1.0, abs(x0))
        while sign * (metric_antiderivative(metric, end) - f0) < abs(s):
            if abs(end) > 1e15:
                raise DomainError("arc length exceeds the remaining metric length")
            end *= 2.0
    if sign * (metric_antiderivative(metric, end) - f0) < abs(s):
        raise DomainError("arc length exceeds the remaining metric length")

    def g(x):
        return metric_antiderivative(metric, x) - f0 - s

    lo, hi = (x0, end) if sign > 0 else (end, x0)
    return brentq(g, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
