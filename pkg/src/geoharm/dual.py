"""First-order dual numbers for forward-mode differentiation.

Components may be floats or numpy arrays, so a single pass differentiates
a profile at many points at once.
"""

from __future__ import annotations

import numpy as np


class Dual:
    """Dual number ``a + b*eps`` with ``eps**2 == 0``."""

    __slots__ = ("a", "b")

    def __init__(self, a, b=0.0):
        self.a = a
        self.b = b

    @staticmethod
    def _lift(other) -> "Dual":
        return other if isinstance(other, Dual) else Dual(other, 0.0)

    def __add__(self, other):
        o = Dual._lift(other)
        return Dual(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, other):
        o = Dual._lift(other)
        return Dual(self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        return Dual._lift(other) - self

    def __mul__(self, other):
        o = Dual._lift(other)
        return Dual(self.a * o.a, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = Dual._lift(other)
        q = self.a / o.a
        return Dual(q, (self.b - q * o.b) / o.a)

    def __rtruediv__(self, other):
        return Dual._lift(other) / self

    def __neg__(self):
        return Dual(-self.a, -self.b)

    def __pow__(self, p: float):
        # constant exponents only; the grammar guarantees this
        return Dual(np.power(self.a, p), p * np.power(self.a, p - 1.0) * self.b)

    def exp(self) -> "Dual":
        e = np.exp(self.a)
        return Dual(e, e * self.b)

    def log(self) -> "Dual":
        return Dual(np.log(self.a), self.b / self.a)

    def sqrt(self) -> "Dual":
        s = np.sqrt(self.a)
        return Dual(s, 0.5 * self.b / s)

    def __repr__(self) -> str:
        return f"Dual({self.a!r}, {self.b!r})"


def derivative(fn, x):
    """Value and derivative of ``fn`` at ``x`` (scalar or array)."""
    out = fn(Dual(x, np.ones_like(x, dtype=float) if np.ndim(x) else 1.0))
    if not isinstance(out, Dual):
        return out, np.zeros_like(np.asarray(out, dtype=float)) if np.ndim(out) else 0.0
    return out.a, out.b
