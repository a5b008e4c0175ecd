from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import OptimizationError
from .marginal import MarginalAlphaDensity

LOWER, UPPER = 1e-12, 1e12


@dataclass(frozen=True)
class LaplaceFit:
    """Mode of a log-density and the normal approximation around it."""

    mode: float
    curvature: float

    @property
    def sigma(self) -> float:
        return 1.0 / math.sqrt(self.curvature)


def find_mode(d1, d2, x0: float = 1.0, lower: float = LOWER, upper: float = UPPER) -> float:
    """Root of ``d1`` in ``(lower, upper)`` by Newton steps safeguarded with bisection.

    ``d1`` must be positive left of the root and negative right of it.
    """
    x = min(max(x0, lower), upper)
    g = float(d1(x))
    if g == 0:
        return x
    if g > 0:
        lo, hi = x, x
        while True:
            hi *= 4.0
            if hi > upper:
                raise OptimizationError(f"log-density still increasing at {upper:g}; no mode in range")
            if float(d1(hi)) < 0:
                break
            lo = hi
    else:
        lo, hi = x, x
        while True:
            lo /= 4.0
            if lo < lower:
                raise OptimizationError(f"log-density still decreasing at {lower:g}; no mode in range")
            if float(d1(lo)) > 0:
                break
            hi = lo
    x = math.sqrt(lo * hi)
    for _ in range(200):
        g = float(d1(x))
        if abs(g) <= 1e-8 * max(1.0, abs(x)):
            return _polish(d1, d2, x, lo, hi)
        if g > 0:
            lo = x
        else:
            hi = x
        h = float(d2(x))
        step_ok = False
        if h < 0:
            xn = x - g / h
            if lo < xn < hi:
                x, step_ok = xn, True
        if not step_ok:
            x = 0.5 * (lo + hi)
        if hi - lo <= 4 * 2.2e-16 * hi:
            return x
    return x


def _polish(d1, d2, x, lo, hi):
    """A few extra Newton steps; on flat targets the derivative test alone leaves a visible offset."""
    for _ in range(5):
        h = float(d2(x))
        if not h < 0:
            break
        step = float(d1(x)) / h
        if not lo <= x - step <= hi:
            break
        x -= step
        if abs(step) <= 1e-13 * max(1.0, abs(x)):
            break
    return x


def laplace_fit(target: MarginalAlphaDensity, x0: float | None = None) -> LaplaceFit:
    """Mode ``a~`` of the log-density and observed information ``-d2(a~)``."""
    mode = find_mode(target.d1, target.d2, 1.0 if x0 is None else x0)
    curv = -float(target.d2(mode))
    if not curv > 0:
        raise OptimizationError(f"non-positive curvature {curv:g} at the mode {mode:g}")
    return LaplaceFit(mode, curv)
