"""Adaptive rejection sampling for univariate log-concave densities.

Tangent-based variant: the upper hull is the piecewise-linear envelope of
tangents to ``h = log f`` at the current abscissae, the lower hull joins
neighbouring abscissae by chords.  Every evaluation of ``h`` refines the
hull, so later draws are cheaper.
"""

from __future__ import annotations

import bisect
import math
from typing import Callable, Sequence

import numpy as np

from ..errors import ConfigurationError, ModelError
from ..specfun import RngStream

TOL = 1e-8
MAX_POINTS = 60


class AdaptiveRejectionSampler:
    """Exact sampler for ``f`` with concave ``h = log f`` on ``domain``.

    Parameters
    ----------
    h, dh : callables
        Log-density (up to a constant) and its derivative; scalar in, scalar out.
    init : sequence of float
        At least two starting abscissae inside the domain.  For an unbounded
        left (right) end the smallest (largest) must have positive (negative)
        slope.
    domain : (float, float)
        Support; either end may be infinite.
    """

    def __init__(
        self,
        h: Callable[[float], float],
        dh: Callable[[float], float],
        init: Sequence[float],
        domain: tuple[float, float] = (-math.inf, math.inf),
    ):
        self.h = h
        self.dh = dh
        self.lo, self.hi = float(domain[0]), float(domain[1])
        pts = sorted(set(float(x) for x in init))
        if len(pts) < 2:
            raise ConfigurationError("ARS needs at least two distinct initial points")
        if pts[0] <= self.lo or pts[-1] >= self.hi:
            raise ConfigurationError("initial ARS points must lie strictly inside the domain")
        self.xs: list[float] = []
        self.hs: list[float] = []
        self.ds: list[float] = []
        for x in pts:
            self._insert(x, float(h(x)), float(dh(x)), check=False)
        self._check_slopes()
        if self.lo == -math.inf and not self.ds[0] > 0:
            raise ConfigurationError("leftmost initial point must have positive slope on an unbounded domain")
        if self.hi == math.inf and not self.ds[-1] < 0:
            raise ConfigurationError("rightmost initial point must have negative slope on an unbounded domain")
        self._rebuild()
        self.n_evals = len(pts)
        self.n_rejections = 0

    def _insert(self, x, hx, dx, check=True):
        if not (math.isfinite(hx) and math.isfinite(dx)):
            raise ModelError(f"log-density or slope not finite at {x:g}")
        k = bisect.bisect_left(self.xs, x)
        if k < len(self.xs) and self.xs[k] == x:
            return
        self.xs.insert(k, x)
        self.hs.insert(k, hx)
        self.ds.insert(k, dx)
        if check:
            self._check_slopes(k)

    def _check_slopes(self, around: int | None = None):
        ds = self.ds
        idx = range(len(ds) - 1) if around is None else range(max(0, around - 1), min(len(ds) - 1, around + 1))
        for i in idx:
            if ds[i + 1] > ds[i] + TOL * max(1.0, abs(ds[i]), abs(ds[i + 1])):
                raise ModelError(
                    f"log-density is not concave: slope increases from {ds[i]:.6g} at {self.xs[i]:.6g} "
                    f"to {ds[i + 1]:.6g} at {self.xs[i + 1]:.6g}"
                )

    def _rebuild(self):
        xs, hs, ds = self.xs, self.hs, self.ds
        k = len(xs)
        z = []
        for i in range(k - 1):
            dd = ds[i] - ds[i + 1]
            if dd > 1e-300 * max(1.0, abs(ds[i])):
                zi = (hs[i + 1] - hs[i] - xs[i + 1] * ds[i + 1] + xs[i] * ds[i]) / dd
                zi = min(max(zi, xs[i]), xs[i + 1])
            else:
                zi = 0.5 * (xs[i] + xs[i + 1])
            z.append(zi)
        self.z = z
        bounds = [self.lo] + z + [self.hi]
        logm = []
        for i in range(k):
            logm.append(self._piece_logmass(i, bounds[i], bounds[i + 1]))
        top = max(logm)
        w = [math.exp(v - top) for v in logm]
        total = sum(w)
        cum = []
        acc = 0.0
        for v in w:
            acc += v
            cum.append(acc / total)
        cum[-1] = 1.0
        self.cum = cum
        self.bounds = bounds

    def _tangent(self, i, x):
        return self.hs[i] + self.ds[i] * (x - self.xs[i])

    def _piece_logmass(self, i, a, b):
        d = self.ds[i]
        w = b - a
        if w <= 0:
            return -math.inf
        if d == 0.0:
            return self._tangent(i, 0.5 * (a + b) if math.isfinite(w) else self.xs[i]) + math.log(w)
        if d > 0:
            if b == math.inf:
                raise ModelError("upper hull is not integrable on the right")
            return self._tangent(i, b) + math.log(-math.expm1(-d * w)) - math.log(d)
        if a == -math.inf:
            raise ModelError("upper hull is not integrable on the left")
        return self._tangent(i, a) + math.log(-math.expm1(d * w)) - math.log(-d)

    def _upper(self, x):
        i = bisect.bisect_left(self.z, x)
        return self._tangent(i, x)

    def _lower(self, x):
        xs = self.xs
        if x < xs[0] or x > xs[-1]:
            return -math.inf
        j = bisect.bisect_right(xs, x) - 1
        if j >= len(xs) - 1:
            return self.hs[-1]
        return ((xs[j + 1] - x) * self.hs[j] + (x - xs[j]) * self.hs[j + 1]) / (xs[j + 1] - xs[j])

    def _sample_envelope(self, u1, u2):
        i = bisect.bisect_left(self.cum, u1)
        a, b = self.bounds[i], self.bounds[i + 1]
        d = self.ds[i]
        w = b - a
        if d == 0.0:
            x = a + u2 * w
        elif d > 0:
            x = b + math.log1p((1.0 - u2) * math.expm1(-d * w)) / d
        else:
            x = a + math.log1p(u2 * math.expm1(d * w)) / d
        return min(max(x, a), b)

    def draw(self, rng: RngStream) -> float:
        gen = rng.generator
        while True:
            u1, u2, u3 = gen.random(3)
            x = self._sample_envelope(u1, u2)
            if not (self.lo < x < self.hi):
                continue
            ux = self._upper(x)
            logu = math.log(u3) if u3 > 0 else -math.inf
            if logu <= self._lower(x) - ux:
                return x
            hx = float(self.h(x))
            dx = float(self.dh(x))
            self.n_evals += 1
            scale = TOL * max(1.0, abs(hx))
            if hx > ux + scale or hx < self._lower(x) - scale:
                raise ModelError(f"log-density is not concave near {x:.6g} (hull violation)")
            accept = logu <= hx - ux
            if len(self.xs) < MAX_POINTS:
                self._insert(x, hx, dx)
                self._rebuild()
            if accept:
                return x
            self.n_rejections += 1

    def sample(self, size: int, rng: RngStream) -> np.ndarray:
        return np.array([self.draw(rng) for _ in range(size)])


def ars_sample(h, dh, init, rng: RngStream, domain=(-math.inf, math.inf), size: int | None = None):
    """Draw exactly from ``exp(h)`` on ``domain`` (one float, or ``size`` draws)."""
    s = AdaptiveRejectionSampler(h, dh, init, domain)
    if size is None:
        return s.draw(rng)
    return s.sample(size, rng)
