"""Unnormalized alpha-marginals of AGG/AGMG posteriors and the beta | alpha conditionals."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import special

from ..conjugate import AGGParams, AGMGParams, tail_rate_agg, tail_rate_agmg
from ..errors import ProperError
from ..specfun import RngStream


@dataclass(frozen=True)
class MarginalAlphaDensity:
    """Log of an unnormalized density of alpha on (0, inf) with analytic derivatives.

    All three callables accept scalars or arrays.  ``tail_rate`` is the rate
    of the gamma law whose tail matches the density (0 when unknown).
    """

    log_density: Callable
    d1: Callable
    d2: Callable
    tail_rate: float = 0.0
    tail_shape: float = 0.0


@dataclass(frozen=True)
class BetaConditional:
    """``beta_i | alpha ~ Ga(1 + slope * alpha, rates[i])`` independently over units."""

    slope: float
    rates: np.ndarray

    @property
    def n(self) -> int:
        return int(self.rates.size)

    def draw(self, alpha, rng: RngStream) -> np.ndarray:
        """One row of betas per alpha value; returns shape ``(len(alpha), n)``."""
        alpha = np.atleast_1d(np.asarray(alpha, float))
        shape = 1.0 + self.slope * alpha
        g = rng.generator.standard_gamma(np.broadcast_to(shape[:, None], (alpha.size, self.n)))
        return g / self.rates


@dataclass(frozen=True)
class PosteriorTarget:
    marginal: MarginalAlphaDensity
    conditional: BetaConditional
    family: str


def agg_marginal(p: AGGParams) -> MarginalAlphaDensity:
    """``log h(alpha)`` for AGG parameters (prior or posterior)."""
    if p.delta <= 0:
        raise ProperError("the alpha-marginal of a delta = 0 AGG is flat and improper")
    _, nu = tail_rate_agg(p)
    delta = p.delta
    c = delta * p.grid.tbar
    lin = c * (p.log_omega - math.log(delta * p.lam))
    if p.grid.equal_spacing:
        l = float(p.grid.lags[0])

        def logh(a):
            a = np.asarray(a, float)
            return lin * a + special.gammaln(1 + c * a) - delta * special.gammaln(l * a)

        def d1(a):
            a = np.asarray(a, float)
            return lin + c * special.psi(1 + c * a) - delta * l * special.psi(l * a)

        def d2(a):
            a = np.asarray(a, float)
            return c * c * special.polygamma(1, 1 + c * a) - delta * l * l * special.polygamma(1, l * a)

    else:
        lags = p.grid.lags
        m = lags.size

        def logh(a):
            a = np.asarray(a, float)
            s = special.gammaln(np.multiply.outer(a, lags)).sum(axis=-1)
            return lin * a + special.gammaln(1 + c * a) - delta / m * s

        def d1(a):
            a = np.asarray(a, float)
            s = (lags * special.psi(np.multiply.outer(a, lags))).sum(axis=-1)
            return lin + c * special.psi(1 + c * a) - delta / m * s

        def d2(a):
            a = np.asarray(a, float)
            s = (lags**2 * special.polygamma(1, np.multiply.outer(a, lags))).sum(axis=-1)
            return c * c * special.polygamma(1, 1 + c * a) - delta / m * s

    return MarginalAlphaDensity(logh, d1, d2, tail_rate=nu, tail_shape=(delta + 3) / 2)


def agmg_marginal(p: AGMGParams) -> MarginalAlphaDensity:
    """``log g(alpha)`` for AGMG parameters."""
    shape, A = tail_rate_agmg(p)
    n = p.n
    d1_ = p.delta1
    l = p.spacing
    s = d1_ * l / n
    lin = -d1_ * l * (math.log(p.delta2) - p.log_omega + float(np.mean(np.log(p.lambdas))))

    def logg(a):
        a = np.asarray(a, float)
        return n * special.gammaln(1 + s * a) - d1_ * special.gammaln(l * a) + lin * a

    def d1(a):
        a = np.asarray(a, float)
        return n * s * special.psi(1 + s * a) - d1_ * l * special.psi(l * a) + lin

    def d2(a):
        a = np.asarray(a, float)
        return n * s * s * special.polygamma(1, 1 + s * a) - d1_ * l * l * special.polygamma(1, l * a)

    return MarginalAlphaDensity(logg, d1, d2, tail_rate=A, tail_shape=shape)


def posterior_target(p: AGGParams | AGMGParams) -> PosteriorTarget:
    """Marginal of alpha plus the gamma conditional of the betas for either family."""
    if isinstance(p, AGGParams):
        cond = BetaConditional(p.delta * p.grid.tbar, np.array([p.delta * p.lam]))
        return PosteriorTarget(agg_marginal(p), cond, "AGG")
    cond = BetaConditional(p.delta1 * p.spacing / p.n, p.delta2 * p.lambdas)
    return PosteriorTarget(agmg_marginal(p), cond, "AGMG")
