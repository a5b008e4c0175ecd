"""First-hitting-time distribution of a gamma process and RUL prediction.

The exact lifetime CDF of ``GP(alpha t, beta)`` with threshold ``C`` is
``Q(alpha t, beta C)``; the Birnbaum-Saunders surrogate
``BS(1/sqrt(beta C), beta C / alpha)`` gives closed-form means and quantiles.
Remaining useful life uses the same formulas with ``C`` replaced by the
remaining headroom ``C - Y``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AlreadyFailedError, DomainError
from .samplers.draws import PosteriorDraws
from .specfun import reg_upper_inc_gamma, std_normal_cdf, std_normal_quantile

__all__ = [
    "BSParams",
    "RulPrediction",
    "lifetime_cdf_exact",
    "bs_params",
    "bs_cdf",
    "reliability",
    "mttf",
    "rul_mean",
    "rul_quantile",
    "mc_rul_predict",
    "reliability_functional",
    "mttf_functional",
]


def _positive(**kw):
    for k, v in kw.items():
        a = np.asarray(v, float)
        if not np.all(np.isfinite(a)) or np.any(a <= 0):
            raise DomainError(f"{k} must be positive and finite, got {v!r}")


def lifetime_cdf_exact(t, alpha, beta, threshold):
    """``P(T < t) = P(Y(t) > C)`` computed from the incomplete gamma function."""
    _positive(t=t, alpha=alpha, beta=beta, threshold=threshold)
    return reg_upper_inc_gamma(np.multiply(alpha, t), np.multiply(beta, threshold))


@dataclass(frozen=True)
class BSParams:
    alpha_star: float
    beta_star: float

    def __post_init__(self):
        if not (self.alpha_star > 0 and self.beta_star > 0):
            raise DomainError("Birnbaum-Saunders parameters must be positive")


def bs_params(alpha, beta, threshold) -> BSParams:
    _positive(alpha=alpha, beta=beta, threshold=threshold)
    bc = beta * threshold
    return BSParams(float(np.sqrt(1.0 / bc)), float(bc / alpha))


def bs_cdf(t, p: BSParams):
    _positive(t=t)
    t = np.asarray(t, float)
    z = (np.sqrt(t / p.beta_star) - np.sqrt(p.beta_star / t)) / p.alpha_star
    return std_normal_cdf(z) if z.ndim else float(std_normal_cdf(float(z)))


def reliability(t, alpha, beta, threshold, exact: bool = False):
    """``R(t) = 1 - F(t)``; Birnbaum-Saunders by default, incomplete gamma with ``exact=True``.

    Vectorized over ``alpha`` and ``beta``.
    """
    if exact:
        return 1.0 - lifetime_cdf_exact(t, alpha, beta, threshold)
    _positive(t=t, alpha=alpha, beta=beta, threshold=threshold)
    bc = np.multiply(beta, threshold)
    a_star = np.sqrt(1.0 / bc)
    b_star = bc / np.asarray(alpha, float)
    z = (np.sqrt(t / b_star) - np.sqrt(b_star / t)) / a_star
    return 1.0 - std_normal_cdf(z)


def mttf(alpha, beta, threshold):
    """Birnbaum-Saunders mean ``(1 + 2 beta C) / (2 alpha)``."""
    _positive(alpha=alpha, beta=beta, threshold=threshold)
    return (1.0 + 2.0 * np.multiply(beta, threshold)) / (2.0 * np.asarray(alpha, float))


def _headroom(threshold, current):
    h = threshold - np.asarray(current, float)
    if np.any(h <= 0):
        raise AlreadyFailedError(f"current degradation {current!r} has reached the threshold {threshold!r}")
    if np.any(np.asarray(current, float) < 0):
        raise DomainError("current degradation must be non-negative")
    return h


def rul_mean(alpha, beta, threshold, current):
    """Approximate mean residual life ``(1 + 2 beta (C - Y)) / (2 alpha)``."""
    _positive(alpha=alpha, beta=beta, threshold=threshold)
    h = _headroom(threshold, current)
    out = (1.0 + 2.0 * np.multiply(beta, h)) / (2.0 * np.asarray(alpha, float))
    return float(out) if np.ndim(out) == 0 else out


def rul_quantile(alpha, beta, threshold, current, rho):
    """Lower ``rho``-quantile of the Birnbaum-Saunders residual-life law."""
    _positive(alpha=alpha, beta=beta, threshold=threshold)
    h = _headroom(threshold, current)
    u = std_normal_quantile(rho)
    bh = np.multiply(beta, h)
    a_star = np.sqrt(1.0 / bh)
    b_star = bh / np.asarray(alpha, float)
    ua = u * a_star
    out = b_star / 4.0 * (ua + np.sqrt(ua * ua + 4.0)) ** 2
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class RulPrediction:
    unit_id: str
    point: float
    lower: float
    upper: float
    level: float
    epoch: float | None = None

    def as_dict(self) -> dict:
        return {
            "unit_id": self.unit_id,
            "epoch": self.epoch,
            "point": self.point,
            "lower": self.lower,
            "upper": self.upper,
            "level": self.level,
        }


def mc_rul_predict(
    draws: PosteriorDraws,
    unit: int,
    threshold: float,
    current: float,
    rho: float = 0.05,
    unit_id: str | None = None,
    epoch: float | None = None,
) -> RulPrediction:
    """Posterior-averaged RUL mean and posterior-averaged BS quantiles at ``rho/2`` and ``1 - rho/2``."""
    if not 0 < rho < 1:
        raise DomainError("rho must lie in (0, 1)")
    a = draws.alpha
    b = draws.betas[:, unit]
    point = float(np.mean(rul_mean(a, b, threshold, current)))
    lo = float(np.mean(rul_quantile(a, b, threshold, current, rho / 2)))
    hi = float(np.mean(rul_quantile(a, b, threshold, current, 1 - rho / 2)))
    return RulPrediction(unit_id if unit_id is not None else str(unit + 1), point, lo, hi, 1 - rho, epoch)


def rul_mean_quantile_interval(draws: PosteriorDraws, unit: int, threshold: float, current: float, rho: float = 0.05):
    """Diagnostic only: equal-tailed quantiles of the per-draw RUL means.

    This is *not* the predictive interval (that averages per-draw quantiles);
    it measures parameter uncertainty in the mean residual life alone.
    """
    vals = rul_mean(draws.alpha, draws.betas[:, unit], threshold, current)
    lo, hi = np.quantile(vals, [rho / 2, 1 - rho / 2])
    return float(lo), float(hi)


def reliability_functional(t: float, threshold: float, unit: int = 0, exact: bool = False):
    def f(alpha, betas):
        return reliability(t, alpha, betas[:, unit], threshold, exact=exact)

    return f


def mttf_functional(threshold: float, unit: int = 0):
    def f(alpha, betas):
        return mttf(alpha, betas[:, unit], threshold)

    return f
