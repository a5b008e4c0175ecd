"""Sampling importance resampling with a moment-matched gamma instrumental law."""

from __future__ import annotations

import warnings

import numpy as np
from scipy import special

from ..errors import DegeneracyWarning, ProperError
from ..specfun import RngStream
from .draws import PosteriorDraws, SamplerConfig, resample_indices
from .laplace import LaplaceFit, laplace_fit
from .marginal import PosteriorTarget

MIN_ESS_FRACTION = 0.01


def instrumental_params(fit: LaplaceFit, nu: float) -> tuple[float, float]:
    """Gamma shape/rate with mean at the mode and variance ``1 / I(mode)``.

    Starts from rate ``nu`` (the marginal's tail rate) and rescales both
    parameters by the precision ratio ``(b0**2 / a0) / I``.
    """
    if not nu > 0:
        raise ProperError(f"tail rate must be positive for SIR, got {nu:g}")
    b0 = nu
    a0 = fit.mode * b0
    R = (b0 * b0 / a0) / fit.curvature
    return a0 / R, b0 / R


def log_gamma_pdf(x, a, b):
    return a * np.log(b) + (a - 1) * np.log(x) - b * x - special.gammaln(a)


def sir_sample(target: PosteriorTarget, cfg: SamplerConfig, rng: RngStream, fit: LaplaceFit | None = None) -> PosteriorDraws:
    nu = target.marginal.tail_rate
    if not nu > 0:
        raise ProperError(f"tail rate must be positive for SIR, got {nu:g}")
    fit = fit or laplace_fit(target.marginal)
    a, b = instrumental_params(fit, nu)
    pool = rng.generator.standard_gamma(a, size=cfg.M) / b
    logw = target.marginal.log_density(pool) - log_gamma_pdf(pool, a, b)
    w = np.exp(logw - np.max(logw))
    w /= w.sum()
    ess = 1.0 / float(np.sum(w * w))
    if ess < MIN_ESS_FRACTION * cfg.M:
        warnings.warn(
            f"importance weights degenerate: ESS {ess:.1f} of {cfg.M}", DegeneracyWarning, stacklevel=2
        )
    alpha = pool[resample_indices(np.cumsum(w), rng.uniform(cfg.K))]
    betas = target.conditional.draw(alpha, rng)
    diag = {
        "mode": fit.mode,
        "sigma": fit.sigma,
        "nu": nu,
        "a": a,
        "b": b,
        "ess": ess,
        "weighted_pool_mean": float(np.dot(w, pool)),
        "weighted_pool_sd": float(np.sqrt(np.dot(w, (pool - np.dot(w, pool)) ** 2))),
        "family": target.family,
    }
    return PosteriorDraws(alpha, betas, "sir", rng.seed, diag)
