"""Gibbs sampler for the homogeneous (AGG) posterior.

Alternates ``beta | alpha`` (gamma) and ``alpha | beta`` (log-concave,
drawn exactly by adaptive rejection sampling).
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special

from ..conjugate import AGGParams
from ..errors import ConfigurationError, ProperError
from ..specfun import RngStream
from .ars import AdaptiveRejectionSampler
from .draws import PosteriorDraws, SamplerConfig
from .laplace import find_mode, laplace_fit
from .marginal import agg_marginal


def _alpha_conditional(p: AGGParams):
    """Return ``make(log_beta) -> (h, dh, d2h)`` for the log density of alpha given beta."""
    delta = p.delta
    c = delta * p.grid.tbar
    psi, tri, lgam = special.psi, special.polygamma, math.lgamma
    if p.grid.equal_spacing:
        l = float(p.grid.lags[0])
        dl, dl2 = delta * l, delta * l * l

        def make(log_beta):
            L = c * (log_beta + p.log_omega)
            return (
                lambda a: L * a - delta * lgam(l * a),
                lambda a: L - dl * float(psi(l * a)),
                lambda a: -dl2 * float(tri(1, l * a)),
            )

    else:
        lags = p.grid.lags
        w = delta / lags.size

        def make(log_beta):
            L = c * (log_beta + p.log_omega)
            return (
                lambda a: L * a - w * float(special.gammaln(a * lags).sum()),
                lambda a: L - w * float((lags * psi(a * lags)).sum()),
                lambda a: -w * float((lags * lags * tri(1, a * lags)).sum()),
            )

    return make


def gibbs_sample(
    posterior: AGGParams,
    cfg: SamplerConfig,
    rng: RngStream,
    init_alpha: float | None = None,
    n_iter: int | None = None,
) -> PosteriorDraws:
    """Run ``K1 = burn_in + K * thin`` sweeps (or ``n_iter``) and keep every ``thin``-th after burn-in."""
    if posterior.delta <= 0:
        raise ProperError("Gibbs sampling needs a posterior with delta > 0")
    K1 = cfg.burn_in + cfg.K * cfg.thin if n_iter is None else int(n_iter)
    if K1 <= cfg.burn_in:
        raise ConfigurationError(f"chain length {K1} does not exceed burn-in {cfg.burn_in}")
    keep = range(cfg.burn_in, K1, cfg.thin)
    if init_alpha is None:
        init_alpha = laplace_fit(agg_marginal(posterior)).mode
    if not init_alpha > 0:
        raise ConfigurationError("initial alpha must be positive")

    make = _alpha_conditional(posterior)
    slope = posterior.delta * posterior.grid.tbar
    rate = posterior.delta * posterior.lam
    gen = rng.generator
    alphas = np.empty(len(keep))
    betas = np.empty(len(keep))
    evals = rejections = 0
    a = float(init_alpha)
    j = 0
    for k in range(K1):
        b = float(gen.standard_gamma(1.0 + slope * a)) / rate
        h, dh, d2h = make(math.log(b))
        mode = find_mode(dh, d2h, a)
        s = 1.0 / math.sqrt(-d2h(mode))
        ars = AdaptiveRejectionSampler(h, dh, (max(mode - s, 0.5 * mode), mode, mode + s), (0.0, math.inf))
        a = ars.draw(rng)
        evals += ars.n_evals
        rejections += ars.n_rejections
        if j < len(keep) and k == keep[j]:
            alphas[j] = a
            betas[j] = b
            j += 1
    diag = {"iterations": K1, "burn_in": cfg.burn_in, "thin": cfg.thin, "ars_evals": evals, "ars_rejections": rejections}
    return PosteriorDraws(alphas, betas, "gs", rng.seed, diag)
