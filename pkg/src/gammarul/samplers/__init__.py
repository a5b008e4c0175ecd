"""Posterior samplers for AGG and AGMG posteriors: Gibbs/ARS, DGS and SIR."""

from __future__ import annotations

from ..conjugate import AGGParams, AGMGParams
from ..errors import ConfigurationError
from ..specfun import RngStream
from .ars import AdaptiveRejectionSampler, ars_sample
from .dgs import dgs_sample, six_sigma_grid
from .draws import (
    Estimate,
    PosteriorDraws,
    SamplerConfig,
    alpha_functional,
    beta_functional,
    summarize,
)
from .gibbs import gibbs_sample
from .laplace import LaplaceFit, find_mode, laplace_fit
from .marginal import (
    BetaConditional,
    MarginalAlphaDensity,
    PosteriorTarget,
    agg_marginal,
    agmg_marginal,
    posterior_target,
)
from .sir import instrumental_params, sir_sample

SAMPLERS = ("gs", "dgs", "sir")

__all__ = [
    "AdaptiveRejectionSampler",
    "BetaConditional",
    "Estimate",
    "LaplaceFit",
    "MarginalAlphaDensity",
    "PosteriorDraws",
    "PosteriorTarget",
    "SAMPLERS",
    "SamplerConfig",
    "agg_marginal",
    "agmg_marginal",
    "alpha_functional",
    "ars_sample",
    "beta_functional",
    "dgs_sample",
    "find_mode",
    "gibbs_sample",
    "instrumental_params",
    "laplace_fit",
    "posterior_target",
    "sample_posterior",
    "sir_sample",
    "six_sigma_grid",
    "summarize",
]


def sample_posterior(posterior: AGGParams | AGMGParams, sampler: str, cfg: SamplerConfig, rng: RngStream) -> PosteriorDraws:
    """Dispatch on sampler name; Gibbs is available for AGG posteriors only."""
    if sampler == "gs":
        if not isinstance(posterior, AGGParams):
            raise ConfigurationError("Gibbs sampling is only implemented for the homogeneous (AGG) model")
        return gibbs_sample(posterior, cfg, rng)
    if sampler == "dgs":
        return dgs_sample(posterior_target(posterior), cfg, rng)
    if sampler == "sir":
        return sir_sample(posterior_target(posterior), cfg, rng)
    raise ConfigurationError(f"unknown sampler {sampler!r}; choose one of {', '.join(SAMPLERS)}")
