"""Conjugate AGG / AGMG parameter objects and their updates.

``AGG(delta, omega, lambda)`` is the conjugate prior of ``(alpha, beta)`` for
a homogeneous gamma process observed on a fixed measurement grid;
``AGMG_n(delta1, delta2, omega, lambdas)`` is the prior of
``(alpha, beta_1..beta_n)`` when every unit has its own rate ``beta_i``.
Normalizing constants are never computed: every density handled here is
unnormalized.  The shape parameter ``omega`` is always carried as its
logarithm because products of increments underflow quickly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import special

from .data import DegradationDataset, MeasurementGrid, sufficient_stats
from .errors import DomainError, ProperError, ShapeError, UnsupportedGridError

__all__ = [
    "AGGParams",
    "AGMGParams",
    "auto_hyperparams",
    "auto_hyperparams_agmg",
    "posterior_update_agg",
    "posterior_update_agmg",
    "recursive_update",
    "jensen_gap",
    "tail_rate_agg",
    "tail_rate_agmg",
    "agg_log_density",
    "agmg_log_density",
    "params_to_json",
    "params_from_json",
]

SCHEMA_VERSION = 1
# Log-ratio margin below which a tail is treated as flat; guards against rounding in log(mean) - mean(log).
PROPER_TOL = 1e-12


def jensen_gap(grid: MeasurementGrid) -> float:
    """``log(prod_j t_j**(t_j/T_m) / Tbar_m)``, non-negative by convexity of x log x."""
    if grid.equal_spacing:
        return 0.0
    lags = grid.lags
    w = lags / grid.t_end
    return float(np.sum(w * np.log(lags / grid.tbar)))


@dataclass(frozen=True)
class AGGParams:
    """Homogeneous conjugate parameters ``(delta, omega, lambda)`` tied to a grid.

    ``delta = 0`` is the noninformative (flat) prior.  For ``delta > 0`` the
    alpha-marginal has an exponential tail with rate
    ``delta * Tbar * (log(lambda/omega) + jensen_gap)``, which must be positive.
    """

    delta: float
    log_omega: float
    lam: float
    grid: MeasurementGrid

    def __post_init__(self):
        if not (self.delta >= 0 and math.isfinite(self.delta)):
            raise DomainError(f"delta must be non-negative, got {self.delta!r}")
        if not (self.lam > 0 and math.isfinite(self.lam)):
            raise DomainError(f"lambda must be positive, got {self.lam!r}")
        if not math.isfinite(self.log_omega):
            raise DomainError("omega must be positive and finite")
        if self.delta > 0 and self.tail_exponent() <= PROPER_TOL:
            raise ProperError(
                f"improper AGG: need omega < lambda (omega={self.omega:.6g}, lambda={self.lam:.6g}); "
                "the alpha-marginal tail rate delta*Tbar*(log(lambda/omega) + jensen_gap) is not positive"
            )

    @classmethod
    def create(cls, delta: float, omega: float, lam: float, grid: MeasurementGrid) -> AGGParams:
        if not omega > 0:
            raise DomainError(f"omega must be positive, got {omega!r}")
        return cls(float(delta), math.log(omega), float(lam), grid)

    @property
    def omega(self) -> float:
        return math.exp(self.log_omega)

    @property
    def noninformative(self) -> bool:
        return self.delta == 0

    def tail_exponent(self) -> float:
        return math.log(self.lam) - self.log_omega + jensen_gap(self.grid)


@dataclass(frozen=True)
class AGMGParams:
    """Heterogeneous conjugate parameters on an equally spaced grid with lag ``spacing``.

    ``m`` counts the measurements absorbed since the prior whose kurtosis
    parameters are ``prior_delta1``/``prior_delta2``.
    """

    delta1: float
    delta2: float
    log_omega: float
    lambdas: np.ndarray
    spacing: float
    m: int = 0
    prior_delta1: float | None = None
    prior_delta2: float | None = None

    def __post_init__(self):
        lam = np.array(self.lambdas, dtype=float).reshape(-1)
        if lam.size == 0:
            raise ShapeError("at least one unit is required")
        if np.any(~(lam > 0)) or not np.all(np.isfinite(lam)):
            raise DomainError("every lambda_i must be positive and finite")
        if not (self.delta1 >= 0 and self.delta2 >= 0):
            raise DomainError("delta1 and delta2 must be non-negative")
        if not (self.spacing > 0 and math.isfinite(self.spacing)):
            raise DomainError("spacing must be positive")
        if not math.isfinite(self.log_omega):
            raise DomainError("omega must be positive and finite")
        lam.setflags(write=False)
        object.__setattr__(self, "lambdas", lam)
        if self.prior_delta1 is None:
            object.__setattr__(self, "prior_delta1", float(self.delta1))
        if self.prior_delta2 is None:
            object.__setattr__(self, "prior_delta2", float(self.delta2))

    @classmethod
    def create(cls, delta1, delta2, omega, lambdas, spacing) -> AGMGParams:
        if not omega > 0:
            raise DomainError(f"omega must be positive, got {omega!r}")
        return cls(float(delta1), float(delta2), math.log(omega), np.asarray(lambdas, float), float(spacing))

    @classmethod
    def noninformative(cls, n: int, spacing: float) -> AGMGParams:
        """``delta1 = delta2 = 0``; omega and lambdas are then irrelevant."""
        return cls(0.0, 0.0, 0.0, np.ones(n), float(spacing))

    @property
    def n(self) -> int:
        return int(self.lambdas.size)

    @property
    def omega(self) -> float:
        return math.exp(self.log_omega)

    def tail_rate(self) -> float:
        """``A = delta1 * l * (log(n delta2 / delta1) + mean_i log(lambda_i / omega))``."""
        if self.delta1 == 0:
            return 0.0
        if self.delta2 == 0:
            return -math.inf
        n = self.n
        inner = math.log(n * self.delta2 / self.delta1) + float(np.mean(np.log(self.lambdas))) - self.log_omega
        return self.delta1 * self.spacing * inner

    def check_proper(self) -> None:
        if self.delta1 == 0 or self.tail_rate() <= PROPER_TOL * self.delta1 * self.spacing:
            raise ProperError(
                f"AGMG alpha-marginal is improper (delta1={self.delta1:g}, tail rate A={self.tail_rate():.4g}); "
                "need A > 0, e.g. at least two measurements per unit under a noninformative prior"
            )

    def to_agg(self) -> AGGParams:
        """Single-unit parameters as the equivalent AGG on a regular grid of ``m`` lags."""
        if self.n != 1:
            raise ShapeError("only a one-unit AGMG reduces to an AGG")
        if self.delta1 != self.delta2:
            raise DomainError("reduction to AGG needs delta1 == delta2")
        grid = MeasurementGrid.regular(self.spacing, max(self.m, 1))
        return AGGParams(self.delta1, self.log_omega, float(self.lambdas[0]), grid)


def agg_log_density(p: AGGParams, alpha, beta):
    """Unnormalized log AGG density at ``(alpha, beta)`` (broadcasts)."""
    alpha = np.asarray(alpha, float)
    beta = np.asarray(beta, float)
    lags = p.grid.lags
    lg = special.gammaln(np.multiply.outer(alpha, lags)).mean(axis=-1)
    return p.delta * p.grid.tbar * alpha * (np.log(beta) + p.log_omega) - p.delta * lg - p.delta * p.lam * beta


def agmg_log_density(p: AGMGParams, alpha, betas):
    """Unnormalized log AGMG density; ``betas`` has trailing dimension ``n``."""
    alpha = np.asarray(alpha, float)
    betas = np.asarray(betas, float)
    l = p.spacing
    log_bg = np.log(betas).mean(axis=-1)
    return (
        p.delta1 * l * alpha * (log_bg + p.log_omega)
        - p.delta1 * special.gammaln(l * alpha)
        - p.delta2 * np.sum(p.lambdas * betas, axis=-1)
    )


def auto_hyperparams(data: DegradationDataset, delta: float) -> AGGParams:
    """Data-driven AGG prior: omega = lag-weighted geometric mean, lambda = arithmetic mean."""
    if delta < 0:
        raise DomainError("delta must be non-negative")
    st = sufficient_stats(data)
    return AGGParams(float(delta), st.log_weighted_gmean, st.ybar_a, data.grid)


def auto_hyperparams_agmg(data: DegradationDataset, delta1: float, delta2: float) -> AGMGParams:
    """Data-driven AGMG prior: omega = pooled geometric mean, lambda_i = unit means."""
    spacing = _require_equal_spacing(data.grid)
    st = sufficient_stats(data)
    return AGMGParams(float(delta1), float(delta2), st.log_pooled_gmean, st.per_unit_means, spacing)


def posterior_update_agg(prior: AGGParams, data: DegradationDataset) -> AGGParams:
    if not prior.grid.same_pattern(data.grid):
        raise ShapeError("prior grid and data grid have different lag patterns")
    st = sufficient_stats(data)
    N = data.m * data.n
    dp = N + prior.delta
    log_omega = (prior.delta * prior.log_omega + N * st.log_weighted_gmean) / dp
    lam = (N * st.ybar_a + prior.delta * prior.lam) / dp
    return AGGParams(dp, log_omega, lam, data.grid)


def _require_equal_spacing(grid: MeasurementGrid) -> float:
    if not grid.equal_spacing:
        raise UnsupportedGridError("the heterogeneous model needs equally spaced measurements")
    return float(grid.lags[0])


def posterior_update_agmg(prior: AGMGParams, data: DegradationDataset) -> AGMGParams:
    spacing = _require_equal_spacing(data.grid)
    if data.n != prior.n:
        raise ShapeError(f"prior has {prior.n} units but data have {data.n}")
    if not math.isclose(spacing, prior.spacing, rel_tol=1e-9):
        raise ShapeError(f"prior spacing {prior.spacing:g} differs from data spacing {spacing:g}")
    m, n = data.m, data.n
    logy = np.log(data.increments)
    d1 = m * n + prior.delta1
    d2 = m + prior.delta2
    log_omega = (prior.delta1 * prior.log_omega + float(logy.sum())) / d1
    lambdas = (data.increments.sum(axis=1) + prior.delta2 * prior.lambdas) / d2
    return AGMGParams(
        d1, d2, log_omega, lambdas, prior.spacing,
        m=prior.m + m, prior_delta1=prior.prior_delta1, prior_delta2=prior.prior_delta2,
    )


def recursive_update(state: AGMGParams, new_increments) -> AGMGParams:
    """Absorb one epoch of increments ``(y_1, ..., y_n)`` in O(n)."""
    y = np.asarray(new_increments, dtype=float).reshape(-1)
    if y.size != state.n:
        raise ShapeError(f"expected {state.n} increments, got {y.size}")
    if np.any(~(y > 0)) or not np.all(np.isfinite(y)):
        raise DomainError("new increments must be positive and finite")
    n = state.n
    d1_old = state.m * n + state.prior_delta1
    d2_old = state.m + state.prior_delta2
    d1 = d1_old + n
    d2 = d2_old + 1
    log_omega = (d1_old * state.log_omega + float(np.log(y).sum())) / d1
    lambdas = (d2_old * state.lambdas + y) / d2
    return replace(state, delta1=d1, delta2=d2, log_omega=log_omega, lambdas=lambdas, m=state.m + 1)


def tail_rate_agg(p: AGGParams) -> tuple[float, float]:
    """Shape and rate ``((delta+3)/2, nu)`` of the gamma law matching the alpha-marginal tail."""
    if p.delta <= 0:
        raise ProperError("the noninformative AGG (delta = 0) has no gamma tail")
    rate = p.delta * p.grid.tbar * p.tail_exponent()
    if rate <= 0:
        raise ProperError("AGG tail rate is not positive")
    return (p.delta + 3) / 2, rate


def tail_rate_agmg(p: AGMGParams) -> tuple[float, float]:
    """Shape and rate ``((delta1+n+2)/2, A)`` of the alpha-marginal tail."""
    p.check_proper()
    return (p.delta1 + p.n + 2) / 2, p.tail_rate()


def params_to_json(p: AGGParams | AGMGParams) -> dict:
    if isinstance(p, AGGParams):
        return {
            "schema_version": SCHEMA_VERSION,
            "family": "AGG",
            "delta": p.delta,
            "omega_log": p.log_omega,
            "lambda": p.lam,
            "epochs": p.grid.epochs.tolist(),
        }
    return {
        "schema_version": SCHEMA_VERSION,
        "family": "AGMG",
        "delta1": p.delta1,
        "delta2": p.delta2,
        "omega_log": p.log_omega,
        "lambdas": p.lambdas.tolist(),
        "spacing": p.spacing,
        "n": p.n,
        "m": p.m,
        "prior_delta1": p.prior_delta1,
        "prior_delta2": p.prior_delta2,
    }


def params_from_json(doc: dict | str) -> AGGParams | AGMGParams:
    if isinstance(doc, str):
        doc = json.loads(doc)
    if doc.get("family") == "AGG" or "delta" in doc:
        return AGGParams(doc["delta"], doc["omega_log"], doc["lambda"], MeasurementGrid(np.array(doc["epochs"])))
    lambdas = np.array(doc["lambdas"], dtype=float)
    if int(doc["n"]) != lambdas.size:
        raise ShapeError("state document: n does not match len(lambdas)")
    return AGMGParams(
        doc["delta1"], doc["delta2"], doc["omega_log"], lambdas, doc["spacing"],
        m=int(doc["m"]), prior_delta1=doc["prior_delta1"], prior_delta2=doc["prior_delta2"],
    )
