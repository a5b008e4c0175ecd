from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from ..errors import ConfigurationError

MIN_DRAWS_FOR_INTERVAL = 20


@dataclass(frozen=True)
class SamplerConfig:
    """Draw count ``K``, grid/pool size ``M``, burn-in, thinning and credible level."""

    K: int = 1000
    M: int = 10_000
    burn_in: int = 1000
    thin: int = 2
    level: float = 0.95

    def __post_init__(self):
        if int(self.K) != self.K or self.K < 1:
            raise ConfigurationError(f"K must be a positive integer, got {self.K!r}")
        if int(self.M) != self.M or self.M < 100:
            raise ConfigurationError(f"M must be an integer >= 100, got {self.M!r}")
        if self.burn_in < 0:
            raise ConfigurationError("burn-in must be non-negative")
        if self.thin < 1:
            raise ConfigurationError("thinning interval must be >= 1")
        if not 0 < self.level < 1:
            raise ConfigurationError("credible level must lie in (0, 1)")

    @property
    def rho(self) -> float:
        return 1.0 - self.level


@dataclass
class PosteriorDraws:
    """``K`` joint posterior draws of alpha and the unit rates ``beta_1..beta_n``."""

    alpha: np.ndarray
    betas: np.ndarray
    sampler: str
    seed: int | None = None
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        self.alpha = np.asarray(self.alpha, dtype=float).reshape(-1)
        self.betas = np.asarray(self.betas, dtype=float)
        if self.betas.ndim == 1:
            self.betas = self.betas[:, None]
        if self.alpha.size == 0 or self.betas.shape[0] != self.alpha.size:
            raise ConfigurationError("draws must be non-empty with one beta row per alpha")

    @property
    def K(self) -> int:
        return int(self.alpha.size)

    @property
    def n(self) -> int:
        return int(self.betas.shape[1])

    @property
    def beta(self) -> np.ndarray:
        """Rate draws of the first (homogeneous: only) unit."""
        return self.betas[:, 0]

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["draw_index", "alpha"] + [f"beta_{i + 1}" for i in range(self.n)])
            for k in range(self.K):
                w.writerow([k, repr(float(self.alpha[k]))] + [repr(float(b)) for b in self.betas[k]])

    @classmethod
    def from_csv(cls, path: str | Path, sampler: str = "csv") -> PosteriorDraws:
        arr = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        return cls(arr[:, 1], arr[:, 2:], sampler)


@dataclass(frozen=True)
class Estimate:
    point: float
    lower: float
    upper: float
    level: float

    def as_dict(self) -> dict:
        return {"point": self.point, "lower": self.lower, "upper": self.upper, "level": self.level}


def summarize(draws: PosteriorDraws, functional: Callable, rho: float = 0.05) -> Estimate:
    """Posterior mean and equal-tailed ``100(1-rho)%`` interval of a functional.

    ``functional(alpha, betas)`` receives the ``(K,)`` alpha vector and the
    ``(K, n)`` beta matrix and returns ``K`` values.
    """
    if not 0 < rho < 1:
        raise ConfigurationError("rho must lie in (0, 1)")
    if draws.K < MIN_DRAWS_FOR_INTERVAL:
        raise ConfigurationError(f"need at least {MIN_DRAWS_FOR_INTERVAL} draws for an interval, got {draws.K}")
    vals = np.broadcast_to(np.asarray(functional(draws.alpha, draws.betas), dtype=float), (draws.K,))
    lo, hi = np.quantile(vals, [rho / 2, 1 - rho / 2])
    return Estimate(float(np.mean(vals)), float(lo), float(hi), 1 - rho)


def alpha_functional(alpha, betas):
    return alpha


def beta_functional(unit: int = 0):
    def f(alpha, betas):
        return betas[:, unit]

    return f


def resample_indices(cum: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Cumulative-sum inversion; one uniform per draw."""
    idx = np.searchsorted(cum, u * cum[-1], side="right")
    return np.minimum(idx, cum.size - 1)
