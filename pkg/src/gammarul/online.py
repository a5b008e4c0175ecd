"""Streaming AGMG posterior and online RUL prediction for a fleet.

The state keeps only the current posterior parameters, each unit's current
degradation level and the failure ledger, so memory is O(n) no matter how
many epochs have been ingested.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .conjugate import AGMGParams, params_from_json, params_to_json, recursive_update
from .data import DegradationDataset, MeasurementGrid
from .errors import ConfigurationError, NotFailedError, ShapeError, UnsupportedGridError
from .lifetime import RulPrediction, mc_rul_predict
from .samplers import PosteriorDraws, SamplerConfig, dgs_sample, posterior_target, sir_sample
from .specfun import RngStream

__all__ = [
    "OnlineState",
    "FailedUnit",
    "ingest",
    "predict",
    "replay",
    "ReplayResult",
    "interpolate_failure_time",
]

STATE_SCHEMA = 1


@dataclass(frozen=True)
class FailedUnit:
    unit_id: str
    failure_epoch: float


@dataclass(frozen=True)
class OnlineState:
    """Recursively updated fleet posterior plus degradation bookkeeping.

    With ``hyper="auto"`` the prior hyperparameters track the data (omega =
    pooled geometric mean, lambda_i = unit means) and ``delta1``/``delta2``
    act as pseudo-measurement counts added at prediction time; the
    recursion then runs on the noninformative posterior.  With
    ``hyper="fixed"`` the recursion starts from an explicit AGMG prior.
    """

    posterior: AGMGParams
    threshold: float
    cumulative: np.ndarray
    unit_ids: tuple
    failed: dict = field(default_factory=dict)
    hyper: str = "fixed"
    delta1: float = 0.0
    delta2: float = 0.0

    @classmethod
    def start(
        cls,
        n: int,
        spacing: float,
        threshold: float,
        prior: AGMGParams | None = None,
        delta1: float = 0.0,
        delta2: float = 0.0,
        unit_ids=None,
    ) -> OnlineState:
        if not threshold > 0:
            raise ConfigurationError("threshold must be positive")
        ids = tuple(unit_ids) if unit_ids is not None else tuple(str(i + 1) for i in range(n))
        if len(ids) != n:
            raise ShapeError("one unit id per unit is required")
        if prior is None:
            return cls(AGMGParams.noninformative(n, spacing), float(threshold), np.zeros(n), ids,
                       hyper="auto", delta1=float(delta1), delta2=float(delta2))
        if prior.n != n or not math.isclose(prior.spacing, spacing, rel_tol=1e-9):
            raise ShapeError("prior does not match fleet size or spacing")
        return cls(prior, float(threshold), np.zeros(n), ids)

    @property
    def n(self) -> int:
        return self.posterior.n

    @property
    def m(self) -> int:
        return self.posterior.m

    @property
    def spacing(self) -> float:
        return self.posterior.spacing

    @property
    def clock(self) -> float:
        """Time of the latest measurement, ``m * l``."""
        return self.m * self.spacing

    @property
    def alive(self) -> list[int]:
        return [i for i, uid in enumerate(self.unit_ids) if uid not in self.failed]

    def current_posterior(self) -> AGMGParams:
        if self.hyper == "fixed":
            return self.posterior
        p = self.posterior
        return replace(p, delta1=p.delta1 + self.delta1, delta2=p.delta2 + self.delta2,
                       prior_delta1=p.prior_delta1 + self.delta1, prior_delta2=p.prior_delta2 + self.delta2)

    def to_json(self) -> str:
        doc = params_to_json(self.posterior)
        doc.update(
            state_schema=STATE_SCHEMA,
            threshold=self.threshold,
            cumulative=[float(v) for v in self.cumulative],
            unit_ids=list(self.unit_ids),
            failed=dict(self.failed),
            hyper=self.hyper,
            hyper_delta1=self.delta1,
            hyper_delta2=self.delta2,
        )
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> OnlineState:
        doc = json.loads(text)
        post = params_from_json(doc)
        return cls(post, float(doc["threshold"]), np.array(doc["cumulative"], float), tuple(doc["unit_ids"]),
                   {str(k): float(v) for k, v in doc["failed"].items()}, doc["hyper"],
                   float(doc["hyper_delta1"]), float(doc["hyper_delta2"]))


def ingest(state: OnlineState, increments) -> OnlineState:
    """Absorb one epoch of increments from every unit (failed units included)."""
    y = np.asarray(increments, float).reshape(-1)
    if y.size != state.n:
        raise ShapeError(f"expected {state.n} increments, got {y.size}")
    post = recursive_update(state.posterior, y)
    cum = state.cumulative + y
    clock = post.m * post.spacing
    failed = dict(state.failed)
    for i, uid in enumerate(state.unit_ids):
        if uid not in failed and cum[i] >= state.threshold:
            failed[uid] = clock
    return replace(state, posterior=post, cumulative=cum, failed=failed)


def sample_state(state: OnlineState, sampler: str, cfg: SamplerConfig, rng: RngStream) -> PosteriorDraws:
    if state.m < 1:
        raise ConfigurationError("no measurements ingested yet")
    target = posterior_target(state.current_posterior())
    if sampler == "dgs":
        return dgs_sample(target, cfg, rng)
    if sampler == "sir":
        return sir_sample(target, cfg, rng)
    raise ConfigurationError(f"online prediction supports 'dgs' or 'sir', not {sampler!r}")


def predict(
    state: OnlineState,
    sampler: str,
    cfg: SamplerConfig,
    rng: RngStream,
    draws: PosteriorDraws | None = None,
) -> list[RulPrediction | FailedUnit]:
    """One prediction per unit: an RUL forecast if alive, its crossing epoch if failed."""
    draws = draws if draws is not None else sample_state(state, sampler, cfg, rng)
    out: list[RulPrediction | FailedUnit] = []
    for i, uid in enumerate(state.unit_ids):
        if uid in state.failed:
            out.append(FailedUnit(uid, state.failed[uid]))
        else:
            out.append(mc_rul_predict(draws, i, state.threshold, float(state.cumulative[i]), cfg.rho, uid, state.clock))
    return out


def interpolate_failure_time(path, grid: MeasurementGrid, threshold: float) -> float:
    """Linear interpolation of the first threshold crossing between measurement epochs."""
    Y = np.asarray(path, float).reshape(-1)
    if Y.size != grid.m:
        raise ShapeError("path and grid lengths differ")
    hits = np.nonzero(Y >= threshold)[0]
    if hits.size == 0:
        raise NotFailedError(f"path never reaches the threshold {threshold:g}")
    j = int(hits[0])
    if Y[j] == threshold:
        return float(grid.epochs[j])
    t0, y0 = (0.0, 0.0) if j == 0 else (float(grid.epochs[j - 1]), float(Y[j - 1]))
    t1, y1 = float(grid.epochs[j]), float(Y[j])
    return t0 + (threshold - y0) / (y1 - y0) * (t1 - t0)


@dataclass
class ReplayResult:
    """Per-epoch predictions for surviving units plus posterior-mean parameter tracks."""

    rows: list[dict]
    params: list[dict]
    failure_times: dict

    def trajectory_csv(self) -> str:
        cols = ["epoch", "time", "unit_id", "point", "lower", "upper", "true_rul"]
        lines = [",".join(cols)]
        for r in self.rows:
            lines.append(",".join("" if r[c] is None else str(r[c]) for c in cols))
        return "\n".join(lines) + "\n"

    def params_csv(self) -> str:
        if not self.params:
            return ""
        cols = list(self.params[0])
        lines = [",".join(cols)]
        for r in self.params:
            lines.append(",".join(str(r[c]) for c in cols))
        return "\n".join(lines) + "\n"


def replay(
    data: DegradationDataset,
    threshold: float,
    delta1: float = 0.0,
    delta2: float = 0.0,
    start: int = 2,
    sampler: str = "dgs",
    cfg: SamplerConfig | None = None,
    seed: int = 0,
) -> ReplayResult:
    """Feed ``data`` epoch by epoch and predict from epoch ``start`` onward.

    The draws at epoch ``m`` come from ``RngStream(seed, m)``, so a replay
    is reproducible and each epoch is independent of the others' draws.
    """
    cfg = cfg or SamplerConfig()
    if not data.grid.equal_spacing:
        raise UnsupportedGridError("online prediction needs equally spaced measurements")
    if not 1 <= start <= data.m:
        raise ConfigurationError(f"start epoch {start} outside 1..{data.m}")
    spacing = float(data.grid.lags[0])
    failure_times = {}
    for i, uid in enumerate(data.unit_ids):
        try:
            failure_times[uid] = interpolate_failure_time(data.cumulative[i], data.grid, threshold)
        except NotFailedError:
            pass
    state = OnlineState.start(data.n, spacing, threshold, delta1=delta1, delta2=delta2, unit_ids=data.unit_ids)
    rows: list[dict] = []
    params: list[dict] = []
    for j in range(data.m):
        state = ingest(state, data.increments[:, j])
        m = j + 1
        if m < start:
            continue
        if not state.alive:
            break
        draws = sample_state(state, sampler, cfg, RngStream(seed, m))
        track = {"epoch": m, "time": state.clock, "alpha": float(draws.alpha.mean())}
        for i, uid in enumerate(data.unit_ids):
            track[f"beta_{uid}"] = float(draws.betas[:, i].mean())
        params.append(track)
        for pred in predict(state, sampler, cfg, None, draws=draws):
            if isinstance(pred, FailedUnit):
                continue
            ft = failure_times.get(pred.unit_id)
            rows.append({
                "epoch": m,
                "time": state.clock,
                "unit_id": pred.unit_id,
                "point": pred.point,
                "lower": pred.lower,
                "upper": pred.upper,
                "true_rul": None if ft is None else ft - state.clock,
            })
    return ReplayResult(rows, params, failure_times)

