"""Monte Carlo evaluation of the samplers on simulated gamma-process fleets.

Each replication draws a fleet from known parameters, fits it under every
(prior weight, sampler) combination and records point estimates and 95%
credible intervals of alpha, beta, a reliability R(t) and the MTTF.  The
aggregate table reports the mean absolute relative error (RB), the signed
relative bias of the mean estimate (RelBias), RMSE, mean interval length and
frequentist coverage (FCP) of each estimator.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .conjugate import auto_hyperparams, auto_hyperparams_agmg, posterior_update_agg, posterior_update_agmg
from .data import DegradationDataset, MeasurementGrid
from .errors import ConfigurationError, GammaRulError
from .lifetime import mttf, mttf_functional, reliability, reliability_functional
from .samplers import SamplerConfig, alpha_functional, beta_functional, sample_posterior, summarize
from .specfun import RngStream

log = logging.getLogger(__name__)

__all__ = ["Scenario", "MetricsTable", "generate_dataset", "run_scenario", "resolve_delta", "max_workers"]


def resolve_delta(value, m: int) -> float:
    """Prior weight given as a number or relative to ``m`` (``"m/4"``, ``"0.5*m"``)."""
    if isinstance(value, (int, float)):
        return float(value)
    s = str(value).replace(" ", "")
    try:
        if s.startswith("m/"):
            return m / float(s[2:])
        if s.endswith("*m"):
            return float(s[:-2]) * m
        return float(s)
    except ValueError:
        raise ConfigurationError(f"cannot interpret prior weight {value!r}") from None


@dataclass
class Scenario:
    alpha: float = 0.031
    beta: float | list = 15.35
    n: int = 15
    m: int = 16
    spacing: float = 250.0
    threshold: float = 10.0
    deltas: list = field(default_factory=lambda: [0, 1, "m/4", "m/2"])
    samplers: list = field(default_factory=lambda: ["gs", "dgs", "sir"])
    N: int = 500
    seed: int = 2023
    reliability_time: float = 4500.0
    level: float = 0.95
    K: int = 1000
    M: int = 10_000
    burn_in: int = 1000
    thin: int = 2
    exact_truth: bool = False

    def __post_init__(self):
        if self.N < 1:
            raise ConfigurationError("N must be at least 1")
        if not (self.alpha > 0 and np.all(np.asarray(self.beta, float) > 0)):
            raise ConfigurationError("true parameters must be positive")
        if self.hetero and len(self.beta) != self.n:
            raise ConfigurationError("need one beta per unit")
        unknown = set(self.samplers) - {"gs", "dgs", "sir"}
        if unknown:
            raise ConfigurationError(f"unknown samplers {sorted(unknown)}")
        if self.hetero and "gs" in self.samplers:
            raise ConfigurationError("Gibbs sampling is not available for heterogeneous scenarios")

    @property
    def hetero(self) -> bool:
        return isinstance(self.beta, (list, tuple, np.ndarray))

    @property
    def grid(self) -> MeasurementGrid:
        return MeasurementGrid.regular(self.spacing, self.m)

    @property
    def sampler_config(self) -> SamplerConfig:
        return SamplerConfig(self.K, self.M, self.burn_in, self.thin, self.level)

    @classmethod
    def from_json(cls, path_or_doc) -> Scenario:
        if isinstance(path_or_doc, dict):
            doc = path_or_doc
        else:
            doc = json.loads(Path(path_or_doc).read_text())
        try:
            return cls(**doc)
        except TypeError as exc:
            raise ConfigurationError(f"bad scenario config: {exc}") from None

    def truths(self) -> dict[str, float]:
        betas = np.atleast_1d(np.asarray(self.beta, float))
        out = {"alpha": self.alpha}
        rname = f"R({self.reliability_time:g})"
        for i, b in enumerate(betas):
            sfx = f"_{i + 1}" if self.hetero else ""
            out["beta" + sfx] = float(b)
            out[rname + sfx] = float(reliability(self.reliability_time, self.alpha, b, self.threshold, exact=self.exact_truth))
            out["MTTF" + sfx] = float(mttf(self.alpha, b, self.threshold))
        return out

    def functionals(self) -> dict:
        n = self.n if self.hetero else 1
        out = {"alpha": alpha_functional}
        rname = f"R({self.reliability_time:g})"
        for i in range(n):
            sfx = f"_{i + 1}" if self.hetero else ""
            out["beta" + sfx] = beta_functional(i)
            out[rname + sfx] = reliability_functional(self.reliability_time, self.threshold, i, exact=self.exact_truth)
            out["MTTF" + sfx] = mttf_functional(self.threshold, i)
        return out


def generate_dataset(scenario: Scenario, rep: int) -> DegradationDataset:
    """Increments ``y_ij ~ Ga(alpha * t_j, beta_i)``, reproducible per ``(seed, rep)``."""
    rng = RngStream(scenario.seed, rep).child(0)
    grid = scenario.grid
    betas = np.broadcast_to(np.asarray(scenario.beta, float), (scenario.n,))
    shape = scenario.alpha * grid.lags
    y = rng.generator.standard_gamma(np.broadcast_to(shape, (scenario.n, grid.m))) / betas[:, None]
    # Gamma variates this small can underflow to exactly zero; they carry no information anyway.
    y = np.maximum(y, np.finfo(float).tiny)
    return DegradationDataset(grid, y)


def _fit_once(scenario: Scenario, data: DegradationDataset, delta: float, sampler: str, rng: RngStream):
    if scenario.hetero:
        prior = auto_hyperparams_agmg(data, delta, delta / data.n)
        post = posterior_update_agmg(prior, data)
    else:
        post = posterior_update_agg(auto_hyperparams(data, delta), data)
    return sample_posterior(post, sampler, scenario.sampler_config, rng)


def run_replication(scenario: Scenario, rep: int) -> list[dict]:
    """Fit one simulated fleet under every (delta, sampler); one record per combination."""
    data = generate_dataset(scenario, rep)
    funcs = scenario.functionals()
    rho = 1 - scenario.level
    records = []
    for di, label in enumerate(scenario.deltas):
        delta = resolve_delta(label, scenario.m)
        for si, sampler in enumerate(scenario.samplers):
            rng = RngStream(scenario.seed, rep).child(1 + 100 * di + si)
            rec = {"rep": rep, "delta": delta, "delta_label": str(label), "sampler": sampler}
            t0 = time.perf_counter()
            try:
                draws = _fit_once(scenario, data, delta, sampler, rng)
                rec["estimates"] = {k: summarize(draws, f, rho).as_dict() for k, f in funcs.items()}
            except GammaRulError as exc:
                rec["error"] = f"{type(exc).__name__}: {exc}"
            rec["seconds"] = time.perf_counter() - t0
            records.append(rec)
    return records


def max_workers() -> int:
    env = os.environ.get("GAMMARUL_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigurationError(f"GAMMARUL_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def _replication_task(args):
    scenario, rep = args
    return run_replication(scenario, rep)


@dataclass
class MetricsTable:
    rows: list[dict]
    failures: dict
    timing: dict
    scenario: dict

    def select(self, metric: str, parameter: str, sampler: str, delta: float) -> float:
        for r in self.rows:
            if r["parameter"] == parameter and r["sampler"] == sampler and math.isclose(r["delta"], delta):
                return r[metric]
        raise KeyError((metric, parameter, sampler, delta))

    def to_csv(self) -> str:
        buf = io.StringIO()
        cols = ["delta", "delta_label", "sampler", "parameter", "truth", "RB", "RelBias", "RMSE", "length", "FCP", "N"]
        w = csv.DictWriter(buf, fieldnames=cols, extrasaction="ignore")
        w.writeheader()
        w.writerows(self.rows)
        return buf.getvalue()

    def metric_csv(self, metric: str) -> str:
        """One metric laid out as sampler rows by (delta, parameter) columns."""
        deltas = list(dict.fromkeys(r["delta_label"] for r in self.rows))
        params = list(dict.fromkeys(r["parameter"] for r in self.rows))
        samplers = list(dict.fromkeys(r["sampler"] for r in self.rows))
        lookup = {(r["delta_label"], r["parameter"], r["sampler"]): r[metric] for r in self.rows}
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["sampler"] + [f"delta={d}:{p}" for d in deltas for p in params])
        for s in samplers:
            w.writerow([s] + [f"{lookup.get((d, p, s), float('nan')):.6g}" for d in deltas for p in params])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(
            {"scenario": self.scenario, "rows": self.rows, "failures": self.failures, "timing": self.timing}, indent=2
        )

    def write(self, outdir: str | Path) -> list[Path]:
        out = Path(outdir)
        out.mkdir(parents=True, exist_ok=True)
        paths = [out / "metrics.csv", out / "metrics.json"]
        paths[0].write_text(self.to_csv())
        paths[1].write_text(self.to_json())
        for metric, name in [("RB", "rb"), ("RelBias", "relbias"), ("RMSE", "rmse"), ("length", "length"), ("FCP", "fcp")]:
            p = out / f"table_{name}.csv"
            p.write_text(self.metric_csv(metric))
            paths.append(p)
        return paths


def aggregate(scenario: Scenario, records: list[dict]) -> MetricsTable:
    truths = scenario.truths()
    groups: dict[tuple, list[dict]] = {}
    failures: dict[str, int] = {}
    seconds: dict[str, list[float]] = {}
    for rec in records:
        key = (rec["delta"], rec["delta_label"], rec["sampler"])
        seconds.setdefault(rec["sampler"], []).append(rec["seconds"])
        if "error" in rec:
            label = f"delta={rec['delta_label']}:{rec['sampler']}"
            failures[label] = failures.get(label, 0) + 1
            log.warning("replication %d failed (%s): %s", rec["rep"], label, rec["error"])
            continue
        groups.setdefault(key, []).append(rec["estimates"])
    rows = []
    for (delta, label, sampler), ests in groups.items():
        for name, truth in truths.items():
            pts = np.array([e[name]["point"] for e in ests])
            lo = np.array([e[name]["lower"] for e in ests])
            hi = np.array([e[name]["upper"] for e in ests])
            rows.append({
                "delta": delta,
                "delta_label": label,
                "sampler": sampler,
                "parameter": name,
                "truth": truth,
                "RB": float(np.mean(np.abs((pts - truth) / truth))),
                "RelBias": float((pts.mean() - truth) / truth),
                "RMSE": float(np.sqrt(np.mean((pts - truth) ** 2))),
                "length": float(np.mean(hi - lo)),
                "FCP": float(np.mean((lo <= truth) & (truth <= hi))),
                "N": int(pts.size),
            })
    timing = {s: float(np.mean(v)) for s, v in seconds.items()}
    return MetricsTable(rows, failures, timing, asdict(scenario))


def run_scenario(scenario: Scenario, workers: int | None = None) -> MetricsTable:
    """Run all replications (in a process pool when ``workers > 1``) and aggregate."""
    workers = max_workers() if workers is None else workers
    tasks = [(scenario, r) for r in range(scenario.N)]
    records: list[dict] = []
    if workers <= 1 or scenario.N == 1:
        for t in tasks:
            records.extend(_replication_task(t))
    else:
        with ProcessPoolExecutor(max_workers=min(workers, scenario.N)) as pool:
            for recs in pool.map(_replication_task, tasks, chunksize=max(1, scenario.N // (4 * workers))):
                records.extend(recs)
    return aggregate(scenario, records)
