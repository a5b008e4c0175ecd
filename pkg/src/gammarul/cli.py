"""``gammarul`` command-line interface.

Subcommands
-----------
fit             posterior estimates of alpha, beta (or beta_i), R(t) and MTTF
replay          epoch-by-epoch online RUL prediction for a fleet
simulate        Monte Carlo study from a JSON scenario
interp-failure  linearly interpolated threshold-crossing times
export-density  unnormalized AGG density on an (alpha, beta) grid

Exit codes: 0 success, 2 configuration error, 3 data validation error,
4 numerical or properness error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .conjugate import (
    AGGParams,
    agg_log_density,
    auto_hyperparams,
    auto_hyperparams_agmg,
    params_from_json,
    params_to_json,
    posterior_update_agg,
    posterior_update_agmg,
)
from .data import MeasurementGrid, read_long_csv
from .errors import ConfigurationError, GammaRulError, NotFailedError
from .lifetime import mttf_functional, reliability_functional
from .online import interpolate_failure_time, replay
from .samplers import SAMPLERS, SamplerConfig, alpha_functional, beta_functional, sample_posterior, summarize
from .simstudy import Scenario, run_scenario
from .specfun import RngStream

log = logging.getLogger("gammarul")

REPORT_SCHEMA = 1
FIT_STREAM = 1


def _digest(path: str | Path) -> str:
    return "sha256:" + hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _sampler_config(args) -> SamplerConfig:
    return SamplerConfig(args.draws, args.pool, args.burn_in, args.thin, args.level)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _add_sampling(p: argparse.ArgumentParser, sampler_choices) -> None:
    p.add_argument("--sampler", choices=sampler_choices, default="dgs")
    p.add_argument("--draws", type=int, default=1000, help="posterior draws K")
    p.add_argument("--pool", type=int, default=10_000, help="grid size (DGS) or pool size (SIR) M")
    p.add_argument("--burn-in", type=int, default=1000)
    p.add_argument("--thin", type=int, default=2)
    p.add_argument("--level", type=float, default=0.95)
    p.add_argument("--seed", type=int, default=0)


def cmd_fit(args) -> int:
    cfg = _sampler_config(args)
    data = read_long_csv(args.data)
    if args.threshold <= 0:
        raise ConfigurationError("threshold must be positive")
    t0 = time.perf_counter()
    if args.hetero:
        d2 = args.delta / data.n if args.delta2 is None else args.delta2
        post = posterior_update_agmg(auto_hyperparams_agmg(data, args.delta, d2), data)
    else:
        post = posterior_update_agg(auto_hyperparams(data, args.delta), data)
    draws = sample_posterior(post, args.sampler, cfg, RngStream(args.seed, FIT_STREAM))
    t_sample = time.perf_counter() - t0

    n_beta = data.n if args.hetero else 1
    funcs = {"alpha": alpha_functional}
    for i in range(n_beta):
        sfx = f"_{data.unit_ids[i]}" if args.hetero else ""
        funcs["beta" + sfx] = beta_functional(i)
        for t in args.reliability_at:
            funcs[f"R({t:g}){sfx}"] = reliability_functional(t, args.threshold, i, exact=args.exact)
        funcs["MTTF" + sfx] = mttf_functional(args.threshold, i)
    estimates = {k: summarize(draws, f, cfg.rho).as_dict() for k, f in funcs.items()}

    report = {
        "schema_version": REPORT_SCHEMA,
        "gammarul_version": __version__,
        "command": ["gammarul"] + list(args.argv),
        "config": {
            "data": str(args.data),
            "threshold": args.threshold,
            "delta": args.delta,
            "delta2": d2 if args.hetero else None,
            "hetero": args.hetero,
            "sampler": args.sampler,
            "K": cfg.K,
            "M": cfg.M,
            "burn_in": cfg.burn_in,
            "thin": cfg.thin,
            "level": cfg.level,
            "reliability_at": list(args.reliability_at),
            "exact_reliability": args.exact,
        },
        "seed": args.seed,
        "input_digest": _digest(args.data),
        "data": {"n": data.n, "m": data.m, "unit_ids": list(data.unit_ids), "epochs": data.grid.epochs.tolist()},
        "posterior": params_to_json(post),
        "estimates": estimates,
        "diagnostics": {k: (float(v) if isinstance(v, (int, float, np.floating)) else v)
                        for k, v in draws.diagnostics.items()},
        "timing": {"fit_seconds": t_sample},
    }
    if args.draws_out:
        draws.to_csv(args.draws_out)
    _emit(json.dumps(report, indent=2) + "\n", args.out)
    return 0


def cmd_replay(args) -> int:
    cfg = _sampler_config(args)
    data = read_long_csv(args.data)
    if args.threshold <= 0:
        raise ConfigurationError("threshold must be positive")
    res = replay(data, args.threshold, args.delta1, args.delta2, args.start_epoch, args.sampler, cfg, args.seed)
    _emit(res.trajectory_csv(), args.out)
    params_out = args.params_out
    if params_out is None and args.out:
        p = Path(args.out)
        params_out = str(p.with_name(p.stem + "_params.csv"))
    if params_out:
        Path(params_out).write_text(res.params_csv())
    for uid, ft in res.failure_times.items():
        log.info("unit %s crosses the threshold at %.3f", uid, ft)
    return 0


def cmd_simulate(args) -> int:
    scenario = Scenario.from_json(args.config)
    if args.replications is not None:
        scenario.N = args.replications
    table = run_scenario(scenario, workers=args.workers)
    for p in table.write(args.out):
        log.info("wrote %s", p)
    if table.failures:
        log.warning("failed fits: %s", table.failures)
    return 0


def cmd_interp_failure(args) -> int:
    data = read_long_csv(args.data)
    if args.threshold <= 0:
        raise ConfigurationError("threshold must be positive")
    lines = ["unit_id,failure_time"]
    for i, uid in enumerate(data.unit_ids):
        try:
            ft = interpolate_failure_time(data.cumulative[i], data.grid, args.threshold)
            lines.append(f"{uid},{ft:.6f}")
        except NotFailedError:
            lines.append(f"{uid},not failed")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _density_params(args) -> AGGParams:
    if args.params:
        p = params_from_json(Path(args.params).read_text())
        if not isinstance(p, AGGParams):
            raise ConfigurationError("export-density needs AGG parameters")
        return p
    if None in (args.delta, args.omega, args.lam):
        raise ConfigurationError("give --params FILE or all of --delta, --omega, --lam")
    grid = MeasurementGrid.regular(args.spacing, args.m)
    return AGGParams.create(args.delta, args.omega, args.lam, grid)


def cmd_export_density(args) -> int:
    p = _density_params(args)
    if args.grid_points < 2:
        raise ConfigurationError("--grid-points must be at least 2")
    a_lo, a_hi = args.alpha_range
    b_lo, b_hi = args.beta_range
    if not (0 < a_lo < a_hi and 0 < b_lo < b_hi):
        raise ConfigurationError("ranges must be positive and increasing")
    alphas = np.linspace(a_lo, a_hi, args.grid_points)
    betas = np.linspace(b_lo, b_hi, args.grid_points)
    A, B = np.meshgrid(alphas, betas, indexing="ij")
    logd = agg_log_density(p, A, B)
    dens = np.exp(logd - logd.max())
    lines = ["alpha,beta,log_density,density"]
    for i in range(alphas.size):
        for j in range(betas.size):
            lines.append(f"{alphas[i]:.8g},{betas[j]:.8g},{logd[i, j]:.10g},{dens[i, j]:.10g}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gammarul", description="Conjugate Bayesian gamma-process degradation analysis.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit the AGG (or AGMG) posterior and report estimates")
    p.add_argument("--data", required=True)
    p.add_argument("--threshold", type=float, required=True)
    p.add_argument("--delta", type=float, default=0.0, help="prior weight in measurement equivalents")
    p.add_argument("--delta2", type=float, default=None, help="AGMG rate weight (default delta / n)")
    p.add_argument("--hetero", action="store_true", help="unit-specific rates (AGMG)")
    _add_sampling(p, SAMPLERS)
    p.add_argument("--reliability-at", type=float, action="append", default=[], metavar="T")
    p.add_argument("--exact", action="store_true", help="exact incomplete-gamma reliability")
    p.add_argument("--draws-out", default=None, help="also write the posterior draws as CSV")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("replay", help="online RUL prediction, one epoch at a time")
    p.add_argument("--data", required=True)
    p.add_argument("--threshold", type=float, required=True)
    p.add_argument("--start-epoch", type=int, default=2)
    p.add_argument("--delta1", type=float, default=0.0)
    p.add_argument("--delta2", type=float, default=0.0)
    _add_sampling(p, ("dgs", "sir"))
    p.add_argument("--out", default=None, help="trajectory CSV")
    p.add_argument("--params-out", default=None, help="parameter-track CSV (default <out>_params.csv)")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("simulate", help="Monte Carlo study from a JSON scenario")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--replications", type=int, default=None, help="override N")
    p.add_argument("--workers", type=int, default=None, help="process count (default GAMMARUL_THREADS or CPUs)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("interp-failure", help="interpolated threshold-crossing times")
    p.add_argument("--data", required=True)
    p.add_argument("--threshold", type=float, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_interp_failure)

    p = sub.add_parser("export-density", help="AGG density grid for plotting")
    p.add_argument("--params", default=None, help="AGG parameter JSON")
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--omega", type=float, default=None)
    p.add_argument("--lam", type=float, default=None)
    p.add_argument("--spacing", type=float, default=1.0)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--grid-points", type=int, default=101)
    p.add_argument("--alpha-range", type=float, nargs=2, default=(0.05, 5.0), metavar=("LO", "HI"))
    p.add_argument("--beta-range", type=float, nargs=2, default=(0.05, 5.0), metavar=("LO", "HI"))
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_export_density)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    args.argv = argv
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except GammaRulError as exc:
        print(f"gammarul {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"gammarul {args.command}: {exc}", file=sys.stderr)
        return ConfigurationError.exit_code


if __name__ == "__main__":
    sys.exit(main())
