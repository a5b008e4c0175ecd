"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line."""

import math
import time

import numpy as np
import pytest

from gammarul.conjugate import (
    AGMGParams,
    auto_hyperparams,
    jensen_gap,
    posterior_update_agg,
    posterior_update_agmg,
    recursive_update,
)
from gammarul.data import DegradationDataset, MeasurementGrid
from gammarul.lifetime import (
    bs_cdf,
    bs_params,
    lifetime_cdf_exact,
    mc_rul_predict,
    mttf,
    rul_mean,
    rul_quantile,
)
from gammarul.online import replay
from gammarul.samplers import PosteriorDraws, SamplerConfig, alpha_functional, beta_functional, sample_posterior, summarize
from gammarul.lifetime import mttf_functional, reliability_functional
from gammarul.simstudy import Scenario, run_scenario
from gammarul.specfun import (
    RngStream,
    digamma,
    log_gamma,
    reg_upper_inc_gamma,
    std_normal_cdf,
    std_normal_quantile,
    trigamma,
)

from conftest import random_dataset

SAMPLERS = ("gs", "dgs", "sir")


def within(name, value, lo, hi, failures):
    if not lo <= value <= hi:
        failures.append(f"{name}={value:.6g} outside [{lo:.6g}, {hi:.6g}]")


def test_criterion_1_laser_reproduction(laser, acceptance):
    # Bundled laser data are synthetic, so the widened alpha/beta bands apply.
    ref = {"alpha": (0.0258, 0.0366), "beta": (12.693, 18.332), "R(4500)": (0.740, 0.963)}
    bands = {"alpha": (0.024, 0.038), "beta": (12.0, 19.0), "R(4500)": (0.86, 0.90)}
    funcs = {"alpha": alpha_functional, "beta": beta_functional(0), "R(4500)": reliability_functional(4500.0, 10.0)}
    t0 = time.perf_counter()
    post = posterior_update_agg(auto_hyperparams(laser, 1.0), laser)
    failures, shown = [], []
    for s in SAMPLERS:
        draws = sample_posterior(post, s, SamplerConfig(), RngStream(0, 1))
        for name, f in funcs.items():
            e = summarize(draws, f)
            within(f"{s} {name} point", e.point, *bands[name], failures)
            for end, r in (("lower", ref[name][0]), ("upper", ref[name][1])):
                within(f"{s} {name} {end}", getattr(e, end), 0.9 * r, 1.1 * r, failures)
        shown.append(f"{s}: alpha={summarize(draws, alpha_functional).point:.4f}")
    elapsed = time.perf_counter() - t0
    within("runtime", elapsed, 0.0, 10.0, failures)
    acceptance(1, "laser reproduction", failures, f"{', '.join(shown)}, {elapsed:.2f} s")


def test_criterion_2_cross_sampler_agreement(acceptance):
    rng = np.random.default_rng(20)
    cfg = SamplerConfig(K=10_000)
    funcs = {"alpha": alpha_functional, "beta": beta_functional(0), "MTTF": mttf_functional(10.0)}
    t0 = time.perf_counter()
    worst, failures = 0.0, []
    for k in range(20):
        alpha, beta = rng.uniform(0.02, 0.05), rng.uniform(10.0, 25.0)
        data = random_dataset(rng, int(rng.integers(5, 16)), int(rng.integers(8, 17)), alpha, beta, 250.0)
        post = posterior_update_agg(auto_hyperparams(data, 1.0), data)
        means = {s: {n: float(np.mean(f(d.alpha, d.betas))) for n, f in funcs.items()}
                 for s in SAMPLERS for d in [sample_posterior(post, s, cfg, RngStream(k, 2))]}
        for n in funcs:
            for a in SAMPLERS:
                for b in SAMPLERS:
                    rel = abs(means[a][n] - means[b][n]) / abs(means[b][n])
                    worst = max(worst, rel)
                    if rel > 0.02:
                        failures.append(f"dataset {k} {n} {a} vs {b}: {rel:.4f}")
    elapsed = time.perf_counter() - t0
    within("runtime", elapsed, 0.0, 120.0, failures)
    acceptance(2, "cross-sampler agreement", failures, f"max rel diff {worst:.4f}, {elapsed:.1f} s")


def test_criterion_3_recursion_equals_batch(acceptance):
    rng = np.random.default_rng(3)
    t0 = time.perf_counter()
    worst, failures = 0.0, []
    for k in range(100):
        n, m = int(rng.integers(1, 11)), int(rng.integers(1, 31))
        spacing = rng.uniform(0.5, 5.0)
        data = random_dataset(rng, n, m, rng.uniform(0.2, 3.0), rng.uniform(0.5, 3.0, n), spacing)
        if k % 2:
            prior = AGMGParams.noninformative(n, spacing)
        else:
            lam = rng.uniform(1.0, 2.0, n)
            prior = AGMGParams.create(rng.uniform(0.5, 3), rng.uniform(0.5, 3), 0.5 * lam.min(), lam, spacing)
        state = prior
        for j in range(m):
            state = recursive_update(state, data.increments[:, j])
        batch = posterior_update_agmg(prior, data)
        pairs = [(state.delta1, batch.delta1), (state.delta2, batch.delta2), (state.log_omega, batch.log_omega)]
        pairs += list(zip(state.lambdas, batch.lambdas))
        for a, b in pairs:
            rel = abs(a - b) / max(abs(b), 1e-300)
            worst = max(worst, rel)
        if state.m != batch.m or worst > 1e-10:
            failures.append(f"fleet {k}: rel {worst:.2e}")
            break
    elapsed = time.perf_counter() - t0
    within("runtime", elapsed, 0.0, 5.0, failures)
    acceptance(3, "recursion equals batch", failures, f"max rel {worst:.1e}, {elapsed:.2f} s")


def test_criterion_4_jensen_gap(acceptance):
    rng = np.random.default_rng(4)
    t0 = time.perf_counter()
    failures, low = [], math.inf
    for _ in range(10_000):
        lags = rng.exponential(size=int(rng.integers(1, 30))) + 1e-3
        g = jensen_gap(MeasurementGrid.from_lags(lags))
        low = min(low, g)
        if g < -1e-12:
            failures.append(f"gap {g:.3e} on lags {lags}")
            break
    for m, l in ((1, 1.0), (7, 250.0), (30, 0.1)):
        g = jensen_gap(MeasurementGrid.regular(l, m))
        if g != 0.0:
            failures.append(f"equal grid ({m}, {l}) gap {g!r}")
    elapsed = time.perf_counter() - t0
    within("runtime", elapsed, 0.0, 1.0, failures)
    acceptance(4, "jensen gap", failures, f"min gap {low:.2e}, {elapsed:.2f} s")


def test_criterion_5_bs_approximation(acceptance):
    t0 = time.perf_counter()
    p = bs_params(0.031, 15.35, 10.0)
    t = np.linspace(0.2 * p.beta_star, 3.0 * p.beta_star, 20_001)
    gap = float(np.max(np.abs(bs_cdf(t, p) - lifetime_cdf_exact(t, 0.031, 15.35, 10.0))))
    failures = []
    within("max |BS - exact|", gap, 0.0, 0.02, failures)
    elapsed = time.perf_counter() - t0
    within("runtime", elapsed, 0.0, 1.0, failures)
    acceptance(5, "BS approximation", failures, f"max gap {gap:.4f}")


def test_criterion_6_simulation_study(acceptance):
    t0 = time.perf_counter()
    table = run_scenario(Scenario(N=500, deltas=[0], samplers=list(SAMPLERS)))
    elapsed = time.perf_counter() - t0
    failures, shown = [], []
    if table.failures:
        failures.append(f"failed fits {table.failures}")
    for s in SAMPLERS:
        sel = lambda metric, par: table.select(metric, par, s, 0.0)
        within(f"{s} RB(alpha)", sel("RB", "alpha"), 0.0245 - 0.006, 0.0245 + 0.006, failures)
        within(f"{s} RB(beta)", sel("RB", "beta"), 0.0256 - 0.006, 0.0256 + 0.006, failures)
        within(f"{s} FCP(R)", sel("FCP", "R(4500)"), 0.92, 0.975, failures)
        within(f"{s} FCP(MTTF)", sel("FCP", "MTTF"), 0.92, 0.975, failures)
        within(f"{s} length(alpha)", sel("length", "alpha"), 0.0109 - 0.0015, 0.0109 + 0.0015, failures)
        within(f"{s} RMSE(alpha)", sel("RMSE", "alpha"), 0.75 * 0.0030, 1.25 * 0.0030, failures)
        shown.append(f"{s} RB(alpha)={sel('RB', 'alpha'):.4f} RB(beta)={sel('RB', 'beta'):.4f} "
                     f"RelBias(alpha)={sel('RelBias', 'alpha'):.4f} RelBias(beta)={sel('RelBias', 'beta'):.4f} "
                     f"RMSE(alpha)={sel('RMSE', 'alpha'):.5f} FCP(R)={sel('FCP', 'R(4500)'):.3f}")
    within("runtime", elapsed, 0.0, 900.0, failures)
    acceptance(6, "simulation study at N=500", failures, f"{'; '.join(shown)}; {elapsed:.0f} s")


def test_criterion_7_speed(laser, acceptance):
    post = posterior_update_agg(auto_hyperparams(laser, 0.0), laser)
    cfg = SamplerConfig(K=1000, M=10_000)
    times = {}
    for s in SAMPLERS:
        sample_posterior(post, s, cfg, RngStream(0))
        runs = []
        for k in range(3 if s == "gs" else 10):
            t0 = time.perf_counter()
            sample_posterior(post, s, cfg, RngStream(k))
            runs.append(time.perf_counter() - t0)
        times[s] = float(np.median(runs))
    failures = []
    within("dgs seconds", times["dgs"], 0.0, 0.05, failures)
    within("sir seconds", times["sir"], 0.0, 0.05, failures)
    within("gs seconds", times["gs"], 0.0, 5.0, failures)
    acceptance(7, "speed", failures, ", ".join(f"{s} {1e3 * v:.1f} ms" for s, v in times.items()))


def test_criterion_8_online_coverage(wheel, acceptance):
    res = replay(wheel, 60.0, start=2, sampler="dgs", seed=0)
    rows = [r for r in res.rows if r["true_rul"] is not None]
    covered = sum(r["lower"] <= r["true_rul"] <= r["upper"] for r in rows)
    frac = covered / len(rows)
    failures = []
    within("coverage", frac, 0.90, 1.0, failures)
    acceptance(8, "online replay coverage", failures,
               f"{covered}/{len(rows)} epochs of units {', '.join(sorted(res.failure_times, key=int))}")


def test_criterion_9_identities(acceptance):
    t0 = time.perf_counter()
    failures = []

    def near(name, got, want, tol):
        if not abs(got - want) <= tol:
            failures.append(f"{name}: {got!r} vs {want!r}")

    # Special functions, to the ten digits quoted.
    near("lnG(1)", log_gamma(1.0), 0.0, 1e-12)
    near("lnG(0.5)", log_gamma(0.5), 0.5723649429, 1e-10)
    near("lnG(10)", log_gamma(10.0), 12.8018274801, 1e-10)
    near("psi(1)", digamma(1.0), -0.5772156649, 1e-10)
    near("psi1(1)", trigamma(1.0), 1.6449340668, 1e-10)
    near("Q(1,1)", reg_upper_inc_gamma(1.0, 1.0), 0.3678794412, 1e-10)
    near("Q(2.5,0)", reg_upper_inc_gamma(2.5, 0.0), 1.0, 0.0)
    near("Q(2,1)", reg_upper_inc_gamma(2.0, 1.0), 0.7357588823, 1e-10)
    near("Phi(0)", std_normal_cdf(0.0), 0.5, 1e-12)
    near("Phi^-1(0.975)", std_normal_quantile(0.975), 1.9599639845, 1e-10)
    near("inverse pair", std_normal_quantile(std_normal_cdf(1.234)), 1.234, 1e-9)
    a, b = RngStream(7, 3), RngStream(7, 3)
    if not np.array_equal(a.generator.random(100), b.generator.random(100)):
        failures.append("RngStream replay")

    # Lifetime quantities, to the digits quoted.
    near("F(1)", float(lifetime_cdf_exact(1.0, 1.0, 1.0, 1.0)), 0.3678794, 5e-8)
    near("F(0+)", float(lifetime_cdf_exact(1e-12, 1.0, 1.0, 1.0)), 0.0, 1e-10)
    near("F(inf)", float(lifetime_cdf_exact(1e6, 1.0, 1.0, 1.0)), 1.0, 1e-12)
    near("F(2)", float(lifetime_cdf_exact(2.0, 1.0, 1.0, 1.0)), 0.7357589, 5e-8)
    p = bs_params(0.031, 15.35, 10.0)
    near("alpha*", p.alpha_star, 1.0 / math.sqrt(153.5), 1e-15)
    near("alpha* digits", p.alpha_star, 0.0807134, 5e-8)
    near("beta*", p.beta_star, 4951.61, 5e-3)
    near("median", bs_cdf(p.beta_star, p), 0.5, 1e-15)
    near("mttf laser", float(mttf(0.031, 15.35, 10.0)), 4967.742, 5e-4)
    near("mttf small", float(mttf(0.5, 1.0, 1.0)), 3.0, 1e-15)
    near("mttf = rul_mean(Y=0)", float(mttf(0.031, 15.35, 10.0)), rul_mean(0.031, 15.35, 10.0, 0.0), 1e-12)
    near("rul_mean", rul_mean(0.031, 15.35, 10.0, 5.0), 2491.935, 5e-4)
    near("rul_mean limit", rul_mean(0.031, 15.35, 10.0, 10.0 - 1e-12), 1 / 0.062, 1e-6)
    near("rul median", rul_quantile(0.031, 15.35, 10.0, 5.0, 0.5), 15.35 * 5.0 / 0.031, 1e-9)
    q = [rul_quantile(0.031, 15.35, 10.0, 5.0, r) for r in (0.025, 0.5, 0.975)]
    pr = bs_params(0.031, 15.35, 5.0)
    for r, v in zip((0.025, 0.5, 0.975), q):
        near(f"cdf(q({r}))", bs_cdf(v, pr), r, 1e-9)
    if not q[0] < q[1] < q[2]:
        failures.append("quantile ordering")
    atom = PosteriorDraws(np.full(5, 0.031), np.full((5, 1), 15.35), "atom")
    pred = mc_rul_predict(atom, 0, 10.0, 5.0)
    near("atom point", pred.point, rul_mean(0.031, 15.35, 10.0, 5.0), 1e-9)
    near("atom lower", pred.lower, rul_quantile(0.031, 15.35, 10.0, 5.0, 0.025), 1e-9)
    near("atom upper", pred.upper, rul_quantile(0.031, 15.35, 10.0, 5.0, 0.975), 1e-9)
    elapsed = time.perf_counter() - t0
    within("runtime", elapsed, 0.0, 1.0, failures)
    acceptance(9, "special-function and lifetime identities", failures, f"{elapsed * 1e3:.0f} ms")
