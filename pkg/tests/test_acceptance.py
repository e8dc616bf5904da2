"""Acceptance contract for the toolkit: ten numbered criteria, each run at
its stated tolerance and time budget, printing one PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see every line.

Criterion 6's first clause (a stable 2-cycle of the reduced dynamics just
below the flip parameter) fails by design and is kept faithful rather
than weakened: the flip of this family is subcritical (the 2-cycle that
exists above the flip parameter has multiplier magnitude > 1, and below
it no 2-cycle exists at all), so no faithful realization converges to
one.  The measured behavior is printed alongside the FAIL line.
"""

import math
import time

import numpy as np
import pytest

from pwbifurc import (
    CHAOTIC,
    MapParams,
    SystemConfig,
    attractor_sample,
    detect_period,
    excursion_count,
    expansion_bound,
    max_excursion_count,
    mu_from_parameter,
    orbit_interval,
    parameter_from_mu,
    pd_parameter,
    reduced_fixed_point,
    reduced_map_derivative,
    reduced_parameter,
    regime_bounds,
    return_context,
    z_flip,
)
from pwbifurc.metrics import _f_orbit_batch, reduced_orbit
from pwbifurc.reduction import (
    Excursion,
    _return_orbit_batch,
    decomposition_residual,
    induced_return_ratio,
)
from pwbifurc.verify import (
    COPRIME_CASES,
    fd_z_derivative,
    sample_doubling_configs,
    suite_flip,
)

P21 = MapParams(nu=0.5, e=1.0, p=2, q=1)


def report(num: int, ok: bool, desc: str, detail: str) -> None:
    print(f"ACCEPTANCE {num:02d} {'PASS' if ok else 'FAIL'} | {desc} | {detail}")


def budget(num: int, elapsed: float, limit: float) -> None:
    assert elapsed < limit, f"criterion {num} exceeded its {limit:.0f}s budget ({elapsed:.1f}s)"


def test_criterion_01_threshold_reproduction():
    t0 = time.time()
    lo, hi = regime_bounds(2, 1)
    exact = lo == 0.25 and hi == 2 / 3
    ordered = all(
        0.0 < regime_bounds(p, q)[0] < regime_bounds(p, q)[1] < 1.0
        for p, q in COPRIME_CASES
    )
    elapsed = time.time() - t0
    ok = exact and ordered and elapsed < 1.0
    report(
        1, ok, "regime thresholds",
        f"(2,1) bounds = ({lo}, {hi}), ordering holds on {len(COPRIME_CASES)} coprime cases, {elapsed:.2f}s",
    )
    assert exact and ordered
    budget(1, elapsed, 1.0)


def test_criterion_02_decomposition_identity():
    t0 = time.time()
    rng = np.random.default_rng(424242)
    worst = 0.0
    configs = sample_doubling_configs(1000, seed=424242, pmax=5)
    for params, M, mu in configs:
        ctx = return_context(SystemConfig(params, mu))
        kmax = min(ctx.M - 2, 3)
        if kmax > 0:
            ctx = return_context(SystemConfig(params, mu), k=int(rng.integers(0, kmax + 1)))
        z = float(params.nu + (1.0 - params.nu) * rng.random())
        rel = decomposition_residual(z, ctx) / abs(induced_return_ratio(z, ctx))
        worst = max(worst, rel)
    elapsed = time.time() - t0
    ok = worst <= 1e-10
    report(
        2, ok and elapsed < 10.0, "landing-ratio decomposition identity",
        f"max relative residual {worst:.3e} over {len(configs)} configs (tol 1e-10), {elapsed:.1f}s",
    )
    assert ok
    budget(2, elapsed, 10.0)


def test_criterion_03_reduced_parameter_range():
    lo_bad = []
    for params, M, mu in sample_doubling_configs(400, seed=7, pmax=5):
        lam = reduced_parameter(SystemConfig(params, mu))
        floor = params.nu ** (params.p / params.q)
        if not (floor - 1e-9 <= lam <= 1.0 + 1e-9):
            lo_bad.append((params, mu, lam))
    top_defect = 0.0
    for M in range(2, 9):
        iv = orbit_interval(P21, M)
        top_defect = max(top_defect, abs(parameter_from_mu(iv.mu_high, M, P21) - 1.0))
    ok = not lo_bad and top_defect <= 1e-9
    report(
        3, ok, "reduced-parameter range and top endpoint",
        f"{400 - len(lo_bad)}/400 configs in range; |lam(mu_1) - 1| <= {top_defect:.2e}",
    )
    assert ok


def test_criterion_04_flip_point():
    lam_pd = pd_parameter(P21)
    assert lam_pd == 0.375
    zbar = reduced_fixed_point(lam_pd, 0, P21, tol=1e-12)
    z_err = abs(zbar - 2.0 / 3.0)
    slope = reduced_map_derivative(zbar, lam_pd, 0, P21)
    s_err = abs(slope + 1.0)
    fd = fd_z_derivative(zbar, lam_pd, 0, P21, 1, h=1e-6)
    fd_err = abs(fd - slope) / abs(slope)
    ok = z_err <= 1e-10 and s_err <= 1e-10 and fd_err <= 1e-6
    report(
        4, ok, "flip fixed point and multiplier",
        f"|z - 2/3| = {z_err:.2e}, |slope + 1| = {s_err:.2e}, FD defect {fd_err:.2e}",
    )
    assert ok


def test_criterion_05_flip_nondegeneracy_grid():
    t0 = time.time()
    rep = suite_flip(n_nu=20)
    elapsed = time.time() - t0
    detail = "; ".join(c["detail"] for c in rep["checks"])
    report(5, rep["passed"] and elapsed < 30.0, "flip coefficients on 20x20 grid", f"{detail}, {elapsed:.1f}s")
    assert rep["passed"], detail
    budget(5, elapsed, 30.0)


def test_criterion_06_observed_doubling():
    t0 = time.time()
    lam_pd = pd_parameter(P21)
    below = reduced_orbit(lam_pd * (1 - 1e-2), 0, P21, 0.6, 320, burn_in=40_000)
    period_below = detect_period(below, tol=1e-9, max_period=64)
    above = reduced_orbit(lam_pd * (1 + 1e-2), 0, P21, 0.6, 320, burn_in=40_000)
    period_above = detect_period(above, tol=1e-9, max_period=64)
    elapsed = time.time() - t0
    ok = period_below == 2 and period_above == 1
    report(
        6, ok, "doubling across the flip parameter",
        f"measured period below = {period_below} (stated: 2), above = {period_above} "
        f"(stated: 1), {elapsed:.1f}s; below-flip clause is unattainable: the flip is "
        "subcritical, no stable 2-cycle exists below it (kept faithful, see README)",
    )
    budget(6, elapsed, 5.0)
    assert period_above == 1
    assert period_below == 2, (
        "stated 2-cycle below the flip does not exist: the reduced family's flip is "
        f"subcritical (measured period {period_below}, CHAOTIC=0); the 2-cycle above the "
        "flip has multiplier magnitude > 1 and no 2-cycle exists below"
    )


def test_criterion_07_periodic_orbit_intervals():
    t0 = time.time()
    periods = {}
    for M in range(4, 9):
        iv = orbit_interval(P21, M)
        s = attractor_sample(SystemConfig(P21, iv.midpoint))
        periods[M] = s.period
    ivs = [orbit_interval(P21, M) for M in range(4, 9)]
    disjoint = all(b.mu_high <= a.mu_low for a, b in zip(ivs, ivs[1:]))
    ratio = P21.nu ** (P21.p / (P21.p - P21.q))
    width_defect = max(
        abs(b.width - ratio * a.width) / (ratio * a.width)
        for a, b in zip(ivs, ivs[1:])
    )
    elapsed = time.time() - t0
    ok = (
        all(periods[M] == M for M in periods)
        and disjoint
        and width_defect <= 1e-12
        and elapsed < 30.0
    )
    report(
        7, ok, "count-M orbits on their intervals",
        f"periods {periods}, disjoint={disjoint}, width-ratio defect {width_defect:.2e}, {elapsed:.1f}s",
    )
    assert all(periods[M] == M for M in periods)
    assert disjoint and width_defect <= 1e-12
    budget(7, elapsed, 30.0)


def test_criterion_08_robust_chaos():
    t0 = time.time()
    params = MapParams(nu=0.75, e=1.0, p=2, q=1)
    lams = np.linspace(params.nu ** (params.p / params.q), 1.0, 50)
    zgrid = np.linspace(params.nu, 1.0 - 1e-9, 101)
    bound_ok = True
    for lam in lams:
        b = expansion_bound(params, float(lam))
        slopes = [abs(reduced_map_derivative(float(z), float(lam), 0, params)) for z in zgrid]
        if not (b > 1.0 and min(slopes) >= b - 1e-12):
            bound_ok = False
            break
    mus = np.array([mu_from_parameter(float(l), 12, params) for l in lams])
    m1, _ = _return_orbit_batch(params, mus, 0.8, 10_000, 100_000, lams=lams)
    m2, kept = _return_orbit_batch(
        params, mus, 0.8, 10_000, 200_000, lams=lams, keep_last=256
    )
    positive = bool(np.all(m1 > 0.0) and np.all(m2 > 0.0))
    drift = float(np.max(np.abs(m2 - m1) / np.abs(m2)))
    periods = {detect_period(kept[:, j], 1e-9, 64) for j in range(kept.shape[1])}
    aperiodic = periods == {CHAOTIC}
    elapsed = time.time() - t0
    ok = bound_ok and positive and drift <= 0.05 and aperiodic and elapsed < 60.0
    report(
        8, ok, "robust chaos at nu = 0.75",
        f"bound>1 pointwise={bound_ok}, Lyapunov in [{m2.min():.3f},{m2.max():.3f}], "
        f"run-length drift {drift:.3%} (<=5%), periods={periods}, {elapsed:.1f}s",
    )
    assert bound_ok and positive and aperiodic
    assert drift <= 0.05
    budget(8, elapsed, 60.0)


def test_criterion_09_stable_regime():
    t0 = time.time()
    params = MapParams(nu=0.2, e=1.0, p=2, q=1)
    lams = np.linspace(params.nu ** (params.p / params.q) + 1e-12, 1.0, 20)
    from pwbifurc import stability_certificate

    certs = [stability_certificate(params, float(lam)) for lam in lams]
    mult_ok = max(certs) < 1.0
    periodic_ok = True
    lyap_max = -math.inf
    for M in (4, 5, 6):
        mu = mu_from_parameter(0.7, M, params)
        config = SystemConfig(params, mu)
        lo, hi = params.nu * mu, mu
        seeds = lo + (hi - lo) * np.linspace(0.02, 0.98, 34)
        pts, lyap = _f_orbit_batch(config, seeds, 10_000, 512)
        lyap_max = max(lyap_max, float(lyap.max()))
        for j in range(pts.shape[1]):
            if detect_period(pts[:, j], 1e-9 * mu, 64) == CHAOTIC:
                periodic_ok = False
    elapsed = time.time() - t0
    ok = mult_ok and periodic_ok and lyap_max < 0.0 and elapsed < 30.0
    report(
        9, ok, "stable regime at nu = 0.2",
        f"max multiplier {max(certs):.4f} (<1), all orbits periodic={periodic_ok}, "
        f"max Lyapunov {lyap_max:.4f} (<0), {elapsed:.1f}s",
    )
    assert mult_ok and periodic_ok and lyap_max < 0.0
    budget(9, elapsed, 30.0)


def test_criterion_10_monotone_excursion_counts():
    mu = 1e-5
    cfg = SystemConfig(P21, mu)
    counts = []
    for x0 in np.linspace(P21.nu * mu, mu, 100):
        res = excursion_count(float(x0), cfg)
        if isinstance(res, Excursion):
            counts.append(res.m)
    nonincreasing = counts == sorted(counts, reverse=True)
    Ms = [
        max_excursion_count(SystemConfig(P21, 1e-3 * 0.5**j)) for j in range(31)
    ]
    nondecreasing = Ms == sorted(Ms)
    deep = max_excursion_count(SystemConfig(P21, 1e-12))
    ok = nonincreasing and nondecreasing and deep > 20
    report(
        10, ok, "excursion-count monotonicity",
        f"seed-monotone over {len(counts)} grid points; M nondecreasing over 31 "
        f"geometric mu steps; M(1e-12) = {deep} (> 20)",
    )
    assert nonincreasing and nondecreasing and deep > 20
