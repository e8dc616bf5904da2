"""Named verification suites behind the `verify` CLI command.

Each suite exercises one family of closed-form claims against an
independent route (direct iteration, finite differences, long-run
simulation) and reports per-check pass/fail lines.  The heavyweight
acceptance versions of these runs live in the test suite; the CLI
defaults are sized for interactive use and can be lightened further with
quick=True.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .bifurcation import (
    classify_regime,
    expansion_bound,
    mu_from_parameter,
    orbit_interval,
    parameter_from_mu,
    pd_parameter,
    regime_bounds,
    stability_certificate,
    z_flip,
    flip_coefficients,
)
from .map_core import MapParams, SystemConfig
from .metrics import CHAOTIC, _f_orbit_batch, detect_period
from .reduction import (
    _return_orbit_batch,
    decomposition_residual,
    induced_return_ratio,
    reduced_map,
    reduced_map_derivative,
    return_context,
)

COPRIME_CASES = [
    (p, q)
    for p in range(2, 10)
    for q in range(1, p)
    if math.gcd(p, q) == 1
]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _report(suite: str, checks: list[CheckResult]) -> dict:
    return {
        "suite": suite,
        "passed": all(c.passed for c in checks),
        "checks": [asdict(c) for c in checks],
    }


# ---------------------------------------------------------------------------
# finite-difference cross-checks (shared with the test suite)
# ---------------------------------------------------------------------------


def fd_z_derivative(z, lam, k, params, order=1, h=None):
    """Central finite differences of the reduced map in z, orders 1-3.

    Default steps scale with the distance to the z = 1 singularity, where
    higher derivatives of the power law blow up.
    """
    f = lambda zz: reduced_map(zz, lam, k, params)
    if order == 1:
        h = h if h is not None else 1e-6 * (1.0 - z)
        return (f(z + h) - f(z - h)) / (2 * h)
    if order == 2:
        h = h if h is not None else 1e-4 * (1.0 - z)
        return (f(z + h) - 2 * f(z) + f(z - h)) / h**2
    if order == 3:
        h = h if h is not None else 1e-3 * (1.0 - z)
        return (f(z + 2 * h) - 2 * f(z + h) + 2 * f(z - h) - f(z - 2 * h)) / (2 * h**3)
    raise ValueError(order)


def fd_lambda_derivative(z, lam, k, params, h=None):
    h = h if h is not None else 1e-6 * lam
    f = lambda ll: reduced_map(z, ll, k, params)
    return (f(lam + h) - f(lam - h)) / (2 * h)


def fd_mixed_derivative(z, lam, k, params, hz=None, hl=None):
    hz = hz if hz is not None else 1e-5 * (1.0 - z)
    hl = hl if hl is not None else 1e-5 * lam
    f = lambda zz, ll: reduced_map(zz, ll, k, params)
    return (
        f(z + hz, lam + hl) - f(z + hz, lam - hl)
        - f(z - hz, lam + hl) + f(z - hz, lam - hl)
    ) / (4 * hz * hl)


def sample_doubling_configs(n: int, seed: int = 94251, pmax: int = 5):
    """Deterministic random (params, M, mu) triples in the doubling regime
    with mu drawn inside the count-M orbit interval."""
    rng = np.random.default_rng(seed)
    cases = [(p, q) for (p, q) in COPRIME_CASES if p <= pmax]
    out = []
    while len(out) < n:
        p, q = cases[rng.integers(len(cases))]
        lo, hi = regime_bounds(p, q)
        nu = lo + (0.05 + 0.9 * rng.random()) * (hi - lo)
        params = MapParams(nu=float(nu), e=1.0, p=p, q=q)
        M = int(rng.integers(2, 9))
        lam_pd = pd_parameter(params)
        lam = lam_pd + (1.0 - lam_pd) * (0.02 + 0.96 * rng.random())
        mu = mu_from_parameter(lam, M, params)
        config = SystemConfig(params, mu)
        if config.is_well_posed:
            out.append((params, M, mu))
    return out


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------


def suite_identity(n_configs: int = 300, seed: int = 94251, quick: bool = False) -> dict:
    """Exact split of the induced landing ratio, and the range of the
    reduced parameter, over randomized well-posed configurations."""
    if quick:
        n_configs = min(n_configs, 60)
    rng = np.random.default_rng(seed + 1)
    worst = 0.0
    lam_ok = True
    lam_bad = ""
    for params, M, mu in sample_doubling_configs(n_configs, seed=seed):
        config = SystemConfig(params, mu)
        ctx = return_context(config)
        kmax = min(ctx.M - 2, 3)
        if kmax > 0:
            ctx = return_context(config, k=int(rng.integers(0, kmax + 1)))
        lo = params.nu ** (params.p / params.q)
        if not (lo - 1e-9 <= ctx.lam <= 1.0 + 1e-9):
            lam_ok = False
            lam_bad = f"lam={ctx.lam!r} outside [{lo!r},1] at mu={mu!r}"
        for _ in range(3):
            z = params.nu + (1.0 - params.nu) * rng.random()
            resid = decomposition_residual(z, ctx)
            scale = abs(induced_return_ratio(z, ctx))
            worst = max(worst, resid / max(scale, 1e-30))
    checks = [
        CheckResult(
            "decomposition_residual",
            worst <= 1e-10,
            f"max relative residual {worst:.3e} over {n_configs} configs (tol 1e-10)",
        ),
        CheckResult(
            "reduced_parameter_range",
            lam_ok,
            lam_bad or "all reduced parameters within [nu**(p/q)-1e-9, 1+1e-9]",
        ),
    ]
    return _report("identity", checks)


def suite_intervals(params: MapParams | None = None, M_lo: int = 3, M_hi: int = 10) -> dict:
    """Disjointness, geometric widths, and endpoint recurrences of the
    orbit intervals."""
    params = params or MapParams(nu=0.5, e=1.0, p=2, q=1)
    ratio = params.nu ** (params.p / (params.p - params.q))
    ivs = {M: orbit_interval(params, M) for M in range(M_lo, M_hi + 1)}
    disjoint = all(
        ivs[M + 1].mu_high <= ivs[M].mu_low + 1e-15 * ivs[M].mu_low
        for M in range(M_lo, M_hi)
    )
    width_rel = max(
        abs(ivs[M + 1].width - ratio * ivs[M].width) / (ratio * ivs[M].width)
        for M in range(M_lo, M_hi)
    )
    rec_rel = max(
        max(
            abs(ivs[M + 1].mu_low - ratio * ivs[M].mu_low) / (ratio * ivs[M].mu_low),
            abs(ivs[M + 1].mu_high - ratio * ivs[M].mu_high) / (ratio * ivs[M].mu_high),
        )
        for M in range(M_lo, M_hi)
    )
    roundtrip = max(
        abs(parameter_from_mu(mu_from_parameter(lam, M, params), M, params) - lam)
        for M in range(M_lo, M_hi + 1)
        for lam in np.linspace(pd_parameter(params), 1.0, 7)[1:]
    )
    checks = [
        CheckResult("disjoint", disjoint, f"I_{M_hi}..I_{M_lo} pairwise disjoint"),
        CheckResult(
            "width_ratio",
            width_rel <= 1e-12,
            f"max relative defect of width ratio nu**(p/(p-q)): {width_rel:.3e}",
        ),
        CheckResult(
            "endpoint_recurrence",
            rec_rel <= 1e-12,
            f"max relative defect of endpoint recurrences: {rec_rel:.3e}",
        ),
        CheckResult(
            "parameter_roundtrip",
            roundtrip <= 1e-9,
            f"max |parameter_from_mu(mu_from_parameter(lam)) - lam| = {roundtrip:.3e}",
        ),
    ]
    return _report("intervals", checks)


def suite_flip(n_nu: int = 20, quick: bool = False) -> dict:
    """Flip coefficients: nonzero k1, negative k2 in both conventions, and
    finite-difference agreement of the analytic partials."""
    cases = [c for c in COPRIME_CASES][:20]
    if quick:
        cases = cases[:6]
        n_nu = 6
    k1_min = math.inf
    k2p_max = -math.inf
    k2s_max = -math.inf
    fd_worst = 0.0
    for p, q in cases:
        lo, hi = regime_bounds(p, q)
        for t in np.linspace(0.05, 0.95, n_nu):
            params = MapParams(nu=float(lo + t * (hi - lo)), e=1.0, p=p, q=q)
            zb = z_flip(params)
            lam = pd_parameter(params)
            co = flip_coefficients(zb, lam, 0, params)
            k1_min = min(k1_min, abs(co.k1))
            k2p_max = max(k2p_max, co.k2_paper)
            k2s_max = max(k2s_max, co.k2_standard)
            gz = reduced_map_derivative(zb, lam, 0, params, 1)
            pairs = [
                (gz, fd_z_derivative(zb, lam, 0, params, 1)),
                (reduced_map_derivative(zb, lam, 0, params, 2), fd_z_derivative(zb, lam, 0, params, 2)),
                (reduced_map_derivative(zb, lam, 0, params, 3), fd_z_derivative(zb, lam, 0, params, 3)),
            ]
            for ana, fd in pairs:
                fd_worst = max(fd_worst, abs(ana - fd) / max(abs(ana), 1e-30))
    checks = [
        CheckResult("k1_nonzero", k1_min > 1e-8, f"min |k1| = {k1_min:.3e} (> 1e-8)"),
        CheckResult("k2_paper_negative", k2p_max < 0.0, f"max k2 (cubed convention) = {k2p_max:.3e}"),
        CheckResult("k2_standard_negative", k2s_max < 0.0, f"max k2 (linear convention) = {k2s_max:.3e}"),
        CheckResult(
            "fd_agreement",
            fd_worst <= 1e-5,
            f"max relative analytic-vs-FD defect {fd_worst:.3e} (tol 1e-5)",
        ),
    ]
    return _report("flip", checks)


def suite_chaos(quick: bool = False) -> dict:
    """Uniform expansion and empirical chaos in the robust regime."""
    params = MapParams(nu=0.75, e=1.0, p=2, q=1)
    n_lam = 10 if quick else 25
    n_iter = 20_000 if quick else 60_000
    lam_lo = params.nu ** (params.p / params.q)
    lams = np.linspace(lam_lo, 1.0, n_lam)
    zs = np.linspace(params.nu, 1.0 - 1e-6, 101)
    bound_ok = True
    detail = ""
    for lam in lams:
        b = expansion_bound(params, lam)
        if b <= 1.0:
            bound_ok = False
            detail = f"bound {b:.4f} <= 1 at lam={lam:.4f}"
            break
        slopes = np.abs([reduced_map_derivative(z, lam, 0, params, 1) for z in zs])
        if not np.all(slopes >= b - 1e-12):
            bound_ok = False
            detail = f"pointwise slope below bound at lam={lam:.4f}"
            break
    mus = np.array([mu_from_parameter(l, 12, params) for l in lams])
    means, kept = _return_orbit_batch(
        params, mus, 0.8, 2_000, n_iter, lams=lams, keep_last=4 * 64
    )
    lyap_ok = bool(np.all(means > 0.0))
    periods = [detect_period(kept[:, j], 1e-9, 64) for j in range(kept.shape[1])]
    aperiodic = all(P == CHAOTIC for P in periods)
    checks = [
        CheckResult("expansion_bound", bound_ok, detail or "slope bound > 1 holds pointwise"),
        CheckResult(
            "lyapunov_positive",
            lyap_ok,
            f"reduced-orbit estimates in [{means.min():.4f}, {means.max():.4f}]",
        ),
        CheckResult(
            "aperiodic",
            aperiodic,
            f"no period <= 64 detected on {len(periods)} orbits",
        ),
    ]
    return _report("chaos", checks)


def suite_stability(quick: bool = False) -> dict:
    """Contractive fixed points and periodic attractors in the stable regime."""
    params = MapParams(nu=0.2, e=1.0, p=2, q=1)
    n_lam = 8 if quick else 20
    lam_lo = params.nu ** (params.p / params.q)
    lams = np.linspace(lam_lo + 1e-12, 1.0, n_lam)
    mults = [stability_certificate(params, lam) for lam in lams]
    mult_ok = max(mults) < 1.0
    periodic_ok = True
    lyap_ok = True
    detail = ""
    for M in (4, 6):
        mu = mu_from_parameter(0.7, M, params)
        config = SystemConfig(params, mu)
        lo, hi = params.nu * mu, mu
        seeds = lo + (hi - lo) * np.linspace(0.05, 0.95, 6 if quick else 12)
        pts, lyap = _f_orbit_batch(config, seeds, 10_000, 512)
        for j in range(pts.shape[1]):
            P = detect_period(pts[:, j], 1e-9 * mu, 64)
            if P == CHAOTIC:
                periodic_ok = False
                detail = f"aperiodic orbit at mu={mu:.3e}, seed {seeds[j]:.3e}"
        if not np.all(lyap < 0.0):
            lyap_ok = False
            detail = f"nonnegative Lyapunov at mu={mu:.3e}"
    checks = [
        CheckResult(
            "multipliers_contractive",
            mult_ok,
            f"max fixed-point multiplier {max(mults):.6f} (< 1)",
        ),
        CheckResult("orbits_periodic", periodic_ok, detail or "all seeded orbits periodic"),
        CheckResult("lyapunov_negative", lyap_ok, detail or "all seeded orbits contracting"),
    ]
    return _report("stability", checks)


SUITES = {
    "identity": suite_identity,
    "intervals": suite_intervals,
    "flip": suite_flip,
    "chaos": suite_chaos,
    "stability": suite_stability,
}


def run_suite(name: str, quick: bool = False) -> dict:
    if name not in SUITES:
        raise KeyError(name)
    fn = SUITES[name]
    if name == "intervals":
        return fn()
    return fn(quick=quick)
