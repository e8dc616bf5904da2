"""Return machinery: excursion counts, the induced map on [nu, 1], the
reduced one-parameter family, and the exact first-return dynamics.

A point x0 in the trapping interval W = [nu*mu, mu] either stays left of
the switch (no excursion) or escapes, rides the linear branch for m-1
steps, and lands back in W.  Rescaling by mu turns the landing rule into a
closed-form map of z = x0/mu on [nu, 1].  With the landing ratio of the
left edge folded into a parameter lam, the dominant part of that map is
the one-parameter family

    reduced_map(z, lam, k) = nu**(1-k) * (1-z)**(q/p) / ((1-nu)**(q/p) * lam**(q/p)),

whose fixed points and derivatives drive every closed-form prediction in
`bifurcation`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BudgetExceeded,
    CertificationFailed,
    NoRoot,
    OutOfRange,
    SingularPoint,
)
from .map_core import MapParams, SystemConfig, eval_map

LAMBDA_SLACK = 1e-9

DEFAULT_MAX_STEPS = 100_000


@dataclass(frozen=True)
class Excursion:
    """First iterate escaped right of the switch; m is the first count with
    the m-th iterate back in W, landing = f^m(x0)."""

    m: int
    landing: float


@dataclass(frozen=True)
class NoExcursion:
    """First iterate stayed left of the switch; no excursion count is
    defined, only the next point."""

    next_x: float


ExcursionResult = Excursion | NoExcursion


@dataclass(frozen=True)
class ReturnContext:
    """Bundle tying a concrete configuration to one branch of the reduced
    dynamics: maximal excursion count M, reduced parameter lam, and branch
    offset k = M - m (capped at M - 2)."""

    config: SystemConfig
    M: int
    lam: float
    k: int

    @property
    def m(self) -> int:
        return self.M - self.k


def excursion_count(
    x0: float, config: SystemConfig, max_steps: int = DEFAULT_MAX_STEPS
) -> ExcursionResult:
    """Count forward iterates until the orbit of x0 in W re-enters W.

    Follows the map step by step, so it doubles as the oracle for the
    closed-form return machinery.  Raises BudgetExceeded when the ride on
    the linear branch outlasts max_steps (mu too small for the budget).
    """
    config.require_well_posed()
    mu = config.mu
    x = eval_map(x0, config)
    if x <= mu:
        return NoExcursion(x)
    m = 1
    while m < max_steps:
        x = eval_map(x, config)
        m += 1
        if x <= mu:
            return Excursion(m=m, landing=x)
    raise BudgetExceeded(f"no return within {max_steps} steps (mu={mu:.3e})")


def max_excursion_count(
    config: SystemConfig,
    max_steps: int = DEFAULT_MAX_STEPS,
    certify_samples: int = 0,
) -> int:
    """Excursion count M of the left edge x0 = nu*mu, the maximum over W.

    With certify_samples > 0, checks m(x0) <= M on an interior grid of W
    and raises CertificationFailed on a violation.
    """
    lo, hi = config.params.nu * config.mu, config.mu
    res = excursion_count(lo, config, max_steps)
    if isinstance(res, NoExcursion):
        # Well-posedness forces escape from the left edge; reaching this
        # indicates mu at the very edge of the certificate.
        raise CertificationFailed("left edge of W did not escape; mu too large")
    M = res.m
    for i in range(certify_samples):
        x0 = lo + (hi - lo) * (i + 1) / (certify_samples + 1)
        r = excursion_count(x0, config, max_steps)
        if isinstance(r, Excursion) and r.m > M:
            raise CertificationFailed(
                f"m({x0!r}) = {r.m} exceeds M = {M}; excursion count not maximal at the left edge"
            )
    return M


def _edge_landing_ratio(config: SystemConfig, M: int) -> float:
    """Closed-form landing ratio f^M(nu*mu, mu)/mu of the left edge."""
    p = config.params
    mu = config.mu
    g = p.gamma
    return p.nu ** (M + 1) + p.nu ** (M - 1) * p.e * mu ** (g - 1.0) * (1.0 - p.nu) ** g


def _reduced_parameter_given_M(config: SystemConfig, M: int) -> float:
    p = config.params
    ratio = _edge_landing_ratio(config, M)
    lam = (p.nu / ratio) ** (p.p / p.q)
    lo = p.nu ** (p.p / p.q)
    if lam < lo - LAMBDA_SLACK or lam > 1.0 + LAMBDA_SLACK:
        raise OutOfRange(
            f"reduced parameter {lam!r} outside [{lo!r}, 1] by more than {LAMBDA_SLACK}; "
            "inconsistent excursion count"
        )
    return lam


def reduced_parameter(config: SystemConfig, max_steps: int = DEFAULT_MAX_STEPS) -> float:
    """Reduced-map parameter lam = (nu / (landing ratio of the left edge))**(p/q).

    Uses the exact landing ratio of the maximal excursion, so lam always
    falls in [nu**(p/q), 1] up to rounding; values outside by more than
    1e-9 raise OutOfRange.
    """
    M = max_excursion_count(config, max_steps)
    return _reduced_parameter_given_M(config, M)


def return_context(
    config: SystemConfig, k: int = 0, max_steps: int = DEFAULT_MAX_STEPS
) -> ReturnContext:
    """Build a consistent ReturnContext for branch offset k.

    k is capped at M - 2 so the reduced branch keeps at least a two-step
    excursion; larger k raises OutOfRange.
    """
    if k < 0:
        raise OutOfRange(f"k must be nonnegative, got {k}")
    M = max_excursion_count(config, max_steps)
    if k > M - 2:
        raise OutOfRange(f"k = {k} exceeds M - 2 = {M - 2}; branch has no meaning")
    lam = _reduced_parameter_given_M(config, M)
    return ReturnContext(config=config, M=M, lam=lam, k=k)


def induced_return(z: float, ctx: ReturnContext) -> float:
    """Closed-form landing point of x0 = mu*z after an m-step excursion,
    with m = ctx.M - ctx.k:

        nu**m * mu * z + nu**(m-1) * e * mu**(q/p) * (1-z)**(q/p)

    Agrees with direct iteration of the map whenever m is the true
    excursion count of mu*z.
    """
    if not 0.0 <= z <= 1.0:
        raise OutOfRange(f"z must lie in [0, 1], got {z}")
    return ctx.config.mu * induced_return_ratio(z, ctx)


def induced_return_ratio(z: float, ctx: ReturnContext) -> float:
    """Landing point of mu*z divided by mu; the quantity the reduced map
    approximates."""
    p = ctx.config.params
    mu = ctx.config.mu
    g = p.gamma
    m = ctx.m
    return p.nu**m * z + p.nu ** (m - 1) * p.e * mu ** (g - 1.0) * (1.0 - z) ** g


def _coeff(lam: float, k: int, params: MapParams) -> float:
    g = params.gamma
    return params.nu ** (1 - k) / ((1.0 - params.nu) ** g * lam**g)


def _check_lam(lam: float, params: MapParams) -> None:
    lo = params.nu ** (params.p / params.q)
    if lam < lo - LAMBDA_SLACK or lam > 1.0 + LAMBDA_SLACK:
        raise OutOfRange(f"lam = {lam!r} outside [{lo!r}, 1]")


def reduced_map(z: float, lam: float, k: int, params: MapParams) -> float:
    """Value of the reduced one-parameter map (k = 0 gives the base branch)."""
    if k < 0:
        raise OutOfRange(f"k must be nonnegative, got {k}")
    return _coeff(lam, k, params) * (1.0 - z) ** params.gamma


def reduced_map_derivative(
    z: float, lam: float, k: int, params: MapParams, order: int = 1
) -> float:
    """Analytic z-derivative of the reduced map, orders 1 to 3.

    Order 1 is always negative on [nu, 1); all orders blow up at z = 1,
    which raises SingularPoint.
    """
    if order not in (1, 2, 3):
        raise ValueError(f"order must be 1, 2 or 3, got {order}")
    if z >= 1.0:
        raise SingularPoint("derivative of the reduced map is unbounded at z = 1")
    g = params.gamma
    c = _coeff(lam, k, params)
    acc = 1.0
    for j in range(order):
        acc *= g - j
    # d^n/dz^n (1-z)^g = (-1)^n * g*(g-1)*...*(g-n+1) * (1-z)^(g-n)
    return c * (-1.0) ** order * acc * (1.0 - z) ** (g - order)


def reduced_map_dlambda(z: float, lam: float, k: int, params: MapParams) -> float:
    """Partial derivative of the reduced map in the parameter direction."""
    g = params.gamma
    return -(g / lam) * reduced_map(z, lam, k, params)


def reduced_map_dlambda_dz(z: float, lam: float, k: int, params: MapParams) -> float:
    """Mixed second partial (parameter then state)."""
    g = params.gamma
    return -(g / lam) * reduced_map_derivative(z, lam, k, params, 1)


def reduced_fixed_point(
    lam: float,
    k: int,
    params: MapParams,
    tol: float = 1e-12,
    max_iter: int = 200,
) -> float:
    """Unique fixed point of the reduced map on [nu, 1], by bisection.

    The map minus the identity is strictly decreasing with a guaranteed
    sign change over [nu, 1], so bisection converges; the residual of the
    returned point is at most tol.  The transcendental fixed-point
    condition has no closed form for general (p, q).
    """
    if tol <= 0.0:
        raise ValueError(f"tol must be positive, got {tol}")
    _check_lam(lam, params)
    lo, hi = params.nu, 1.0
    g_lo = reduced_map(lo, lam, k, params) - lo
    if g_lo < -tol:
        raise NoRoot(f"no sign change: map(nu) - nu = {g_lo:.3e} < 0")
    mid = 0.5 * (lo + hi)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        r = reduced_map(mid, lam, k, params) - mid
        if abs(r) <= tol:
            return mid
        if r > 0.0:
            lo = mid
        else:
            hi = mid
    raise NoRoot(f"bisection did not reach residual {tol} in {max_iter} iterations")


def decomposition_residual(z: float, ctx: ReturnContext) -> float:
    """Absolute defect of the exact split of the induced landing ratio into
    the reduced map plus its geometric correction:

        landing(z)/mu = reduced_map(z, lam, k)
                        + nu**(M-k) * (z - nu*(1-z)**g / (1-nu)**g)

    Exact in real arithmetic for any z in [nu, 1] once lam comes from the
    same (mu, M); float evaluation stays near machine epsilon.
    """
    p = ctx.config.params
    g = p.gamma
    a = (1.0 - z) ** g
    b = (1.0 - p.nu) ** g
    lhs = induced_return_ratio(z, ctx)
    rhs = reduced_map(z, ctx.lam, ctx.k, p) + p.nu ** (ctx.M - ctx.k) * (z - p.nu * a / b)
    return abs(lhs - rhs)


def correction_magnitude(z: float, ctx: ReturnContext) -> float:
    """Size of the non-dominant term dropped when the induced map is
    approximated by the reduced map alone.  Reported, never asserted
    against a tolerance: the approximation carries no error bound."""
    p = ctx.config.params
    g = p.gamma
    return p.nu ** (ctx.M - ctx.k) * abs(z - p.nu * (1.0 - z) ** g / (1.0 - p.nu) ** g)


# ---------------------------------------------------------------------------
# Exact first-return dynamics on [nu, 1]
# ---------------------------------------------------------------------------


def return_step(z: float, config: SystemConfig) -> tuple[float, int]:
    """One application of the exact first-return map in rescaled coordinates.

    Returns (z_next, m) where m is the excursion count taken (m = 1 when
    the first iterate already lands left of the switch).  Closed form:
    the first step fixes t = first-iterate ratio, the linear branch then
    divides by the contraction until the ratio drops to 1, so m and the
    landing follow from one logarithm.  The image always lies in [nu, 1],
    which is what makes long reduced-orbit studies well-posed.
    """
    p = config.params
    mu = config.mu
    g = p.gamma
    t = p.nu * z + p.e * mu ** (g - 1.0) * (1.0 - z) ** g
    if t <= 1.0:
        return t, 1
    i = math.ceil(math.log(t) / -math.log(p.nu))
    # guard rounding at branch edges: enforce nu**i * t <= 1 < nu**(i-1) * t
    while p.nu**i * t > 1.0:
        i += 1
    while i > 1 and p.nu ** (i - 1) * t <= 1.0:
        i -= 1
    return p.nu**i * t, 1 + i


def return_orbit(
    config: SystemConfig, z0: float, n: int, burn_in: int = 0
) -> np.ndarray:
    """n points of the exact first-return orbit after burn_in returns."""
    config.require_well_posed()
    if not config.params.nu <= z0 <= 1.0:
        raise OutOfRange(f"z0 must lie in [nu, 1], got {z0}")
    z = float(z0)
    for _ in range(burn_in):
        z, _ = return_step(z, config)
    out = np.empty(n, dtype=np.float64)
    for j in range(n):
        z, _ = return_step(z, config)
        out[j] = z
    return out


def _return_orbit_batch(
    params: MapParams,
    mus: np.ndarray,
    z0: np.ndarray,
    burn_in: int,
    n: int,
    lams: np.ndarray | None = None,
    k: int = 0,
    keep_last: int = 0,
):
    """Vectorised exact return orbits, one per mu.

    When lams is given, accumulates the mean log-slope of the reduced map
    at the n post-burn-in points of each orbit; returns (means, kept)
    where kept holds the final keep_last points per orbit.
    """
    mus = np.asarray(mus, dtype=np.float64)
    z = np.broadcast_to(np.asarray(z0, dtype=np.float64), mus.shape).copy()
    g = params.gamma
    nu = params.nu
    sing = params.e * mus ** (g - 1.0)
    log_inv_nu = -math.log(nu)
    acc = np.zeros_like(mus)
    kept = np.empty((keep_last, len(mus)), dtype=np.float64) if keep_last else None
    log_dcoef = None
    if lams is not None:
        log_dcoef = np.log(
            (params.q / params.p)
            * nu ** (1 - k)
            / ((1.0 - nu) ** g * np.asarray(lams, dtype=np.float64) ** g)
        )
    total = burn_in + n
    for step in range(total):
        if step >= burn_in and log_dcoef is not None:
            # |d/dz reduced_map| = dcoef * (1-z)^(g-1) at the current point
            acc += log_dcoef + (g - 1.0) * np.log(np.maximum(1.0 - z, 1e-16))
        t = nu * z + sing * (1.0 - z) ** g
        i = np.ceil(np.log(np.maximum(t, 1.0)) / log_inv_nu)
        # rounding guards, vectorised: at most one correction each way
        landing = nu**i * t
        too_big = landing > 1.0
        if np.any(too_big):
            i = np.where(too_big, i + 1, i)
            landing = nu**i * t
        back = (i > 1) & (nu ** (i - 1) * t <= 1.0)
        if np.any(back):
            i = np.where(back, i - 1, i)
            landing = nu**i * t
        z = np.where(t <= 1.0, t, landing)
        if keep_last and step >= total - keep_last:
            kept[step - (total - keep_last)] = z
    means = acc / n if log_dcoef is not None else None
    return means, kept
