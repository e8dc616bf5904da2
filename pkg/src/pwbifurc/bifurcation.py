"""Closed-form bifurcation predictions for the reduced family.

Everything here is algebra on (nu, e, p, q): the two regime thresholds in
the contraction factor, the flip point of the reduced map, the parameter
dictionary between the reduced parameter and mu at a fixed excursion
count, and the resulting existence intervals of the periodic orbits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import DegenerateBoundary, NotAFixedPoint, OutOfRange, WrongRegime
from .map_core import MapParams
from .reduction import (
    reduced_fixed_point,
    reduced_map,
    reduced_map_derivative,
    reduced_map_dlambda,
    reduced_map_dlambda_dz,
)

BOUNDARY_TOL = 1e-12


class RegimeKind(Enum):
    STABLE_PERIODIC = "stable_periodic"
    PERIOD_DOUBLING = "period_doubling"
    ROBUST_CHAOS = "robust_chaos"


@dataclass(frozen=True)
class Regime:
    kind: RegimeKind
    nu_lower: float
    nu_upper: float


@dataclass(frozen=True)
class PDPrediction:
    """Flip point of the reduced map and its mu-space location at count M."""

    z_bar: float
    lambda_pd: float
    mu_pd: float
    M: int
    k1: float
    k2_paper: float
    k2_standard: float


@dataclass(frozen=True)
class FlipCoefficients:
    k1: float
    k2_paper: float
    k2_standard: float


@dataclass(frozen=True)
class OrbitInterval:
    """Half-open mu-interval (mu_low, mu_high] carrying the stable orbit of
    excursion count M (one singular step, M-1 linear steps)."""

    M: int
    mu_low: float
    mu_high: float

    @property
    def width(self) -> float:
        return self.mu_high - self.mu_low

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.mu_low + self.mu_high)


def regime_bounds(p: int, q: int) -> tuple[float, float]:
    """Thresholds in nu separating the three regimes:

    nu_lower = 1 - q*(p+q)**((p-q)/q) / p**(p/q)   (stable | doubling)
    nu_upper = p / (p + q)                          (doubling | chaos)
    """
    nu_lower = 1.0 - q * (p + q) ** ((p - q) / q) / p ** (p / q)
    nu_upper = p / (p + q)
    return nu_lower, nu_upper


def classify_regime(params: MapParams) -> Regime:
    """Place the contraction factor in one of the three regimes.

    The theorem uses strict inequalities, so a factor within 1e-12 of a
    threshold raises DegenerateBoundary instead of being binned silently.
    """
    lo, hi = regime_bounds(params.p, params.q)
    nu = params.nu
    if abs(nu - lo) <= BOUNDARY_TOL or abs(nu - hi) <= BOUNDARY_TOL:
        raise DegenerateBoundary(
            f"nu = {nu!r} sits on a regime threshold (bounds {lo!r}, {hi!r})"
        )
    if nu > hi:
        kind = RegimeKind.ROBUST_CHAOS
    elif nu > lo:
        kind = RegimeKind.PERIOD_DOUBLING
    else:
        kind = RegimeKind.STABLE_PERIODIC
    return Regime(kind=kind, nu_lower=lo, nu_upper=hi)


def z_flip(params: MapParams) -> float:
    """State at which the fixed-point multiplier of the reduced map is -1."""
    return params.p / (params.p + params.q)


def pd_parameter(params: MapParams) -> float:
    """Reduced-parameter value of the flip:

    lambda_pd = q * (p+q)**((p-q)/q) * nu**(p/q) / (p**(p/q) * (1 - nu)).
    """
    p, q, nu = params.p, params.q, params.nu
    return q * (p + q) ** ((p - q) / q) * nu ** (p / q) / (p ** (p / q) * (1.0 - nu))


def mu_from_parameter(lam: float, M: int, params: MapParams) -> float:
    """mu at which the reduced parameter equals lam for excursion count M:

        mu = (nu**(M-2) * e * (1-nu)**(q/p) * lam**(q/p)) ** (p/(p-q))

    This inverts the dominant-term parameter correspondence; it is exact
    against parameter_from_mu and agrees with the exact reduced parameter
    up to a relative nu**M correction.
    """
    if M < 2:
        raise OutOfRange(f"M must be at least 2, got {M}")
    _check_parameter_range(lam, params)
    g = params.gamma
    base = params.nu ** (M - 2) * params.e * (1.0 - params.nu) ** g * lam**g
    return base ** (params.p / (params.p - params.q))


def parameter_from_mu(mu: float, M: int, params: MapParams) -> float:
    """Dominant-term reduced parameter at mu for excursion count M; the
    exact functional inverse of mu_from_parameter."""
    if M < 2:
        raise OutOfRange(f"M must be at least 2, got {M}")
    if mu <= 0.0:
        raise OutOfRange(f"mu must be positive, got {mu}")
    g = params.gamma
    bracket = (
        params.nu ** (2 - M)
        * mu ** (1.0 - g)
        / (params.e * (1.0 - params.nu) ** g)
    )
    return bracket ** (params.p / params.q)


def _check_parameter_range(lam: float, params: MapParams) -> None:
    lo = params.nu ** (params.p / params.q)
    if lam < lo - 1e-9 or lam > 1.0 + 1e-9:
        raise OutOfRange(f"lam = {lam!r} outside [{lo!r}, 1]")


def pd_closed_form_mu(params: MapParams, M: int) -> float:
    """Flip location in mu, written out:

        mu_pd = e**(p/(p-q)) * (p+q) * (q**q/p**p)**(1/(p-q)) * nu**((p/(p-q))*(M-1))
    """
    p, q, nu, e = params.p, params.q, params.nu, params.e
    return (
        e ** (p / (p - q))
        * (p + q)
        * (q**q / p**p) ** (1.0 / (p - q))
        * nu ** ((p / (p - q)) * (M - 1))
    )


def flip_coefficients(
    z_bar: float,
    lambda_pd: float,
    k: int,
    params: MapParams,
    tol: float = 1e-8,
) -> FlipCoefficients:
    """Nondegeneracy coefficients of the flip at (z_bar, lambda_pd).

    k1 mixes the parameter and state partials; k2 is reported in two
    conventions that differ in how the third state derivative enters
    (cubed versus linear), since published statements disagree.  Both are
    built from the analytic power-law partials; finite-difference
    cross-checks live in the test suite.
    """
    resid = abs(reduced_map(z_bar, lambda_pd, k, params) - z_bar)
    if resid > tol:
        raise NotAFixedPoint(
            f"fixed-point residual {resid:.3e} exceeds {tol:.1e} at z={z_bar!r}"
        )
    gzz = reduced_map_derivative(z_bar, lambda_pd, k, params, 2)
    gzzz = reduced_map_derivative(z_bar, lambda_pd, k, params, 3)
    glam = reduced_map_dlambda(z_bar, lambda_pd, k, params)
    glamz = reduced_map_dlambda_dz(z_bar, lambda_pd, k, params)
    k1 = glam * gzz + 2.0 * glamz
    k2_paper = 0.5 * gzz**2 + gzzz**3 / 3.0
    k2_standard = 0.5 * gzz**2 + gzzz / 3.0
    return FlipCoefficients(k1=k1, k2_paper=k2_paper, k2_standard=k2_standard)


def pd_prediction(params: MapParams, M: int) -> PDPrediction:
    """Full flip prediction at excursion count M.

    Only meaningful in the period-doubling regime; M >= 2.
    """
    regime = classify_regime(params)
    if regime.kind is not RegimeKind.PERIOD_DOUBLING:
        raise WrongRegime(f"flip prediction needs the doubling regime, got {regime.kind.value}")
    if M < 2:
        raise OutOfRange(f"M must be at least 2, got {M}")
    zb = z_flip(params)
    lam_pd = pd_parameter(params)
    mu_pd = mu_from_parameter(lam_pd, M, params)
    co = flip_coefficients(zb, lam_pd, 0, params)
    return PDPrediction(
        z_bar=zb,
        lambda_pd=lam_pd,
        mu_pd=mu_pd,
        M=M,
        k1=co.k1,
        k2_paper=co.k2_paper,
        k2_standard=co.k2_standard,
    )


def orbit_interval(params: MapParams, M: int) -> OrbitInterval:
    """Existence interval (mu_pd, mu_1] of the count-M orbit.

    mu_pd is the flip location; mu_1 is where the reduced parameter
    reaches 1 (landing at the left edge of the trapping interval).
    Consecutive intervals are disjoint and their widths form a geometric
    progression with ratio nu**(p/(p-q)).
    """
    regime = classify_regime(params)
    if regime.kind is not RegimeKind.PERIOD_DOUBLING:
        raise WrongRegime(f"orbit intervals need the doubling regime, got {regime.kind.value}")
    if M < 2:
        raise OutOfRange(f"M must be at least 2, got {M}")
    lam_pd = pd_parameter(params)
    return OrbitInterval(
        M=M,
        mu_low=mu_from_parameter(lam_pd, M, params),
        mu_high=mu_from_parameter(1.0, M, params),
    )


def expansion_bound(params: MapParams, lam: float) -> float:
    """Lower bound q*nu / (p*(1-nu)*lam**(q/p)) on the slope magnitude of
    the reduced map over its whole domain; exceeds 1 exactly in the
    robust-chaos regime."""
    _check_parameter_range(lam, params)
    return params.q * params.nu / (
        params.p * (1.0 - params.nu) * lam**params.gamma
    )


def stability_certificate(params: MapParams, lam: float, k: int = 0) -> float:
    """Multiplier magnitude |slope| at the reduced map's fixed point.

    Defined for the stable regime, where the contract is a value < 1 for
    every admissible lam.
    """
    regime = classify_regime(params)
    if regime.kind is not RegimeKind.STABLE_PERIODIC:
        raise WrongRegime(f"certificate needs the stable regime, got {regime.kind.value}")
    zb = reduced_fixed_point(lam, k, params)
    return abs(reduced_map_derivative(zb, lam, k, params, 1))
