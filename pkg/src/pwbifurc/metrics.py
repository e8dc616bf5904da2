"""Empirical instruments: Lyapunov estimates, attractor sampling, period
detection, for both the full map and the reduced return dynamics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bifurcation import mu_from_parameter
from .errors import InsufficientData, OrbitEscaped, OutOfRange
from .map_core import MapParams, SystemConfig, eval_map, map_derivative
from .reduction import reduced_map, return_step

#: detect_period sentinel for "no period up to max_period".
CHAOTIC = 0

DEFAULT_BURN_IN = 10_000
DEFAULT_N_KEEP = 1_000
DEFAULT_MAX_PERIOD = 64


@dataclass(frozen=True)
class AttractorSample:
    """Post-transient slice of an orbit with its period and Lyapunov tags.

    period == CHAOTIC (0) marks an orbit with no detected period.
    boundary_hits counts iterates that landed exactly on the switching
    point, where the linear-side slope was used in the Lyapunov sum.
    """

    mu: float
    points: np.ndarray
    period: int
    lyapunov: float
    boundary_hits: int = 0


def _lyapunov_scan(x0: float, config: SystemConfig, burn_in: int, n: int):
    """Shared scalar loop: returns (final_x, mean log-slope, boundary hits)."""
    x = float(x0)
    for _ in range(burn_in):
        x = eval_map(x, config)
    mu = config.mu
    nu = config.params.nu
    acc = 0.0
    hits = 0
    for _ in range(n):
        if x == mu:
            # measure-zero direct hit: linear-side slope, tallied
            acc += math.log(nu)
            hits += 1
        else:
            acc += math.log(abs(map_derivative(x, config)))
        x = eval_map(x, config)
    return x, acc / n, hits


def lyapunov_exponent(
    x0: float, config: SystemConfig, burn_in: int = DEFAULT_BURN_IN, n: int = DEFAULT_N_KEEP
) -> float:
    """Mean log-slope along the orbit of x0 after burn_in steps.

    The singular branch contributes unbounded positive terms near the
    switch; they are kept as-is (finite for every x != mu) since that
    stretching is exactly what drives the chaotic regime.
    """
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    _, lam, _ = _lyapunov_scan(x0, config, burn_in, n)
    return lam


def detect_period(points, tol: float, max_period: int = DEFAULT_MAX_PERIOD) -> int:
    """Smallest period P <= max_period certified over the tail window.

    The window is the final 2*max_period points; P is accepted when every
    pair P apart agrees within tol.  Returns CHAOTIC when nothing fits.
    Needs at least 4*max_period points so the window sits past transients.
    """
    pts = np.asarray(points, dtype=np.float64)
    if len(pts) < 4 * max_period:
        raise InsufficientData(
            f"need at least {4 * max_period} points, got {len(pts)}"
        )
    w = pts[-2 * max_period:]
    for P in range(1, max_period + 1):
        if np.all(np.abs(w[:-P] - w[P:]) <= tol):
            return P
    return CHAOTIC


def attractor_sample(
    config: SystemConfig,
    burn_in: int = DEFAULT_BURN_IN,
    n_keep: int = DEFAULT_N_KEEP,
    tol: float | None = None,
    max_period: int = DEFAULT_MAX_PERIOD,
) -> AttractorSample:
    """Sample the attractor seeded at the left edge of the trapping
    interval (the maximal-excursion probe).

    tol defaults to 1e-9 * mu: period tolerances must track the state
    scale across the decades a cascade spans.
    """
    config.require_well_posed()
    if n_keep < 4 * max_period:
        raise ValueError(
            f"n_keep = {n_keep} too small to certify periods up to {max_period}"
        )
    if tol is None:
        tol = 1e-9 * config.mu
    mu = config.mu
    nu = config.params.nu
    x = nu * mu
    for _ in range(burn_in):
        x = eval_map(x, config)
    pts = np.empty(n_keep, dtype=np.float64)
    acc = 0.0
    hits = 0
    for j in range(n_keep):
        if x == mu:
            acc += math.log(nu)
            hits += 1
        else:
            acc += math.log(abs(map_derivative(x, config)))
        x = eval_map(x, config)
        pts[j] = x
    period = detect_period(pts, tol, max_period)
    return AttractorSample(
        mu=config.mu,
        points=pts,
        period=period,
        lyapunov=acc / n_keep,
        boundary_hits=hits,
    )


def _f_orbit_batch(config: SystemConfig, x0s, burn_in: int, n_keep: int):
    """Vectorised map orbits from several seeds at once.

    Returns (points, lyapunov) where points has shape (n_keep, n_seeds)
    and lyapunov holds the per-seed mean log-slope over the kept window.
    Exact switching-point hits take the linear-side slope, matching the
    scalar path.
    """
    p = config.params
    mu = config.mu
    nu, e, g = p.nu, p.e, p.gamma
    dexp = (p.q - p.p) / p.p
    dcoef = p.q * e / p.p
    x = np.array(x0s, dtype=np.float64)
    for _ in range(burn_in):
        base = np.where(x < mu, mu - x, 1.0)
        x = np.where(x >= mu, nu * x, nu * x + e * base**g)
    pts = np.empty((n_keep, len(x)), dtype=np.float64)
    acc = np.zeros(len(x), dtype=np.float64)
    for j in range(n_keep):
        base = np.where(x < mu, mu - x, 1.0)
        deriv = np.where(x >= mu, nu, nu - dcoef * base**dexp)
        acc += np.log(np.abs(deriv))
        x = np.where(x >= mu, nu * x, nu * x + e * base**g)
        pts[j] = x
    return pts, acc / n_keep


# ---------------------------------------------------------------------------
# Reduced-map orbits
# ---------------------------------------------------------------------------


def _raw_reduced_orbit(
    z0: float,
    lam: float,
    k: int,
    params: MapParams,
    n: int,
    slack: float = 1e-9,
) -> np.ndarray:
    """Iterate the reduced map literally, with no boundary treatment.

    Raises OrbitEscaped as soon as an iterate leaves [nu, 1] by more than
    slack; the reduced family is not forward-invariant on its stated
    domain, so this mode is a diagnostic, not a workhorse.
    """
    z = float(z0)
    out = np.empty(n, dtype=np.float64)
    for j in range(n):
        z = reduced_map(z, lam, k, params)
        if z < params.nu - slack or z > 1.0 + slack:
            raise OrbitEscaped(
                f"iterate {j + 1} left [nu, 1]: z = {z!r} (slack {slack})"
            )
        out[j] = z
    return out


def reduced_orbit(
    lam: float,
    k: int,
    params: MapParams,
    z0: float,
    n: int,
    burn_in: int = 0,
    mode: str = "exact",
    reference_M: int = 12,
    slack: float = 1e-9,
) -> np.ndarray:
    """Orbit of the reduced dynamics at parameter lam.

    mode "exact" (default) runs the exact first-return dynamics at the mu
    matching lam for excursion count reference_M; its image stays in
    [nu, 1] by construction, so arbitrarily long runs are well posed.
    Exact mode needs k = 0: the exact dynamics selects its own branch at
    every point, so a fixed offset has no meaning there.
    mode "raw" iterates the reduced formula itself and raises
    OrbitEscaped when the orbit leaves the domain.
    """
    if not params.nu <= z0 <= 1.0:
        raise OutOfRange(f"z0 must lie in [nu, 1], got {z0}")
    if mode == "raw":
        full = _raw_reduced_orbit(z0, lam, k, params, burn_in + n, slack)
        return full[burn_in:]
    if mode != "exact":
        raise ValueError(f"unknown mode {mode!r}")
    if k != 0:
        raise ValueError("exact mode fixes no branch offset; use k=0 or mode='raw'")
    mu = mu_from_parameter(lam, reference_M, params)
    config = SystemConfig(params, mu)
    config.require_well_posed()
    z = float(z0)
    for _ in range(burn_in):
        z, _ = return_step(z, config)
    out = np.empty(n, dtype=np.float64)
    for j in range(n):
        z, _ = return_step(z, config)
        out[j] = z
    return out


def reduced_orbit_lyapunov(
    lam: float,
    k: int,
    params: MapParams,
    z0: float,
    burn_in: int = DEFAULT_BURN_IN,
    n: int = DEFAULT_N_KEEP,
    mode: str = "exact",
    reference_M: int = 12,
    slack: float = 1e-9,
) -> float:
    """Mean log-slope of the reduced map along a reduced orbit.

    The slope is the analytic derivative of the reduced family evaluated
    at the visited points.  Escapes are handled per `reduced_orbit`.
    """
    zs = reduced_orbit(
        lam, k, params, z0, n, burn_in=burn_in, mode=mode,
        reference_M=reference_M, slack=slack,
    )
    # clip away from the z = 1 singularity of the slope formula
    zz = np.minimum(zs, 1.0 - 1e-16)
    g = params.gamma
    coef = (params.q / params.p) * params.nu ** (1 - k) / (
        (1.0 - params.nu) ** g * lam**g
    )
    return float(np.mean(np.log(coef) + (g - 1.0) * np.log(1.0 - zz)))
