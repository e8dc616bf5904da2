"""Core piecewise map: evaluation, iteration, regions, trapping interval.

The map acts on the line with a moving switching point at x = mu.  Right of
the switch it is the linear contraction x -> nu*x; left of it a singular
term e*(mu - x)**(q/p) is added, with p > q >= 1 coprime so the exponent
lies in (0, 1) and the one-sided derivative at the switch is unbounded.
Both branches agree at x = mu, so the map is continuous.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import IllPosedConfig, NonPositiveMu, SingularDerivative


@dataclass(frozen=True)
class MapParams:
    """Family constants.

    nu: contraction factor of the linear branch, 0 < nu < 1.
    e:  coefficient of the singular branch, e > 0.
    p, q: coprime naturals with p > q >= 1; the singular branch carries
        the power (mu - x)**(q/p).
    """

    nu: float
    e: float
    p: int
    q: int

    def __post_init__(self):
        if not (isinstance(self.p, int) and isinstance(self.q, int)):
            raise ValueError("p and q must be integers")
        if not self.p > self.q >= 1:
            raise ValueError(f"need p > q >= 1, got p={self.p}, q={self.q}")
        if math.gcd(self.p, self.q) != 1:
            raise ValueError(f"p and q must be coprime, got p={self.p}, q={self.q}")
        if not 0.0 < self.nu < 1.0:
            raise ValueError(f"need 0 < nu < 1, got nu={self.nu}")
        if not self.e > 0.0:
            raise ValueError(f"need e > 0, got e={self.e}")

    @property
    def gamma(self) -> float:
        """Branch exponent q/p as a float, in (0, 1)."""
        return self.q / self.p


@dataclass(frozen=True)
class SystemConfig:
    """MapParams plus a concrete offset parameter mu.

    mu >= 0 is assumed by the forward analysis; negative mu is allowed only
    for fixed-point checks at the origin.  Return-map operations refuse to
    run unless `is_well_posed` holds.
    """

    params: MapParams
    mu: float

    def well_posedness_margin(self) -> float:
        """e minus the smallest coefficient that still forces the left edge
        of the trapping interval to jump past the switch, i.e. guarantees
        f(nu*mu, mu) > mu."""
        p = self.params
        if self.mu <= 0.0:
            return math.nan
        bound = self.mu ** ((p.p - p.q) / p.p) * (1.0 - p.nu**2) / (1.0 - p.nu) ** p.gamma
        return p.e - bound

    @property
    def is_well_posed(self) -> bool:
        return self.mu > 0.0 and self.well_posedness_margin() > 0.0

    def require_well_posed(self) -> None:
        if self.mu <= 0.0:
            raise NonPositiveMu(f"mu must be positive, got {self.mu}")
        margin = self.well_posedness_margin()
        if not margin > 0.0:
            raise IllPosedConfig(
                f"escape inequality fails (margin {margin:.3e}); "
                "decrease mu or increase e"
            )


class RegionTag(Enum):
    REGION_I = "I"
    REGION_II = "II"
    BOUNDARY = "boundary"


@dataclass(frozen=True)
class Orbit:
    """Finite trajectory with per-point region tags.

    xs[0] == x0 and xs[i+1] == eval_map(xs[i], config) bit for bit.
    Region codes are RegionTag values stored as int8 (0=I, 1=II, 2=boundary).
    """

    x0: float
    config: SystemConfig
    xs: np.ndarray
    region_codes: np.ndarray

    _CODE_TO_TAG = (RegionTag.REGION_I, RegionTag.REGION_II, RegionTag.BOUNDARY)

    @property
    def points(self) -> list[tuple[float, RegionTag]]:
        return [(float(x), self._CODE_TO_TAG[c]) for x, c in zip(self.xs, self.region_codes)]

    def __len__(self) -> int:
        return len(self.xs)


def eval_map(x: float, config: SystemConfig) -> float:
    """One application of the map.  Total on valid configs.

    Returns nu*x for x >= mu and nu*x + e*(mu - x)**(q/p) for x <= mu; the
    branches agree at x = mu.  The rational power is an ordinary float pow
    of the nonnegative in-branch base, with an exact 0 at x = mu.
    """
    p = config.params
    mu = config.mu
    if x >= mu:
        return p.nu * x
    return p.nu * x + p.e * math.pow(mu - x, p.gamma)


def classify_region(x: float, config: SystemConfig, tol: float = 0.0) -> RegionTag:
    """Tag a point relative to the switching point.

    Boundary iff |x - mu| <= tol; the default tol = 0 is an exact
    comparison.  Sweep consumers pass a fuzzy tolerance.
    """
    if tol < 0.0:
        raise ValueError(f"tol must be nonnegative, got {tol}")
    d = x - config.mu
    if abs(d) <= tol:
        return RegionTag.BOUNDARY
    return RegionTag.REGION_II if d > 0.0 else RegionTag.REGION_I


def _region_code(x: float, mu: float) -> int:
    if x == mu:
        return 2
    return 1 if x > mu else 0


def trapping_region(config: SystemConfig) -> tuple[float, float]:
    """Closed interval [nu*mu, mu] that absorbs returning orbits."""
    if config.mu <= 0.0:
        raise NonPositiveMu(f"trapping interval needs mu > 0, got {config.mu}")
    return (config.params.nu * config.mu, config.mu)


def iterate_orbit(x0: float, config: SystemConfig, n: int) -> Orbit:
    """Orbit of length n+1 starting at x0 (n >= 1 forward steps).

    Pure function of its arguments; repeated calls are bit-identical.
    """
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    mu = config.mu
    xs = np.empty(n + 1, dtype=np.float64)
    codes = np.empty(n + 1, dtype=np.int8)
    x = float(x0)
    xs[0] = x
    codes[0] = _region_code(x, mu)
    for i in range(1, n + 1):
        x = eval_map(x, config)
        xs[i] = x
        codes[i] = _region_code(x, mu)
    return Orbit(x0=float(x0), config=config, xs=xs, region_codes=codes)


def map_derivative(x: float, config: SystemConfig, from_side: str = "auto") -> float:
    """Analytic slope of the map at x.

    Linear branch (x >= mu): nu.  Singular branch (x < mu):
    nu - (q*e/p) * (mu - x)**((q-p)/p), which diverges as x -> mu-.
    At x = mu the linear-side value nu is returned unless the singular
    side is requested explicitly, which raises SingularDerivative.
    """
    p = config.params
    mu = config.mu
    if from_side not in ("auto", "linear", "singular"):
        raise ValueError(f"unknown side {from_side!r}")
    if x == mu:
        if from_side == "singular":
            raise SingularDerivative(
                "one-sided derivative at x = mu is unbounded on the singular side"
            )
        return p.nu
    if x > mu:
        return p.nu
    return p.nu - (p.q * p.e / p.p) * math.pow(mu - x, (p.q - p.p) / p.p)
