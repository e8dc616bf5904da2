"""Parameter sweeps: bifurcation-diagram records over a mu grid, with
closed-form markers and delimited/JSON persistence.

Samples are independent, so the engine may fan them out over processes;
results are always gathered in ascending-mu order, making the output
byte-identical regardless of worker count.  Ill-posed samples are kept as
skipped rows rather than dropped, preserving the sample/row mapping.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .bifurcation import RegimeKind, classify_regime, orbit_interval
from .errors import AllSamplesIllPosed, WrongRegime
from .map_core import MapParams, SystemConfig
from .metrics import CHAOTIC, DEFAULT_BURN_IN, DEFAULT_MAX_PERIOD, DEFAULT_N_KEEP, attractor_sample

THREADS_ENV = "PWBIFURC_THREADS"


@dataclass(frozen=True)
class SweepSpec:
    """Grid and sampling knobs for one sweep.

    scale is "logarithmic" (default: cascade intervals shrink
    geometrically, linear grids starve the small ones) or "linear".
    """

    params: MapParams
    mu_min: float
    mu_max: float
    n_samples: int
    scale: str = "logarithmic"
    burn_in: int = DEFAULT_BURN_IN
    n_keep: int = DEFAULT_N_KEEP
    max_period: int = DEFAULT_MAX_PERIOD

    def __post_init__(self):
        if not 0.0 < self.mu_min < self.mu_max:
            raise ValueError(
                f"need 0 < mu_min < mu_max, got ({self.mu_min}, {self.mu_max})"
            )
        if self.n_samples < 2:
            raise ValueError(f"need n_samples >= 2, got {self.n_samples}")
        if self.scale not in ("linear", "logarithmic"):
            raise ValueError(f"unknown scale {self.scale!r}")

    def grid(self) -> np.ndarray:
        if self.scale == "linear":
            return np.linspace(self.mu_min, self.mu_max, self.n_samples)
        return np.geomspace(self.mu_min, self.mu_max, self.n_samples)


@dataclass(frozen=True)
class DiagramRecord:
    """One sweep sample: kept attractor points plus its tags.

    skipped records mark mu values that failed the well-posedness
    certificate; their points array is empty and tags are NaN/0.
    """

    mu: float
    points: np.ndarray
    period: int
    lyapunov: float
    skipped: bool


def _sample_one(args) -> DiagramRecord:
    spec, mu = args
    config = SystemConfig(spec.params, float(mu))
    if not config.is_well_posed:
        return DiagramRecord(
            mu=float(mu),
            points=np.empty(0, dtype=np.float64),
            period=CHAOTIC,
            lyapunov=float("nan"),
            skipped=True,
        )
    s = attractor_sample(
        config,
        burn_in=spec.burn_in,
        n_keep=spec.n_keep,
        max_period=spec.max_period,
    )
    return DiagramRecord(
        mu=float(mu), points=s.points, period=s.period, lyapunov=s.lyapunov, skipped=False
    )


def worker_count(requested: int | None = None) -> int:
    """Effective parallelism: explicit request, else the PWBIFURC_THREADS
    cap, else machine parallelism."""
    if requested is not None:
        return max(1, requested)
    env = os.environ.get(THREADS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_sweep(spec: SweepSpec, workers: int | None = None) -> list[DiagramRecord]:
    """One DiagramRecord per grid sample, ascending in mu.

    Deterministic for any worker count; raises AllSamplesIllPosed when no
    sample passes the well-posedness certificate.
    """
    grid = spec.grid()
    nworkers = worker_count(workers)
    tasks = [(spec, mu) for mu in grid]
    if nworkers <= 1 or len(tasks) < 4:
        records = [_sample_one(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=nworkers) as pool:
            records = list(pool.map(_sample_one, tasks, chunksize=8))
    if all(r.skipped for r in records):
        raise AllSamplesIllPosed(
            f"no mu in [{spec.mu_min}, {spec.mu_max}] passes the certificate"
        )
    return records


def annotate_markers(spec: SweepSpec, max_count: int = 256):
    """Orbit intervals intersecting the sweep range, ascending in M.

    Only meaningful in the period-doubling regime (WrongRegime otherwise;
    callers typically drop markers and keep the sweep).
    """
    regime = classify_regime(spec.params)
    if regime.kind is not RegimeKind.PERIOD_DOUBLING:
        raise WrongRegime(
            f"orbit-interval markers need the doubling regime, got {regime.kind.value}"
        )
    out = []
    for M in range(2, max_count + 1):
        iv = orbit_interval(spec.params, M)
        if iv.mu_high < spec.mu_min:
            break
        if iv.mu_low <= spec.mu_max and iv.mu_high >= spec.mu_min:
            out.append(iv)
    return sorted(out, key=lambda iv: iv.M)


def write_diagram_csv(records: list[DiagramRecord], path: str) -> None:
    """Delimited diagram: header mu,point_index,x,period,lyapunov,skipped,
    one row per kept point, one placeholder row per skipped sample.
    Floats carry 17 significant digits; chaotic periods are written as 0.
    """
    with open(path, "w", newline="") as fh:
        fh.write("mu,point_index,x,period,lyapunov,skipped\n")
        for rec in records:
            if rec.skipped:
                fh.write(f"{rec.mu:.17g},0,nan,0,nan,1\n")
                continue
            for idx, x in enumerate(rec.points):
                fh.write(
                    f"{rec.mu:.17g},{idx},{x:.17g},{rec.period},{rec.lyapunov:.17g},0\n"
                )


def write_markers_json(params: MapParams, markers, path: str) -> None:
    doc = {
        "params": {"nu": params.nu, "e": params.e, "p": params.p, "q": params.q},
        "markers": [
            {"M": iv.M, "mu_pd": iv.mu_low, "mu_1": iv.mu_high} for iv in markers
        ],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
