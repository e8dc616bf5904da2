"""Bifurcation toolkit for one-dimensional piecewise-smooth maps whose
singular branch carries a rational power (mu - x)**(q/p).

The library exposes the map itself (`map_core`), the first-return
machinery and the reduced one-parameter family (`reduction`), closed-form
regime/flip/interval predictions (`bifurcation`), empirical instruments
(`metrics`), sweep persistence (`sweep`), and a CLI (`pwbifurc`).
"""

from .bifurcation import (
    FlipCoefficients,
    OrbitInterval,
    PDPrediction,
    Regime,
    RegimeKind,
    classify_regime,
    expansion_bound,
    flip_coefficients,
    mu_from_parameter,
    orbit_interval,
    parameter_from_mu,
    pd_parameter,
    pd_prediction,
    regime_bounds,
    stability_certificate,
    z_flip,
)
from .errors import (
    AllSamplesIllPosed,
    BudgetExceeded,
    CertificationFailed,
    DegenerateBoundary,
    IllPosedConfig,
    InsufficientData,
    NoRoot,
    NonPositiveMu,
    NotAFixedPoint,
    OrbitEscaped,
    OutOfRange,
    PwbifurcError,
    SingularDerivative,
    SingularPoint,
    WrongRegime,
)
from .map_core import (
    MapParams,
    Orbit,
    RegionTag,
    SystemConfig,
    classify_region,
    eval_map,
    iterate_orbit,
    map_derivative,
    trapping_region,
)
from .metrics import (
    CHAOTIC,
    AttractorSample,
    attractor_sample,
    detect_period,
    lyapunov_exponent,
    reduced_orbit,
    reduced_orbit_lyapunov,
)
from .reduction import (
    Excursion,
    ExcursionResult,
    NoExcursion,
    ReturnContext,
    correction_magnitude,
    decomposition_residual,
    excursion_count,
    induced_return,
    induced_return_ratio,
    max_excursion_count,
    reduced_fixed_point,
    reduced_map,
    reduced_map_derivative,
    reduced_map_dlambda,
    reduced_map_dlambda_dz,
    reduced_parameter,
    return_context,
    return_orbit,
    return_step,
)
from .sweep import (
    DiagramRecord,
    SweepSpec,
    annotate_markers,
    run_sweep,
    write_diagram_csv,
    write_markers_json,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
