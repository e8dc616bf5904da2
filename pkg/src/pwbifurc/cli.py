"""Command-line interface.

Subcommands:
  predict   closed-form regime classification and flip/interval predictions (JSON)
  simulate  raw orbit of the piecewise map (CSV)
  verify    named property suites with pass/fail report
  sweep     bifurcation-diagram sweep to <prefix>.csv / .markers.json / .png

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 regime
mismatch, 4 I/O failure.  A flat key=value config file may pre-seed any
long flag of a subcommand; explicit flags win.
"""

from __future__ import annotations

import argparse
import json
import sys

from .bifurcation import (
    OrbitInterval,
    RegimeKind,
    classify_regime,
    orbit_interval,
    pd_prediction,
)
from .errors import (
    AllSamplesIllPosed,
    DegenerateBoundary,
    PwbifurcError,
    WrongRegime,
)
from .map_core import MapParams, SystemConfig, classify_region, iterate_orbit
from .sweep import (
    SweepSpec,
    annotate_markers,
    run_sweep,
    write_diagram_csv,
    write_markers_json,
)
from .verify import SUITES, run_suite

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_REGIME = 3
EXIT_IO = 4


def _add_param_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--p", type=int, default=2, help="numerator of the branch exponent q/p (default 2)")
    sp.add_argument("--q", type=int, default=1, help="denominator partner; p > q >= 1 coprime (default 1)")
    sp.add_argument("--nu", type=float, default=0.5, help="linear-branch contraction factor in (0,1) (default 0.5)")
    sp.add_argument("--e", type=float, default=1.0, help="singular-branch coefficient, > 0 (default 1.0)")
    sp.add_argument(
        "--config",
        metavar="FILE",
        default=None,
        help="flat key=value file pre-seeding these flags; explicit flags win",
    )


def _apply_config_file(ns: argparse.Namespace, argv: list[str]) -> None:
    """Overlay file values onto parsed flags the user did not set explicitly.

    A flag counts as explicit when its --name appears in argv.  File keys
    use the flag name with '-' or '_' freely.
    """
    if not getattr(ns, "config", None):
        return
    explicit = set()
    for tok in argv:
        if tok.startswith("--"):
            explicit.add(tok[2:].split("=", 1)[0].replace("-", "_"))
    with open(ns.config) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"bad config line (expected key=value): {line!r}")
            key, _, raw = line.partition("=")
            key = key.strip().replace("-", "_")
            raw = raw.strip()
            if key in explicit or not hasattr(ns, key):
                continue
            cur = getattr(ns, key)
            if isinstance(cur, bool):
                setattr(ns, key, raw.lower() in ("1", "true", "yes", "on"))
            elif isinstance(cur, int) and not isinstance(cur, bool):
                setattr(ns, key, int(raw))
            elif isinstance(cur, float):
                setattr(ns, key, float(raw))
            elif cur is None:
                # untyped default: take the narrowest numeric reading
                for cast in (int, float):
                    try:
                        setattr(ns, key, cast(raw))
                        break
                    except ValueError:
                        continue
                else:
                    setattr(ns, key, raw)
            else:
                setattr(ns, key, raw)


def _params_from(ns: argparse.Namespace) -> MapParams:
    return MapParams(nu=ns.nu, e=ns.e, p=ns.p, q=ns.q)


def _interval_doc(iv: OrbitInterval) -> dict:
    return {"M": iv.M, "mu_pd": iv.mu_low, "mu_1": iv.mu_high, "width": iv.width}


def cmd_predict(ns: argparse.Namespace) -> int:
    try:
        params = _params_from(ns)
    except ValueError as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        regime = classify_regime(params)
    except DegenerateBoundary as exc:
        print(f"degenerate: {exc}", file=sys.stderr)
        return EXIT_REGIME
    doc = {
        "params": {"p": params.p, "q": params.q, "nu": params.nu, "e": params.e},
        "regime": regime.kind.value,
        "nu_lower": regime.nu_lower,
        "nu_upper": regime.nu_upper,
    }
    wants_pd = ns.M is not None or ns.mu_range is not None
    if wants_pd and regime.kind is not RegimeKind.PERIOD_DOUBLING:
        print(
            f"--M/--mu-range need the period-doubling regime; nu={params.nu} is {regime.kind.value}",
            file=sys.stderr,
        )
        return EXIT_REGIME
    try:
        if ns.M is not None:
            pred = pd_prediction(params, ns.M)
            iv = orbit_interval(params, ns.M)
            doc["prediction"] = {
                "M": pred.M,
                "z_bar": pred.z_bar,
                "lambda_pd": pred.lambda_pd,
                "mu_pd": pred.mu_pd,
                "mu_1": iv.mu_high,
                "K1": pred.k1,
                "K2_paper": pred.k2_paper,
                "K2_standard": pred.k2_standard,
                "K1_sign": "+" if pred.k1 > 0 else "-",
                "K2_sign": "+" if pred.k2_standard > 0 else "-",
            }
            doc["intervals"] = [_interval_doc(iv)]
        elif ns.mu_range is not None:
            lo, hi = ns.mu_range
            if not 0 < lo < hi:
                print(f"invalid --mu-range {lo} {hi}", file=sys.stderr)
                return EXIT_USAGE
            ivs = []
            for M in range(2, 257):
                iv = orbit_interval(params, M)
                if iv.mu_high < lo:
                    break
                if iv.mu_low <= hi and iv.mu_high >= lo:
                    ivs.append(iv)
            doc["intervals"] = [_interval_doc(iv) for iv in sorted(ivs, key=lambda v: v.M)]
    except (WrongRegime, PwbifurcError) as exc:
        print(f"{exc}", file=sys.stderr)
        return EXIT_REGIME
    json.dump(doc, sys.stdout, indent=2)
    print()
    return EXIT_OK


def cmd_simulate(ns: argparse.Namespace) -> int:
    try:
        params = _params_from(ns)
    except ValueError as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return EXIT_USAGE
    config = SystemConfig(params, ns.mu)
    print("step,x,region")
    if ns.n == 0:
        tag = classify_region(ns.x0, config, ns.boundary_tol)
        print(f"0,{ns.x0:.17g},{tag.value}")
        return EXIT_OK
    orbit = iterate_orbit(ns.x0, config, ns.n)
    for step, (x, tag) in enumerate(orbit.points):
        # recompute with the requested tolerance so fuzzy tagging is honored
        tag = classify_region(x, config, ns.boundary_tol)
        print(f"{step},{x:.17g},{tag.value}")
    return EXIT_OK


def cmd_verify(ns: argparse.Namespace) -> int:
    if ns.suite not in SUITES:
        print(f"unknown suite {ns.suite!r}; choose from {sorted(SUITES)}", file=sys.stderr)
        return EXIT_USAGE
    report = run_suite(ns.suite, quick=ns.quick)
    if ns.format == "json":
        json.dump(report, sys.stdout, indent=2)
        print()
    else:
        for c in report["checks"]:
            mark = "PASS" if c["passed"] else "FAIL"
            print(f"{mark} [{report['suite']}] {c['name']}: {c['detail']}")
        print(f"suite {report['suite']}: {'PASS' if report['passed'] else 'FAIL'}")
    return EXIT_OK if report["passed"] else EXIT_VERIFY_FAILED


def cmd_sweep(ns: argparse.Namespace) -> int:
    try:
        params = _params_from(ns)
        spec = SweepSpec(
            params=params,
            mu_min=ns.mu_min,
            mu_max=ns.mu_max,
            n_samples=ns.samples,
            scale="logarithmic" if ns.log else "linear",
            burn_in=ns.burn_in,
            n_keep=ns.keep,
            max_period=ns.max_period,
        )
    except ValueError as exc:
        print(f"invalid sweep: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        records = run_sweep(spec, workers=ns.workers)
    except AllSamplesIllPosed as exc:
        print(f"{exc}", file=sys.stderr)
        return EXIT_REGIME
    try:
        markers = annotate_markers(spec)
    except WrongRegime:
        markers = []  # markers are a doubling-regime notion; sweep still runs
    try:
        csv_path = f"{ns.out}.csv"
        markers_path = f"{ns.out}.markers.json"
        write_diagram_csv(records, csv_path)
        write_markers_json(params, markers, markers_path)
        written = [csv_path, markers_path]
        if not ns.no_plot:
            from .plotting import render_sweep_figure

            written.append(
                render_sweep_figure(records, markers, f"{ns.out}.png", log_scale=ns.log)
            )
    except OSError as exc:
        print(f"write failed: {exc}", file=sys.stderr)
        return EXIT_IO
    n_skip = sum(r.skipped for r in records)
    print(
        f"wrote {', '.join(written)} ({len(records)} samples, {n_skip} skipped, "
        f"{len(markers)} markers)"
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="pwbifurc",
        description=(
            "Bifurcation toolkit for the piecewise map with a linear branch "
            "(slope nu) and a rational-power branch nu*x + e*(mu-x)**(q/p)."
        ),
    )
    sub = ap.add_subparsers(dest="command", required=True)

    pr = sub.add_parser(
        "predict",
        help="closed-form predictions as JSON",
        description=(
            "Classify the contraction factor against the thresholds "
            "nu_lower = 1 - q*(p+q)**((p-q)/q)/p**(p/q) (stable | doubling) and "
            "nu_upper = p/(p+q) (doubling | chaos).  In the doubling regime, "
            "--M adds the flip point (state p/(p+q), its parameter and mu "
            "locations, nondegeneracy coefficients K1/K2) and the existence "
            "interval (mu_pd, mu_1] of the count-M orbit; --mu-range lists all "
            "intervals meeting the range."
        ),
    )
    _add_param_flags(pr)
    group = pr.add_mutually_exclusive_group()
    group.add_argument("--M", type=int, default=None, help="excursion count for flip/interval output")
    group.add_argument(
        "--mu-range", nargs=2, type=float, metavar=("LO", "HI"), default=None,
        help="list every orbit interval intersecting [LO, HI]",
    )
    pr.set_defaults(func=cmd_predict)

    si = sub.add_parser(
        "simulate",
        help="orbit of the map as CSV (step,x,region)",
        description=(
            "Iterate x -> nu*x (x >= mu) / nu*x + e*(mu-x)**(q/p) (x <= mu) "
            "from --x0 and print one row per point; region is I (left of the "
            "switch), II (right), or boundary within --boundary-tol."
        ),
    )
    _add_param_flags(si)
    si.add_argument("--mu", type=float, required=True, help="switching/bifurcation parameter")
    si.add_argument("--x0", type=float, required=True, help="initial state")
    si.add_argument("--n", type=int, default=100, help="forward steps (0 = just the seed row; default 100)")
    si.add_argument("--boundary-tol", type=float, default=0.0, help="tagging tolerance around x = mu (default 0)")
    si.set_defaults(func=cmd_simulate)

    ve = sub.add_parser(
        "verify",
        help="run a property suite; exit 0 only if it passes",
        description=(
            "Suites: identity (exact split of the induced landing ratio), "
            "intervals (disjointness and geometric widths), flip "
            "(nondegeneracy coefficients vs finite differences), chaos "
            "(uniform expansion, positive Lyapunov, no detected period), "
            "stability (contractive multipliers, periodic attractors)."
        ),
    )
    ve.add_argument("--suite", required=True, help="one of: " + ", ".join(sorted(SUITES)))
    ve.add_argument("--quick", action="store_true", help="lighter sampling for interactive runs")
    ve.add_argument("--format", choices=("text", "json"), default="text", help="report format (default text)")
    ve.set_defaults(func=cmd_verify)

    sw = sub.add_parser(
        "sweep",
        help="bifurcation-diagram sweep to <prefix>.csv/.markers.json/.png",
        description=(
            "Sample attractors over a mu grid (seeded at nu*mu), tag each "
            "sample with detected period and Lyapunov estimate, and write the "
            "delimited diagram, closed-form interval markers, and a rendered "
            "figure.  Grid is logarithmic by default: interval widths shrink "
            "geometrically, so linear grids miss the small ones."
        ),
    )
    _add_param_flags(sw)
    sw.add_argument("--mu-min", type=float, required=True, help="lower end of the mu grid")
    sw.add_argument("--mu-max", type=float, required=True, help="upper end of the mu grid")
    sw.add_argument("--samples", type=int, default=100, help="grid size (default 100)")
    scale = sw.add_mutually_exclusive_group()
    scale.add_argument("--log", dest="log", action="store_true", default=True, help="logarithmic grid (default)")
    scale.add_argument("--linear", dest="log", action="store_false", help="linear grid")
    sw.add_argument("--burn-in", type=int, default=10_000, help="discarded transient steps per sample (default 10000)")
    sw.add_argument("--keep", type=int, default=1_000, help="kept attractor points per sample (default 1000)")
    sw.add_argument("--max-period", type=int, default=64, help="largest period searched (default 64)")
    sw.add_argument("--workers", type=int, default=None,
                    help=f"process count (default: PWBIFURC_THREADS or machine parallelism)")
    sw.add_argument("--out", required=True, help="output path prefix")
    sw.add_argument("--no-plot", action="store_true", help="skip the rendered figure")
    sw.set_defaults(func=cmd_sweep)
    return ap


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors already; normalize other codes
        return int(exc.code) if exc.code else EXIT_OK
    try:
        _apply_config_file(ns, argv)
    except (OSError, ValueError) as exc:
        print(f"config file error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return ns.func(ns)


if __name__ == "__main__":
    sys.exit(main())
