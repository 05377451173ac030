"""Command-line entry point: validate, ingest, analyze, run, report, serve.

Exit codes: 0 success, 1 validation/user error, 2 internal error.
All randomness sits behind ``--seed``; ``--json`` output for ``run`` is
byte-identical across repeats with the same flags.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

from . import analysis
from .errors import ThemisError
from .model import (ingest_series, load_region_model, save_region_model,
                    validate_model)
from .pipeline import (PipelineConfig, compute_intervention_index, load_run,
                       run_pipeline, run_to_json_text, save_run)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="themis",
        description="Deep-futures scenario pipeline for region models.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="validate a model document")
    p_validate.add_argument("model")

    p_ingest = sub.add_parser("ingest", help="merge CSV observations into a model")
    p_ingest.add_argument("model")
    p_ingest.add_argument("csv")
    p_ingest.add_argument("-o", "--output", required=True)

    p_analyze = sub.add_parser(
        "analyze", help="print key variables and the influence sign matrix")
    p_analyze.add_argument("model")
    p_analyze.add_argument("--variance-threshold", type=float, default=0.90)
    p_analyze.add_argument("--max-vars", type=int, default=7)
    p_analyze.add_argument("--r-threshold", type=float, default=0.3)

    p_run = sub.add_parser("run", help="execute the full pipeline")
    p_run.add_argument("model")
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--samples", type=int, default=1000)
    p_run.add_argument("--horizon", type=int, default=None)
    p_run.add_argument("--tripwire", type=float, default=0.5)
    p_run.add_argument("--threads", type=int, default=1)
    p_run.add_argument("--json", action="store_true", dest="as_json")
    p_run.add_argument("-o", "--output", default=None)

    p_report = sub.add_parser("report", help="summarize a saved run record")
    p_report.add_argument("run")
    p_report.add_argument("--tripwire", type=float, default=None)
    p_report.add_argument("--json", action="store_true", dest="as_json")

    p_serve = sub.add_parser("serve", help="start the HTTP API")
    p_serve.add_argument("--host", default=None)
    p_serve.add_argument("--port", type=int, default=None)
    return parser


def _check_run_flags(args) -> None:
    if args.samples < 1:
        raise ThemisError("samples must be >= 1")
    if args.horizon is not None and args.horizon < 1:
        raise ThemisError("horizon must be >= 1")
    if not 0.0 <= args.tripwire <= 1.0:
        raise ThemisError("tripwire must be in [0, 1]")


def _cmd_validate(args) -> int:
    model = load_region_model(args.model)
    validate_model(model)
    print(f"{args.model}: ok ({model.region_name}, "
          f"{len(model.parameters)} parameters, {len(model.actors)} actors)")
    return 0


def _cmd_ingest(args) -> int:
    model = load_region_model(args.model)
    merged = ingest_series(model, args.csv)
    save_region_model(merged, args.output)
    n_obs = sum(len(s.observations) for s in merged.series)
    print(f"wrote {args.output} ({n_obs} observations)")
    return 0


def _cmd_analyze(args) -> int:
    model = load_region_model(args.model)
    validate_model(model)
    panel = analysis.standardize(model.series)
    pca_result = analysis.pca(panel)
    keys = analysis.select_key_variables(
        pca_result, panel, args.variance_threshold, args.max_vars)
    signs = analysis.estimate_signs(panel, keys, model.adjacency,
                                    args.r_threshold)
    print("Key variables:")
    for var in keys.selected:
        print(f"  {var}")
    print()
    print(analysis.sign_matrix_table(signs))
    return 0


def _cmd_run(args) -> int:
    _check_run_flags(args)
    model = load_region_model(args.model)
    if args.horizon is not None:
        model = dataclasses.replace(model, horizon_years=args.horizon)
    config = PipelineConfig(seed=args.seed, samples=args.samples,
                            tripwire=args.tripwire)
    run = run_pipeline(model, config)
    if args.output:
        save_run(run, args.output)
    if args.as_json:
        print(run_to_json_text(run))
        return 0
    report = compute_intervention_index(run)
    print(f"run {run.run_id} ({run.theory}, seed {args.seed}, "
          f"{args.samples} samples)")
    print(f"{'year':>6}  {'p(intervention)':>15}  {'90% ci':>17}  tripwire")
    for yr in run.per_year:
        lo, hi = yr.p_intervention_ci
        mark = "*" if yr.year in report.tripwire_years else ""
        print(f"{yr.year:>6}  {yr.p_intervention_mean:>15.4f}  "
              f"[{lo:6.4f}, {hi:6.4f}]  {mark}")
    if report.tripwire_years:
        first = report.tripwire_years[0]
        print(f"tripwire {report.tripwire_threshold:.2f} first crossed in {first}")
    else:
        print(f"tripwire {report.tripwire_threshold:.2f} never crossed")
    return 0


def _cmd_report(args) -> int:
    run = load_run(args.run)
    report = compute_intervention_index(run, args.tripwire)
    if args.as_json:
        doc = {"run_id": report.run_id,
               "years": list(report.years),
               "index_series": list(report.index_series),
               "tripwire_threshold": report.tripwire_threshold,
               "tripwire_years": list(report.tripwire_years),
               "top_drivers": {str(y): [[r, d] for r, d in drivers]
                               for y, drivers in report.top_drivers.items()}}
        print(json.dumps(doc, sort_keys=True, indent=2))
        return 0
    print(f"run {report.run_id}: intervention index over "
          f"{len(report.years)} years")
    for year, p in zip(report.years, report.index_series):
        bar = "#" * int(round(p * 40))
        mark = "*" if year in report.tripwire_years else " "
        print(f"{year:>6} {mark} {p:6.4f} {bar}")
    for year in report.tripwire_years:
        drivers = report.top_drivers.get(year, ())
        if drivers:
            top = ", ".join(f"{r} ({d:+.4f})" for r, d in drivers[:3])
            print(f"{year}: drivers {top}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app
    host = args.host or os.environ.get("THEMIS_HOST", "127.0.0.1")
    port = args.port or int(os.environ.get("THEMIS_PORT", "8742"))
    uvicorn.run(create_app(), host=host, port=port)
    return 0


_COMMANDS = {
    "validate": _cmd_validate,
    "ingest": _cmd_ingest,
    "analyze": _cmd_analyze,
    "run": _cmd_run,
    "report": _cmd_report,
    "serve": _cmd_serve,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        return _COMMANDS[args.command](args)
    except (ThemisError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
