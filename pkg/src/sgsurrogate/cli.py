"""Command line interface: build, moments, query, study.

Exit code 0 on success; on failure a single machine-readable JSON line goes
to stderr and the exit code is nonzero.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .adapt import run_asgc, run_csc
from .errors import SparseGridError
from .harness import config_from_mapping, parse_config, run_study
from .io import load_surrogate, save_surrogate
from .models import benchmark_names, get_benchmark
from .moments import moments
from .smooth import run_easgc

_METHOD_ALIASES = {"csc": "CSC", "asgc": "ASGC", "easgc": "EASGC"}


def _load_settings(config_path):
    settings = parse_config(config_path) if config_path else {}
    return settings


def _check_dimension(settings: dict, f) -> None:
    stated = settings.get("dimension")
    if stated is not None and int(stated) != f.dimension:
        raise SparseGridError(
            f"config dimension {stated} != benchmark dimension {f.dimension}"
        )


def _build_one(method: str, benchmark: str, settings: dict):
    import dataclasses

    params = settings.get(benchmark)
    params = dict(params) if isinstance(params, dict) else None
    f, echo = get_benchmark(benchmark, params)
    _check_dimension(settings, f)
    cfg = config_from_mapping(settings, f.dimension)
    if method == "CSC":
        result = run_csc(f, f.dimension, cfg.max_level)
    elif method == "ASGC":
        result = run_asgc(f, cfg)
    else:
        result = run_easgc(f, dataclasses.replace(cfg, use_splines=True))
    return f, cfg, echo, result


def _cmd_build(args) -> int:
    method = _METHOD_ALIASES[args.method]
    settings = _load_settings(args.config)
    f, cfg, echo, result = _build_one(method, args.benchmark, settings)
    out_dir = Path(args.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{args.benchmark}_{args.method}.surrogate"
    save_surrogate(path, result.model, result.region_db)
    meta = {
        "method": method,
        "benchmark": args.benchmark,
        "benchmark_params": echo,
        "nodes": len(result.model),
        "full_evaluations": result.model.full_evaluations,
        "spline_interpolations": result.model.spline_interpolations,
        "stopped_by": result.stopped_by,
        "surrogate": path.name,
    }
    (out_dir / f"{args.benchmark}_{args.method}.json").write_text(
        json.dumps(meta, indent=2, sort_keys=True) + "\n"
    )
    print(json.dumps(meta))
    return 0


def _cmd_moments(args) -> int:
    model, _ = load_surrogate(args.surrogate)
    est = moments(model)
    print(json.dumps({
        "mean": est.mean,
        "mean_square": est.mean_square,
        "variance": est.variance,
    }))
    return 0


def _cmd_query(args) -> int:
    model, _ = load_surrogate(args.surrogate)
    point = np.array([float(part) for part in args.point.split(",")])
    if point.shape != (model.dimension,):
        raise SparseGridError(
            f"point has {point.size} coordinates, surrogate expects {model.dimension}"
        )
    print(json.dumps({"point": point.tolist(), "value": model.interpolate(point)}))
    return 0


def _cmd_study(args) -> int:
    settings = _load_settings(args.config)
    methods = [_METHOD_ALIASES[m.strip()] for m in args.methods.split(",") if m.strip()]
    params = settings.get(args.benchmark)
    params = dict(params) if isinstance(params, dict) else None
    f, _ = get_benchmark(args.benchmark, dict(params) if params else None)
    _check_dimension(settings, f)
    cfg = config_from_mapping(settings, f.dimension)
    seed = int(settings.get("seed", 0))
    n_test_points = int(settings.get("n_test_points", 10_000))
    written = []
    for method in methods:
        report = run_study(
            method, args.benchmark, cfg,
            benchmark_params=dict(params) if params else None,
            seed=seed, n_test_points=n_test_points,
            output_dir=args.output_dir,
            persist_surrogate=args.persist,
        )
        written.append(f"{args.benchmark}_{method.lower()}.csv")
        last = report.rows[-1]
        print(json.dumps({
            "method": method,
            "levels": len(report.rows),
            "full_evals": last.full_evals,
            "spline_evals": last.spline_evals,
            "max_abs_error": last.max_abs_error,
            "rmse": last.rmse,
        }))
    print(json.dumps({"output_dir": str(args.output_dir), "files": written}))
    return 0


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sgsurrogate",
        description="Sparse grid collocation surrogates: build, inspect and compare.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    build = sub.add_parser("build", help="build one surrogate and persist it")
    build.add_argument("--method", choices=sorted(_METHOD_ALIASES), required=True)
    build.add_argument("--benchmark", choices=benchmark_names(), required=True)
    build.add_argument("--config", help="flat key=value config file")
    build.add_argument("--output-dir", required=True)
    build.set_defaults(func=_cmd_build)

    mom = sub.add_parser("moments", help="analytic mean/variance of a surrogate file")
    mom.add_argument("surrogate")
    mom.set_defaults(func=_cmd_moments)

    query = sub.add_parser("query", help="evaluate a surrogate file at a point")
    query.add_argument("surrogate")
    query.add_argument("--point", required=True, help="comma-separated coordinates in [0,1]")
    query.set_defaults(func=_cmd_query)

    study = sub.add_parser("study", help="comparative per-level study, one CSV per method")
    study.add_argument("--benchmark", choices=benchmark_names(), required=True)
    study.add_argument("--config", help="flat key=value config file")
    study.add_argument("--output-dir", required=True)
    study.add_argument("--methods", default="csc,asgc,easgc",
                       help="comma-separated subset of csc,asgc,easgc")
    study.add_argument("--persist", action="store_true",
                       help="also persist each method's surrogate")
    study.set_defaults(func=_cmd_study)
    return parser


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.func(args)
    except (SparseGridError, ValueError, OSError, KeyError) as exc:
        print(json.dumps({"error": type(exc).__name__, "detail": str(exc)}),
              file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
