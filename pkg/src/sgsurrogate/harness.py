"""Error metrics, Monte Carlo reference, convergence studies and configuration.

A study builds a surrogate level by level and records one row per level:
evaluation counts, max-abs and RMS errors over a seeded test set, analytic
moments, and the moment changes between consecutive levels.  Reports land in
a CSV with a fixed column order plus a JSON sidecar echoing the full
configuration, so runs are reproducible from their artifacts alone.
"""

from __future__ import annotations

import dataclasses
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__ as _version
from .adapt import AdaptiveConfig, BuildResult, ModelFunction, run_asgc, run_csc
from .errors import SparseGridError
from .io import save_surrogate
from .models import get_benchmark
from .moments import moments
from .smooth import run_easgc

__all__ = [
    "StudyRow",
    "StudyReport",
    "draw_test_points",
    "max_abs_error",
    "rmse",
    "MonteCarloEstimate",
    "mc_reference",
    "run_study",
    "parse_config",
    "config_from_mapping",
    "CSV_COLUMNS",
]

CSV_COLUMNS = (
    "level", "full_evals", "spline_evals", "max_abs_error", "rmse",
    "mean", "variance", "mean_delta", "variance_delta", "wall_time",
)

METHODS = ("CSC", "ASGC", "EASGC")


def draw_test_points(dimension: int, count: int, seed: int) -> np.ndarray:
    """Uniform test points in the cube with a recorded seed."""
    rng = np.random.default_rng(seed)
    return rng.random((count, dimension))


def _true_values(f, points: np.ndarray) -> np.ndarray:
    if isinstance(f, np.ndarray):
        return f
    return np.array([f(x) for x in points])


def max_abs_error(m, f, test_points) -> float:
    """Max |surrogate - model| over the test set.

    `f` may be a callable or an array of precomputed model values.
    """
    test_points = np.asarray(test_points, dtype=float)
    return float(np.abs(m.interpolate_many(test_points) - _true_values(f, test_points)).max())


def rmse(m, f, test_points) -> float:
    """Root mean squared deviation over the test set."""
    test_points = np.asarray(test_points, dtype=float)
    dev = m.interpolate_many(test_points) - _true_values(f, test_points)
    return float(np.sqrt(np.mean(dev * dev)))


@dataclass(frozen=True)
class MonteCarloEstimate:
    """Sample moments with their own standard errors."""

    mean: float
    mean_square: float
    variance: float
    mean_stderr: float
    variance_stderr: float
    n_samples: int
    seed: int


def mc_reference(f, n_samples: int, seed: int) -> MonteCarloEstimate:
    """Plain Monte Carlo moments of `f` under uniform inputs.

    The variance standard error uses the fourth central moment, so it stays
    honest for skewed outputs.
    """
    rng = np.random.default_rng(seed)
    x = rng.random((n_samples, f.dimension))
    values = np.array([f(xi) for xi in x])
    mean = float(values.mean())
    var = float(values.var(ddof=1))
    centered = values - mean
    m4 = float(np.mean(centered ** 4))
    var_of_var = max(m4 - (n_samples - 3) / (n_samples - 1) * var * var, 0.0)
    return MonteCarloEstimate(
        mean=mean,
        mean_square=float(np.mean(values ** 2)),
        variance=var,
        mean_stderr=float(np.sqrt(var / n_samples)),
        variance_stderr=float(np.sqrt(var_of_var / n_samples)),
        n_samples=n_samples,
        seed=seed,
    )


@dataclass
class StudyRow:
    level: int
    full_evals: int
    spline_evals: int
    max_abs_error: float
    rmse: float
    mean: float
    variance: float
    mean_delta: float
    variance_delta: float
    wall_time: float


@dataclass
class StudyReport:
    """Per-level study rows plus the metadata needed to reproduce them."""

    method: str
    benchmark: str
    rows: list[StudyRow] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        lines = [",".join(CSV_COLUMNS)]
        for row in self.rows:
            cells = []
            for col in CSV_COLUMNS:
                value = getattr(row, col)
                if isinstance(value, int):
                    cells.append(str(value))
                else:
                    cells.append(format(float(value), ".17g"))
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"

    def write(self, output_dir, stem: str | None = None) -> tuple[Path, Path]:
        """Write the CSV and its JSON sidecar; returns both paths."""
        output_dir = Path(output_dir)
        output_dir.mkdir(parents=True, exist_ok=True)
        stem = stem or f"{self.benchmark}_{self.method.lower()}"
        csv_path = output_dir / f"{stem}.csv"
        meta_path = output_dir / f"{stem}.json"
        csv_path.write_text(self.to_csv())
        meta_path.write_text(json.dumps(self.metadata, indent=2, sort_keys=True) + "\n")
        return csv_path, meta_path


def _study_test_points(benchmark: str, dimension: int, n_test_points: int, seed: int) -> np.ndarray:
    """Seeded random points; the cheap 2-D truss uses a tensor grid instead."""
    if benchmark == "truss2":
        side = max(2, int(round(math.sqrt(n_test_points))))
        g = (np.arange(side) + 0.5) / side
        gx, gy = np.meshgrid(g, g)
        return np.column_stack([gx.ravel(), gy.ravel()])
    return draw_test_points(dimension, n_test_points, seed)


def run_study(method: str, benchmark: str, cfg: AdaptiveConfig | None = None, *,
              benchmark_params: dict | None = None, seed: int = 0,
              n_test_points: int = 10_000, output_dir=None, stem: str | None = None,
              persist_surrogate: bool = False) -> StudyReport:
    """Build a surrogate with one method, recording one report row per level.

    Deterministic for a fixed seed and configuration (the wall_time column
    aside).  When `output_dir` is given, writes `<stem>.csv`, `<stem>.json`
    and optionally `<stem>.surrogate`.
    """
    method = method.upper()
    if method not in METHODS:
        raise SparseGridError(f"unknown method {method!r}; expected one of {METHODS}")
    f, echo = get_benchmark(benchmark, benchmark_params)
    if cfg is None:
        cfg = AdaptiveConfig(dimension=f.dimension)
    if cfg.dimension != f.dimension:
        raise SparseGridError(
            f"config dimension {cfg.dimension} != benchmark dimension {f.dimension}"
        )
    cfg = dataclasses.replace(cfg, use_splines=(method == "EASGC"))
    points = _study_test_points(benchmark, f.dimension, n_test_points, seed)
    true_values = np.array([f(x) for x in points])
    f.evaluations = 0

    report = StudyReport(method=method, benchmark=benchmark)
    start = time.perf_counter()
    previous = {"mean": None, "variance": None}

    def on_level(model, record):
        est = moments(model)
        mean_delta = (
            float("nan") if previous["mean"] is None else abs(est.mean - previous["mean"])
        )
        variance_delta = (
            float("nan") if previous["variance"] is None else abs(est.variance - previous["variance"])
        )
        previous["mean"] = est.mean
        previous["variance"] = est.variance
        report.rows.append(StudyRow(
            level=record.level,
            full_evals=record.full_evaluations,
            spline_evals=record.spline_interpolations,
            max_abs_error=max_abs_error(model, true_values, points),
            rmse=rmse(model, true_values, points),
            mean=est.mean,
            variance=est.variance,
            mean_delta=mean_delta,
            variance_delta=variance_delta,
            wall_time=time.perf_counter() - start,
        ))

    result = _run_method(f, cfg, method, on_level)

    report.metadata = {
        "method": method,
        "benchmark": benchmark,
        "benchmark_params": echo,
        "dimension": f.dimension,
        "seed": seed,
        "n_test_points": int(points.shape[0]),
        "config": {
            "epsilon": cfg.epsilon,
            "max_level": cfg.max_level,
            "init_level": cfg.init_level,
            "min_line_points": (
                "inf" if math.isinf(cfg.min_line_points) else cfg.min_line_points
            ),
            "slope_tol": cfg.slope_tol,
        },
        "stopped_by": result.stopped_by,
        "full_evaluations": result.model.full_evaluations,
        "spline_interpolations": result.model.spline_interpolations,
        "nodes": len(result.model),
        "version": _version,
    }
    if output_dir is not None:
        csv_path, _ = report.write(output_dir, stem)
        if persist_surrogate:
            save_surrogate(csv_path.with_suffix(".surrogate"), result.model, result.region_db)
    return report


def _run_method(f: ModelFunction, cfg: AdaptiveConfig, method: str, on_level) -> BuildResult:
    """Dispatch one build with a per-level reporting hook."""
    if method == "CSC":
        return run_csc(f, cfg.dimension, cfg.max_level, on_level=on_level)
    if method == "ASGC":
        return run_asgc(f, cfg, on_level=on_level)
    return run_easgc(f, cfg, on_level=on_level)


# ---------------------------------------------------------------------------
# flat key=value configuration files
# ---------------------------------------------------------------------------

def _parse_value(raw: str):
    raw = raw.strip()
    lowered = raw.lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    if lowered in ("inf", "+inf"):
        return math.inf
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        pass
    if "," in raw:
        return [_parse_value(part) for part in raw.split(",")]
    return raw


def parse_config(path) -> dict:
    """Read a flat `key = value` file; dotted keys nest one level deep.

    Blank lines and `#` comments are ignored.  Example keys: dimension,
    epsilon, i_max, i1, m_min, phi, seed, method, benchmark, n_test_points,
    and benchmark parameters such as `poisson.n_cells = 256`.
    """
    out: dict = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise SparseGridError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, raw = stripped.split("=", 1)
        key = key.strip()
        value = _parse_value(raw)
        if "." in key:
            group, sub = key.split(".", 1)
            out.setdefault(group, {})
            if not isinstance(out[group], dict):
                raise SparseGridError(f"{path}:{lineno}: key {group!r} used both flat and dotted")
            out[group][sub] = value
        else:
            out[key] = value
    return out


_CONFIG_KEYS = {
    "epsilon": "epsilon",
    "i_max": "max_level",
    "i1": "init_level",
    "m_min": "min_line_points",
    "phi": "slope_tol",
}


def config_from_mapping(mapping: dict, dimension: int) -> AdaptiveConfig:
    """Build an AdaptiveConfig from parsed file keys for a given dimension."""
    kwargs = {"dimension": dimension}
    for file_key, field_name in _CONFIG_KEYS.items():
        if file_key in mapping:
            kwargs[field_name] = mapping[file_key]
    return AdaptiveConfig(**kwargs)
