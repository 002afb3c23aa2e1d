"""Sparse grid collocation surrogates on the unit hypercube.

Conventional level-by-level construction, surplus-driven adaptive refinement,
and a spline-accelerated variant that certifies smooth 1-D lines and replaces
full model evaluations inside them.  Moments come analytically from the
hierarchical surpluses; a study harness compares the methods on the bundled
benchmarks and writes CSV reports.
"""

__version__ = "0.1.0"

from .adapt import (
    AdaptiveConfig,
    BuildResult,
    LevelRecord,
    ModelFunction,
    refine_candidates,
    run_asgc,
    run_csc,
)
from .core import (
    GridPoint,
    HierarchicalNode,
    NodeIndex1D,
    Provenance,
    SurrogateModel,
    basis_1d,
    basis_nd,
    children_1d,
    compute_surplus,
    coord_1d,
    interpolate,
    make_sons,
    root_point,
)
from .errors import (
    ContractViolationError,
    DimensionMismatchError,
    EmptyModelError,
    EvaluationError,
    InvalidNodeError,
    PersistenceError,
    SparseGridError,
)
from .harness import (
    MonteCarloEstimate,
    StudyReport,
    StudyRow,
    config_from_mapping,
    draw_test_points,
    max_abs_error,
    mc_reference,
    parse_config,
    rmse,
    run_study,
)
from .io import load_surrogate, save_surrogate
from .models import benchmark_names, get_benchmark
from .moments import MomentEstimate, moments, weight_1d, weight_nd
from .smooth import (
    CubicLineSpline,
    LineGroup,
    RegionDatabase,
    SmoothRegion,
    derivative_scan,
    group_lines,
    lookup,
    run_easgc,
    spline_value,
    store_region,
)
