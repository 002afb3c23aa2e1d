"""Benchmark models exposed through the ModelFunction contract.

Four families: a 2-D function with a curved line singularity, the 5-D
oscillatory / corner-peak / discontinuous test functions, a spatial 1-D
diffusion problem whose log-conductivity is a truncated random expansion in
up to hundreds of uniform variables, and a six-member planar truss whose
diagonal can buckle and drop out of the load path.  All models map the unit
cube to a scalar and are pure, so they are safe to evaluate concurrently.

`get_benchmark` wires each family to the unit cube under a registered string
name and echoes every parameter for reproducible reports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .adapt import ModelFunction
from .errors import SparseGridError

__all__ = [
    "line_singularity",
    "GenzParams",
    "genz_defaults",
    "genz_oscillatory",
    "genz_corner_peak",
    "genz_discontinuous",
    "PoissonSpec",
    "xi_coefficient",
    "diffusion_field",
    "poisson_solve",
    "TrussSpec",
    "solve_member_forces",
    "truss_member4_force",
    "get_benchmark",
    "benchmark_names",
]


# ---------------------------------------------------------------------------
# 2-D line singularity
# ---------------------------------------------------------------------------

def line_singularity(x: float, y: float) -> float:
    """1 / (|0.3 - x^2 - y^2| + 0.1): smooth except on a circular arc."""
    return 1.0 / (abs(0.3 - x * x - y * y) + 0.1)


# ---------------------------------------------------------------------------
# 5-D test family
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GenzParams:
    """Shift and weight constants of the 5-D test family."""

    w1: float = 0.5
    w2: float = 0.5
    c: tuple[float, ...] = (1.0, 1.0, 1.0, 1.0, 1.0)

    def __post_init__(self):
        if len(self.c) != 5:
            raise ValueError(f"c must have 5 entries, got {len(self.c)}")
        if any(ci <= 0 for ci in self.c):
            raise ValueError("c must be strictly positive")
        if not (0.0 <= self.w1 <= 1.0 and 0.0 <= self.w2 <= 1.0):
            raise ValueError("w1 and w2 must lie in [0, 1]")


def genz_defaults(kind: str) -> GenzParams:
    """Default constants: c_i proportional to 1/(i+1), scaled per family.

    The weight sums are 5.0 (oscillatory), 2.0 (corner peak) and 4.0
    (discontinuous), a standard difficulty normalisation.
    """
    totals = {"oscillatory": 5.0, "corner_peak": 2.0, "discontinuous": 4.0}
    if kind not in totals:
        raise ValueError(f"unknown kind {kind!r}")
    raw = np.array([1.0 / (i + 1) for i in range(1, 6)])
    c = raw * (totals[kind] / raw.sum())
    return GenzParams(c=tuple(float(ci) for ci in c))


def genz_oscillatory(x, p: GenzParams) -> float:
    """cos(2 pi w1 + sum c_i x_i)."""
    x = np.asarray(x, dtype=float)
    return float(np.cos(2.0 * np.pi * p.w1 + np.dot(p.c, x)))


def genz_corner_peak(x, p: GenzParams) -> float:
    """(1 + sum c_i x_i)^-6, peaked at the origin corner."""
    x = np.asarray(x, dtype=float)
    return float((1.0 + np.dot(p.c, x)) ** (-6))


def genz_discontinuous(x, p: GenzParams) -> float:
    """exp(sum c_i x_i) on x1 < w1 and x2 < w2, exactly zero elsewhere."""
    x = np.asarray(x, dtype=float)
    if x[0] >= p.w1 or x[1] >= p.w2:
        return 0.0
    return float(np.exp(np.dot(p.c, x)))


# ---------------------------------------------------------------------------
# spatial 1-D diffusion with random conductivity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PoissonSpec:
    """Random-diffusivity two-point boundary value problem parameters.

    The log-conductivity expansion is truncated at `n_random` terms; the
    correlation length sets the period max(1, 2 L_c) and the decay ratio
    L_c / period of the expansion coefficients.
    """

    n_random: int = 10
    correlation_length: float = 0.5
    n_cells: int = 512
    x_obs: float = 0.5

    def __post_init__(self):
        if self.n_random < 1:
            raise ValueError(f"n_random must be >= 1, got {self.n_random}")
        if self.n_cells < 10:
            raise ValueError(f"n_cells must be >= 10, got {self.n_cells}")
        if not 0.0 < self.x_obs < 1.0:
            raise ValueError(f"x_obs must lie in (0, 1), got {self.x_obs}")
        if self.correlation_length <= 0:
            raise ValueError("correlation_length must be positive")

    @property
    def period(self) -> float:
        return max(1.0, 2.0 * self.correlation_length)

    @property
    def decay_ratio(self) -> float:
        return self.correlation_length / self.period


def xi_coefficient(n: int, decay_ratio: float) -> float:
    """Expansion coefficient of term n >= 2 (Gaussian decay in floor(n/2))."""
    if n < 2:
        raise ValueError(f"xi is defined for n >= 2, got {n}")
    k = n // 2
    return math.sqrt(math.sqrt(math.pi) * decay_ratio) * math.exp(
        -((k * math.pi * decay_ratio) ** 2) / 8.0
    )


def diffusion_field(x, y, spec: PoissonSpec) -> np.ndarray:
    """Conductivity 0.5 + exp(expansion) at positions x for unit-cube draw y.

    Term 1 is the constant mode y_1 * sqrt(sqrt(pi) L / 2); terms n >= 2
    alternate sine (even n) and cosine (odd n) of frequency floor(n/2) over
    the period.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if y.shape != (spec.n_random,):
        raise SparseGridError(
            f"expected {spec.n_random} random inputs, got shape {y.shape}"
        )
    ratio = spec.decay_ratio
    expo = np.full_like(x, 1.0 + y[0] * math.sqrt(math.sqrt(math.pi) * ratio / 2.0))
    for n in range(2, spec.n_random + 1):
        k = n // 2
        phase = k * math.pi * x / spec.period
        mode = np.sin(phase) if n % 2 == 0 else np.cos(phase)
        expo += xi_coefficient(n, ratio) * mode * y[n - 1]
    return 0.5 + np.exp(expo)


def poisson_solve(y, spec: PoissonSpec, kappa_fn=None) -> float:
    """Solve -(kappa u')' = 2x on (0,1) with u(0) = u(1) = 0; return u(x_obs).

    Conservative second-order finite differences on n_cells cells with
    harmonic-mean face conductivities; the observation value is linearly
    interpolated from the nodal solution.  `kappa_fn` overrides the random
    field (test hook for manufactured solutions).
    """
    n = spec.n_cells
    x = np.linspace(0.0, 1.0, n + 1)
    if kappa_fn is not None:
        kappa = np.asarray(kappa_fn(x), dtype=float)
        if kappa.shape != x.shape:
            kappa = np.full_like(x, float(kappa))
    else:
        kappa = diffusion_field(x, y, spec)
    if np.any(kappa <= 0.0):
        raise SparseGridError("conductivity must be positive everywhere")
    face = 2.0 * kappa[:-1] * kappa[1:] / (kappa[:-1] + kappa[1:])
    h = 1.0 / n
    rhs = -2.0 * x[1:-1] * h * h
    # tridiagonal system over interior nodes
    ab = np.zeros((3, n - 1))
    ab[0, 1:] = face[1:-1]            # upper
    ab[1, :] = -(face[:-1] + face[1:])  # diagonal
    ab[2, :-1] = face[1:-1]           # lower
    try:
        interior = solve_banded((1, 1), ab, rhs)
    except Exception as exc:
        raise SparseGridError(f"linear solve failed: {exc}") from exc
    u = np.zeros(n + 1)
    u[1:-1] = interior
    return float(np.interp(spec.x_obs, x, u))


# ---------------------------------------------------------------------------
# planar truss with a buckling diagonal
# ---------------------------------------------------------------------------

_SQRT3 = math.sqrt(3.0)

# panel nodes: A top-left, B top-right, C bottom-right (loaded), D bottom-left
_TRUSS_NODES = np.array([
    [0.0, 2.0 * _SQRT3],
    [2.0, 2.0 * _SQRT3],
    [2.0, 0.0],
    [0.0, 0.0],
])
# members 1..6: verticals B-C and A-D, chords A-B and D-C, diagonals B-D and A-C
_TRUSS_MEMBERS = ((1, 2), (1, 3), (0, 1), (0, 3), (0, 2), (3, 2))
_FIXED_DOFS = (0, 1, 3)  # pin at A, vertical roller at B
_DIAGONAL_INDEX = 4      # member 5, the brace allowed to buckle
_OUTPUT_INDEX = 3        # member 4, the reported vertical


@dataclass(frozen=True)
class TrussSpec:
    """Material, load and geometry constants of the six-member panel.

    Areas are in m^2.  The buckling model treats member 5 as a solid circular
    strut, I = A^2 / (4 pi).  The default load is chosen so the buckling
    boundary crosses the sampled area range [3, 9] cm^2.
    """

    modulus: float = 200e9
    load: float = 4000.0
    base_area: float = 6.0e-4

    def __post_init__(self):
        if self.modulus <= 0 or self.load <= 0 or self.base_area <= 0:
            raise ValueError("modulus, load and base_area must be positive")

    def critical_load(self, area: float) -> float:
        """Euler critical load of member 5 for a solid circular section."""
        inertia = area * area / (4.0 * math.pi)
        length = _member_lengths()[_DIAGONAL_INDEX]
        return math.pi ** 2 * self.modulus * inertia / length ** 2

    def default_areas(self) -> np.ndarray:
        return np.full(6, self.base_area)


def _member_lengths() -> np.ndarray:
    d = _TRUSS_NODES[[j for _, j in _TRUSS_MEMBERS]] - _TRUSS_NODES[[i for i, _ in _TRUSS_MEMBERS]]
    return np.linalg.norm(d, axis=1)


def solve_member_forces(areas, spec: TrussSpec, include_diagonal: bool = True) -> np.ndarray:
    """Axial forces (tension positive) by the direct stiffness method.

    With `include_diagonal` off, member 5 is removed and its force reported
    as 0 (the statically determinate configuration).
    """
    areas = np.asarray(areas, dtype=float)
    if areas.shape != (6,):
        raise SparseGridError(f"expected 6 member areas, got shape {areas.shape}")
    if np.any(areas <= 0.0):
        raise SparseGridError("member areas must be positive")
    members = [
        (m, idx) for idx, m in enumerate(_TRUSS_MEMBERS)
        if include_diagonal or idx != _DIAGONAL_INDEX
    ]
    ndof = 2 * len(_TRUSS_NODES)
    stiffness = np.zeros((ndof, ndof))
    for (i, j), idx in members:
        xi, xj = _TRUSS_NODES[i], _TRUSS_NODES[j]
        delta = xj - xi
        length = float(np.hypot(*delta))
        cx, cy = delta / length
        k = spec.modulus * areas[idx] / length
        block = k * np.array([
            [cx * cx, cx * cy, -cx * cx, -cx * cy],
            [cx * cy, cy * cy, -cx * cy, -cy * cy],
            [-cx * cx, -cx * cy, cx * cx, cx * cy],
            [-cx * cy, -cy * cy, cx * cy, cy * cy],
        ])
        dofs = [2 * i, 2 * i + 1, 2 * j, 2 * j + 1]
        stiffness[np.ix_(dofs, dofs)] += block
    loads = np.zeros(ndof)
    loads[4] = -spec.load            # P to the left at C
    loads[5] = -_SQRT3 * spec.load   # sqrt(3) P downward at C
    free = [d for d in range(ndof) if d not in _FIXED_DOFS]
    k_ff = stiffness[np.ix_(free, free)]
    try:
        u_free = np.linalg.solve(k_ff, loads[free])
    except np.linalg.LinAlgError as exc:
        raise SparseGridError(f"singular stiffness matrix: {exc}") from exc
    u = np.zeros(ndof)
    u[free] = u_free
    forces = np.zeros(6)
    for (i, j), idx in members:
        xi, xj = _TRUSS_NODES[i], _TRUSS_NODES[j]
        delta = xj - xi
        length = float(np.hypot(*delta))
        direction = delta / length
        stretch = (u[2 * j:2 * j + 2] - u[2 * i:2 * i + 2]) @ direction
        forces[idx] = spec.modulus * areas[idx] / length * stretch
    return forces


def truss_member4_force(areas, spec: TrussSpec) -> float:
    """Force in member 4 with the buckling switch applied.

    The indeterminate panel is solved first; if the brace's compressive force
    exceeds its Euler critical load it carries nothing, and the determinate
    panel without it is solved instead.
    """
    forces = solve_member_forces(areas, spec, include_diagonal=True)
    brace = forces[_DIAGONAL_INDEX]
    if brace < 0.0 and -brace > spec.critical_load(float(np.asarray(areas)[_DIAGONAL_INDEX])):
        forces = solve_member_forces(areas, spec, include_diagonal=False)
    return float(forces[_OUTPUT_INDEX])


# ---------------------------------------------------------------------------
# benchmark registry
# ---------------------------------------------------------------------------

def _affine(lo: float, hi: float, t: float) -> float:
    return lo + (hi - lo) * t


def _make_kink(params):
    kink_pos = float(params.pop("kink_pos", 0.4375))
    echo = {"kink_pos": kink_pos}
    return ModelFunction(lambda x: abs(float(x[0]) - kink_pos), 1, "kink"), echo


def _make_line_singularity(params):
    return ModelFunction(lambda x: line_singularity(x[0], x[1]), 2, "line_singularity"), {}


def _make_genz(kind):
    def build(params):
        defaults = genz_defaults(kind)
        p = GenzParams(
            w1=float(params.pop("w1", defaults.w1)),
            w2=float(params.pop("w2", defaults.w2)),
            c=tuple(params.pop("c", defaults.c)),
        )
        func = {
            "oscillatory": genz_oscillatory,
            "corner_peak": genz_corner_peak,
            "discontinuous": genz_discontinuous,
        }[kind]
        echo = {"w1": p.w1, "w2": p.w2, "c": list(p.c)}
        return ModelFunction(lambda x: func(x, p), 5, f"genz_{kind}"), echo
    return build


def _make_poisson(params):
    spec = PoissonSpec(
        n_random=int(params.pop("n_random", 10)),
        correlation_length=float(params.pop("correlation_length", 0.5)),
        n_cells=int(params.pop("n_cells", 512)),
        x_obs=float(params.pop("x_obs", 0.5)),
    )
    echo = {
        "n_random": spec.n_random,
        "correlation_length": spec.correlation_length,
        "n_cells": spec.n_cells,
        "x_obs": spec.x_obs,
    }
    return ModelFunction(lambda y: poisson_solve(y, spec), spec.n_random, "poisson"), echo


def _truss_spec_from(params) -> TrussSpec:
    return TrussSpec(
        modulus=float(params.pop("modulus", 200e9)),
        load=float(params.pop("load", 4000.0)),
        base_area=float(params.pop("base_area", 6.0e-4)),
    )


def _make_truss2(params):
    spec = _truss_spec_from(params)

    def f(x):
        areas = spec.default_areas()
        areas[1] = _affine(3e-4, 9e-4, float(x[0]))  # member 2
        areas[4] = _affine(3e-4, 9e-4, float(x[1]))  # member 5
        return truss_member4_force(areas, spec)

    echo = {"modulus": spec.modulus, "load": spec.load, "base_area": spec.base_area,
            "random_members": [2, 5], "bounds_cm2": [[3, 9], [3, 9]]}
    return ModelFunction(f, 2, "truss2"), echo


def _make_truss3(params):
    spec = _truss_spec_from(params)

    def f(x):
        areas = spec.default_areas()
        areas[0] = _affine(5.5e-4, 6.5e-4, float(x[0]))  # member 1
        areas[2] = _affine(5.5e-4, 6.5e-4, float(x[1]))  # member 3
        areas[4] = _affine(3e-4, 9e-4, float(x[2]))      # member 5
        return truss_member4_force(areas, spec)

    echo = {"modulus": spec.modulus, "load": spec.load, "base_area": spec.base_area,
            "random_members": [1, 3, 5],
            "bounds_cm2": [[5.5, 6.5], [5.5, 6.5], [3, 9]]}
    return ModelFunction(f, 3, "truss3"), echo


_REGISTRY = {
    "kink": _make_kink,
    "line_singularity": _make_line_singularity,
    "genz_oscillatory": _make_genz("oscillatory"),
    "genz_corner_peak": _make_genz("corner_peak"),
    "genz_discontinuous": _make_genz("discontinuous"),
    "poisson": _make_poisson,
    "truss2": _make_truss2,
    "truss3": _make_truss3,
}


def benchmark_names() -> list[str]:
    return sorted(_REGISTRY)


def get_benchmark(name: str, params: dict | None = None):
    """Instantiate a registered benchmark.

    Returns (ModelFunction, parameter echo).  Unknown parameter keys raise,
    so configuration typos fail loudly.
    """
    if name not in _REGISTRY:
        raise SparseGridError(
            f"unknown benchmark {name!r}; available: {', '.join(benchmark_names())}"
        )
    params = dict(params or {})
    model, echo = _REGISTRY[name](params)
    if params:
        raise SparseGridError(
            f"unused benchmark parameters for {name!r}: {sorted(params)}"
        )
    return model, echo
