"""Nested equidistant node hierarchy and piecewise-linear hierarchical interpolation.

The 1-D hierarchy places a single node at 0.5 on level 1, the two boundary
nodes on level 2, and 2**(i-2) new nodes at the odd multiples of 2**(1-i) on
every level i >= 3.  Levels nest: the cumulative grid at level i contains the
grid at level i-1, and every dyadic coordinate has exactly one birth level.

Multi-dimensional points carry one (level, index) pair per dimension.  Their
basis functions are tensor products of 1-D hats (constant on level 1, half-hat
on level 2, full hat of half-width 2**(1-i) above).  A surrogate is a sum of
basis functions weighted by hierarchical surpluses: the surplus of a node is
the model output there minus the interpolant built from all strictly coarser
levels, so the interpolant reproduces every stored output exactly.

Node identity is exact: coordinates are dyadic rationals stored as
(numerator, power-of-two exponent) pairs, so deduplication never depends on
floating-point tolerances.

A finished model is immutable and safe for concurrent evaluation; construction
is single-writer and proceeds level by level.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import (
    ContractViolationError,
    DimensionMismatchError,
    EmptyModelError,
    InvalidNodeError,
)

__all__ = [
    "NodeIndex1D",
    "GridPoint",
    "HierarchicalNode",
    "Provenance",
    "SurrogateModel",
    "coord_1d",
    "dyadic_1d",
    "node_from_dyadic",
    "basis_1d",
    "basis_nd",
    "children_1d",
    "make_sons",
    "root_point",
    "interpolate",
    "compute_surplus",
]


@dataclass(frozen=True, order=True)
class NodeIndex1D:
    """One node of the nested 1-D hierarchy, identified by (level, index).

    level 1 has the single node 0.5 (index 0); level 2 has the boundary
    nodes 0 and 1 (indices 0 and 1); level i >= 3 has indices
    0 .. 2**(i-2) - 1 over the new coordinates (2*index + 1) * 2**(1-i).
    """

    level: int
    index: int

    def __post_init__(self):
        if self.level < 1:
            raise InvalidNodeError(f"level must be >= 1, got {self.level}")
        if self.index < 0 or self.index >= _new_nodes_on_level(self.level):
            raise InvalidNodeError(
                f"index {self.index} out of range for level {self.level}"
            )


def _new_nodes_on_level(level: int) -> int:
    """Size of the level's newly-added node set (1, 2, then 2**(i-2))."""
    if level == 1:
        return 1
    if level == 2:
        return 2
    return 2 ** (level - 2)


def cumulative_nodes(level: int) -> int:
    """Total 1-D nodes up to and including `level` (1, then 2**(i-1) + 1)."""
    if level < 1:
        raise InvalidNodeError(f"level must be >= 1, got {level}")
    if level == 1:
        return 1
    return 2 ** (level - 1) + 1


def dyadic_1d(n: NodeIndex1D) -> tuple[int, int]:
    """Exact coordinate of a node as (numerator, exponent): value = num / 2**exp.

    The pair is canonical (odd numerator unless the value is 0 or 1), so equal
    coordinates always produce equal pairs.
    """
    if n.level == 1:
        return (1, 1)
    if n.level == 2:
        return (n.index, 0)
    return (2 * n.index + 1, n.level - 1)


def coord_1d(n: NodeIndex1D) -> float:
    """Coordinate of a node in [0, 1]; exact, since dyadics are representable."""
    num, exp = dyadic_1d(n)
    return num / (1 << exp)


def node_from_dyadic(num: int, exp: int) -> NodeIndex1D:
    """Inverse of dyadic_1d: recover the unique node owning a dyadic coordinate."""
    if num < 0 or exp < 0 or num > (1 << exp):
        raise InvalidNodeError(f"dyadic {num}/2^{exp} outside [0, 1]")
    while num % 2 == 0 and exp > 0:
        num //= 2
        exp -= 1
    if exp == 0:
        return NodeIndex1D(2, num)
    if exp == 1:
        return NodeIndex1D(1, 0)
    return NodeIndex1D(exp + 1, (num - 1) // 2)


def basis_1d(n: NodeIndex1D, x: float) -> float:
    """Hierarchical hat function of node `n` evaluated at x.

    Level 1 is constant 1.  Level i >= 2 is max(0, 1 - |x - c| * 2**(i-1)),
    a hat of half-width 2**(1-i) centred at the node (a half-hat for the
    boundary nodes of level 2 once clipped to [0, 1]).  The value is 1 at the
    node and 0 at every same-or-coarser-level node coordinate.
    """
    if n.level == 1:
        return 1.0
    return max(0.0, 1.0 - abs(x - coord_1d(n)) * float(1 << (n.level - 1)))


def children_1d(n: NodeIndex1D) -> list[NodeIndex1D]:
    """Sons of a node in the dyadic refinement tree.

    The root spawns both boundary nodes; each boundary node has a single son
    (the adjacent quarter point); every deeper node spawns the two nodes at
    c +/- 2**(-level).
    """
    if n.level == 1:
        return [NodeIndex1D(2, 0), NodeIndex1D(2, 1)]
    if n.level == 2:
        # node at 0 -> 0.25, node at 1 -> 0.75
        return [NodeIndex1D(3, n.index)]
    return [NodeIndex1D(n.level + 1, 2 * n.index), NodeIndex1D(n.level + 1, 2 * n.index + 1)]


@dataclass(frozen=True, order=True)
class GridPoint:
    """A d-dimensional collocation node: one NodeIndex1D per dimension."""

    dims: tuple[NodeIndex1D, ...]

    @property
    def dimension(self) -> int:
        return len(self.dims)

    @property
    def depth(self) -> int:
        """Sum of per-dimension levels (root has depth d)."""
        return sum(n.level for n in self.dims)

    @property
    def level(self) -> int:
        """Reported interpolation level, counted from 0 at the root."""
        return self.depth - len(self.dims)

    @property
    def key(self) -> tuple[tuple[int, int], ...]:
        """Canonical identifier built from the exact dyadic coordinates."""
        return tuple(dyadic_1d(n) for n in self.dims)

    def coordinate(self) -> np.ndarray:
        return np.array([coord_1d(n) for n in self.dims])


def root_point(dimension: int) -> GridPoint:
    """The all-levels-one point at the centre of the cube."""
    if dimension < 1:
        raise InvalidNodeError(f"dimension must be >= 1, got {dimension}")
    return GridPoint(tuple(NodeIndex1D(1, 0) for _ in range(dimension)))


def basis_nd(p: GridPoint, x) -> float:
    """Product over dimensions of the 1-D basis functions of `p` at x."""
    x = np.asarray(x, dtype=float)
    if x.shape != (p.dimension,):
        raise DimensionMismatchError(
            f"point has dimension {p.dimension}, query has shape {x.shape}"
        )
    out = 1.0
    for n, xs in zip(p.dims, x):
        out *= basis_1d(n, float(xs))
        if out == 0.0:
            break
    return out


def make_sons(p: GridPoint) -> list[GridPoint]:
    """All refinement sons of `p`: each dimension's children in turn.

    Per-dimension level rises by exactly one; at most 2d points (fewer when a
    dimension sits at level 2, whose nodes have a single son each).
    """
    sons = []
    for s, n in enumerate(p.dims):
        for child in children_1d(n):
            dims = p.dims[:s] + (child,) + p.dims[s + 1:]
            sons.append(GridPoint(dims))
    return sons


class Provenance(enum.Enum):
    """How a node's output was obtained."""

    FULL_MODEL = "F"
    SPLINE_INTERPOLATED = "S"


@dataclass
class HierarchicalNode:
    """A stored collocation node with its output and hierarchical surpluses.

    `w` is output minus the coarser-level interpolant at the point; `v` bears
    the same relation for the squared output (needed for analytic variance).
    """

    point: GridPoint
    output: float
    w: float
    v: float
    provenance: Provenance = Provenance.FULL_MODEL


class SurrogateModel:
    """A hierarchical sparse grid interpolant under construction or finished.

    Nodes are held in insertion order, which is always non-decreasing in
    level: surpluses at a level are computed against the prefix of strictly
    coarser nodes.  Keys are exact dyadic identifiers and must be unique.
    Once frozen the model is immutable; evaluation is read-only throughout.
    """

    def __init__(self, dimension: int):
        if dimension < 1:
            raise InvalidNodeError(f"dimension must be >= 1, got {dimension}")
        self.dimension = dimension
        self._node_list: list[HierarchicalNode] = []
        self._index: dict[tuple, int] = {}
        self._level_start: dict[int, int] = {}  # level -> index of first node
        self.full_evaluations = 0
        self.spline_interpolations = 0
        self._frozen = False
        self._arrays = None  # lazily built dense view, invalidated on insert

    # -- container basics ----------------------------------------------------

    def __len__(self) -> int:
        return len(self._node_list)

    def __contains__(self, item) -> bool:
        key = item.key if isinstance(item, GridPoint) else item
        return key in self._index

    def nodes(self):
        """Nodes in insertion (level-major) order."""
        return self._node_list

    def node_at(self, point: GridPoint) -> HierarchicalNode:
        return self._node_list[self._index[point.key]]

    def points(self):
        return [node.point for node in self._node_list]

    @property
    def depth(self) -> int:
        """Highest reported level present (root counts as level 0)."""
        if not self._node_list:
            raise EmptyModelError("model has no nodes")
        return max(self._level_start)

    def levels_present(self) -> list[int]:
        return sorted(self._level_start)

    def nodes_on_level(self, level: int) -> list[HierarchicalNode]:
        start = self._level_start.get(level)
        if start is None:
            return []
        end = min(
            (s for s in self._level_start.values() if s > start),
            default=len(self._node_list),
        )
        return self._node_list[start:end]

    # -- construction ---------------------------------------------------------

    def add_node(self, node: HierarchicalNode) -> None:
        """Insert a node.  Levels must arrive in non-decreasing order."""
        if self._frozen:
            raise ContractViolationError("model is frozen")
        if node.point.dimension != self.dimension:
            raise DimensionMismatchError(
                f"node dimension {node.point.dimension} != model dimension {self.dimension}"
            )
        key = node.point.key
        if key in self._index:
            raise ContractViolationError(f"duplicate node key {key}")
        level = node.point.level
        if self._node_list and level < max(self._level_start):
            raise ContractViolationError(
                f"level {level} inserted after level {max(self._level_start)}"
            )
        if level not in self._level_start:
            self._level_start[level] = len(self._node_list)
        self._index[key] = len(self._node_list)
        self._node_list.append(node)
        self._arrays = None

    def freeze(self) -> None:
        self._frozen = True

    @property
    def frozen(self) -> bool:
        return self._frozen

    # -- dense evaluation kernel ----------------------------------------------

    def _dense(self):
        """Per-node arrays: centres (N,d), inverse half-widths (N,d), w, v.

        Level-1 dimensions get inverse half-width 0 so the shared hat formula
        1 - |x - c| * inv collapses to the constant basis.
        """
        if self._arrays is None:
            nodes = self._node_list
            n, d = len(nodes), self.dimension
            centers = np.empty((n, d))
            inv_hw = np.empty((n, d))
            w = np.empty(n)
            v = np.empty(n)
            for i, node in enumerate(nodes):
                for s, idx in enumerate(node.point.dims):
                    centers[i, s] = coord_1d(idx)
                    inv_hw[i, s] = 0.0 if idx.level == 1 else float(1 << (idx.level - 1))
                w[i] = node.w
                v[i] = node.v
            self._arrays = (centers, inv_hw, w, v)
        return self._arrays

    def _evaluate_sum(self, x_many: np.ndarray, coeff: str = "w", prefix: int | None = None) -> np.ndarray:
        """Sum of coeff * basis over the first `prefix` nodes, at many points."""
        centers, inv_hw, w, v = self._dense()
        c = w if coeff == "w" else v
        if prefix is not None:
            centers, inv_hw, c = centers[:prefix], inv_hw[:prefix], c[:prefix]
        n = centers.shape[0]
        out = np.zeros(x_many.shape[0])
        if n == 0:
            return out
        chunk = max(1, int(4_000_000 // n))
        for lo in range(0, x_many.shape[0], chunk):
            xs = x_many[lo:lo + chunk]
            prod = np.ones((xs.shape[0], n))
            for s in range(self.dimension):
                t = 1.0 - np.abs(xs[:, s:s + 1] - centers[None, :, s]) * inv_hw[None, :, s]
                np.maximum(t, 0.0, out=t)
                prod *= t
            out[lo:lo + chunk] = prod @ c
        return out

    def interpolate_many(self, x_many, coeff: str = "w") -> np.ndarray:
        """Evaluate the surrogate at a batch of points, shape (n, d)."""
        if not self._node_list:
            raise EmptyModelError("cannot interpolate an empty model")
        x_many = np.asarray(x_many, dtype=float)
        if x_many.ndim != 2 or x_many.shape[1] != self.dimension:
            raise DimensionMismatchError(
                f"expected shape (n, {self.dimension}), got {x_many.shape}"
            )
        return self._evaluate_sum(x_many, coeff=coeff)

    def interpolate(self, x) -> float:
        """Evaluate the surrogate at a single point in [0, 1]^d."""
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dimension,):
            raise DimensionMismatchError(
                f"expected shape ({self.dimension},), got {x.shape}"
            )
        if not self._node_list:
            raise EmptyModelError("cannot interpolate an empty model")
        return float(self._evaluate_sum(x[None, :])[0])

    def surpluses_against_prefix(self, points: np.ndarray, values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """w and v surpluses of new values against the current model state.

        Caller guarantees the model holds only strictly coarser levels (the
        level-ordered drivers do this by construction).
        """
        if len(self._node_list) == 0:
            return values.copy(), values.copy() ** 2
        w = values - self._evaluate_sum(points, coeff="w")
        v = values ** 2 - self._evaluate_sum(points, coeff="v")
        return w, v


def interpolate(m: SurrogateModel, x) -> float:
    """Module-level alias for SurrogateModel.interpolate."""
    return m.interpolate(x)


def compute_surplus(m: SurrogateModel, p: GridPoint, value: float) -> float:
    """Hierarchical surplus of `value` at point `p` against model `m`.

    `m` must contain only levels strictly below p's (or be empty, in which
    case the surplus is the value itself: the level-0 interpolant is zero).
    A node at p's level or deeper whose basis covers p violates the contract.
    """
    if len(m) == 0:
        return float(value)
    if p.dimension != m.dimension:
        raise DimensionMismatchError(
            f"point dimension {p.dimension} != model dimension {m.dimension}"
        )
    coord = p.coordinate()
    for node in m.nodes():
        if node.point.level >= p.level and basis_nd(node.point, coord) != 0.0:
            raise ContractViolationError(
                f"model contains covering node at level {node.point.level} >= {p.level}"
            )
    return float(value) - m.interpolate(coord)
