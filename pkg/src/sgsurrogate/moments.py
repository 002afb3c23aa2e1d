"""Analytic mean and variance of a surrogate via exact basis integrals.

Each hierarchical basis function integrates over [0, 1]^d to a product of
per-level 1-D weights (1 for the constant level, 1/4 for the boundary
half-hats, 2**(1-i) for full hats).  The mean is therefore the dot product of
the w surpluses with these weights; the mean square uses the v surpluses,
which track the squared output through the same hierarchy.  All operations
here are read-only over a finished model.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import GridPoint, SurrogateModel
from .errors import EmptyModelError, InvalidNodeError

__all__ = ["MomentEstimate", "weight_1d", "weight_nd", "moments"]

# relative slack allowed before a negative variance is treated as an error
_VARIANCE_TOL = 1e-12


@dataclass(frozen=True)
class MomentEstimate:
    """Mean, mean square and variance extracted from a surrogate."""

    mean: float
    mean_square: float
    variance: float


def weight_1d(level: int) -> float:
    """Integral over [0, 1] of a 1-D basis function at the given level."""
    if level < 1:
        raise InvalidNodeError(f"level must be >= 1, got {level}")
    if level == 1:
        return 1.0
    if level == 2:
        return 0.25
    return 2.0 ** (1 - level)


def weight_nd(p: GridPoint) -> float:
    """Integral of the d-dimensional basis of `p` over the unit cube."""
    out = 1.0
    for n in p.dims:
        out *= weight_1d(n.level)
    return out


def _weights_vector(m: SurrogateModel) -> np.ndarray:
    return np.array([weight_nd(node.point) for node in m.nodes()])


def moments(m: SurrogateModel) -> MomentEstimate:
    """Analytic moments of the surrogate under i.i.d. uniform inputs.

    Variance is the mean square minus the squared mean; a tiny negative value
    from rounding (within 1e-12 of the mean square) is clamped to zero, while
    anything more negative signals a corrupted model and raises.
    """
    if len(m) == 0:
        raise EmptyModelError("cannot take moments of an empty model")
    weights = _weights_vector(m)
    w = np.array([node.w for node in m.nodes()])
    v = np.array([node.v for node in m.nodes()])
    mean = float(w @ weights)
    mean_square = float(v @ weights)
    variance = mean_square - mean * mean
    if variance < 0.0:
        if variance >= -_VARIANCE_TOL * abs(mean_square):
            variance = 0.0
        else:
            raise ValueError(
                f"variance {variance} negative beyond rounding tolerance"
            )
    return MomentEstimate(mean=mean, mean_square=mean_square, variance=variance)
