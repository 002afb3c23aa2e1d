"""Line-oriented text persistence for surrogates and their region databases.

Layout: a header line (dimension, depth, evaluation counts), one node per
line (per-dimension level:index pairs, output, surplus, squared-output
surplus, provenance flag), then an optional region section (dimension,
anchor, knots, outputs, midpoint, half-length; one region per line).  The
dyadic fields are integers, so round-trips are bit-exact; reals use 17
significant digits, which round-trips doubles exactly.  Writing is
deterministic for a given model, byte for byte.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .core import (
    GridPoint,
    HierarchicalNode,
    NodeIndex1D,
    Provenance,
    SurrogateModel,
)
from .errors import PersistenceError
from .smooth import RegionDatabase, SmoothRegion

__all__ = ["save_surrogate", "load_surrogate"]

_MAGIC = "surrogate"


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _dims_token(point: GridPoint) -> str:
    return ",".join(f"{n.level}:{n.index}" for n in point.dims)


def _parse_dims(token: str) -> GridPoint:
    dims = []
    for part in token.split(","):
        level, index = part.split(":")
        dims.append(NodeIndex1D(int(level), int(index)))
    return GridPoint(tuple(dims))


def _region_lines(db: RegionDatabase):
    # creation order, so reloaded databases resolve lookup ties identically
    for region in sorted(db.regions(), key=lambda r: r.created_at):
        anchor = ",".join(f"{num}:{exp}" for num, exp in region.anchor) or "-"
        knots = ",".join(_fmt(k) for k in region.knots)
        outputs = ",".join(_fmt(o) for o in region.outputs)
        yield (
            f"{region.dim} {anchor} {knots} {outputs} "
            f"{_fmt(region.midpoint)} {_fmt(region.half_length)}"
        )


def save_surrogate(path, model: SurrogateModel, region_db: RegionDatabase | None = None) -> None:
    """Write a surrogate (and its smooth regions, if any) to a text file."""
    lines = [
        f"{_MAGIC} d={model.dimension} depth={model.depth} "
        f"full={model.full_evaluations} spline={model.spline_interpolations}"
    ]
    for node in model.nodes():
        lines.append(
            f"{_dims_token(node.point)} {_fmt(node.output)} {_fmt(node.w)} "
            f"{_fmt(node.v)} {node.provenance.value}"
        )
    if region_db is not None and len(region_db) > 0:
        lines.append(f"regions {len(region_db)}")
        lines.extend(_region_lines(region_db))
    Path(path).write_text("\n".join(lines) + "\n")


def load_surrogate(path) -> tuple[SurrogateModel, RegionDatabase | None]:
    """Read a surrogate file back; the inverse of save_surrogate."""
    text = Path(path).read_text()
    lines = text.splitlines()
    if not lines or not lines[0].startswith(_MAGIC + " "):
        raise PersistenceError(f"{path}: not a surrogate file")
    header = dict(
        item.split("=") for item in lines[0].split()[1:]
    )
    try:
        dimension = int(header["d"])
        full = int(header["full"])
        spline = int(header["spline"])
    except (KeyError, ValueError) as exc:
        raise PersistenceError(f"{path}: malformed header: {lines[0]!r}") from exc
    model = SurrogateModel(dimension)
    provenance_by_flag = {p.value: p for p in Provenance}
    i = 1
    try:
        while i < len(lines) and lines[i] and not lines[i].startswith("regions "):
            token, output, w, v, flag = lines[i].split()
            model.add_node(HierarchicalNode(
                point=_parse_dims(token),
                output=float(output),
                w=float(w),
                v=float(v),
                provenance=provenance_by_flag[flag],
            ))
            i += 1
    except (ValueError, KeyError) as exc:
        raise PersistenceError(f"{path}: bad node line {i}: {lines[i]!r}") from exc
    model.full_evaluations = full
    model.spline_interpolations = spline
    model.freeze()
    db = None
    if i < len(lines) and lines[i].startswith("regions "):
        db = RegionDatabase()
        try:
            for line in lines[i + 1:]:
                if not line:
                    continue
                dim, anchor_tok, knots_tok, outputs_tok, _mid, _half = line.split()
                anchor = tuple(
                    (int(num), int(exp))
                    for num, exp in (p.split(":") for p in anchor_tok.split(","))
                ) if anchor_tok != "-" else ()
                db.store(SmoothRegion(
                    dim=int(dim),
                    anchor=anchor,
                    knots=np.array([float(k) for k in knots_tok.split(",")]),
                    outputs=np.array([float(o) for o in outputs_tok.split(",")]),
                ))
        except (ValueError, KeyError) as exc:
            raise PersistenceError(f"{path}: bad region line: {line!r}") from exc
    return model, db
