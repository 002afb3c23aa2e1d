"""Node hierarchy, basis functions, surpluses and the interpolation property."""

import numpy as np
import pytest

from sgsurrogate import (
    ContractViolationError,
    DimensionMismatchError,
    EmptyModelError,
    GridPoint,
    HierarchicalNode,
    InvalidNodeError,
    NodeIndex1D,
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
from sgsurrogate.core import cumulative_nodes, dyadic_1d, node_from_dyadic


def level_coords(level):
    """Oracle: coordinates of the level's newly added nodes, by definition."""
    if level == 1:
        return [0.5]
    if level == 2:
        return [0.0, 1.0]
    return [(2 * j + 1) * 2.0 ** (1 - level) for j in range(2 ** (level - 2))]


def grid_coords(level):
    """Oracle: the full nested grid up to a level."""
    out = []
    for lv in range(1, level + 1):
        out.extend(level_coords(lv))
    return sorted(out)


class TestNodeHierarchy:
    def test_coord_examples(self):
        assert coord_1d(NodeIndex1D(1, 0)) == 0.5
        assert coord_1d(NodeIndex1D(2, 1)) == 1.0
        # enumerate level-4 new nodes {1/8, 3/8, 5/8, 7/8}
        assert level_coords(4) == [0.125, 0.375, 0.625, 0.875]
        assert coord_1d(NodeIndex1D(4, 2)) == 0.625

    @pytest.mark.parametrize("level,index", [(0, 0), (1, 1), (2, 2), (3, 2), (5, 8), (4, -1)])
    def test_invalid_nodes(self, level, index):
        with pytest.raises(InvalidNodeError):
            NodeIndex1D(level, index)

    def test_counts_match_oracle(self):
        for level in range(1, 12):
            assert len(grid_coords(level)) == cumulative_nodes(level)
        assert cumulative_nodes(1) == 1
        assert [cumulative_nodes(i) for i in range(2, 7)] == [3, 5, 9, 17, 33]

    def test_nestedness_and_disjoint_deltas(self):
        for level in range(2, 10):
            coarse = set(grid_coords(level - 1))
            fine = set(grid_coords(level))
            assert coarse < fine
            assert coarse.isdisjoint(level_coords(level))

    def test_dyadic_round_trip(self):
        for level in range(1, 11):
            for j, coord in enumerate(level_coords(level)):
                n = NodeIndex1D(level, j)
                num, exp = dyadic_1d(n)
                assert num / (1 << exp) == coord
                assert node_from_dyadic(num, exp) == n

    def test_dyadic_canonical_reduction(self):
        # 4/8 reduces to the level-1 point 0.5
        assert node_from_dyadic(4, 3) == NodeIndex1D(1, 0)
        assert node_from_dyadic(2, 2) == NodeIndex1D(1, 0)
        assert node_from_dyadic(0, 5) == NodeIndex1D(2, 0)


class TestBasis1D:
    def test_level1_constant(self):
        assert basis_1d(NodeIndex1D(1, 0), 0.3) == 1.0
        assert basis_1d(NodeIndex1D(1, 0), 0.0) == 1.0

    def test_kronecker_at_own_node(self):
        assert basis_1d(NodeIndex1D(3, 0), 0.25) == 1.0

    def test_hat_halfway(self):
        # level-3 hat, half-width 1/4, halfway to the support edge
        assert basis_1d(NodeIndex1D(3, 0), 0.375) == 0.5

    def test_level2_half_hats(self):
        n0, n1 = NodeIndex1D(2, 0), NodeIndex1D(2, 1)
        assert basis_1d(n0, 0.0) == 1.0
        assert basis_1d(n0, 0.5) == 0.0
        assert basis_1d(n0, 0.25) == 0.5
        assert basis_1d(n1, 1.0) == 1.0
        assert basis_1d(n1, 0.5) == 0.0

    def test_support_boundary_is_zero(self):
        n = NodeIndex1D(4, 1)  # node at 3/8, half-width 1/8
        assert basis_1d(n, 0.25) == 0.0
        assert basis_1d(n, 0.5) == 0.0
        assert basis_1d(n, 0.2) == 0.0

    def test_range_and_kronecker_lower_levels(self):
        rng = np.random.default_rng(42)
        nodes = [NodeIndex1D(lv, j) for lv in range(1, 7) for j in range(len(level_coords(lv)))]
        for n in nodes:
            for x in rng.random(20):
                assert 0.0 <= basis_1d(n, float(x)) <= 1.0
            if n.level >= 2:
                for other in nodes:
                    if other.level <= n.level and other != n:
                        assert basis_1d(n, coord_1d(other)) == 0.0


class TestBasisND:
    def test_root_is_one_everywhere(self):
        p = root_point(3)
        assert basis_nd(p, [0.1, 0.99, 0.5]) == 1.0

    def test_kronecker_times_constant(self):
        p = GridPoint((NodeIndex1D(3, 0), NodeIndex1D(1, 0)))
        assert basis_nd(p, [0.25, 0.9]) == 1.0

    def test_product_of_hats(self):
        p = GridPoint((NodeIndex1D(3, 0), NodeIndex1D(3, 0)))
        assert basis_nd(p, [0.375, 0.375]) == 0.25

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            basis_nd(root_point(2), [0.5])

    def test_kronecker_nd_on_grid(self):
        # every pair of stored points with per-dim levels <= p's levels
        points = []
        for l1 in range(1, 4):
            for l2 in range(1, 4):
                for j1 in range(len(level_coords(l1))):
                    for j2 in range(len(level_coords(l2))):
                        points.append(GridPoint((NodeIndex1D(l1, j1), NodeIndex1D(l2, j2))))
        for p in points:
            for q in points:
                if all(qn.level <= pn.level for qn, pn in zip(q.dims, p.dims)):
                    expected = 1.0 if p == q else 0.0
                    assert basis_nd(p, q.coordinate()) == expected


class TestTree:
    def test_children_of_root(self):
        kids = children_1d(NodeIndex1D(1, 0))
        assert sorted(coord_1d(k) for k in kids) == [0.0, 1.0]

    def test_children_of_boundary(self):
        assert [coord_1d(k) for k in children_1d(NodeIndex1D(2, 0))] == [0.25]
        assert [coord_1d(k) for k in children_1d(NodeIndex1D(2, 1))] == [0.75]

    def test_children_deep(self):
        # node at 0.75, sons at 0.75 +- 1/8
        n = NodeIndex1D(3, 1)
        assert sorted(coord_1d(k) for k in children_1d(n)) == [0.625, 0.875]

    def test_children_levels_rise_by_one(self):
        for lv in range(1, 8):
            for j in range(len(level_coords(lv))):
                for k in children_1d(NodeIndex1D(lv, j)):
                    assert k.level == lv + 1

    def test_make_sons_of_2d_root(self):
        sons = make_sons(root_point(2))
        got = sorted(tuple(s.coordinate()) for s in sons)
        assert got == [(0.0, 0.5), (0.5, 0.0), (0.5, 1.0), (1.0, 0.5)]

    def test_make_sons_single_son_rule(self):
        p = GridPoint((NodeIndex1D(2, 0),))
        sons = make_sons(p)
        assert len(sons) == 1 and sons[0].coordinate()[0] == 0.25

    def test_make_sons_count_mixed_levels(self):
        p = GridPoint((NodeIndex1D(2, 0), NodeIndex1D(3, 1)))
        sons = make_sons(p)
        assert len(sons) == 3
        for s in sons:
            assert s.depth == p.depth + 1


class TestSurrogateModel:
    def test_root_only_model_is_constant(self):
        m = SurrogateModel(2)
        m.add_node(HierarchicalNode(root_point(2), 3.7, 3.7, 3.7 ** 2))
        assert interpolate(m, [0.123, 0.9]) == 3.7
        assert interpolate(m, [0.5, 0.5]) == 3.7

    def test_linear_exact_in_1d(self):
        m = SurrogateModel(1)
        # nodes 0.5, 0, 1 of f(x) = x with hand surpluses
        m.add_node(HierarchicalNode(GridPoint((NodeIndex1D(1, 0),)), 0.5, 0.5, 0.25))
        m.add_node(HierarchicalNode(GridPoint((NodeIndex1D(2, 0),)), 0.0, -0.5, -0.25))
        m.add_node(HierarchicalNode(GridPoint((NodeIndex1D(2, 1),)), 1.0, 0.5, 0.75))
        assert interpolate(m, [0.25]) == pytest.approx(0.25, abs=1e-15)
        for x in np.linspace(0, 1, 11):
            assert interpolate(m, [x]) == pytest.approx(x, abs=1e-15)

    def test_empty_model_errors(self):
        m = SurrogateModel(2)
        with pytest.raises(EmptyModelError):
            interpolate(m, [0.5, 0.5])
        with pytest.raises(EmptyModelError):
            m.depth

    def test_duplicate_key_rejected(self):
        m = SurrogateModel(1)
        m.add_node(HierarchicalNode(root_point(1), 1.0, 1.0, 1.0))
        with pytest.raises(ContractViolationError):
            m.add_node(HierarchicalNode(root_point(1), 2.0, 2.0, 4.0))

    def test_level_order_enforced(self):
        m = SurrogateModel(1)
        m.add_node(HierarchicalNode(root_point(1), 1.0, 1.0, 1.0))
        m.add_node(HierarchicalNode(GridPoint((NodeIndex1D(3, 0),)), 1.0, 1.0, 1.0))
        with pytest.raises(ContractViolationError):
            m.add_node(HierarchicalNode(GridPoint((NodeIndex1D(2, 0),)), 1.0, 1.0, 1.0))

    def test_freeze_blocks_insertion(self):
        m = SurrogateModel(1)
        m.add_node(HierarchicalNode(root_point(1), 1.0, 1.0, 1.0))
        m.freeze()
        with pytest.raises(ContractViolationError):
            m.add_node(HierarchicalNode(GridPoint((NodeIndex1D(2, 0),)), 0.0, 0.0, 0.0))


class TestComputeSurplus:
    def test_root_against_empty(self):
        m = SurrogateModel(3)
        assert compute_surplus(m, root_point(3), 4.2) == 4.2

    def test_level2_against_root_model(self):
        m = SurrogateModel(1)
        m.add_node(HierarchicalNode(root_point(1), 0.5, 0.5, 0.25))
        p = GridPoint((NodeIndex1D(2, 0),))
        assert compute_surplus(m, p, 0.0) == -0.5

    def test_zero_when_on_interpolant(self):
        m = SurrogateModel(1)
        m.add_node(HierarchicalNode(root_point(1), 0.5, 0.5, 0.25))
        p = GridPoint((NodeIndex1D(2, 1),))
        assert compute_surplus(m, p, 0.5) == 0.0

    def test_covering_node_violates_contract(self):
        m = SurrogateModel(1)
        m.add_node(HierarchicalNode(root_point(1), 0.5, 0.5, 0.25))
        m.add_node(HierarchicalNode(GridPoint((NodeIndex1D(2, 0),)), 0.0, -0.5, -0.25))
        # the model already covers these points at depth >= theirs
        with pytest.raises(ContractViolationError):
            compute_surplus(m, root_point(1), 1.0)
        with pytest.raises(ContractViolationError):
            compute_surplus(m, GridPoint((NodeIndex1D(2, 0),)), 1.0)

    def test_same_level_sibling_is_not_covered(self):
        m = SurrogateModel(1)
        m.add_node(HierarchicalNode(root_point(1), 0.5, 0.5, 0.25))
        m.add_node(HierarchicalNode(GridPoint((NodeIndex1D(2, 0),)), 0.0, -0.5, -0.25))
        # same-level bases vanish at each other's nodes, so this is legal
        assert compute_surplus(m, GridPoint((NodeIndex1D(2, 1),)), 1.0) == 0.5


class TestTelescoping:
    def test_1d_model_matches_piecewise_linear_oracle(self):
        # a surplus-built model must agree with direct piecewise-linear
        # interpolation over its node coordinates (brute-force oracle)
        rng = np.random.default_rng(7)
        func = lambda x: np.sin(5.0 * x) + 0.3 * x * x

        m = SurrogateModel(1)
        for lv in range(1, 7):
            batch = []
            for j in range(len(level_coords(lv))):
                p = GridPoint((NodeIndex1D(lv, j),))
                value = float(func(coord_1d(p.dims[0])))
                batch.append((p, value))
            coords = np.array([[coord_1d(p.dims[0])] for p, _ in batch])
            values = np.array([v for _, v in batch])
            w, v = m.surpluses_against_prefix(coords, values)
            for (p, value), wi, vi in zip(batch, w, v):
                m.add_node(HierarchicalNode(p, value, float(wi), float(vi)))

        xs = np.array(grid_coords(6))
        ys = func(xs)
        queries = rng.random(100)
        expected = np.interp(queries, xs, ys)
        got = m.interpolate_many(queries[:, None])
        np.testing.assert_allclose(got, expected, rtol=0, atol=1e-12)

    def test_interpolation_property_on_stored_nodes(self):
        func = lambda x: np.exp(x) * np.cos(3 * x)
        m = SurrogateModel(1)
        for lv in range(1, 8):
            coords = np.array([[c] for c in level_coords(lv)])
            values = np.array([float(func(c)) for c in level_coords(lv)])
            w, v = m.surpluses_against_prefix(coords, values)
            for j, (value, wi, vi) in enumerate(zip(values, w, v)):
                p = GridPoint((NodeIndex1D(lv, j),))
                m.add_node(HierarchicalNode(p, float(value), float(wi), float(vi)))
        for node in m.nodes():
            err = abs(m.interpolate(node.point.coordinate()) - node.output)
            assert err <= 8 * np.finfo(float).eps * max(1.0, abs(node.output))
