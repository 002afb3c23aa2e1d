"""Construction drivers: counts, refinement behavior, determinism."""

import itertools
import math

import numpy as np
import pytest

from sgsurrogate import (
    AdaptiveConfig,
    EvaluationError,
    GridPoint,
    ModelFunction,
    NodeIndex1D,
    refine_candidates,
    run_asgc,
    run_csc,
    root_point,
)
from sgsurrogate.io import save_surrogate


def smolyak_count(d, level):
    """Oracle: direct enumeration of points with level sum <= `level`.

    Counts the tensor products of newly-added 1-D node sets over all
    per-dimension level combinations, independent of the son-closure the
    drivers use.
    """
    def new_nodes(lv):
        return 1 if lv == 0 else (2 if lv == 1 else 2 ** (lv - 1))

    total = 0
    for combo in itertools.product(range(level + 1), repeat=d):
        if sum(combo) <= level:
            total += math.prod(new_nodes(lv) for lv in combo)
    return total


class TestConfig:
    def test_defaults_valid(self):
        cfg = AdaptiveConfig(dimension=3)
        assert cfg.epsilon > 0 and cfg.init_level < cfg.max_level

    @pytest.mark.parametrize("kwargs", [
        dict(dimension=0),
        dict(dimension=1, epsilon=0.0),
        dict(dimension=1, epsilon=-1e-3),
        dict(dimension=1, init_level=5, max_level=5),
        dict(dimension=1, init_level=-1),
        dict(dimension=1, min_line_points=4),
        dict(dimension=1, slope_tol=0.0),
    ])
    def test_invalid_configs(self, kwargs):
        with pytest.raises(ValueError):
            AdaptiveConfig(**kwargs)

    def test_infinite_min_line_points_allowed(self):
        cfg = AdaptiveConfig(dimension=2, min_line_points=math.inf)
        assert math.isinf(cfg.min_line_points)


class TestModelFunction:
    def test_counter(self):
        f = ModelFunction(lambda x: x[0], 2, "probe")
        f([0.5, 0.5])
        f([0.1, 0.2])
        assert f.evaluations == 2

    def test_failure_carries_coordinate(self):
        def bad(x):
            raise RuntimeError("boom")
        f = ModelFunction(bad, 2, "bad")
        with pytest.raises(EvaluationError) as err:
            f([0.25, 0.75])
        np.testing.assert_array_equal(err.value.coordinate, [0.25, 0.75])


class TestRunCsc:
    def test_1d_level5_is_33_evaluations(self):
        f = ModelFunction(lambda x: x[0] ** 2, 1, "sq")
        res = run_csc(f, 1, 5)
        assert len(res.model) == 33
        assert f.evaluations == 33
        assert res.model.full_evaluations == 33

    def test_1d_level0_single_root(self):
        f = ModelFunction(lambda x: 1.0, 1, "c")
        res = run_csc(f, 1, 0)
        assert len(res.model) == 1
        assert res.model.nodes()[0].point == root_point(1)

    def test_2d_level2_is_13_nodes(self):
        f = ModelFunction(lambda x: x[0] + x[1], 2, "s")
        assert len(run_csc(f, 2, 2).model) == 13

    @pytest.mark.parametrize("d,level", [(1, 7), (2, 5), (3, 4)])
    def test_counts_match_enumeration_oracle(self, d, level):
        f = ModelFunction(lambda x: float(np.sum(x)), d, "s")
        res = run_csc(f, d, level)
        assert len(res.model) == smolyak_count(d, level)

    def test_levels_fully_populated(self):
        f = ModelFunction(lambda x: float(np.sum(x)), 2, "s")
        res = run_csc(f, 2, 4)
        for lv in range(5):
            got = len(res.model.nodes_on_level(lv))
            assert got == smolyak_count(2, lv) - smolyak_count(2, lv - 1) if lv else 1

    def test_evaluation_failure_propagates(self):
        def bad(x):
            if x[0] == 0.25:
                raise RuntimeError("unstable")
            return float(x[0])
        f = ModelFunction(bad, 1, "bad")
        with pytest.raises(EvaluationError) as err:
            run_csc(f, 1, 4)
        assert err.value.coordinate[0] == 0.25


class TestRunAsgc:
    def test_constant_terminates_after_first_adaptive_check(self):
        f = ModelFunction(lambda x: 4.2, 1, "c")
        cfg = AdaptiveConfig(dimension=1, epsilon=1e-3, max_level=10, init_level=0)
        res = run_asgc(f, cfg)
        # root spawns its sons; all non-root surpluses are 0 < epsilon
        assert len(res.model) == 3
        assert res.stopped_by == "tolerance"
        assert all(n.w == 0.0 for n in res.model.nodes() if n.point.level > 0)

    def test_spline_toggle_rejected(self):
        f = ModelFunction(lambda x: 1.0, 1, "c")
        with pytest.raises(ValueError):
            run_asgc(f, AdaptiveConfig(dimension=1, use_splines=True))

    def test_kink_refines_fewer_than_conventional(self):
        f = ModelFunction(lambda x: abs(x[0] - 0.5), 1, "kink")
        cfg = AdaptiveConfig(dimension=1, epsilon=1e-3, max_level=9, init_level=2)
        res = run_asgc(f, cfg)
        # conventional to level 9 would take 2^9 + 1 = 513 nodes
        assert len(res.model) < 513
        # piecewise-linear away from the kink: once the kink is a node,
        # every remaining surplus vanishes
        assert res.stopped_by == "tolerance"

    def test_subset_of_csc_at_same_depth(self):
        func = lambda x: float(np.sin(3 * x[0]) * x[1] + x[0])
        fa = ModelFunction(func, 2, "s")
        cfg = AdaptiveConfig(dimension=2, epsilon=1e-6, max_level=5, init_level=2)
        adaptive = run_asgc(fa, cfg)
        fc = ModelFunction(func, 2, "s")
        conventional = run_csc(fc, 2, 5)
        keys_a = {n.point.key for n in adaptive.model.nodes()}
        keys_c = {n.point.key for n in conventional.model.nodes()}
        assert keys_a < keys_c

    def test_epsilon_zero_limit_reproduces_csc(self):
        # strictly convex and separable: every surplus is a product of
        # nonzero 1-D surpluses, so a tolerance below all of them prunes
        # nothing and the adaptive build recovers the full grid
        func = lambda x: float(np.exp(1.3 * x[0] + 0.7 * x[1]))
        fa = ModelFunction(func, 2, "e")
        cfg = AdaptiveConfig(dimension=2, epsilon=1e-13, max_level=5, init_level=2)
        adaptive = run_asgc(fa, cfg)
        fc = ModelFunction(func, 2, "e")
        conventional = run_csc(fc, 2, 5)
        keys_a = [n.point.key for n in adaptive.model.nodes()]
        keys_c = [n.point.key for n in conventional.model.nodes()]
        assert keys_a == keys_c

    def test_monotone_counts_and_counter_identity(self):
        f = ModelFunction(lambda x: float(np.exp(x[0] * x[1])), 2, "e")
        res = run_asgc(f, AdaptiveConfig(dimension=2, epsilon=1e-4, max_level=7, init_level=2))
        fulls = [r.full_evaluations for r in res.records]
        assert fulls == sorted(fulls)
        assert f.evaluations == res.model.full_evaluations

    def test_level_cap_termination(self):
        f = ModelFunction(lambda x: abs(x[0] - 0.3), 1, "k")
        res = run_asgc(f, AdaptiveConfig(dimension=1, epsilon=1e-12, max_level=4, init_level=1))
        assert res.stopped_by == "level_cap"
        assert res.model.depth == 4

    def test_determinism_byte_identical(self, tmp_path):
        func = lambda x: float(np.sin(7 * x[0]) + np.cos(3 * x[1]))
        paths = []
        for tag in ("a", "b"):
            f = ModelFunction(func, 2, "s")
            res = run_asgc(f, AdaptiveConfig(dimension=2, epsilon=1e-3, max_level=6, init_level=2))
            p = tmp_path / f"{tag}.surrogate"
            save_surrogate(p, res.model)
            paths.append(p.read_bytes())
        assert paths[0] == paths[1]


class TestRefineCandidates:
    def test_root_sons(self):
        got = refine_candidates([root_point(1)])
        assert sorted(float(p.coordinate()[0]) for p in got) == [0.0, 1.0]

    def test_adjacent_nodes_disjoint_sons(self):
        quarter = GridPoint((NodeIndex1D(3, 0),))
        three_quarter = GridPoint((NodeIndex1D(3, 1),))
        got = refine_candidates([quarter, three_quarter])
        assert sorted(float(p.coordinate()[0]) for p in got) == [0.125, 0.375, 0.625, 0.875]

    def test_shared_son_deduplicated(self):
        # (0, 0.5) and (0.5, 0) both spawn the corner (0, 0)
        a = GridPoint((NodeIndex1D(2, 0), NodeIndex1D(1, 0)))
        b = GridPoint((NodeIndex1D(1, 0), NodeIndex1D(2, 0)))
        got = refine_candidates([a, b])
        keys = [p.key for p in got]
        assert len(keys) == len(set(keys))
        corner = [p for p in got if tuple(p.coordinate()) == (0.0, 0.0)]
        assert len(corner) == 1

    def test_existing_model_points_excluded(self):
        f = ModelFunction(lambda x: float(x[0]), 1, "l")
        res = run_csc(f, 1, 2)
        got = refine_candidates([root_point(1)], res.model)
        assert got == []
