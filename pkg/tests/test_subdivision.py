"""Degree split, corner balls, unit builders, edge coloring, unit connection."""

import math
import random
from itertools import combinations

import pytest

from minorkit import (
    ExpansionParams,
    Graph,
    Path,
    SubdivisionModel,
    Unit,
    build_units_dense,
    build_units_sparse,
    connect_units,
    derived_scales,
    find_subdivision_pipeline,
    grow_corner_ball,
    kt_edge_coloring,
    split_by_degree,
    verify_subdivision,
    verify_unit,
)
from minorkit.subdivision import CASE_SPARSE, CASE_STARS, log2m

from conftest import blobs, complete_graph, gnp, regular, star_graph


def sub_params(t, n, delta=1 / 3):
    return ExpansionParams.for_subdivision(t=t, delta=delta, ambient_n=n)


def planted_hub_graph(n=4096, base_degree=10, hubs=40, hub_degree=120, seed=11):
    rng = random.Random(seed)
    base = regular(n, base_degree, seed=5)
    edges = set(base.edges())
    centers = rng.sample(range(n), hubs)
    hubset = set(centers)
    others = [v for v in range(n) if v not in hubset]
    for c in centers:
        for v in rng.sample(others, hub_degree):
            if v != c:
                edges.add((min(c, v), max(c, v)))
    return Graph(n, edges)


def funnel_graph(t=3, blob_size=90, blob_degree=6, blob_count=6, seed=13):
    """Low-degree blobs all attached to t cut vertices (the funnel)."""
    rng = random.Random(seed)
    n = t + blob_count * blob_size
    edges = []
    for b in range(blob_count):
        offset = t + b * blob_size
        for v in range(blob_size):
            for _ in range(blob_degree // 2):
                w = rng.randrange(blob_size)
                if w != v:
                    a, c = offset + min(v, w), offset + max(v, w)
                    edges.append((a, c))
        # every blob touches every cut vertex several times
        for cut in range(t):
            for v in rng.sample(range(blob_size), 8):
                edges.append((cut, offset + v))
    return Graph(n, edges)


class TestSplitByDegree:
    def test_low_degree_graph_is_sparse_with_empty_x(self):
        g = regular(64, 3, seed=1)
        split = split_by_degree(g, sigma=1 / 300)
        assert split.kind == CASE_SPARSE
        assert split.x == frozenset()

    def test_clique_yields_stars(self):
        g = complete_graph(50)  # threshold ceil(log^2 50) = 16 <= 49
        split = split_by_degree(g, sigma=1 / 300)
        assert split.kind == CASE_STARS
        c, members = split.stars[0]
        assert len(members) == split.threshold
        assert c not in members

    def test_hub_forest_exhausts_into_x(self):
        # stars around the hubs, then nothing high-degree remains
        hub_size = log2m(64)
        g = Graph(
            64,
            [(0, i) for i in range(1, hub_size + 2)]
            + [(32, 32 + i) for i in range(1, hub_size + 2)],
        )
        split = split_by_degree(g, sigma=1 / 300, min_stars=5)
        assert split.kind == CASE_SPARSE
        assert 0 in split.x and 32 in split.x
        assert len(split.x) <= 5 * (1 + split.threshold)

    def test_star_target_respects_min_stars(self):
        g = planted_hub_graph(n=1024, base_degree=8, hubs=24, hub_degree=70, seed=3)
        split = split_by_degree(g, sigma=1 / 300, min_stars=8)
        assert split.kind == CASE_STARS
        assert len(split.stars) >= 8
        seen = set()
        for c, members in split.stars:
            star = {c} | members
            assert not (seen & star)
            seen |= star


class TestGrowCornerBall:
    def test_high_degree_vertex_one_step(self):
        g = star_graph(80)
        p = sub_params(2, 81)
        d = derived_scales(81, p)
        ball = grow_corner_ball(g, 0, [], set(), d, p)
        assert len(ball) == 81 >= math.log(81) ** 2

    def test_consumed_spokes_are_excluded(self):
        g = star_graph(30)
        p = sub_params(2, 31)
        d = derived_scales(31, p)
        consumed = [Path((0, 1)), Path((0, 2))]
        ball = grow_corner_ball(g, 0, consumed, {3}, d, p)
        assert {1, 2, 3}.isdisjoint(ball)
        assert 0 in ball
        assert len(ball) == 31 - 3

    def test_corner_inside_avoid_errors(self):
        g = star_graph(5)
        p = sub_params(2, 6)
        with pytest.raises(ValueError):
            grow_corner_ball(g, 0, [], {0}, derived_scales(6, p), p)

    def test_consumed_path_must_start_at_corner(self):
        g = star_graph(5)
        p = sub_params(2, 6)
        with pytest.raises(ValueError):
            grow_corner_ball(g, 0, [Path((1, 0))], set(), derived_scales(6, p), p)


class TestEdgeColoring:
    @pytest.mark.parametrize("t", [2, 3, 7])
    def test_small_cases(self, t):
        color, tag = kt_edge_coloring(t)
        assert len(color) == t * (t - 1) // 2
        assert max(color.values()) <= t
        for (a, b), (c, d) in combinations(sorted(color), 2):
            if {a, b} & {c, d}:
                assert color[(a, b)] != color[(c, d)]
        assert len({(color[k], tag[k]) for k in color}) == len(color)

    def test_all_t_up_to_24(self):
        for t in range(2, 25):
            color, tag = kt_edge_coloring(t)
            by_vertex = {}
            for (a, b), c in color.items():
                assert (c, tag[(a, b)]) is not None
                for v in (a, b):
                    assert c not in by_vertex.setdefault(v, set())
                    by_vertex[v].add(c)
            assert len({(color[k], tag[k]) for k in color}) == len(color)

    def test_t1_rejected(self):
        with pytest.raises(ValueError):
            kt_edge_coloring(1)


class TestDenseUnits:
    def test_trivial_t1(self):
        g = planted_hub_graph()
        p = sub_params(1, g.n)
        d = derived_scales(g.n, p)
        split = split_by_degree(g, p.sigma, min_stars=10)
        assert split.kind == CASE_STARS
        units = build_units_dense(g, split, 1, d, p, max_units=1)
        assert len(units) == 1
        unit = units[0]
        assert unit.t == 1
        assert len(unit.spokes) == 1
        assert verify_unit(g, unit, d).valid

    def test_planted_hubs_t3(self):
        g = planted_hub_graph()
        p = sub_params(3, g.n)
        d = derived_scales(g.n, p)
        split = split_by_degree(g, p.sigma, min_stars=18)
        assert split.kind == CASE_STARS
        units = build_units_dense(g, split, 3, d, p, max_units=4)
        assert len(units) >= 1
        seen = set()
        for u in units:
            assert verify_unit(g, u, d).valid
            assert not (seen & u.vertices())
            seen |= u.vertices()

    def test_forbidden_preseed_still_succeeds(self):
        # pre-seeding the forbidden set with whole stars forces the builder to
        # work around them (the maximality argument of the outer loop)
        g = planted_hub_graph()
        p = sub_params(3, g.n)
        d = derived_scales(g.n, p)
        split = split_by_degree(g, p.sigma, min_stars=18)
        preseed = set()
        for c, members in split.stars[:2]:
            preseed |= {c} | set(members)
        units = build_units_dense(g, split, 3, d, p, max_units=1, forbidden=preseed)
        assert len(units) == 1
        assert not (units[0].vertices() & preseed)
        assert verify_unit(g, units[0], d).valid

    def test_wrong_split_kind_rejected(self):
        g = regular(64, 3, seed=1)
        split = split_by_degree(g, sigma=1 / 300)
        p = sub_params(2, 64)
        with pytest.raises(ValueError):
            build_units_dense(g, split, 2, derived_scales(64, p), p)


class TestSparseUnits:
    def test_funnel_routes_to_direct_subdivision(self):
        g = funnel_graph(t=3)
        p = sub_params(3, g.n)
        d = derived_scales(g.n, p)
        x = frozenset(range(3))  # the cut vertices
        got = build_units_sparse(g, x, 3, d, p, degree_floor=3.0, max_units=4)
        assert isinstance(got, SubdivisionModel)
        assert set(got.corners) <= set(range(3))
        report = verify_subdivision(g, got)
        assert report.valid
        assert got.total_vertices <= 3 * 3 * max(d.l, 1) + 3

    def test_bounded_degree_units_route(self):
        g = regular(1024, 10, seed=6)
        p = sub_params(3, 1024)
        d = derived_scales(1024, p)
        got = build_units_sparse(g, frozenset(), 3, d, p, degree_floor=3.0, max_units=4)
        assert isinstance(got, list) and len(got) >= 1
        for u in got:
            assert verify_unit(g, u, d).valid

    def test_t2_direct_route_is_a_path(self):
        g = funnel_graph(t=2, blob_count=4)
        p = sub_params(2, g.n)
        d = derived_scales(g.n, p)
        got = build_units_sparse(g, frozenset(range(2)), 2, d, p, degree_floor=3.0)
        assert isinstance(got, SubdivisionModel)
        assert got.t == 2
        assert len(got.edge_paths) == 1
        assert verify_subdivision(g, got).valid

    def test_degree_violation_of_split_contract(self):
        g = complete_graph(60)
        p = sub_params(3, 60)
        d = derived_scales(60, p)
        with pytest.raises(ValueError, match="max degree"):
            build_units_sparse(g, frozenset(), 3, d, p)


class TestConnectUnits:
    def _units(self, t=3, count=5):
        g = regular(2048, 10, seed=8)
        p = sub_params(t, 2048)
        d = derived_scales(2048, p)
        units = build_units_sparse(g, frozenset(), t, d, p, degree_floor=3.0, max_units=count)
        assert isinstance(units, list)
        return g, p, d, units

    def test_t2_two_units_single_path(self):
        g, p, d, units = self._units(t=2, count=3)
        assert len(units) >= 3
        model = connect_units(g, units[:3], 2, d, p)
        assert len(model.edge_paths) == 1
        assert verify_subdivision(g, model).valid

    def test_t3_end_to_end(self):
        g, p, d, units = self._units(t=3, count=5)
        assert len(units) >= 4
        model = connect_units(g, units, 3, d, p)
        report = verify_subdivision(g, model)
        assert report.valid
        assert model.total_vertices <= 16 * d.k * 9

    def test_too_few_units_rejected(self):
        g, p, d, units = self._units(t=3, count=5)
        with pytest.raises(ValueError, match="at least"):
            connect_units(g, units[:2], 3, d, p)

    def test_non_disjoint_units_rejected(self):
        g, p, d, units = self._units(t=3, count=5)
        with pytest.raises(ValueError, match="disjoint"):
            connect_units(g, [units[0], units[0], units[1], units[2]], 3, d, p)


class TestSubdivisionPipeline:
    def test_dense_random_graph(self):
        g = gnp(2048, 60, seed=0)
        res = find_subdivision_pipeline(g, 3, epsilon=1.0)
        assert res.outcome == "subdivision"
        report = verify_subdivision(g, res.model)
        assert report.valid
        assert res.model.total_vertices <= 16 * res.scales.k * 9

    def test_minor_or_subdivision_on_blobs(self):
        from minorkit import verify_minor_model

        g = blobs(200, 0.8, 5, seed=2)
        res = find_subdivision_pipeline(g, 3, epsilon=1.0, mode="minor_or_subdivision")
        assert res.outcome in ("subdivision", "minor", "handoff")
        if res.outcome == "minor":
            assert verify_minor_model(g, res.minor_model).valid
        elif res.outcome == "subdivision":
            assert verify_subdivision(g, res.model).valid
        else:
            assert res.brute_force_answer in (True, None)

    def test_plain_mode_never_emits_minor_fallback(self):
        g = blobs(200, 0.8, 5, seed=2)
        res = find_subdivision_pipeline(g, 3, epsilon=1.0, mode="subdivision")
        assert res.minor_model is None
        assert res.outcome in ("subdivision", "handoff", "stalled")

    def test_t2_yields_path(self):
        g = gnp(512, 20, seed=1)
        res = find_subdivision_pipeline(g, 2, epsilon=1.0)
        assert res.outcome == "subdivision"
        assert res.model.t == 2
        assert verify_subdivision(g, res.model).valid

    def test_sparse_low_density_stalls_or_hands_off(self):
        from conftest import random_tree

        g = random_tree(200, seed=9)
        res = find_subdivision_pipeline(g, 3, epsilon=1.0)
        assert res.outcome in ("stalled", "handoff")

    def test_unknown_mode_rejected(self):
        g = complete_graph(8)
        with pytest.raises(ValueError):
            find_subdivision_pipeline(g, 3, 1.0, mode="nope")

    def test_determinism(self):
        g = gnp(1024, 60, seed=4)
        r1 = find_subdivision_pipeline(g, 3, epsilon=1.0)
        r2 = find_subdivision_pipeline(g, 3, epsilon=1.0)
        assert r1.outcome == r2.outcome == "subdivision"
        assert r1.model.corners == r2.model.corners
        assert r1.model.edge_paths == r2.model.edge_paths


class TestUnitJson:
    def test_round_trip(self):
        u = Unit(
            corner=0,
            spokes=(Path((0, 1)), Path((0, 2))),
            sets=(frozenset({1}), frozenset({2})),
            centers=(1, 2),
            sigma=0.01,
        )
        assert Unit.from_json_dict(u.to_json_dict()) == u

    def test_degenerate_star_unit_is_valid(self):
        g = star_graph(4)
        u = Unit(
            corner=0,
            spokes=(Path((0, 1)), Path((0, 2))),
            sets=(frozenset({1}), frozenset({2})),
            centers=(1, 2),
            sigma=0.01,
        )
        p = sub_params(2, 5)
        assert verify_unit(g, u, derived_scales(5, p)).valid
