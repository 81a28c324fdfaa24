"""Acceptance suite: one test per acceptance criterion, at the stated
tolerances and time budgets.  Each test prints a single pass line so a
verbose run reads as a checklist."""

import math
import statistics
import time
from fractions import Fraction
from itertools import combinations, product

import pytest

from minorkit import (
    ExpansionParams,
    GeneratorSpec,
    Graph,
    MinorModel,
    Path,
    brute_force_expander_check,
    brute_force_has_minor,
    caro_wei_bound,
    check_expansion_function,
    conflict_prune,
    dichotomy_step,
    extract_expander,
    find_minor_pipeline,
    find_subdivision_pipeline,
    find_violating_set,
    generate,
    girth,
    greedy_independent_set,
    neighborhood,
    verify_minor_model,
    verify_subdivision,
    verify_unit,
)
from minorkit.expansion import BRANCH_DROP, DerivedScales, FindDenseQuery
from minorkit.graph import average_degree
from minorkit.sweep import run_one

from conftest import cycle_graph, small_corpus


def _report(num, text):
    print(f"[criterion {num:02d}] PASS - {text}")


def _mixed_specs(count, seed0=1000):
    """Deterministic mixed-family corpus with n <= 5000."""
    import random

    rng = random.Random(seed0)
    specs = []
    while len(specs) < count:
        kind = len(specs) % 4
        if kind == 0:
            n = rng.randrange(50, 5001)
            specs.append(GeneratorSpec(family="gnp_avg_degree", n=n,
                                       param=rng.choice([8, 15, 25, 40]), seed=rng.randrange(10**6)))
        elif kind == 1:
            n = rng.randrange(50, 3001)
            d = rng.choice([4, 6, 8, 12])
            if (n * d) % 2:
                n += 1
            specs.append(GeneratorSpec(family="random_regular", n=n, param=d,
                                       seed=rng.randrange(10**6)))
        elif kind == 2:
            blobcount = rng.randrange(2, 7)
            n = blobcount * rng.randrange(20, 61)
            specs.append(GeneratorSpec(family="dense_blobs", n=n, param=0.8,
                                       blob_count=blobcount, seed=rng.randrange(10**6)))
        else:
            side = rng.randrange(8, 46)
            specs.append(GeneratorSpec(family="grid_torus", n=side * side))
    return specs


DELTAS = [0.05, 0.1, 0.3]
ETAS = [1 / 8, 1 / 32]


def _extraction_sweep(small_set):
    specs = _mixed_specs(200)
    start = time.perf_counter()
    for i, spec in enumerate(specs):
        delta = DELTAS[i % 3]
        eta = ETAS[(i // 3) % 2]
        g = generate(spec, with_girth=False).graph
        p = ExpansionParams(delta=delta, eta=eta, ambient_n=g.n)
        res = extract_expander(g, p, small_set_mode=small_set)
        factor = 1 - (2 if small_set else 1) * Fraction(delta)
        assert res.achieved_density >= factor * res.input_density, spec
        if res.graph.n > 1:
            assert 2 * res.graph.min_degree() >= res.achieved_density, spec
    return time.perf_counter() - start


def test_criterion_01_extraction_guarantee():
    elapsed = _extraction_sweep(small_set=False)
    assert elapsed < 60.0
    _report(1, f"200 extractions satisfy the (1-delta) density bound in {elapsed:.1f}s")


def test_criterion_02_small_set_extraction():
    elapsed = _extraction_sweep(small_set=True)
    assert elapsed < 60.0
    _report(2, f"200 small-set extractions satisfy the (1-2delta) bound in {elapsed:.1f}s")


def test_criterion_03_dichotomy_exhaustive():
    nx = pytest.importorskip("networkx")

    start = time.perf_counter()
    gammas = [0.1, 0.3, 0.5, 0.7, 0.9]
    graphs = 0
    checked = 0
    for atlas in nx.graph_atlas_g():
        n = atlas.number_of_nodes()
        if n < 2 or n > 7 or not nx.is_connected(atlas):
            continue
        mapping = {u: i for i, u in enumerate(atlas.nodes())}
        g = Graph(n, [(mapping[u], mapping[v]) for u, v in atlas.edges()])
        if g.edge_count == 0:
            continue
        graphs += 1
        c = average_degree(g)
        for r in range(1, n):
            for combo in combinations(range(n), r):
                s = frozenset(combo)
                nb = len(neighborhood(g, s))
                for gamma in gammas:
                    if nb >= gamma * r:
                        continue
                    step = dichotomy_step(g, FindDenseQuery(gamma=gamma, s=s), c)
                    checked += 1
                    if step.branch == BRANCH_DROP:
                        assert step.density_after >= c
                    else:
                        assert step.density_after >= (1 - Fraction(gamma)) * c
    elapsed = time.perf_counter() - start
    assert graphs >= 900  # all connected graphs on 2..7 vertices
    assert checked > 10000
    assert elapsed < 120.0
    _report(3, f"{checked} violating sets over {graphs} connected graphs, 0 counterexamples, {elapsed:.1f}s")


def test_criterion_04_expansion_function_grid():
    start = time.perf_counter()
    margins = []
    for n, delta, eta in product((10**3, 10**6, 10**9), (0.05, 0.2), (1 / 8, 1 / 32, 1 / (300 * 27))):
        p = ExpansionParams(delta=delta, eta=eta, ambient_n=n)
        rep = check_expansion_function(p, n)
        assert rep.ok, (n, delta, eta, rep.witness)
        assert rep.sum_value <= delta / 2
        margins.append(rep.margin)
    elapsed = time.perf_counter() - start
    assert elapsed < 5.0
    _report(4, f"18 grid points accepted, min sum margin {min(margins):.4f}, {elapsed:.1f}s")


def test_criterion_05_caro_wei_and_conflict_prune():
    import random

    rng = random.Random(77)
    for trial in range(500):
        n = rng.randrange(1, 201)
        p_edge = rng.uniform(0.0, 0.25)
        adj = {v: set() for v in range(n)}
        for u in range(n):
            for v in range(u + 1, n):
                if rng.random() < p_edge:
                    adj[u].add(v)
                    adj[v].add(u)
        got = greedy_independent_set(adj)
        assert len(got) >= math.ceil(caro_wei_bound(adj)), trial
        gotset = set(got)
        for u in got:
            assert not (adj[u] & (gotset - {u}))

    for trial in range(200):
        s = rng.randrange(1, 60)
        bound = rng.randrange(1, 9)
        sets, base = [], 0
        for _ in range(s):
            size = rng.randrange(1, 4)
            sets.append(frozenset(range(base, base + size)))
            base += size
        paths = []
        for _ in range(s):
            length = rng.randrange(0, bound + 1)
            verts = rng.sample(range(10**6, 10**6 + 10**4), length + 1)
            if rng.random() < 0.7 and base:
                verts[rng.randrange(len(verts))] = rng.randrange(base)
            paths.append(Path(tuple(verts)))
        kept = conflict_prune(sets, paths, bound)
        assert len(kept) >= math.ceil(s / (2 * bound + 3)), trial
        for i in kept:
            for j in kept:
                if i != j:
                    assert not (sets[i] & set(paths[j].vertices)), trial
    _report(5, "500 greedy bounds and 200 pruned instances, 100% pass")


def _soundness_corpus():
    entries = list(small_corpus())
    entries += [
        ("gnp500", generate(GeneratorSpec(family="gnp_avg_degree", n=500, param=25, seed=31), with_girth=False).graph),
        ("gnp1000", generate(GeneratorSpec(family="gnp_avg_degree", n=1000, param=35, seed=32), with_girth=False).graph),
        ("gnp_dense", generate(GeneratorSpec(family="gnp_avg_degree", n=1024, param=60, seed=33), with_girth=False).graph),
        ("blobs", generate(GeneratorSpec(family="dense_blobs", n=200, param=0.8, blob_count=5, seed=34), with_girth=False).graph),
        ("torus", generate(GeneratorSpec(family="grid_torus", n=1024), with_girth=False).graph),
        ("regular8", generate(GeneratorSpec(family="random_regular", n=512, param=8, seed=35), with_girth=False).graph),
        ("tree", __import__("conftest").random_tree(300, seed=36)),
    ]
    return entries


def test_criterion_06_witness_soundness():
    emitted = 0
    for name, g in _soundness_corpus():
        for t in (3, 4):
            res = find_minor_pipeline(g, t, epsilon=1.0, stop_floor=4 if g.n <= 12 else 32)
            if res.model is not None:
                report = verify_minor_model(g, res.model)
                assert report.valid, (name, t, report.violations)
                emitted += 1
                if g.n <= 12:
                    assert brute_force_has_minor(g, t), (name, t)
        if g.n >= 64:
            res = find_subdivision_pipeline(g, 3, epsilon=1.0)
            if res.model is not None:
                report = verify_subdivision(g, res.model)
                assert report.valid, (name, report.violations)
                emitted += 1
            if res.units:
                for u in res.units:
                    assert verify_unit(g, u, res.scales).valid, name
    assert emitted >= 10
    _report(6, f"{emitted} emitted witnesses, all verifier-valid, 0 violations")


def test_criterion_07_log_scaling_sweep():
    start = time.perf_counter()
    sizes = [2**e for e in range(10, 17)]
    seeds = range(5)
    per_size_ratios = {}
    successes = 0
    runs = 0
    for n in sizes:
        ratios = []
        for seed in seeds:
            runs += 1
            spec = GeneratorSpec(family="gnp_avg_degree", n=n, param=40.0, seed=seed)
            record = run_one(spec, t=4, epsilon=1.0)
            if record.outcome == "minor":
                assert record.verifier_valid
                successes += 1
                ratios.append(record.ratio)
        per_size_ratios[n] = ratios
    elapsed = time.perf_counter() - start
    assert successes >= 0.9 * runs, f"only {successes}/{runs} runs produced a verified model"
    medians = [statistics.median(r) for r in per_size_ratios.values() if r]
    spread = max(medians) / min(medians)
    assert spread <= 3.0, f"median witness/log(n) ratio varies by {spread:.2f}x"
    assert elapsed < 600.0
    _report(7, f"{successes}/{runs} verified K_4 models, median-ratio spread {spread:.2f}x, {elapsed:.0f}s")


def test_criterion_08_subdivision_sweep():
    start = time.perf_counter()
    successes = 0
    runs = 0
    for n in (2**11, 2**12, 2**13, 2**14):
        for seed in range(3):
            runs += 1
            spec = GeneratorSpec(family="gnp_avg_degree", n=n, param=60.0, seed=seed)
            record = run_one(spec, t=3, epsilon=1.0, mode="subdivision")
            if record.outcome == "subdivision":
                assert record.verifier_valid
                assert record.witness_size <= 16 * record.k * 9
                successes += 1
    elapsed = time.perf_counter() - start
    assert successes >= 0.8 * runs, f"only {successes}/{runs} verified subdivisions"
    assert elapsed < 600.0
    _report(8, f"{successes}/{runs} verified K_3 subdivisions within 16kt^2, {elapsed:.0f}s")


def test_criterion_09_girth_lower_bound():
    for n in (64, 256, 1024):
        g = cycle_graph(n)
        assert girth(g) == n
        res = find_minor_pipeline(g, 3, epsilon=1.0)
        if res.model is not None:
            report = verify_minor_model(g, res.model)
            assert report.valid
            assert report.measured_size >= n - 1
        # independent confirmation that a valid model cannot be small: the
        # hand-built full-cycle model is valid, and dropping any vertex breaks it
        third = n // 3
        arcs = (frozenset(range(third)), frozenset(range(third, 2 * third)),
                frozenset(range(2 * third, n)))
        assert verify_minor_model(g, MinorModel(3, arcs)).valid
        punctured = (frozenset(range(1, third)), arcs[1], arcs[2])
        assert not verify_minor_model(g, MinorModel(3, punctured)).valid
    _report(9, "every verified cycle model needs at least n-1 vertices (exact check)")


def test_criterion_10_oracle_agreement(corpus_small):
    checked = 0
    for name, g in corpus_small:
        if g.n > 12 or g.n < 2:
            continue
        for eta in (1 / 8, 1 / 3):
            for rate in (0.3, 0.5, 1.0):
                for small_delta in (None, 0.3):
                    d = DerivedScales(f_m=rate, k=10, l=2, m=g.n)
                    p = ExpansionParams(delta=small_delta or 0.3, eta=eta, ambient_n=g.n)
                    found = find_violating_set(g, d, p, small_set_mode=small_delta is not None)
                    ok, _, _ = brute_force_expander_check(g, rate, eta, small_set=small_delta)
                    assert (found is None) == ok, (name, eta, rate, small_delta)
                    checked += 1
    assert checked >= 100
    _report(10, f"{checked} verdict pairs agree on every corpus graph with m <= 12")
