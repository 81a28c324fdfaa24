"""Shared graph builders used across the suite (the test corpus)."""

from itertools import combinations

import pytest

from minorkit import GeneratorSpec, Graph, generate


def complete_graph(n):
    return Graph(n, combinations(range(n), 2))


def cycle_graph(n):
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n):
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def star_graph(leaves):
    return Graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def petersen_graph():
    edges = [(i, (i + 1) % 5) for i in range(5)]
    edges += [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    edges += [(i, 5 + i) for i in range(5)]
    return Graph(10, edges)


def grid_graph(rows, cols):
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return Graph(rows * cols, edges)


def two_cliques_bridge(k):
    edges = list(combinations(range(k), 2))
    edges += [(u + k, v + k) for u, v in combinations(range(k), 2)]
    edges.append((0, k))
    return Graph(2 * k, edges)


def random_tree(n, seed):
    import random

    rng = random.Random(seed)
    return Graph(n, [(rng.randrange(0, i), i) for i in range(1, n)])


def gnp(n, avg_degree, seed):
    return generate(
        GeneratorSpec(family="gnp_avg_degree", n=n, param=avg_degree, seed=seed),
        with_girth=False,
    ).graph


def regular(n, d, seed):
    return generate(
        GeneratorSpec(family="random_regular", n=n, param=d, seed=seed),
        with_girth=False,
    ).graph


def blobs(n, density, count, seed):
    return generate(
        GeneratorSpec(family="dense_blobs", n=n, param=density, blob_count=count, seed=seed),
        with_girth=False,
    ).graph


def small_corpus():
    """Named tiny graphs (n <= 12) used by the oracle-agreement checks."""
    return [
        ("K4", complete_graph(4)),
        ("K8", complete_graph(8)),
        ("C9", cycle_graph(9)),
        ("P7", path_graph(7)),
        ("star6", star_graph(6)),
        ("petersen", petersen_graph()),
        ("grid3x3", grid_graph(3, 3)),
        ("two_K5_bridge", two_cliques_bridge(5)),
        ("two_K6_bridge", two_cliques_bridge(6)),
        ("tree10", random_tree(10, 3)),
        ("gnp12", gnp(12, 5, 1)),
        ("gnp11", gnp(11, 4, 2)),
    ]


@pytest.fixture(scope="session")
def corpus_small():
    return small_corpus()
