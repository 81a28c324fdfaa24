"""Shared machinery for the staged constructions: interleaved ball growth
around many seed sets until a common hub vertex appears, chain recovery from
BFS level arrays, distance-based trimming, and two-phase path routing that
enters a target set exactly once.

Everything here is deterministic; all tie-breaks are by smallest vertex id.
Per-index ball growth is independent and could fan out over workers; the
sequential round-robin used here keeps results identical either way.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from .graph import Graph, Path, bfs_parents, trace_path


class BallFamily:
    """Interleaved BFS balls around several seed sets, with coverage counts."""

    def __init__(self, g: Graph, seed_sets: dict, avoid_common=(), avoid_extra=None):
        self.g = g
        self.indices = sorted(seed_sets)
        self.levels = {}
        self.frontiers = {}
        self.sizes = {}
        self.coverage = np.zeros(g.n, dtype=np.int16)
        self._blocked = {}
        common = np.zeros(g.n, dtype=bool)
        if len(avoid_common):
            common[sorted(int(v) for v in avoid_common)] = True
        for i in self.indices:
            seeds = sorted(int(v) for v in seed_sets[i])
            lv = np.full(g.n, -1, dtype=np.int32)
            lv[seeds] = 0
            blocked = common.copy()
            if avoid_extra and i in avoid_extra and len(avoid_extra[i]):
                blocked[sorted(int(v) for v in avoid_extra[i])] = True
            if blocked[seeds].any():
                raise ValueError(f"seed of ball {i} lies in its avoid set")
            self.levels[i] = lv
            self.frontiers[i] = np.asarray(seeds, dtype=np.int64)
            self.sizes[i] = len(seeds)
            self.coverage[seeds] += 1
            self._blocked[i] = blocked
        self.radius = 0

    def grow_round(self, active=None) -> bool:
        """Advance every (active) ball by one BFS layer.  True if any grew."""
        g = self.g
        indptr, indices = g._indptr, g._indices
        grew = False
        for i in self.indices if active is None else active:
            frontier = self.frontiers[i]
            if not len(frontier):
                continue
            lv = self.levels[i]
            blocked = self._blocked[i]
            starts = indptr[frontier]
            counts = (indptr[frontier + 1] - starts).astype(np.int64)
            total = int(counts.sum())
            if total == 0:
                self.frontiers[i] = frontier[:0]
                continue
            offs = np.repeat(starts - np.concatenate(([0], np.cumsum(counts)[:-1])), counts)
            flat = indices[offs + np.arange(total, dtype=np.int64)]
            cand = flat[(lv[flat] < 0) & ~blocked[flat]]
            if len(cand) == 0:
                self.frontiers[i] = frontier[:0]
                continue
            new = np.unique(cand).astype(np.int64)
            lv[new] = self.radius + 1
            self.coverage[new] += 1
            self.frontiers[i] = new
            self.sizes[i] += len(new)
            grew = True
        if grew:
            self.radius += 1
        return grew

    def best_hub(self, forbid_mask=None) -> tuple:
        """Vertex covered by the most balls (smallest id on ties) and its count.

        ``forbid_mask`` (boolean array) removes vertices from consideration.
        """
        if forbid_mask is None:
            hub = int(np.argmax(self.coverage))
            return hub, int(self.coverage[hub])
        masked = np.where(forbid_mask, np.int16(-1), self.coverage)
        hub = int(np.argmax(masked))
        return hub, int(masked[hub])

    def covered_indices(self, v: int) -> list:
        return [i for i in self.indices if self.levels[i][v] >= 0]


def grow_balls_to_common_hub(
    g: Graph,
    seed_sets: dict,
    avoid_common=(),
    avoid_extra=None,
    radius_cap: Optional[int] = None,
    size_cap: Optional[int] = None,
    forbid=None,
) -> tuple:
    """Grow balls until some vertex lies in all of them (or growth is exhausted).

    Stops at full coverage, frontier exhaustion, the radius cap, or once every
    ball reached ``size_cap``.  Returns ``(hub, covered_indices, family)``;
    ``hub`` is the best-covered vertex even when full coverage was not
    reached (the caller decides whether the coverage is good enough).
    Vertices in ``forbid`` are never chosen as the hub (they may still be
    walked through where the per-ball avoid sets allow it).
    """
    fam = BallFamily(g, seed_sets, avoid_common, avoid_extra)
    mask = None
    if forbid is not None and len(forbid):
        mask = np.zeros(g.n, dtype=bool)
        mask[sorted(int(v) for v in forbid)] = True
    want = len(fam.indices)
    while True:
        hub, cov = fam.best_hub(mask)
        if cov >= want:
            break
        if radius_cap is not None and fam.radius >= radius_cap:
            break
        if size_cap is not None and all(fam.sizes[i] >= size_cap for i in fam.indices):
            break
        if not fam.grow_round():
            break
    hub, cov = fam.best_hub(mask)
    if cov <= 0:
        return hub, [], fam
    return hub, fam.covered_indices(hub), fam


def backtrack_chain(g: Graph, levels: np.ndarray, end: int) -> list:
    """Walk a BFS level array from ``end`` down to a level-0 seed.

    Returns the chain ``[seed, ..., end]``; at each step the smallest-id
    neighbor one level down is taken, so chains are deterministic.
    """
    r = int(levels[end])
    if r < 0:
        raise ValueError("end vertex not reached by this ball")
    chain = [int(end)]
    v = int(end)
    while r > 0:
        nxt = None
        for w in g.neighbors(v):
            w = int(w)
            if levels[w] == r - 1:
                nxt = w
                break
        if nxt is None:
            raise ValueError("broken level array")
        chain.append(nxt)
        v = nxt
        r -= 1
    chain.reverse()
    return chain


def trim_to_size(g: Graph, members, center: int, size: int) -> frozenset:
    """Keep the ``size`` closest vertices to ``center`` inside G[members].

    Order is (induced BFS distance, id); keeping a prefix preserves induced
    connectivity and can only shrink the radius.  Farthest vertices drop
    first, larger ids first on ties.
    """
    members = {int(v) for v in members}
    if center not in members:
        raise ValueError("center not in set")
    if size < 1:
        raise ValueError("size must be positive")
    levels, _ = bfs_parents(g, [center], allowed=members)
    ranked = sorted(levels.items(), key=lambda kv: (kv[1], kv[0]))
    if len(ranked) < size:
        raise ValueError("set too small to trim to requested size")
    return frozenset(v for v, _r in ranked[:size])


def entry_path(
    g: Graph,
    scaffold,
    source: int,
    target_set,
    target_center: int,
    max_len: Optional[int] = None,
) -> Optional[Path]:
    """Path from ``source`` to ``target_center`` entering ``target_set`` once.

    Phase one walks inside ``scaffold`` minus the target set to the earliest
    (distance, id) vertex adjacent to the target set; phase two continues
    inside the target set to its center.  The result therefore splits into a
    contiguous part outside the set followed by a contiguous part inside it.
    """
    scaffold = {int(v) for v in scaffold}
    target_set = {int(v) for v in target_set}
    source = int(source)
    if source in target_set:
        inside = _path_inside(g, target_set, source, target_center)
        return inside
    outside_allowed = (scaffold - target_set) | {source}
    levels, parents = bfs_parents(g, [source], allowed=outside_allowed)
    entry = None
    for u, _r in sorted(levels.items(), key=lambda kv: (kv[1], kv[0])):
        hits = [int(w) for w in g.neighbors(u) if int(w) in target_set]
        if hits:
            entry = (u, min(hits))
            break
    if entry is None:
        return None
    u, w = entry
    outside = trace_path(parents, u)
    inside = _path_inside(g, target_set, w, target_center)
    if inside is None:
        return None
    verts = tuple(outside) + tuple(inside.vertices)
    if max_len is not None and len(verts) - 1 > max_len:
        return None
    return Path(verts)


def _path_inside(g: Graph, members: set, src: int, dst: int) -> Optional[Path]:
    levels, parents = bfs_parents(g, [src], allowed=members, target=dst)
    if dst not in levels:
        return None
    return Path(tuple(trace_path(parents, int(dst))))


def path_through_scaffold(g: Graph, scaffold, src: int, dst: int) -> Optional[Path]:
    """Shortest path from src to dst using only scaffold vertices."""
    allowed = {int(v) for v in scaffold}
    allowed.update((int(src), int(dst)))
    levels, parents = bfs_parents(g, [src], allowed=allowed, target=dst)
    if dst not in levels:
        return None
    return Path(tuple(trace_path(parents, int(dst))))
