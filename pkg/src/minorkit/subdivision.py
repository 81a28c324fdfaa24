"""Construction of units and complete-subdivision witnesses.

A unit is a corner vertex with t disjoint spoke paths leading to t disjoint
low-radius sets; units are the building blocks for subdivisions.  The builder
splits by degree profile: graphs with many high-degree vertices yield units
around star centers (:func:`build_units_dense`); bounded-degree graphs route
through corner-ball growth (:func:`build_units_sparse`), which can also short
circuit into a small subdivision directly when exits keep funnelling into the
forbidden region.  :func:`connect_units` then joins unit corners pairwise
along a proper edge coloring of the complete graph.

As in the minor builder, the asymptotic cardinalities (fractional powers of
m) degenerate to constants at realistic sizes; targets are treated as soft,
progress requires only enough survivors to finish, and every emitted object
is certified by the independent verifier before being returned.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .bounds import degree_floor as default_degree_floor
from .bounds import subdivision_density_target
from .errors import ConstructionStalled, InvariantViolation
from .expansion import (
    DEFAULT_STOP_FLOOR,
    MODE_BELOW_THRESHOLD,
    DerivedScales,
    ExpansionParams,
    ExtractionResult,
    derived_scales,
    extract_expander,
    size_cap,
)
from .graph import Graph, Path, average_degree, bfs_levels, bfs_parents, trace_path
from .minor import build_small_minor, conflict_prune
from .routing import (
    backtrack_chain,
    grow_balls_to_common_hub,
    path_through_scaffold,
    trim_to_size,
)
from .verify import (
    BRUTE_FORCE_MAX_N,
    BRUTE_FORCE_MAX_T,
    brute_force_has_minor,
    verify_minor_model,
    verify_subdivision,
    verify_unit,
)
from .witnesses import MinorModel, SubdivisionModel, Unit

log = logging.getLogger(__name__)

CASE_STARS = "stars"
CASE_SPARSE = "sparse"


def log2m(m: int) -> int:
    """Integer star-degree threshold ceil(log^2 m)."""
    return max(1, math.ceil(math.log(m) ** 2))


def unit_set_size(m: int, sigma: float) -> int:
    return max(1, math.floor(m ** sigma))


@dataclass(frozen=True)
class DegreeSplit:
    """Outcome of the high-degree star extraction.

    Either ``kind == "stars"`` with the extracted disjoint stars (center plus
    threshold-many neighbors each), or ``kind == "sparse"`` with the removal
    set ``x`` after which the maximum degree is below the threshold.
    """

    kind: str
    stars: tuple = ()
    x: frozenset = frozenset()
    threshold: int = 0

    def __post_init__(self):
        object.__setattr__(
            self, "stars",
            tuple((int(c), frozenset(map(int, s))) for c, s in self.stars),
        )
        object.__setattr__(self, "x", frozenset(map(int, self.x)))


def split_by_degree(h: Graph, sigma: float, min_stars: Optional[int] = None) -> DegreeSplit:
    """Greedy star extraction around residual-degree >= ceil(log^2 m) vertices.

    Stops with case ``stars`` once ``max(floor(m^(6 sigma)), min_stars)``
    disjoint stars are found, or case ``sparse`` when no high-degree vertex
    remains, returning the union of everything extracted as ``x``.
    """
    m = h.n
    if m == 0:
        raise ValueError("empty graph")
    thr = log2m(m)
    target = max(1, math.floor(m ** (6.0 * sigma)), min_stars or 1)
    removed = set()
    deg = {v: h.degree(v) for v in range(m)}
    stars = []
    while len(stars) < target:
        candidate = None
        for v in range(m):
            if v in removed:
                continue
            if deg[v] >= thr and (candidate is None or deg[v] > deg[candidate]):
                candidate = v
        if candidate is None:
            return DegreeSplit(
                kind=CASE_SPARSE,
                x=frozenset().union(*[{c} | s for c, s in stars]) if stars else frozenset(),
                stars=tuple(stars),
                threshold=thr,
            )
        members = [int(w) for w in h.neighbors(candidate) if int(w) not in removed][:thr]
        star = frozenset(members) | {candidate}
        stars.append((candidate, frozenset(members)))
        removed |= star
        for u in star:
            for w in h.neighbors(u):
                w = int(w)
                if w in deg and w not in removed:
                    deg[w] -= 1
    return DegreeSplit(kind=CASE_STARS, stars=tuple(stars), threshold=thr)


def grow_corner_ball(
    h: Graph,
    v: int,
    consumed_paths: list,
    b,
    d: DerivedScales,
    p: ExpansionParams,
) -> frozenset:
    """Residual ball of radius l around ``v`` avoiding consumed paths and ``b``.

    The consumed paths must all start at ``v`` (they are the corner's own
    consecutive shortest paths; the stored construction order is checked by
    the harness).  Reaching log^2 m vertices is the theoretical guarantee;
    here the ball is simply returned and the caller measures it.
    """
    v = int(v)
    b = {int(u) for u in b}
    if v in b:
        raise ValueError("corner vertex inside the avoid set")
    for path in consumed_paths:
        if path.start != v:
            raise ValueError("consumed path does not start at the corner")
    if len(consumed_paths) > 2 * p.t:
        log.warning("more consumed paths (%d) than the 2t budget", len(consumed_paths))
    avoid = set(b)
    for path in consumed_paths:
        avoid.update(path.vertices)
    avoid.discard(v)
    levels = bfs_levels(h, [v], avoid=avoid, radius=d.l)
    return frozenset(int(u) for u in np.flatnonzero(levels >= 0))


# -- edge coloring --------------------------------------------------------------


def kt_edge_coloring(t: int) -> tuple:
    """Proper edge coloring of K_t with <= t colors plus a distinguishing map.

    Returns ``(color, tag)``, both keyed by vertex pairs ``(i, j)`` with
    ``i < j`` over ``0..t-1``.  Colors are in ``1..t``; within each color
    class the ``tag`` values are 1, 2, ... so the pair (color, tag) is
    injective over the edges.  Round-robin (circle) construction.
    """
    if t < 2:
        raise ValueError("t must be >= 2")
    color = {}
    if t % 2 == 1:
        for i in range(t):
            for j in range(i + 1, t):
                color[(i, j)] = (i + j) % t + 1
    else:
        base = t - 1
        for i in range(base):
            for j in range(i + 1, base):
                color[(i, j)] = (i + j) % base + 1
        for i in range(base):
            color[(i, base)] = (2 * i) % base + 1
    tag = {}
    per_color = {}
    for pair in sorted(color):
        c = color[pair]
        per_color[c] = per_color.get(c, 0) + 1
        tag[pair] = per_color[c]
    return color, tag


# -- dense route -----------------------------------------------------------------


def build_units_dense(
    h: Graph,
    split: DegreeSplit,
    t: int,
    d: DerivedScales,
    p: ExpansionParams,
    max_units: Optional[int] = None,
    forbidden=(),
) -> list:
    """Build disjoint units around star centers (many-high-degrees case)."""
    if split.kind != CASE_STARS:
        raise ValueError("dense unit builder needs a star split")
    if t < 1:
        raise ValueError("t must be >= 1")
    m = h.n
    target = max_units if max_units is not None else max(1, math.floor(m ** p.sigma))
    units = []
    w0 = {int(v) for v in forbidden}
    while len(units) < target:
        try:
            unit = _one_dense_unit(h, split, t, d, p, w0)
        except ConstructionStalled:
            if units:
                break
            raise
        units.append(unit)
        w0 |= unit.vertices()
    return units


def _one_dense_unit(h, split, t, d, p, w0) -> Unit:
    m = h.n
    live = [(c, s) for c, s in split.stars if not (({c} | s) & w0)]
    n_sets = max(math.floor(m ** (4.0 * p.sigma)), 4 * (t + 1))
    if len(live) < t + 1:
        raise ConstructionStalled(
            f"only {len(live)} stars clear of the forbidden set, need {t + 1}",
            stage="star-extension",
            diagnostics={"stars_live": len(live), "forbidden": len(w0)},
        )
    live = live[: max(n_sets, t + 1)]
    centers = {i: c for i, (c, _s) in enumerate(live)}
    star_sets = {i: (frozenset(s) | {c}) for i, (c, s) in enumerate(live)}
    work_sets = dict(star_sets)

    set_size = unit_set_size(m, p.sigma)
    thr = split.threshold
    if set_size > thr + 1:
        # only at astronomical m: extend each star by ball growth to m^sigma
        used = set(w0)
        extended = {}
        for i in sorted(work_sets):
            lv = bfs_levels(h, [centers[i]], avoid=used - star_sets[i], radius=d.k,
                            stop_size=set_size)
            reached = frozenset(int(u) for u in np.flatnonzero(lv >= 0))
            if len(reached) < set_size:
                continue
            ext = trim_to_size(h, reached, centers[i], set_size)
            extended[i] = ext | star_sets[i]
            used |= extended[i]
        work_sets = extended

    state = _ConnectState(indices=sorted(work_sets))
    for round_no in range(1, t + 1):
        _dense_round(h, t, d, p, w0, centers, star_sets, work_sets, state, round_no)
    return _assemble_unit(h, t, d, p, state, centers, work_sets, set_size)


@dataclass
class _ConnectState:
    indices: list
    paths: dict = field(default_factory=dict)  # (round, idx) -> Path
    hubs: list = field(default_factory=list)

    def live_paths(self):
        return [self.paths[k] for k in sorted(self.paths) if k[1] in set(self.indices)]

    def drop_to(self, survivors):
        survivors = sorted(survivors)
        keep = set(survivors)
        self.paths = {k: v for k, v in self.paths.items() if k[1] in keep}
        self.indices = survivors


def _dense_round(h, t, d, p, w0, centers, star_sets, work_sets, state, round_no):
    avoid = set(w0)
    for (rnd, i), path in state.paths.items():
        avoid.update(path.vertices)
        avoid.discard(centers[i])
    seeds = {}
    for i in state.indices:
        pocket = {v for v in star_sets[i] if v not in avoid}
        pocket.add(centers[i])
        seeds[i] = pocket
    hub, covered, fam = grow_balls_to_common_hub(
        h, seeds, avoid_common=avoid, radius_cap=2 * d.k + 1,
        size_cap=size_cap(d.m, p.eta), forbid=avoid,
    )
    if len(covered) < t + 1:
        raise ConstructionStalled(
            f"unit round {round_no}: hub covers {len(covered)} star balls, need {t + 1}",
            stage=round_no,
            diagnostics={"covered": len(covered), "ball_sizes": dict(fam.sizes)},
        )
    paths = []
    kept = []
    for i in covered:
        chain = backtrack_chain(h, fam.levels[i], hub)
        verts = tuple(chain) if chain[0] == centers[i] else (centers[i],) + tuple(chain)
        path = Path(verts)
        if path.length > 2 * d.k + 2:
            continue
        paths.append(path)
        kept.append(i)
    keep_pos = conflict_prune([work_sets[i] for i in kept], paths, 2 * d.k + 2)
    survivors = [kept[pos] for pos in keep_pos]
    if len(survivors) < t + 1:
        raise ConstructionStalled(
            f"unit round {round_no}: {len(survivors)} survivors after pruning, need {t + 1}",
            stage=round_no,
            diagnostics={"pruned_to": len(survivors), "routed": len(kept)},
        )
    for pos in keep_pos:
        state.paths[(round_no, kept[pos])] = paths[pos]
    state.hubs.append(hub)
    state.drop_to(survivors)


def _assemble_unit(h, t, d, p, state, centers, work_sets, set_size) -> Unit:
    if len(state.indices) < t + 1:
        raise ConstructionStalled(
            f"{len(state.indices)} indices finished the connection rounds, need {t + 1}",
            stage="assembly",
            diagnostics={"survivors": list(state.indices)},
        )
    chosen = sorted(state.indices)[: t + 1]
    corner_idx = chosen[-1]
    owners = chosen[:t]
    corner = centers[corner_idx]
    spokes = []
    final_sets = []
    for s in range(1, t + 1):
        owner = owners[s - 1]
        pa = state.paths.get((s, corner_idx))
        pb = state.paths.get((s, owner))
        if pa is None or pb is None:
            raise InvariantViolation(f"missing connection path in round {s}")
        scaffold = set(pa.vertices) | set(pb.vertices)
        spoke = path_through_scaffold(h, scaffold, corner, centers[owner])
        if spoke is None:
            raise InvariantViolation(f"round-{s} paths do not join up")
        if spoke.length > 6 * d.k:
            raise InvariantViolation(f"spoke length {spoke.length} exceeds 6k")
        spokes.append(spoke)
        final_sets.append(trim_to_size(h, work_sets[owner], centers[owner], set_size))
    unit = Unit(
        corner=corner,
        spokes=tuple(spokes),
        sets=tuple(final_sets),
        centers=tuple(centers[o] for o in owners),
        sigma=p.sigma,
    )
    report = verify_unit(h, unit, d)
    if not report.valid:
        raise InvariantViolation(f"built unit failed verification: {report.violations}")
    return unit


# -- sparse route ----------------------------------------------------------------


def build_units_sparse(
    h: Graph,
    x,
    t: int,
    d: DerivedScales,
    p: ExpansionParams,
    degree_floor: Optional[float] = None,
    max_units: Optional[int] = None,
) -> Union[list, SubdivisionModel]:
    """Units (or a direct small subdivision) in the bounded-degree case.

    ``x`` is the removal set from :func:`split_by_degree` (max degree of
    ``h - x`` is below the star threshold).  Requires min degree at least the
    declared floor (warned, not raised, when violated).  Returns either a
    list of units or a SubdivisionModel when the corner balls keep exiting
    into the forbidden region (the funnel case).
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    m = h.n
    x = {int(v) for v in x}
    thr = log2m(m)
    rest_max = 0
    if len(x) < m:
        degs = h.degrees().astype(np.int64).copy()
        for v in x:
            degs[v] = 0
        for v in x:
            for w in h.neighbors(v):
                w = int(w)
                if w not in x:
                    degs[w] -= 1
        rest = [int(degs[v]) for v in range(m) if v not in x]
        rest_max = max(rest) if rest else 0
    if rest_max > thr:
        raise ValueError(f"max degree {rest_max} of h - x exceeds the threshold {thr}")
    floor = degree_floor if degree_floor is not None else default_degree_floor(t)
    if h.n and h.min_degree() < floor:
        log.warning(
            "min degree %d below the declared floor %.2f; corner growth may stall",
            h.min_degree(), floor,
        )
    target = max_units if max_units is not None else max(1, math.floor(m ** p.sigma))
    units = []
    w_global = set(x)
    while len(units) < target:
        try:
            got = _one_sparse_round(h, w_global, x, t, d, p)
        except ConstructionStalled:
            if units:
                break
            raise
        if isinstance(got, SubdivisionModel):
            return got
        units.append(got)
        w_global |= got.vertices()
    return units


def _harvest_corners(h, w, t, d, p):
    """Disjoint corner pockets: spaced centers with a trimmed residual ball each."""
    m = h.n
    thr = log2m(m)
    set_size = unit_set_size(m, p.sigma)
    want = max(math.floor(m ** 0.25), 4 * max(t + 1, t * (t - 1) // 2))
    degs = h.degrees()
    order = sorted((v for v in range(m) if v not in w), key=lambda v: (-int(degs[v]), v))
    used = set(w)
    pockets = {}
    centers = {}
    for v in order:
        if len(pockets) >= want:
            break
        if v in used:
            continue
        lv = bfs_levels(h, [v], avoid=used - {v}, radius=d.l, stop_size=thr)
        reached = sorted((int(lv[u]), int(u)) for u in np.flatnonzero(lv >= 0))
        if len(reached) < set_size:
            continue
        keep = frozenset(u for _r, u in reached[: min(thr, len(reached))])
        pockets[len(pockets)] = keep
        centers[len(centers)] = v
        used |= keep
    return pockets, centers


def _one_sparse_round(h, w, x, t, d, p) -> Union[Unit, SubdivisionModel]:
    # w is everything to stay out of (x plus units built so far); exits are
    # pursued only into x itself so that finished units do not keep pulling
    # every later corner ball into the boundary route
    m = h.n
    thr = log2m(m)
    set_size = unit_set_size(m, p.sigma)
    need_units = t + 1
    need_subdiv = t * (t - 1) // 2
    pockets, centers = _harvest_corners(h, w, t, d, p)
    if len(pockets) < max(need_units, need_subdiv):
        raise ConstructionStalled(
            f"harvested {len(pockets)} corner pockets, need {max(need_units, need_subdiv)}",
            stage="harvest",
            diagnostics={"pockets": len(pockets), "forbidden": len(w)},
        )
    state = _ConnectState(indices=sorted(pockets))
    qpaths = {}  # (beta, idx) -> Path
    bhubs = []
    alpha = 0
    beta = 0
    while alpha < t and beta < t:
        exits, balls = _probe_corner_balls(h, w, x, bhubs, state, qpaths, centers, d)
        case1 = sorted(i for i in state.indices if exits.get(i) is not None)
        case2 = sorted(i for i in state.indices if exits.get(i) is None)

        def q_step():
            need = need_subdiv if beta + 1 == t else 2
            _sparse_q_step(h, w, x, bhubs, state, qpaths, centers, exits, balls,
                           beta + 1, d, t, need)

        def p_step():
            need = need_units if alpha + 1 == t else 2
            _sparse_p_step(h, w, state, qpaths, centers, pockets, balls, case2,
                           alpha + 1, d, p, t, thr, need)

        # majority rule decides which case to pursue; if that step cannot keep
        # enough survivors the other one is attempted before giving up
        first, second = (q_step, p_step) if len(case1) >= len(case2) else (p_step, q_step)
        try:
            first()
            took_q = first is q_step
        except ConstructionStalled:
            second()
            took_q = second is q_step
        if took_q:
            beta += 1
        else:
            alpha += 1
    if alpha >= t:
        work_sets = {i: pockets[i] for i in state.indices}
        return _assemble_unit(h, t, d, p, state, centers, work_sets, set_size)
    return _assemble_direct_subdivision(h, t, d, state, qpaths, bhubs, centers)


def _probe_corner_balls(h, w, x, bhubs, state, qpaths, centers, d):
    """Residual corner balls plus the first exit (if any) into x minus B."""
    size_budget = 2 * log2m(h.n) + 32
    live_paths = state.live_paths() + [qpaths[k] for k in sorted(qpaths) if k[1] in set(state.indices)]
    bset = set(bhubs)
    base_avoid = set(w)
    for path in live_paths:
        base_avoid.update(path.vertices)
    # corner balls stay clear of every other live corner so that
    # boundary paths of different indices can never cross
    base_avoid.update(centers[j] for j in state.indices)
    exits = {}
    balls = {}
    for i in state.indices:
        v = centers[i]
        avoid = base_avoid - {v}
        levels, parents = bfs_parents(h, [v], avoid=avoid, radius=d.l, stop_size=size_budget)
        balls[i] = (levels, parents)
        exits[i] = _first_exit(h, levels, x, bset, d.l)
    return exits, balls


def _first_exit(h, levels, w, bset, radius):
    best = None
    for u, r in sorted(levels.items(), key=lambda kv: (kv[1], kv[0])):
        if r > radius - 1:
            break
        for nb in h.neighbors(u):
            nb = int(nb)
            if nb in w and nb not in bset:
                cand = (r, u, nb)
                if best is None or cand < best:
                    best = cand
                break
        if best is not None and best[0] <= r:
            break
    return best


def _sparse_q_step(h, w, x, bhubs, state, qpaths, centers, exits, balls, beta, d, t, need):
    counts = {}
    for i in state.indices:
        ex = exits.get(i)
        if ex is not None:
            counts[ex[2]] = counts.get(ex[2], 0) + 1
    if not counts:
        raise ConstructionStalled(
            "no exits available for a corner-to-boundary step",
            stage=("q", beta),
            diagnostics={"survivors": len(state.indices)},
        )
    b = min(counts, key=lambda cand: (-counts[cand], cand))
    taken = set()
    survivors = []
    new_paths = {}
    for i in state.indices:
        path = _route_exit(h, w, x, bhubs, state, qpaths, centers, balls, i, b, taken, d)
        if path is None:
            continue
        new_paths[(beta, i)] = path
        taken.update(path.vertices[:-1])
        survivors.append(i)
    if len(survivors) < need:
        raise ConstructionStalled(
            f"corner-to-boundary step kept {len(survivors)} survivors, need {need}",
            stage=("q", beta),
            diagnostics={"endpoint": b, "candidates": counts},
        )
    qpaths.update(new_paths)
    bhubs.append(b)
    state.drop_to(survivors)
    for key in [k for k in qpaths if k[1] not in set(state.indices)]:
        del qpaths[key]


def _route_exit(h, w, x, bhubs, state, qpaths, centers, balls, i, b, taken, d):
    v = centers[i]
    ex = None
    levels, parents = balls[i]
    clean = all(u not in taken for u in levels)
    if clean:
        first = _first_exit(h, levels, x, set(bhubs), d.l)
        if first is not None and first[2] == b:
            ex = (first[1], levels, parents)
    if ex is None:
        avoid = set(w) | taken
        for path in state.live_paths():
            avoid.update(path.vertices)
        for key in sorted(qpaths):
            avoid.update(qpaths[key].vertices)
        avoid.update(centers[j] for j in state.indices)
        avoid.discard(v)
        lv, pr = bfs_parents(h, [v], avoid=avoid, radius=d.l)
        for u, r in sorted(lv.items(), key=lambda kv: (kv[1], kv[0])):
            if r > d.l - 1:
                break
            if any(int(nb) == b for nb in h.neighbors(u)):
                ex = (u, lv, pr)
                break
    if ex is None:
        return None
    u, lv, pr = ex
    verts = tuple(trace_path(pr, u)) + (b,)
    return Path(verts)


def _sparse_p_step(h, w, state, qpaths, centers, pockets, balls, case2, alpha, d, p, t, thr, need):
    if len(case2) < need:
        raise ConstructionStalled(
            f"corner-growth step has {len(case2)} inward corners, need {need}",
            stage=("p", alpha),
            diagnostics={"survivors": len(state.indices)},
        )
    tsets = {}
    for i in case2:
        levels, _parents = balls[i]
        ranked = sorted((r, u) for u, r in levels.items())
        keep = frozenset(u for _r, u in ranked[: min(thr, len(ranked))])
        tsets[i] = keep
    avoid = set(w)
    for path in state.live_paths():
        avoid.update(path.vertices)
    for key in sorted(qpaths):
        if key[1] in set(state.indices):
            avoid.update(qpaths[key].vertices)
    for i in case2:
        avoid.discard(centers[i])
    avoid -= set().union(*tsets.values())
    hub, covered, fam = grow_balls_to_common_hub(
        h, tsets, avoid_common=avoid, radius_cap=2 * d.k,
        size_cap=size_cap(d.m, p.eta), forbid=avoid | set(w),
    )
    if len(covered) < need:
        raise ConstructionStalled(
            f"corner-growth step: hub covers {len(covered)} balls, need {need}",
            stage=("p", alpha),
            diagnostics={"ball_sizes": dict(fam.sizes)},
        )
    paths = []
    kept = []
    for i in covered:
        chain = backtrack_chain(h, fam.levels[i], hub)
        inner = path_through_scaffold(h, tsets[i], centers[i], chain[0])
        if inner is None:
            continue
        verts = tuple(inner.vertices) + tuple(chain[1:])
        path = Path(verts)
        if path.length > 2 * d.k + d.l:
            continue
        paths.append(path)
        kept.append(i)
    keep_pos = conflict_prune([pockets[i] for i in kept], paths, 2 * d.k + d.l)
    survivors = [kept[pos] for pos in keep_pos]
    if len(survivors) < need:
        raise ConstructionStalled(
            f"corner-growth step kept {len(survivors)} survivors after pruning, need {need}",
            stage=("p", alpha),
            diagnostics={"routed": len(kept)},
        )
    for pos in keep_pos:
        state.paths[(alpha, kept[pos])] = paths[pos]
    state.drop_to(survivors)
    for key in [k for k in qpaths if k[1] not in set(state.indices)]:
        del qpaths[key]


def _assemble_direct_subdivision(h, t, d, state, qpaths, bhubs, centers) -> SubdivisionModel:
    need = t * (t - 1) // 2
    if len(state.indices) < need or len(bhubs) < t:
        raise ConstructionStalled(
            f"subdivision route finished with {len(state.indices)} indices and"
            f" {len(bhubs)} boundary corners, need {need} and {t}",
            stage="subdivision-assembly",
            diagnostics={"survivors": len(state.indices), "corners": len(bhubs)},
        )
    chosen = sorted(state.indices)[:need]
    corners = tuple(bhubs[:t])
    pairs = [(i, j) for i in range(t) for j in range(i + 1, t)]
    edge_paths = {}
    for pos, (i, j) in enumerate(pairs):
        idx = chosen[pos]
        qa = qpaths.get((i + 1, idx))
        qb = qpaths.get((j + 1, idx))
        if qa is None or qb is None:
            raise InvariantViolation(f"missing boundary path for pair {(i, j)}")
        scaffold = set(qa.vertices) | set(qb.vertices)
        path = path_through_scaffold(h, scaffold, corners[i], corners[j])
        if path is None:
            raise InvariantViolation(f"boundary paths for {(i, j)} do not join")
        if path.length > 2 * d.l + 2:
            raise InvariantViolation("boundary pair path exceeds the 2l bound")
        edge_paths[(i, j)] = path
    model = SubdivisionModel(t, corners, edge_paths)
    report = verify_subdivision(h, model)
    if not report.valid:
        raise InvariantViolation(f"direct subdivision failed verification: {report.violations}")
    return model


# -- connecting units ------------------------------------------------------------


def connect_units(
    h: Graph,
    units: list,
    t: int,
    d: DerivedScales,
    p: ExpansionParams,
    min_units: Optional[int] = None,
) -> SubdivisionModel:
    """Join unit corners pairwise into a verified complete subdivision.

    Walks the lexicographic order on (spoke index, repetition), at each step
    growing balls from the units' current sets to a common hub and routing a
    bounded-length path per unit, pruning conflicts.  Finally the corner pairs
    are wired through the proper edge coloring so each spoke/hub path is used
    by exactly one pair.
    """
    minimum = max(t, min_units if min_units is not None else t + 1)
    if len(units) < minimum:
        raise ValueError(f"need at least {minimum} units, got {len(units)}")
    for u in units:
        if u.t < t:
            raise ValueError("unit has fewer spokes than requested t")
    seen = set()
    for u in units:
        vs = u.vertices()
        if seen & vs:
            raise ValueError("units are not pairwise disjoint")
        seen |= vs
    m = h.n
    trimmed = {}
    for i, u in enumerate(units):
        for j in range(t):
            size = max(1, math.floor(m ** (p.sigma - j * p.eta)))
            size = min(size, len(u.sets[j]))
            trimmed[(i, j)] = trim_to_size(h, u.sets[j], u.centers[j], size)

    state = LexConnectState(indices=list(range(len(units))))
    for alpha in range(1, t + 1):
        for beta in range(1, t + 1):
            state.position = (alpha, beta)
            _connect_step(h, units, trimmed, state, alpha, beta, t, d, p)
    if len(state.indices) < t:
        raise ConstructionStalled(
            f"unit connection finished with {len(state.indices)} units, need {t}",
            stage=(t, t),
            diagnostics={"survivors": state.indices},
        )
    chosen = sorted(state.indices)[:t]
    color, tag = kt_edge_coloring(t)
    edge_paths = {}
    for (i, j), c in sorted(color.items()):
        e = tag[(i, j)]
        ui, uj = units[chosen[i]], units[chosen[j]]
        qa = state.paths.get((c, e, chosen[i]))
        qb = state.paths.get((c, e, chosen[j]))
        if qa is None or qb is None:
            raise InvariantViolation(f"missing hub path for colored pair {(i, j)}")
        scaffold = (
            set(ui.spokes[c - 1].vertices)
            | set(qa.vertices)
            | set(qb.vertices)
            | set(uj.spokes[c - 1].vertices)
        )
        path = path_through_scaffold(h, scaffold, ui.corner, uj.corner)
        if path is None:
            raise InvariantViolation(f"pieces for pair {(i, j)} do not join")
        if path.length > 16 * d.k:
            raise InvariantViolation("corner pair path exceeds the 16k bound")
        edge_paths[(i, j)] = path
    model = SubdivisionModel(t, tuple(units[c].corner for c in chosen), edge_paths)
    report = verify_subdivision(h, model)
    if not report.valid:
        raise InvariantViolation(f"connected subdivision failed verification: {report.violations}")
    return model


@dataclass
class LexConnectState:
    """State of the lexicographic unit connection: current position, hub
    vertices, stored hub paths keyed (alpha, beta, unit), and survivors.
    The stored-path conditions are asserted at every insertion."""

    indices: list
    position: tuple = (1, 0)
    hubs: dict = field(default_factory=dict)   # (alpha, beta) -> vertex
    paths: dict = field(default_factory=dict)  # (alpha, beta, i) -> Path


def _connect_step(h, units, trimmed, state: LexConnectState, alpha, beta, t, d, p):
    indices = state.indices
    qmap = state.paths
    if len(indices) < t:
        raise ConstructionStalled(
            f"unit connection stalled before step ({alpha},{beta}):"
            f" {len(indices)} survivors",
            stage=(alpha, beta),
            diagnostics={"survivors": indices},
        )
    w = set()
    for i in indices:
        for sp in units[i].spokes:
            w.update(sp.vertices)
    for key in sorted(qmap):
        if key[2] in set(indices):
            w.update(qmap[key].vertices)
    seeds = {}
    avoid_extra = {}
    for i in indices:
        own = trimmed[(i, alpha - 1)]
        later = set().union(*[trimmed[(i, a)] for a in range(alpha, t)]) if alpha < t else set()
        seeds[i] = set(own)
        avoid_extra[i] = (w - set(own)) | (later - set(own))
    hub, covered, fam = grow_balls_to_common_hub(
        h, seeds, avoid_common=(), avoid_extra=avoid_extra,
        radius_cap=d.k, size_cap=size_cap(d.m, p.eta), forbid=w,
    )
    if len(covered) < t:
        raise ConstructionStalled(
            f"step ({alpha},{beta}): hub covers {len(covered)} unit balls, need {t}",
            stage=(alpha, beta),
            diagnostics={"ball_sizes": dict(fam.sizes)},
        )
    taken = set()
    paths = []
    kept = []
    for i in covered:
        path = _route_unit_hub_path(h, units, trimmed, fam, i, alpha, hub, taken, avoid_extra[i], d)
        if path is None:
            continue
        _assert_connect_bullets(path, qmap, units, indices, i, alpha, beta, hub, t)
        paths.append(path)
        kept.append(i)
        taken.update(set(path.vertices) - {hub})
    msets = []
    for i in kept:
        msets.append(frozenset().union(*[trimmed[(i, a)] for a in range(alpha - 1, t)]))
    keep_pos = conflict_prune(msets, paths, 2 * d.k)
    survivors = [kept[pos] for pos in keep_pos]
    if len(survivors) < t:
        raise ConstructionStalled(
            f"step ({alpha},{beta}) kept {len(survivors)} units after pruning, need {t}",
            stage=(alpha, beta),
            diagnostics={"routed": len(kept), "pruned_to": len(survivors)},
        )
    for pos in keep_pos:
        qmap[(alpha, beta, kept[pos])] = paths[pos]
    state.hubs[(alpha, beta)] = hub
    keep = set(survivors)
    for key in [k for k in qmap if k[2] not in keep]:
        del qmap[key]
    state.indices = survivors


def _route_unit_hub_path(h, units, trimmed, fam, i, alpha, hub, taken, avoid_extra, d):
    center = units[i].centers[alpha - 1]
    own = trimmed[(i, alpha - 1)]
    chain = backtrack_chain(h, fam.levels[i], hub)
    dirty = any(v in taken for v in chain)
    if not dirty:
        inner = path_through_scaffold(h, own, center, chain[0])
        if inner is not None:
            verts = tuple(inner.vertices) + tuple(chain[1:])
            path = Path(verts)
            if path.length <= 2 * d.k:
                return path
    avoid = set(avoid_extra) | (taken - {hub})
    avoid.discard(center)
    allowed_avoid = avoid - set(own)
    lv, pr = bfs_parents(h, [center], avoid=allowed_avoid | (taken - {hub}), target=hub)
    if hub not in lv:
        return None
    path = Path(tuple(trace_path(pr, hub)))
    if path.length > 2 * d.k:
        return None
    return path


def _assert_connect_bullets(path, qmap, units, indices, i, alpha, beta, hub, t):
    """The stored-path conditions of the lexicographic connection, checked at
    insertion: correct endpoints, no crossing of other spoke rounds, no
    crossing of other units' hub paths, no crossing of foreign spokes."""
    if path.vertices[-1] != hub:
        raise InvariantViolation("hub path does not end at the hub")
    if path.vertices[0] != units[i].centers[alpha - 1]:
        raise InvariantViolation("hub path does not start at the spoke center")
    pset = set(path.vertices)
    for (a2, b2, j), other in qmap.items():
        shared = pset & set(other.vertices)
        if a2 != alpha and shared:
            raise InvariantViolation(f"hub path crosses a path of spoke round {a2}")
        if a2 == alpha and b2 != beta and j != i and shared:
            raise InvariantViolation("hub path crosses another unit's earlier hub path")
    for j in indices:
        for a2 in range(t):
            if j == i and a2 == alpha - 1:
                continue
            if pset & set(units[j].spokes[a2].vertices):
                raise InvariantViolation(
                    f"hub path crosses spoke {a2} of unit {j}"
                )


# -- pipeline ---------------------------------------------------------------------


MODE_SUBDIVISION = "subdivision"
MODE_MINOR_OR_SUBDIVISION = "minor_or_subdivision"


@dataclass
class SubdivisionPipelineResult:
    outcome: str  # "subdivision" | "minor" | "handoff" | "stalled"
    model: Optional[SubdivisionModel] = None
    # set in minor_or_subdivision mode when the constant-size fallback fires
    minor_model: Optional[MinorModel] = None
    units: Optional[list] = None
    extraction: Optional[ExtractionResult] = None
    brute_force_answer: Optional[bool] = None
    detail: str = ""
    params: Optional[ExpansionParams] = None
    scales: Optional[DerivedScales] = None
    route: str = ""

    @property
    def witness_size(self) -> Optional[int]:
        if self.model is not None:
            return self.model.total_vertices
        if self.minor_model is not None:
            return self.minor_model.total_vertices
        return None


def find_subdivision_pipeline(
    g: Graph,
    t: int,
    epsilon: float,
    mode: str = MODE_SUBDIVISION,
    degree_floor_coeff: Optional[float] = None,
    stop_floor: int = DEFAULT_STOP_FLOOR,
    budget_ops: Optional[int] = None,
    max_units: Optional[int] = None,
) -> SubdivisionPipelineResult:
    """End-to-end: small-set extraction, degree split, units, connection.

    delta = epsilon/3 (capped below 1/2), eta = 1/300 t^3, sigma = 1/100t.
    Below-threshold extractions hand off to the brute-force minor oracle when
    small enough (for t <= 4 a complete minor and a complete subdivision are
    equivalent, so the answer is exact there).
    """
    if mode not in (MODE_SUBDIVISION, MODE_MINOR_OR_SUBDIVISION):
        raise ValueError(f"unknown mode {mode!r}")
    if g.n == 0:
        raise ValueError("empty graph")
    if average_degree(g) < subdivision_density_target(t):
        log.warning(
            "input density %.3f below the declared subdivision target %.3f",
            float(average_degree(g)), subdivision_density_target(t),
        )
    delta = min(epsilon / 3.0, 0.45)
    params = ExpansionParams.for_subdivision(t=t, delta=delta, ambient_n=g.n)
    extraction = extract_expander(
        g, params, small_set_mode=True, stop_floor=stop_floor, budget_ops=budget_ops
    )
    sub = extraction.subgraph
    if extraction.mode == MODE_BELOW_THRESHOLD:
        answer = None
        if sub.graph.n <= BRUTE_FORCE_MAX_N and t <= BRUTE_FORCE_MAX_T:
            answer = brute_force_has_minor(sub.graph, t)
        if mode == MODE_MINOR_OR_SUBDIVISION:
            mm = _constant_size_minor_fallback(g, sub, t, delta)
            if mm is not None:
                return SubdivisionPipelineResult(
                    outcome="minor", minor_model=mm, extraction=extraction,
                    brute_force_answer=answer, params=params, route="minor-fallback",
                    detail=f"constant-size minor inside the n={sub.graph.n} handoff graph",
                )
        return SubdivisionPipelineResult(
            outcome="handoff",
            extraction=extraction,
            brute_force_answer=answer,
            detail=f"extraction stopped below threshold at n={sub.graph.n}",
            params=params,
        )
    h = sub.graph
    m = h.n
    scales = derived_scales(m, params)
    if max_units is None:
        max_units = max(t + 2, math.floor(m ** params.sigma))
    stars_wanted = 4 * (t + 1) + 2
    split = split_by_degree(h, params.sigma, min_stars=stars_wanted)
    try:
        if split.kind == CASE_STARS:
            route = "dense"
            units = build_units_dense(h, split, t, scales, params, max_units=max_units)
        else:
            route = "sparse"
            coeff_floor = (
                default_degree_floor(t) if degree_floor_coeff is None
                else degree_floor_coeff * t * math.sqrt(max(math.log(t), 1e-9)) + 3.0 * t
            )
            got = build_units_sparse(
                h, split.x, t, scales, params,
                degree_floor=coeff_floor, max_units=max_units,
            )
            if isinstance(got, SubdivisionModel):
                model = got.remap(sub.new_to_old)
                _certify_subdivision(g, model)
                return SubdivisionPipelineResult(
                    outcome="subdivision", model=model, extraction=extraction,
                    params=params, scales=scales, route="sparse-direct",
                )
            units = got
        if len(units) < t + 1:
            return SubdivisionPipelineResult(
                outcome="stalled",
                extraction=extraction,
                detail=f"only {len(units)} units built, need {t + 1} to connect",
                params=params,
                scales=scales,
                route=route,
            )
        model_local = connect_units(h, units, t, scales, params)
    except ConstructionStalled as exc:
        if mode == MODE_MINOR_OR_SUBDIVISION:
            mm = _constant_size_minor_fallback(g, sub, t, delta)
            if mm is not None:
                return SubdivisionPipelineResult(
                    outcome="minor", minor_model=mm, extraction=extraction,
                    params=params, scales=scales, route="minor-fallback",
                    detail=f"unit construction stalled ({exc}); built a minor witness instead",
                )
        return SubdivisionPipelineResult(
            outcome="stalled",
            extraction=extraction,
            detail=f"{exc} | diagnostics: {exc.diagnostics}",
            params=params,
            scales=scales,
        )
    model = model_local.remap(sub.new_to_old)
    _certify_subdivision(g, model)
    return SubdivisionPipelineResult(
        outcome="subdivision",
        model=model,
        units=[u.remap(sub.new_to_old) for u in units],
        extraction=extraction,
        params=params,
        scales=scales,
        route=route,
    )


def _certify_subdivision(g: Graph, model: SubdivisionModel):
    report = verify_subdivision(g, model)
    if not report.valid:
        raise InvariantViolation(f"subdivision failed verification: {report.violations}")


def _constant_size_minor_fallback(g, sub, t, delta) -> Optional[MinorModel]:
    """Minor-or-subdivision mode: build a complete-minor witness in the small
    extracted graph when the subdivision machinery does not fit there."""
    h = sub.graph
    if h.n < t or h.n < 3:
        return None
    mparams = ExpansionParams.for_minor(t=t, delta=delta, ambient_n=max(h.n, 3))
    try:
        local = build_small_minor(h, t, derived_scales(h.n, mparams), mparams)
    except (ConstructionStalled, ValueError):
        return None
    model = local.remap(sub.new_to_old)
    report = verify_minor_model(g, model)
    if not report.valid:
        raise InvariantViolation(f"fallback minor failed verification: {report.violations}")
    return model
