"""Immutable simple undirected graphs and the primitive set/ball/path operations.

Vertices are dense integer ids ``0..n-1``.  Adjacency is stored in CSR form
(numpy arrays) with each neighbor row sorted, so iteration order is always
deterministic.  Graphs are immutable after construction; "deleting" vertices
means building a relabeled induced subgraph that carries its id mapping.

Vertex sets are plain ``set``/``frozenset`` objects.  All BFS tie-breaking is
by smallest vertex id, so every operation here is deterministic.

Thread-safety: ``Graph`` and ``Path`` never mutate after ``__init__`` and may
be shared freely across worker threads.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence

import numpy as np

VertexSet = frozenset  # a set of vertex ids; any Iterable[int] is accepted as input

# graphs larger than this use vectorized frontier expansion in BFS
_NUMPY_BFS_THRESHOLD = 256


@dataclass(frozen=True)
class Path:
    """A simple path given by its ordered vertex list.

    ``length`` is the edge count, ``len(vertices) - 1``.  Distinctness of the
    vertices is validated here; adjacency in a host graph is checked by
    :meth:`valid_in` because the same Path object may describe several hosts.
    """

    vertices: tuple

    def __post_init__(self):
        verts = tuple(int(v) for v in self.vertices)
        object.__setattr__(self, "vertices", verts)
        if not verts:
            raise ValueError("empty path")
        if len(set(verts)) != len(verts):
            raise ValueError("path repeats a vertex")

    @property
    def length(self) -> int:
        return len(self.vertices) - 1

    @property
    def start(self) -> int:
        return self.vertices[0]

    @property
    def end(self) -> int:
        return self.vertices[-1]

    def __len__(self) -> int:
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)

    def __contains__(self, v) -> bool:
        return v in self.vertices

    def reversed(self) -> "Path":
        return Path(tuple(reversed(self.vertices)))

    def valid_in(self, g: "Graph") -> bool:
        return all(g.has_edge(u, w) for u, w in zip(self.vertices, self.vertices[1:]))


class Graph:
    """Immutable simple undirected graph on vertices ``0..n-1``."""

    __slots__ = ("n", "edge_count", "_indptr", "_indices")

    def __init__(self, n: int, edges: Iterable[tuple] = (), _csr=None):
        if n < 0:
            raise ValueError("negative vertex count")
        self.n = int(n)
        if _csr is not None:
            indptr, indices = _csr
            self._indptr = indptr
            self._indices = indices
            self.edge_count = int(len(indices) // 2)
            return
        eu, ev = [], []
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) out of range 0..{n - 1}")
            eu.append(u)
            ev.append(v)
        self._indptr, self._indices = _build_csr(self.n, eu, ev)
        self.edge_count = int(len(self._indices) // 2)

    # -- accessors ---------------------------------------------------------

    def neighbors(self, v: int):
        """Sorted neighbor ids of ``v`` (numpy view; do not mutate)."""
        return self._indices[self._indptr[v]:self._indptr[v + 1]]

    def degree(self, v: int) -> int:
        return int(self._indptr[v + 1] - self._indptr[v])

    def degrees(self) -> np.ndarray:
        return np.diff(self._indptr)

    def has_edge(self, u: int, v: int) -> bool:
        row = self.neighbors(u)
        i = int(np.searchsorted(row, v))
        return i < len(row) and int(row[i]) == v

    def vertices(self) -> range:
        return range(self.n)

    def edges(self):
        """Iterate edges as (u, v) with u < v, in lexicographic order."""
        for u in range(self.n):
            for w in self.neighbors(u):
                w = int(w)
                if u < w:
                    yield (u, w)

    def adjacency_lists(self) -> list:
        return [list(map(int, self.neighbors(v))) for v in range(self.n)]

    def min_degree(self) -> int:
        return int(self.degrees().min()) if self.n else 0

    def max_degree(self) -> int:
        return int(self.degrees().max()) if self.n else 0

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.edge_count})"

    # -- constructors --------------------------------------------------------

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple]) -> "Graph":
        return cls(n, edges)

    @classmethod
    def from_adjacency(cls, adjacency: Sequence[Iterable[int]]) -> "Graph":
        n = len(adjacency)
        edges = [(u, v) for u in range(n) for v in adjacency[u] if u < v]
        return cls(n, edges)


def _build_csr(n: int, eu: list, ev: list):
    if not eu:
        return np.zeros(n + 1, dtype=np.int64), np.empty(0, dtype=np.int32)
    u = np.asarray(eu + ev, dtype=np.int64)
    v = np.asarray(ev + eu, dtype=np.int64)
    key = u * n + v
    key = np.unique(key)  # dedupe parallel edges
    u = (key // n).astype(np.int32)
    v = (key % n).astype(np.int32)
    counts = np.bincount(u, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return indptr, v


class InducedSubgraph(NamedTuple):
    """A relabeled induced subgraph plus its id mapping (both directions)."""

    graph: Graph
    new_to_old: tuple
    old_to_new: dict

    def lift_set(self, s: Iterable[int]) -> frozenset:
        """Map a vertex set of the subgraph back into original ids."""
        return frozenset(self.new_to_old[v] for v in s)

    def lift_path(self, p: Path) -> Path:
        return Path(tuple(self.new_to_old[v] for v in p.vertices))


# -- spec operations ---------------------------------------------------------


def average_degree(g: Graph) -> Fraction:
    """Exact average degree 2m/n.  Degree comparisons never go through floats."""
    if g.n == 0:
        raise ValueError("empty graph")
    return Fraction(2 * g.edge_count, g.n)


def neighborhood(g: Graph, s: Iterable[int], avoid: Iterable[int] = ()) -> frozenset:
    """External neighborhood of ``s`` in ``g`` minus ``avoid``.

    Returns the vertices outside ``s`` and ``avoid`` adjacent to some vertex
    of ``s``.  ``s`` and ``avoid`` must be disjoint.
    """
    s = set(s)
    avoid = set(avoid)
    if s & avoid:
        raise ValueError("set and avoid overlap")
    out = set()
    for v in s:
        out.update(map(int, g.neighbors(v)))
    return frozenset(out - s - avoid)


def ball(g: Graph, s: Iterable[int], radius: int, avoid: Iterable[int] = ()) -> frozenset:
    """Ball of the given radius around ``s`` in ``g - avoid`` (BFS)."""
    if radius < 0:
        raise ValueError("negative radius")
    s = set(map(int, s))
    avoid = set(map(int, avoid))
    if s & avoid:
        raise ValueError("set and avoid overlap")
    levels = bfs_levels(g, s, avoid=avoid, radius=radius)
    return frozenset(int(v) for v in np.flatnonzero(levels >= 0))


def bfs_levels(
    g: Graph,
    seeds: Iterable[int],
    avoid: Iterable[int] = (),
    radius: Optional[int] = None,
    stop_size: Optional[int] = None,
) -> np.ndarray:
    """BFS distance array from a seed set, restricted to ``V - avoid``.

    Returns an ``int32`` array with -1 for unreached vertices.  Growth stops
    after ``radius`` layers or once the visited count reaches ``stop_size``
    (the current layer is always completed, never truncated mid-layer).
    """
    levels = np.full(g.n, -1, dtype=np.int32)
    seeds = sorted({int(v) for v in seeds})
    if not seeds:
        return levels
    avoid = set(map(int, avoid))
    if avoid:
        for v in seeds:
            if v in avoid:
                raise ValueError("seed inside avoid set")
    if g.n > _NUMPY_BFS_THRESHOLD:
        return _bfs_levels_np(g, seeds, avoid, radius, stop_size, levels)
    frontier = seeds
    for v in frontier:
        levels[v] = 0
    size = len(frontier)
    r = 0
    while frontier:
        if radius is not None and r >= radius:
            break
        if stop_size is not None and size >= stop_size:
            break
        nxt = set()
        for u in frontier:
            for w in g.neighbors(u):
                w = int(w)
                if levels[w] < 0 and w not in avoid:
                    nxt.add(w)
        r += 1
        frontier = sorted(nxt)
        for v in frontier:
            levels[v] = r
        size += len(frontier)
    return levels


def _bfs_levels_np(g, seeds, avoid, radius, stop_size, levels):
    blocked = np.zeros(g.n, dtype=bool)
    if avoid:
        blocked[list(avoid)] = True
    frontier = np.asarray(seeds, dtype=np.int32)
    levels[frontier] = 0
    size = len(frontier)
    r = 0
    indptr, indices = g._indptr, g._indices
    while len(frontier):
        if radius is not None and r >= radius:
            break
        if stop_size is not None and size >= stop_size:
            break
        starts = indptr[frontier]
        counts = (indptr[frontier + 1] - starts).astype(np.int64)
        total = int(counts.sum())
        if total == 0:
            break
        # gather all neighbor slices into one flat array
        offs = np.repeat(starts - np.concatenate(([0], np.cumsum(counts)[:-1])), counts)
        flat = indices[offs + np.arange(total, dtype=np.int64)]
        cand = flat[(levels[flat] < 0) & ~blocked[flat]]
        if len(cand) == 0:
            break
        frontier = np.unique(cand)
        r += 1
        levels[frontier] = r
        size += len(frontier)
    return levels


def bfs_parents(
    g: Graph,
    seeds: Iterable[int],
    avoid: Iterable[int] = (),
    radius: Optional[int] = None,
    target: Optional[int] = None,
    allowed: Optional[set] = None,
    stop_size: Optional[int] = None,
) -> tuple:
    """Layered BFS with smallest-id parent assignment.

    Layers are processed in ascending vertex order so each vertex's parent is
    the smallest-id vertex of the previous layer adjacent to it.  If ``target``
    is given the search stops once it is reached (after finishing the layer);
    ``stop_size`` stops growth once that many vertices are visited (layers are
    never truncated mid-way).  ``allowed``, when given, restricts the walk to
    that vertex set (seeds included implicitly).  Returns
    ``(levels: dict, parents: dict)``.
    """
    seeds = sorted({int(v) for v in seeds})
    avoid = set(map(int, avoid))
    levels = {v: 0 for v in seeds}
    parents = {v: None for v in seeds}
    frontier = seeds
    r = 0
    while frontier:
        if radius is not None and r >= radius:
            break
        if target is not None and target in levels:
            break
        if stop_size is not None and len(levels) >= stop_size:
            break
        nxt = []
        for u in frontier:
            for w in g.neighbors(u):
                w = int(w)
                if w in levels or w in avoid:
                    continue
                if allowed is not None and w not in allowed:
                    continue
                levels[w] = r + 1
                parents[w] = u
                nxt.append(w)
        frontier = sorted(nxt)
        r += 1
    return levels, parents


def trace_path(parents: dict, end: int) -> list:
    out = [end]
    while parents[out[-1]] is not None:
        out.append(parents[out[-1]])
    out.reverse()
    return out


def shortest_path_within(g: Graph, allowed: Iterable[int], src: int, dst: int) -> Optional[Path]:
    """Shortest path from src to dst using only vertices of ``allowed``."""
    allowed = set(map(int, allowed))
    allowed.update((int(src), int(dst)))
    levels, parents = bfs_parents(g, [src], target=dst, allowed=allowed)
    if dst not in levels:
        return None
    return Path(tuple(trace_path(parents, int(dst))))


def set_radius_center(g: Graph, s: Iterable[int]) -> tuple:
    """Center vertex and radius of the induced subgraph G[s].

    Returns ``(v, r)`` where ``v`` minimizes the eccentricity within ``G[s]``
    and ``r`` is that eccentricity; ties broken by smallest vertex id.
    Raises if ``G[s]`` is not connected.
    """
    s = sorted({int(v) for v in s})
    if not s:
        raise ValueError("empty set")
    members = set(s)
    best = None
    for v in s:
        ecc, reached = _eccentricity_in(g, members, v)
        if reached != len(s):
            raise ValueError("set not connected")
        if best is None or ecc < best[1]:
            best = (v, ecc)
    return best


def _eccentricity_in(g: Graph, members: set, v: int) -> tuple:
    seen = {v}
    frontier = [v]
    ecc = 0
    while frontier:
        nxt = []
        for u in frontier:
            for w in g.neighbors(u):
                w = int(w)
                if w in members and w not in seen:
                    seen.add(w)
                    nxt.append(w)
        if nxt:
            ecc += 1
        frontier = nxt
    return ecc, len(seen)


def is_connected_set(g: Graph, s: Iterable[int]) -> bool:
    s = {int(v) for v in s}
    if not s:
        return False
    v0 = min(s)
    _, reached = _eccentricity_in(g, s, v0)
    return reached == len(s)


def consecutive_shortest_paths(
    g: Graph, v: int, domain: Iterable[int], targets: Sequence[int]
) -> tuple:
    """Shortest paths from ``v`` to each target, each avoiding all earlier ones.

    Path i is shortest from ``v`` to ``targets[i]`` inside
    ``domain - (P_1 | ... | P_{i-1}) + v``.  Returns ``(paths, failed_index)``
    where ``failed_index`` is None when every target was reached, else the
    index of the first unreachable target (``paths`` then holds the prefix).
    """
    v = int(v)
    domain = {int(x) for x in domain}
    if v not in domain:
        raise ValueError("origin not in domain")
    for t in targets:
        if int(t) not in domain:
            raise ValueError(f"target {t} not in domain")
    used = set()
    paths = []
    for i, t in enumerate(targets):
        t = int(t)
        allowed = (domain - used) | {v}
        if t not in allowed:
            return paths, i
        levels, parents = bfs_parents(g, [v], target=t, allowed=allowed)
        if t not in levels:
            return paths, i
        p = Path(tuple(trace_path(parents, t)))
        paths.append(p)
        used.update(p.vertices)
    return paths, None


def induced_subgraph(g: Graph, s: Iterable[int]) -> InducedSubgraph:
    """Relabeled induced subgraph on ``s`` with its bijective id mapping."""
    new_to_old = sorted({int(v) for v in s})
    if not new_to_old:
        raise ValueError("empty set")
    for v in (new_to_old[0], new_to_old[-1]):
        if not (0 <= v < g.n):
            raise ValueError(f"vertex {v} out of range")
    old_to_new = {v: i for i, v in enumerate(new_to_old)}
    if g.n > _NUMPY_BFS_THRESHOLD:
        keep = np.zeros(g.n, dtype=bool)
        keep[new_to_old] = True
        relab = np.full(g.n, -1, dtype=np.int64)
        relab[new_to_old] = np.arange(len(new_to_old))
        eu, ev = [], []
        for v in new_to_old:
            row = g.neighbors(v)
            row = row[keep[row]]
            row = row[row > v]
            if len(row):
                eu.extend([old_to_new[v]] * len(row))
                ev.extend(int(x) for x in relab[row])
        sub = Graph(len(new_to_old), zip(eu, ev))
    else:
        members = set(new_to_old)
        edges = [
            (old_to_new[u], old_to_new[int(w)])
            for u in new_to_old
            for w in g.neighbors(u)
            if int(w) in members and u < int(w)
        ]
        sub = Graph(len(new_to_old), edges)
    return InducedSubgraph(sub, tuple(new_to_old), old_to_new)


def connected_components(g: Graph) -> list:
    """Connected components as sorted vertex lists, ordered by smallest member."""
    seen = np.zeros(g.n, dtype=bool)
    comps = []
    for v in range(g.n):
        if seen[v]:
            continue
        levels = bfs_levels(g, [v])
        comp = np.flatnonzero(levels >= 0)
        seen[comp] = True
        comps.append([int(x) for x in comp])
    return comps


# -- text formats -------------------------------------------------------------


def parse_graph_text(text: str) -> Graph:
    """Parse a graph from edge-list or DIMACS text.

    Edge-list lines are ``u v`` (0-based, whitespace separated, ``#``
    comments).  DIMACS uses ``p edge n m`` / ``e u v`` lines (1-based).
    """
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith(("#", "c ")) and ln != "c"]
    if not lines:
        return Graph(0)
    if lines[0].startswith("p "):
        return _parse_dimacs(lines)
    edges = []
    top = -1
    for ln in lines:
        parts = ln.split()
        if len(parts) < 2:
            raise ValueError(f"bad edge line: {ln!r}")
        u, v = int(parts[0]), int(parts[1])
        if u < 0 or v < 0:
            raise ValueError("edge-list vertices must be non-negative")
        edges.append((u, v))
        top = max(top, u, v)
    return Graph(top + 1, edges)


def _parse_dimacs(lines: list) -> Graph:
    header = lines[0].split()
    if len(header) < 4 or header[0] != "p":
        raise ValueError(f"bad DIMACS header: {lines[0]!r}")
    n = int(header[2])
    edges = []
    for ln in lines[1:]:
        parts = ln.split()
        if parts[0] != "e":
            continue
        u, v = int(parts[1]) - 1, int(parts[2]) - 1
        edges.append((u, v))
    return Graph(n, edges)


def load_graph(path) -> Graph:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_graph_text(fh.read())


def to_edge_list_text(g: Graph) -> str:
    out = [f"# n = {g.n}, m = {g.edge_count}"]
    out.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(out) + "\n"
