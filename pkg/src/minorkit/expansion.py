"""Expansion rates, expander extraction, and guaranteed ball growth.

The central objects are:

* :class:`ExpansionParams` - the scalar knobs (delta, eta, sigma, t, ambient
  graph order) for a run, in one of two flavors: minor mode (eta = 1/8t) or
  subdivision mode (eta = 1/300t^3, with an extra small-set expansion
  condition).
* :func:`expansion_function_f` - the rate function
  ``max(delta*eta^2 / (32 (log log 4m)^2), delta*eta*log m / (8 log n))``.
* :func:`extract_expander` - the density-preserving peel/contract loop: while
  the minimum degree is below half the average, peel; otherwise look for a
  vertex set with too-small neighborhood and either drop it or contract to its
  ball (:func:`dichotomy_step`), whichever preserves density.

All density comparisons are exact rational arithmetic.  Every routine here is
deterministic: tie-breaks are by smallest vertex id and the search budget is
counted in work units, not wall-clock time.
"""

from __future__ import annotations

import heapq
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .errors import InvariantViolation
from .graph import (
    Graph,
    InducedSubgraph,
    bfs_levels,
    induced_subgraph,
    neighborhood,
)

log = logging.getLogger(__name__)

MODE_PLAIN = "plain_expander"
MODE_SMALL_SET = "small_set_expander"
MODE_BELOW_THRESHOLD = "below_threshold"

DEFAULT_STOP_FLOOR = 32
DEFAULT_BUDGET_OPS = 2_000_000
# deterministic stand-in for a milliseconds budget: work units per ms
OPS_PER_MS = 2000

_EXHAUSTIVE_LIMIT = 18


@dataclass(frozen=True)
class ExpansionParams:
    """Scalar parameters of a run.

    ``lam`` is the effective expansion rate used for radius budgets; when
    None it defaults to the rate function value f(m) of the graph at hand.
    """

    delta: float
    eta: float
    ambient_n: int
    t: int = 1
    sigma: float = 0.0
    lam: Optional[float] = None

    def __post_init__(self):
        if not (0.0 < self.delta < 1.0):
            raise ValueError("delta must be in (0,1)")
        if not (0.0 < self.eta < 1.0):
            raise ValueError("eta must be in (0,1)")
        if self.ambient_n < 1:
            raise ValueError("ambient_n must be positive")
        if self.t < 1:
            raise ValueError("t must be >= 1")

    @classmethod
    def for_minor(cls, t: int, delta: float, ambient_n: int) -> "ExpansionParams":
        return cls(delta=delta, eta=1.0 / (8 * t), ambient_n=ambient_n, t=t,
                   sigma=1.0 / (100 * t))

    @classmethod
    def for_subdivision(cls, t: int, delta: float, ambient_n: int) -> "ExpansionParams":
        return cls(delta=delta, eta=1.0 / (300 * t ** 3), ambient_n=ambient_n, t=t,
                   sigma=1.0 / (100 * t))


@dataclass(frozen=True)
class DerivedScales:
    """Scales derived from (m, params): rate f(m), radius budget k, corner radius l."""

    f_m: float
    k: int
    l: int
    m: int


def _rate_at(m: float, delta: float, eta: float, ambient_n: int) -> float:
    """The rate function, defined for any real m >= 1."""
    first = delta * eta * eta / (32.0 * math.log(math.log(4.0 * m)) ** 2)
    second = delta * eta * math.log(m) / (8.0 * math.log(ambient_n))
    return max(first, second)


def expansion_function_f(m: int, p: ExpansionParams) -> float:
    """Rate function f(m) = max(de^2/32(loglog 4m)^2, de log m / 8 log n)."""
    if m < 3:
        raise ValueError("m must be at least 3")
    if m > p.ambient_n:
        raise ValueError("m exceeds ambient graph order")
    return _rate_at(float(m), p.delta, p.eta, p.ambient_n)


def small_set_rate(set_size: int, delta: float) -> float:
    """Extra expansion rate required of sets with at most m^(1/3) vertices."""
    return delta / (20.0 * math.log(math.log(4.0 * set_size)) ** 2)


def derived_scales(m: int, p: ExpansionParams) -> DerivedScales:
    f_m = expansion_function_f(m, p)
    k = math.ceil(4.0 * math.log(m) / f_m)
    l = max(1, math.floor(math.log(math.log(m)) ** 2))
    return DerivedScales(f_m=f_m, k=k, l=l, m=m)


def size_cap(m: int, eta: float) -> int:
    """floor(m^(1-eta)): the largest set size the expander condition covers."""
    return math.floor(m ** (1.0 - eta))


def small_size_cap(m: int) -> int:
    return math.floor(m ** (1.0 / 3.0))


# -- expansion-function checker -----------------------------------------------


@dataclass
class ExpansionCheckReport:
    ok: bool
    sandwich_ok: bool
    sum_ok: bool
    sum_value: float
    sum_bound: float
    term_count: int
    witness: Optional[tuple] = None

    @property
    def margin(self) -> float:
        return self.sum_bound - self.sum_value


def check_expansion_function(
    p: ExpansionParams, n: int, f: Optional[Callable[[float], float]] = None
) -> ExpansionCheckReport:
    """Check the two defining conditions of a usable rate function.

    (a) for sampled triples a <= b <= c in [1, n], the value at the middle
        point is at most the sum of the values at the surrounding points
        (automatic for a max of a decreasing and an increasing function, and
        exactly what the extraction telescoping uses); and
    (b) sum over x = 0..y-2 of f(n^((1-eta/2)^x)) is at most delta/2, with
        y = floor(-log log n / log(1 - eta/2)).

    ``f`` defaults to the built-in rate function with ambient order ``n``.
    Failures are reported with the offending triple / the sum value rather
    than raised.
    """
    if n < 16:
        raise ValueError("n must be at least 16")
    if f is None:
        f = lambda m: _rate_at(m, p.delta, p.eta, n)  # noqa: E731

    grid = _sample_grid(n)
    sandwich_ok = True
    witness = None
    vals = {a: f(a) for a in grid}
    for i, a in enumerate(grid):
        for j in range(i, len(grid)):
            b = grid[j]
            for c in grid[j:]:
                if vals[b] > vals[a] + vals[c] + 1e-12:
                    sandwich_ok = False
                    witness = (a, b, c, vals[a], vals[b], vals[c])
                    break
            if witness:
                break
        if witness:
            break

    y = math.floor(-math.log(math.log(n)) / math.log(1.0 - p.eta / 2.0))
    total = 0.0
    q = 1.0
    terms = 0
    for _x in range(0, max(0, y - 1)):  # x = 0 .. y-2
        total += f(n ** q)
        q *= 1.0 - p.eta / 2.0
        terms += 1
    bound = p.delta / 2.0
    sum_ok = total <= bound
    return ExpansionCheckReport(
        ok=sandwich_ok and sum_ok,
        sandwich_ok=sandwich_ok,
        sum_ok=sum_ok,
        sum_value=total,
        sum_bound=bound,
        term_count=terms,
        witness=witness,
    )


def _sample_grid(n: int) -> list:
    pts = {1.0, 2.0, 3.0, math.e, 4.0, float(n), n / 2.0, math.sqrt(n)}
    # geometric sweep plus corner values near the crossover of the two branches
    x = 1.0
    while x < n:
        pts.add(min(float(n), x))
        x *= 2.9
    for q in (0.1, 0.25, 0.5, 0.75, 0.9, 0.99):
        pts.add(max(1.0, n ** q))
    return sorted(v for v in pts if 1.0 <= v <= n)


# -- dichotomy ----------------------------------------------------------------


@dataclass(frozen=True)
class FindDenseQuery:
    """A vertex set violating the expansion rate, with the rate it violates."""

    gamma: float
    s: frozenset

    def check_against(self, g: Graph) -> bool:
        nb = neighborhood(g, self.s)
        return len(nb) < self.gamma * len(self.s)


BRANCH_DROP = "drop_S"
BRANCH_CONTRACT = "contract_to_ball"


@dataclass(frozen=True)
class DichotomyStep:
    branch: str
    subgraph: InducedSubgraph
    set_size: int
    density_before: Fraction
    density_after: Fraction


def dichotomy_step(g: Graph, q: FindDenseQuery, c: Fraction) -> DichotomyStep:
    """Apply the density dichotomy to a violating set.

    Given S with |N(S)| < gamma |S| and c = d(G): either d(G - S) >= c (drop
    the set) or d(B(S)) >= (1 - gamma) c (contract to the ball around S).
    One of the two always holds; the chosen branch's guarantee is asserted.
    """
    s = set(q.s)
    if not s:
        raise ValueError("empty violating set")
    nb = neighborhood(g, s)
    if len(nb) >= q.gamma * len(s):
        raise ValueError("not a violating set")
    c = Fraction(c)
    rest = set(g.vertices()) - s
    if rest:
        sub_rest = induced_subgraph(g, rest)
        d_rest = Fraction(2 * sub_rest.graph.edge_count, sub_rest.graph.n)
        if d_rest >= c:
            return DichotomyStep(BRANCH_DROP, sub_rest, len(s), c, d_rest)
    sub_ball = induced_subgraph(g, s | set(nb))
    d_ball = Fraction(2 * sub_ball.graph.edge_count, sub_ball.graph.n)
    if d_ball < (1 - Fraction(q.gamma)) * c:
        raise InvariantViolation(
            f"dichotomy guarantee failed: d(ball)={d_ball} < (1-{q.gamma})*{c}"
        )
    return DichotomyStep(BRANCH_CONTRACT, sub_ball, len(s), c, d_ball)


# -- violating-set search -----------------------------------------------------


def find_violating_set(
    h: Graph,
    d: DerivedScales,
    p: ExpansionParams,
    small_set_mode: bool = False,
    budget_ops: Optional[int] = None,
) -> Optional[FindDenseQuery]:
    """Look for a set whose neighborhood is smaller than the required rate.

    Searches for S with |S| <= m^(1-eta) and |N(S)| < f(m)|S|; in small-set
    mode additionally for S with |S| <= m^(1/3) and
    |N(S)| < delta/(20 (log log 4|S|)^2) |S|.  Exhaustive over all subsets for
    m <= 18 (a violating set need not be connected); above that a budgeted
    heuristic sweep: BFS-layer cuts from a deterministic seed schedule plus a
    greedy low-boundary local search.  Returns None when nothing is found, in
    which case the graph is treated as an empirical expander.
    """
    m = h.n
    if m == 0:
        raise ValueError("empty graph")
    if m == 1:
        return None
    cap = size_cap(m, p.eta)
    cap3 = small_size_cap(m) if small_set_mode else 0
    rate = d.f_m

    def violation(size: int, nb_size: int) -> Optional[float]:
        if size <= cap and nb_size < rate * size:
            return rate
        if small_set_mode and size <= cap3 and nb_size < small_set_rate(size, p.delta) * size:
            return small_set_rate(size, p.delta)
        return None

    if m <= _EXHAUSTIVE_LIMIT:
        return _exhaustive_violator(h, cap, violation)
    return _heuristic_violator(h, cap, violation, budget_ops)


def _exhaustive_violator(h: Graph, cap: int, violation) -> Optional[FindDenseQuery]:
    # subset DP over bitmasks: nb[mask] accumulates the union of neighborhoods
    m = h.n
    adj = [0] * m
    for v in range(m):
        for w in h.neighbors(v):
            adj[v] |= 1 << int(w)
    nb = [0] * (1 << m)
    for mask in range(1, 1 << m):
        lsb = mask & -mask
        nb[mask] = nb[mask ^ lsb] | adj[lsb.bit_length() - 1]
        size = mask.bit_count()
        if size > cap:
            continue
        nb_size = (nb[mask] & ~mask).bit_count()
        gamma = violation(size, nb_size)
        if gamma is not None:
            s = frozenset(i for i in range(m) if mask >> i & 1)
            return FindDenseQuery(gamma=gamma, s=s)
    return None


_LOCAL_SEARCH_SEEDS = 8
_LOCAL_SEARCH_SIZE = 96
_LOCAL_SEARCH_OPS = 60_000


def _heuristic_violator(h: Graph, cap: int, violation, budget_ops) -> Optional[FindDenseQuery]:
    m = h.n
    budget = budget_ops if budget_ops is not None else DEFAULT_BUDGET_OPS
    spent = 0
    degs = h.degrees()
    order = sorted(range(m), key=lambda v: (int(degs[v]), v))
    stride = max(1, m // 24)
    seeds = order[:16] + order[-4:] + list(range(0, m, stride))
    seen = set()
    local_tries = 0
    for v in seeds:
        if v in seen:
            continue
        seen.add(v)
        if spent >= budget:
            break
        # BFS-layer cuts: the neighborhood of the radius-r ball is exactly
        # the next BFS layer, so one traversal prices every prefix cut.
        levels = bfs_levels(h, [v])
        spent += int(degs[v]) + 1
        reached = np.flatnonzero(levels >= 0)
        spent += len(reached)
        if len(reached) < m:
            # disconnected: the component (or its complement) is its own cut
            comp_size = len(reached)
            for size in (comp_size, m - comp_size):
                gamma = violation(size, 0)
                if gamma is not None:
                    members = reached if size == comp_size else np.flatnonzero(levels < 0)
                    return FindDenseQuery(gamma=gamma, s=frozenset(map(int, members)))
        lv = levels[reached]
        counts = np.bincount(lv)
        prefix = np.cumsum(counts)
        for r in range(len(counts) - 1):
            gamma = violation(int(prefix[r]), int(counts[r + 1]))
            if gamma is not None:
                members = reached[lv <= r]
                return FindDenseQuery(gamma=gamma, s=frozenset(map(int, members)))
        if local_tries < _LOCAL_SEARCH_SEEDS:
            local_tries += 1
            size_cap_local = min(cap, _LOCAL_SEARCH_SIZE)
            local_budget = min(budget - spent, _LOCAL_SEARCH_OPS)
            q = _local_search(h, v, cap, size_cap_local, violation, local_budget)
            if q is not None:
                return q
            spent += local_budget
    return None


def _local_search(h: Graph, seed: int, cap: int, size_cap_local: int, violation, budget: int) -> Optional[FindDenseQuery]:
    """Greedy boundary-minimizing growth from a seed vertex.

    Grows only up to a small size: roomy sparse cuts are the BFS layer
    sweep's job, this hunts local pockets.
    """
    if budget <= 0:
        return None
    s = {seed}
    boundary = {int(w) for w in h.neighbors(seed)}
    spent = 0
    while len(s) < size_cap_local and boundary and spent < budget:
        best = None
        for u in sorted(boundary):
            gain = sum(1 for w in h.neighbors(u) if int(w) not in s and int(w) not in boundary)
            spent += h.degree(u)
            if best is None or (gain, u) < best:
                best = (gain, u)
            if spent >= budget:
                break
        u = best[1]
        s.add(u)
        boundary.discard(u)
        boundary.update(int(w) for w in h.neighbors(u) if int(w) not in s)
        if len(s) <= cap:
            gamma = violation(len(s), len(boundary))
            if gamma is not None:
                return FindDenseQuery(gamma=gamma, s=frozenset(s))
    return None


# -- extraction ---------------------------------------------------------------


@dataclass
class ExtractionResult:
    """Outcome of the peel/contract loop.

    ``subgraph.graph`` is the extracted graph; ``subgraph.new_to_old`` maps
    its ids into the input graph.  ``mode`` is one of ``plain_expander``,
    ``small_set_expander`` or ``below_threshold``.
    """

    subgraph: InducedSubgraph
    mode: str
    trace: list = field(default_factory=list)
    achieved_density: Fraction = Fraction(0)
    input_density: Fraction = Fraction(0)

    @property
    def graph(self) -> Graph:
        return self.subgraph.graph

    def trace_json(self) -> list:
        return [
            {
                "step": i,
                "action": action,
                "set_size": size,
                "density_before": str(before),
                "density_after": str(after),
            }
            for i, (action, size, before, after) in enumerate(self.trace)
        ]


def extract_expander(
    g: Graph,
    p: ExpansionParams,
    small_set_mode: bool = False,
    stop_floor: int = DEFAULT_STOP_FLOOR,
    budget_ops: Optional[int] = None,
) -> ExtractionResult:
    """Extract a density-comparable subgraph that expands empirically.

    Loop: peel minimum-degree vertices while min degree < d/2 (smallest id
    first); then search for a violating set and apply the dichotomy; stop when
    no violator is found, or when the graph is at most the practical floor
    ``max(t+1, stop_floor)`` (mode ``below_threshold``; the theoretical
    thresholds 2^(16/eta) / 2^(24/eta) are astronomically large, so the floor
    is what actually fires at realistic sizes).

    The output satisfies d(H) >= (1-delta) d(G) in plain mode and
    >= (1-2 delta) d(G) in small-set mode, and min degree >= d(H)/2; both are
    asserted exactly (rational arithmetic) and raise InvariantViolation on
    failure, which would indicate a bug.
    """
    if g.n == 0:
        raise ValueError("empty graph")
    floor_n = max(p.t + 1, stop_floor)
    input_density = Fraction(2 * g.edge_count, g.n)
    trace = []

    alive = np.ones(g.n, dtype=bool)
    deg = g.degrees().astype(np.int64)
    n_cur = g.n
    e_cur = g.edge_count

    heap = [(int(deg[v]), v) for v in range(g.n)]
    heapq.heapify(heap)

    def peel_phase():
        nonlocal n_cur, e_cur
        # min degree < d/2  <=>  2*deg*n < 2*2e  <=>  deg*n < e... careful:
        # d = 2e/n, want deg >= d/2 = e/n, i.e. peel while deg*n < e.
        while n_cur > 1:
            while heap and (not alive[heap[0][1]] or heap[0][0] != deg[heap[0][1]]):
                heapq.heappop(heap)
            if not heap:
                break
            dmin, v = heap[0]
            if dmin * n_cur >= e_cur:
                break
            heapq.heappop(heap)
            before = Fraction(2 * e_cur, n_cur)
            alive[v] = False
            n_cur -= 1
            e_cur -= dmin
            for w in g.neighbors(v):
                w = int(w)
                if alive[w]:
                    deg[w] -= 1
                    heapq.heappush(heap, (int(deg[w]), w))
            trace.append(("min_degree_peel", 1, before, Fraction(2 * e_cur, n_cur)))

    def rebuild():
        members = [int(v) for v in np.flatnonzero(alive)]
        return induced_subgraph(g, members)

    while True:
        peel_phase()
        if n_cur <= floor_n or n_cur < 3:
            mode = MODE_BELOW_THRESHOLD
            break
        cur = rebuild()
        scales = derived_scales(cur.graph.n, p)
        q = find_violating_set(cur.graph, scales, p, small_set_mode, budget_ops)
        if q is None:
            mode = MODE_SMALL_SET if small_set_mode else MODE_PLAIN
            break
        before = Fraction(2 * e_cur, n_cur)
        step = dichotomy_step(cur.graph, q, before)
        keep_local = set(step.subgraph.new_to_old)
        keep_global = {cur.new_to_old[v] for v in keep_local}
        for v in np.flatnonzero(alive):
            v = int(v)
            if v not in keep_global:
                alive[v] = False
        # recompute degrees/counters on the survivor set
        deg[:] = 0
        e_cur = 0
        for v in sorted(keep_global):
            dv = sum(1 for w in g.neighbors(v) if alive[int(w)])
            deg[v] = dv
            e_cur += dv
        e_cur //= 2
        n_cur = len(keep_global)
        heap = [(int(deg[v]), v) for v in sorted(keep_global)]
        heapq.heapify(heap)
        action = "cut_drop" if step.branch == BRANCH_DROP else "cut_contract"
        trace.append((action, step.set_size, before, Fraction(2 * e_cur, n_cur)))

    sub = rebuild()
    achieved = Fraction(2 * sub.graph.edge_count, sub.graph.n)
    result = ExtractionResult(
        subgraph=sub,
        mode=mode,
        trace=trace,
        achieved_density=achieved,
        input_density=input_density,
    )
    guarantee = (1 - (2 if small_set_mode else 1) * Fraction(p.delta)) * input_density
    if achieved < guarantee:
        raise InvariantViolation(
            f"extraction lost too much density: {achieved} < {guarantee}"
        )
    if sub.graph.n > 1 and 2 * sub.graph.min_degree() < achieved:
        raise InvariantViolation("extraction stopped with min degree below half average")
    return result


# -- guaranteed ball growth ----------------------------------------------------


def grow_ball_guaranteed(
    h: Graph,
    s,
    w,
    d: DerivedScales,
    p: ExpansionParams,
) -> tuple:
    """Grow the ball around ``s`` in ``h - w`` until it has m^(1-eta) vertices.

    Uses the radius budget k = ceil((4/lambda) log m) with lambda = p.lam or
    f(m).  Returns ``(ball, steps)``.  When |w| > lambda |s| / 2 the growth
    guarantee lapses; that is logged as a warning, not raised.
    """
    s = {int(v) for v in s}
    w = {int(v) for v in w}
    if not s:
        raise ValueError("empty seed set")
    if s & w:
        raise ValueError("seed set and forbidden set overlap")
    lam = p.lam if p.lam is not None else d.f_m
    if len(w) > lam * len(s) / 2.0:
        log.warning(
            "forbidden set too large for the growth guarantee: |W|=%d > lam|S|/2=%.3f",
            len(w), lam * len(s) / 2.0,
        )
    k = math.ceil(4.0 * math.log(d.m) / lam)
    target = size_cap(d.m, p.eta)
    levels = bfs_levels(h, s, avoid=w, radius=k, stop_size=target)
    reached = np.flatnonzero(levels >= 0)
    steps = int(levels[reached].max()) if len(reached) else 0
    ball_set = frozenset(int(v) for v in reached)
    if len(ball_set) < target:
        log.info(
            "ball growth fell short: |B^%d| = %d < m^(1-eta) = %d", steps, len(ball_set), target
        )
    return ball_set, steps
