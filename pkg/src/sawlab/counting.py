"""Exact self-avoiding-walk counting by depth-first backtracking.

Counts are exact integers throughout.  The backtracking runs over vertex
sequences with parallel-edge bundles collapsed to multiplicative weights, so
a walk step along a bundle of m parallel edges contributes a factor m rather
than m separate branches.  Heavy runs on small windows are dispatched to a
compiled kernel after an overflow proof; everything else runs on Python
integers with no range limit.  Both paths traverse in the same order, so a
given request is bit-reproducible regardless of dispatch, worker count, or
scheduling.

Budgets are counted in attempted walk extensions (DFS tree nodes).  A run
that exhausts its budget returns the partial series with an explicit
truncation marker instead of running away.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _fastcount
from .graphs import EdgeRef, GraphError, GraphRule, VertexId

DEFAULT_BUDGET = 8_000_000_000
SPLIT_DEPTH = 5
WINDOW_LIMIT = 400_000
_INT64_SAFE = float(2**61)


@dataclass(frozen=True)
class SawCountSeries:
    """Exact walk counts sigma_0 .. sigma_n from one root."""

    family: str
    root_label: str
    counts: tuple[int, ...]
    kind: str = "vertex"  # vertex | midedge | avoiding | extendable
    avoided_edge: str | None = None
    lookahead: int | None = None
    truncated: bool = False
    nodes_used: int = 0

    @property
    def n_max(self) -> int:
        return len(self.counts) - 1

    def sigma(self, n: int) -> int:
        return self.counts[n]


# ---------------------------------------------------------------------------
# window materialization (bounded BFS -> CSR) and the int64 safety proof
# ---------------------------------------------------------------------------


class _Window:
    def __init__(self, verts, index, indptr, nbr, mult):
        self.verts = verts
        self.index = index
        self.indptr = indptr
        self.nbr = nbr
        self.mult = mult


def _effective_bundles(rule, v, avoid_pair):
    out = []
    for target, m in rule.neighbor_bundles(v):
        if avoid_pair is not None and (v, target) in avoid_pair:
            m -= 1
        if m > 0:
            out.append((target, m))
    return out


def _build_window(rule, root, n_max, avoid_pair, limit=WINDOW_LIMIT):
    """Materialize the radius-n_max ball as CSR arrays, or None if too big."""
    index = {root: 0}
    verts = [root]
    dist = [0]
    rows = []
    head = 0
    while head < len(verts):
        v = verts[head]
        d = dist[head]
        row = []
        # rows of depth-n_max vertices are never expanded by the DFS
        if d < n_max:
            for target, m in _effective_bundles(rule, v, avoid_pair):
                j = index.get(target)
                if j is None:
                    j = len(verts)
                    if j > limit:
                        return None
                    index[target] = j
                    verts.append(target)
                    dist.append(d + 1)
                row.append((j, m))
        rows.append(row)
        head += 1
    indptr = np.zeros(len(verts) + 1, np.int64)
    for i, row in enumerate(rows):
        indptr[i + 1] = indptr[i] + len(row)
    nbr = np.empty(indptr[-1], np.int64)
    mult = np.empty(indptr[-1], np.int64)
    pos = 0
    for row in rows:
        for j, m in row:
            nbr[pos] = j
            mult[pos] = m
            pos += 1
    return _Window(verts, index, indptr, nbr, mult)


def _int64_safe(win: _Window, n_max: int) -> bool:
    """Prove the kernel cannot overflow int64 on this window.

    Every self-avoiding walk is a non-backtracking walk, so the weighted
    non-backtracking count dominates every count and every partial sum the
    kernel accumulates.  The count satisfies a linear recursion over directed
    window entries: S'[e] = mult[e] * (inflow at src e) - S[reverse of e],
    evaluated here in float with a safety margin.
    """
    n = len(win.verts)
    edges = len(win.nbr)
    if n == 0 or edges == 0 or n_max == 0:
        return True
    src = np.repeat(np.arange(n), np.diff(win.indptr))
    # pair each directed entry with its reverse (absent near the window rim)
    key = src * (n + 1) + win.nbr
    order = np.argsort(key, kind="stable")
    skey = key[order]
    revkey = win.nbr * (n + 1) + src
    pos = np.clip(np.searchsorted(skey, revkey), 0, edges - 1)
    rev = np.where(skey[pos] == revkey, order[pos], -1)

    fmult = win.mult.astype(np.float64)
    state = np.where(src == 0, fmult, 0.0)
    total = 1.0 + state.sum()
    for _ in range(n_max - 1):
        if not math.isfinite(total) or total * 1.01 >= _INT64_SAFE:
            return False
        inflow = np.bincount(win.nbr, weights=state, minlength=n)
        back = np.where(rev >= 0, state[np.maximum(rev, 0)], 0.0)
        state = fmult * inflow[src] - back
        total += state.sum()
    return math.isfinite(total) and total * 1.01 < _INT64_SAFE


# ---------------------------------------------------------------------------
# the two traversal backends (identical order and budget accounting)
# ---------------------------------------------------------------------------


class _Meter:
    __slots__ = ("nodes", "budget", "truncated")

    def __init__(self, budget):
        self.nodes = 0
        self.budget = budget
        self.truncated = False

    def tick(self) -> bool:
        self.nodes += 1
        if self.nodes > self.budget:
            self.truncated = True
            return False
        return True


def _count_py(rule, path, weight0, n_max, counts, meter, avoid_pair):
    """Pure-Python DFS extending ``path``; mirrors the compiled kernel."""
    visited = set(path)
    stack_done = False

    def rec(v, level, weight):
        nonlocal stack_done
        for target, m in _effective_bundles(rule, v, avoid_pair):
            if target in visited:
                continue
            if not meter.tick():
                stack_done = True
                return
            w = weight * m
            counts[level + 1] += w
            if level + 1 < n_max:
                visited.add(target)
                rec(target, level + 1, w)
                visited.discard(target)
                if stack_done:
                    return

    rec(path[-1], len(path) - 1, weight0)


def _count_fast(win, path_idx, weight0, n_max, counts, meter):
    kcounts = np.zeros(n_max + 1, np.int64)
    visited = np.zeros(len(win.verts), np.uint8)
    for i in path_idx:
        visited[i] = 1
    nodes, truncated = _fastcount.count_extensions(
        win.indptr, win.nbr, win.mult, path_idx[-1], len(path_idx) - 1,
        weight0, n_max, meter.budget - meter.nodes, kcounts, visited)
    meter.nodes += nodes
    meter.truncated = meter.truncated or truncated
    for k in range(n_max + 1):
        if kcounts[k]:
            counts[k] += int(kcounts[k])


def _prefix_phase(rule, root, split, n_max, counts, meter, avoid_pair):
    """Count levels 1..split and collect the split-depth prefixes as tasks."""
    tasks = []
    visited = {root}
    path = [root]

    def rec(v, level, weight):
        for target, m in _effective_bundles(rule, v, avoid_pair):
            if target in visited:
                continue
            if not meter.tick():
                return
            w = weight * m
            counts[level + 1] += w
            if level + 1 == n_max:
                continue
            path.append(target)
            if level + 1 == split:
                tasks.append((tuple(path), w))
            else:
                visited.add(target)
                rec(target, level + 1, w)
                visited.discard(target)
            path.pop()
            if meter.truncated:
                return

    rec(root, 0, 1)
    return tasks


def _count_master(rule, root, n_max, budget, threads, avoid_pair):
    """Shared driver: prefix split, backend dispatch, ordered reduction."""
    counts = [0] * (n_max + 1)
    counts[0] = 1
    meter = _Meter(budget)
    if n_max == 0:
        return counts, meter
    split = min(SPLIT_DEPTH, n_max)
    tasks = _prefix_phase(rule, root, split, n_max, counts, meter, avoid_pair)
    if meter.truncated or not tasks:
        return counts, meter

    win = None
    if _fastcount.HAVE_NUMBA:
        win = _build_window(rule, root, n_max, avoid_pair)
        if win is not None and not _int64_safe(win, n_max):
            win = None

    remaining = budget - meter.nodes
    ntasks = len(tasks)
    share, extra = divmod(max(remaining, 0), ntasks)

    def run(i):
        path, weight = tasks[i]
        sub = _Meter(share + (1 if i < extra else 0))
        subcounts = [0] * (n_max + 1)
        if win is not None:
            path_idx = np.array([win.index[p] for p in path], np.int64)
            _count_fast(win, path_idx, weight, n_max, subcounts, sub)
        else:
            _count_py(rule, path, weight, n_max, subcounts, sub, avoid_pair)
        return subcounts, sub

    if threads > 1 and ntasks > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, range(ntasks)))
    else:
        results = [run(i) for i in range(ntasks)]

    for subcounts, sub in results:
        for k in range(split + 1, n_max + 1):
            counts[k] += subcounts[k]
        meter.nodes += sub.nodes
        meter.truncated = meter.truncated or sub.truncated
    return counts, meter


def _avoid_set(e: EdgeRef):
    return {(e.u, e.v), (e.v, e.u)}


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------


def count_saws(rule: GraphRule, v: VertexId | None = None, n_max: int = 10, *,
               budget: int = DEFAULT_BUDGET, threads: int = 1) -> SawCountSeries:
    """sigma_k(v) for k = 0..n_max: exact k-step SAW counts from ``v``."""
    if n_max < 0:
        raise GraphError("n_max must be >= 0")
    v = rule.root if v is None else v
    rule.check_vertex(v)
    counts, meter = _count_master(rule, v, n_max, budget, threads, None)
    return SawCountSeries(rule.spec, rule.format_vertex(v), tuple(counts),
                          truncated=meter.truncated, nodes_used=meter.nodes)


def count_saws_avoiding(rule: GraphRule, u: VertexId, e: EdgeRef, n_max: int, *,
                        budget: int = DEFAULT_BUDGET,
                        threads: int = 1) -> SawCountSeries:
    """sigma_k(u, e): k-step SAWs from ``u`` that never traverse ``e``."""
    if not e.touches(u):
        raise GraphError(f"edge {e!r} is not incident to {u!r}")
    rule.edge_between(e.u, e.v, e.k)  # validates existence and parallel index
    counts, meter = _count_master(rule, u, n_max, budget, threads, _avoid_set(e))
    return SawCountSeries(rule.spec, rule.format_vertex(u), tuple(counts),
                          kind="avoiding", avoided_edge=rule.format_edge(e),
                          truncated=meter.truncated, nodes_used=meter.nodes)


def count_saws_midedge(rule: GraphRule, e: EdgeRef, n_max: int, *,
                       budget: int = DEFAULT_BUDGET,
                       threads: int = 1) -> SawCountSeries:
    """Mid-edge rooted counts: walks from the midpoint of ``e`` by vertices
    visited, never revisiting a vertex or the starting mid-edge.

    Both directions out of the midpoint are counted; parallel partners of
    ``e`` stay traversable because their midpoints are distinct.
    """
    rule.edge_between(e.u, e.v, e.k)
    if n_max < 0:
        raise GraphError("n_max must be >= 0")
    counts = [0] * (n_max + 1)
    counts[0] = 1
    nodes = 0
    truncated = False
    if n_max >= 1:
        avoid = _avoid_set(e)
        left = budget
        for side in (e.u, e.v):
            side_counts, meter = _count_master(rule, side, n_max - 1, left,
                                               threads, avoid)
            for k in range(n_max):
                counts[k + 1] += side_counts[k]
            nodes += meter.nodes
            truncated = truncated or meter.truncated
            left = max(left - meter.nodes, 0)
    return SawCountSeries(rule.spec, rule.format_edge(e), tuple(counts),
                          kind="midedge", truncated=truncated, nodes_used=nodes)


def can_extend(rule: GraphRule, blocked: set, w: VertexId, depth: int,
               meter: _Meter | None = None) -> bool | None:
    """Is there a self-avoiding continuation of ``depth`` steps from ``w``
    that avoids every vertex in ``blocked``?  None means budget ran out."""
    if depth == 0:
        return True
    for target, _ in rule.neighbor_bundles(w):
        if target in blocked:
            continue
        if meter is not None and not meter.tick():
            return None
        blocked.add(target)
        sub = can_extend(rule, blocked, target, depth - 1, meter)
        blocked.discard(target)
        if sub or sub is None:
            return sub
    return False


def count_extendable(rule: GraphRule, v: VertexId, n_max: int, lookahead: int, *,
                     budget: int = DEFAULT_BUDGET) -> SawCountSeries:
    """Counts of k-step SAWs admitting a further ``lookahead``-step
    self-avoiding continuation (an upper-bound surrogate for extendability
    to an infinite walk; exact once the lookahead clears every finite trap).

    A prefix that fails the lookahead cannot have extendable descendants, so
    the whole subtree is pruned.
    """
    if lookahead < 1:
        raise GraphError("lookahead depth must be >= 1")
    rule.check_vertex(v)
    meter = _Meter(budget)
    counts = [0] * (n_max + 1)
    visited = {v}
    root_ok = can_extend(rule, visited, v, lookahead, meter)
    counts[0] = 1 if root_ok else 0

    def rec(w, level, weight):
        for target, m in rule.neighbor_bundles(w):
            if target in visited:
                continue
            if not meter.tick():
                return
            visited.add(target)
            ok = can_extend(rule, visited, target, lookahead, meter)
            if ok:
                counts[level + 1] += weight * m
                if level + 1 < n_max:
                    rec(target, level + 1, weight * m)
            visited.discard(target)
            if meter.truncated:
                return

    if root_ok and n_max >= 1:
        rec(v, 0, 1)
    return SawCountSeries(rule.spec, rule.format_vertex(v), tuple(counts),
                          kind="extendable", lookahead=lookahead,
                          truncated=meter.truncated, nodes_used=meter.nodes)
