"""Mechanical checks for the standalone combinatorial lemmas.

Four independent ingredients are verified numerically: the branch-grouping
lower bound g and its induction step, the cutoff N at which avoid-one-edge
walk counts drop strictly below the tree bound (which certifies a strict gap
below degree-1), edge-disjoint path systems to the boundary of finite balls
via max-flow, and the neighbor-decomposition inequalities tying counts at
adjacent roots together.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .counting import SawCountSeries, count_saws, count_saws_avoiding
from .estimate import GrowthEstimate, nth_root
from .graphs import BallGraph, GraphError, GraphRule, VertexId, ball


# ---------------------------------------------------------------------------
# branch-grouping bound g
# ---------------------------------------------------------------------------


def branch_group_bound(delta: int, branches: int) -> int:
    """Minimal count of ensuing walks from ``branches`` branch edges when
    groups are packed greedily: with branches = a*(delta-2) + b and
    0 <= b < delta-2, the bound is (b+1) * (delta-1)**a."""
    if delta < 3:
        raise GraphError("branch bound needs degree >= 3")
    if branches < 0:
        raise GraphError("branch count must be >= 0")
    a, b = divmod(branches, delta - 2)
    return (b + 1) * (delta - 1) ** a


@dataclass
class InductionReport:
    delta_max: int
    b_max: int
    cases_checked: int = 0
    counterexamples: list[tuple[int, int, int]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.counterexamples and self.cases_checked > 0


def verify_branch_induction(delta_max: int, b_max: int) -> InductionReport:
    """Exhaustively confirm the induction step behind the branch bound:
    splitting off a first group of size g leaves (g+1) * bound(B-g) >= bound(B),
    with the two case expressions matching the closed form exactly."""
    if delta_max < 3 or b_max < 1:
        raise GraphError("need delta_max >= 3 and b_max >= 1")
    report = InductionReport(delta_max, b_max)
    for delta in range(3, delta_max + 1):
        for total in range(1, b_max + 1):
            a, b = divmod(total, delta - 2)
            for first in range(1, min(total, delta - 2) + 1):
                report.cases_checked += 1
                lhs = (first + 1) * branch_group_bound(delta, total - first)
                if first <= b:
                    expr = (first + 1) * (b - first + 1) * (delta - 1) ** a
                else:
                    expr = ((first + 1) * (delta - 2 + b - first + 1)
                            * (delta - 1) ** (a - 1))
                if lhs != expr or lhs < branch_group_bound(delta, total):
                    report.counterexamples.append((delta, total, first))
    return report


# ---------------------------------------------------------------------------
# strictness cutoff and the strict upper bound it certifies
# ---------------------------------------------------------------------------


@dataclass
class CutoffResult:
    family: str
    degree: int
    cutoff: int | None           # minimal N with every pair strictly below
    searched_to: int
    pair_counts: dict[str, int] = field(default_factory=dict)
    # avoid-one-edge counts at the cutoff, keyed by "root|edge"

    @property
    def found(self) -> bool:
        return self.cutoff is not None


def find_strictness_cutoff(rule: GraphRule, upper_bound: int, *,
                           budget: int | None = None) -> CutoffResult:
    """Smallest N >= 3 with avoid-one-edge counts <= (degree-1)**N - 1 for
    every orbit representative and every incident edge.

    Such an N exists whenever the family contains a cycle; on trees the
    counts meet the tree bound exactly and the search reports not-found.
    """
    if rule.degree < 3:
        raise GraphError("cutoff search needs degree >= 3")
    if upper_bound < 3:
        raise GraphError("upper_bound must be >= 3")
    kwargs = {} if budget is None else {"budget": budget}
    result = CutoffResult(rule.spec, rule.degree, None, upper_bound)
    for n in range(3, upper_bound + 1):
        bound = (rule.degree - 1) ** n - 1
        counts = {}
        ok = True
        for rep in rule.orbit_reps:
            for e, _ in rule.neighbors(rep):
                series = count_saws_avoiding(rule, rep, e, n, **kwargs)
                if series.truncated:
                    raise GraphError("cutoff search hit the node budget")
                counts[f"{rule.format_vertex(rep)}|{rule.format_edge(e)}"] = \
                    series.sigma(n)
                if series.sigma(n) > bound:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            result.cutoff = n
            result.pair_counts = counts
            return result
    return result


@dataclass
class StrictnessReport:
    family: str
    degree: int
    cutoff: int | None
    bound: float | None          # ((degree-1)**N - 1)**(1/N)
    envelope_ok: bool = False
    mu_hat_ok: bool = False
    pair_counts: dict[str, int] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.cutoff is not None and self.envelope_ok and self.mu_hat_ok


def strict_upper_bound_report(rule: GraphRule, estimate: GrowthEstimate,
                              cutoff: CutoffResult, *,
                              tolerance: float = 1e-9) -> StrictnessReport:
    """Turn a cutoff into the rigorous strict bound below degree-1 and check
    the computed envelope and point estimate against it.  The integer
    comparison behind the cutoff is exact; only this report's rendering of
    the N-th root is floating point."""
    if not cutoff.found:
        return StrictnessReport(rule.spec, rule.degree, None, None)
    n = cutoff.cutoff
    bound = nth_root((rule.degree - 1) ** n - 1, n)
    return StrictnessReport(
        rule.spec, rule.degree, n, bound,
        envelope_ok=min(estimate.fekete_upper) <= bound + tolerance,
        mu_hat_ok=estimate.mu_hat <= bound + tolerance,
        pair_counts=dict(cutoff.pair_counts))


# ---------------------------------------------------------------------------
# edge-disjoint paths to the ball boundary (max-flow certificate)
# ---------------------------------------------------------------------------


@dataclass
class MengerResult:
    family: str
    root_label: str
    radius: int
    flow_value: int
    paths: tuple[tuple[str, ...], ...]   # vertex labels, ending at "boundary"
    degree: int

    @property
    def ok(self) -> bool:
        return self.flow_value == self.degree


def edge_disjoint_paths(rule: GraphRule, v: VertexId, radius: int) -> MengerResult:
    """Max-flow from ``v`` to the identified boundary of its radius ball,
    decomposed into edge-disjoint paths that are self-avoiding on interior
    vertices.  On vertex-transitive simple families the value equals the
    degree: the edge connectivity matches the degree there, so a full fan of
    disjoint walks reaches every boundary."""
    b = ball(rule, v, radius)
    source = 0
    sink = b.boundary_index
    nverts = sink + 1
    # residual capacities per ordered pair; undirected bundles open both ways
    cap: list[dict[int, int]] = [dict() for _ in range(nverts)]
    for (i, j), m in sorted(b.bundles.items()):
        cap[i][j] = cap[i].get(j, 0) + m
        cap[j][i] = cap[j].get(i, 0) + m

    flow_value = 0
    while True:
        parent = {source: None}
        queue = [source]
        head = 0
        while head < len(queue) and sink not in parent:
            u = queue[head]
            head += 1
            for t, c in cap[u].items():
                if c > 0 and t not in parent:
                    parent[t] = u
                    queue.append(t)
        if sink not in parent:
            break
        t = sink
        while parent[t] is not None:
            u = parent[t]
            cap[u][t] -= 1
            cap[t][u] = cap[t].get(u, 0) + 1
            t = u
        flow_value += 1

    # net usage per ordered pair, then peel paths source -> sink
    net: dict[tuple[int, int], int] = {}
    for (i, j), m in sorted(b.bundles.items()):
        used_ij = m - cap[i].get(j, m)
        if used_ij > 0:
            net[(i, j)] = used_ij
        elif used_ij < 0:
            net[(j, i)] = -used_ij
    paths = []
    for _ in range(flow_value):
        walk = [source]
        while walk[-1] != sink:
            u = walk[-1]
            nxt = min(t for (s, t) in net if s == u and net[(s, t)] > 0)
            net[(u, nxt)] -= 1
            if net[(u, nxt)] == 0:
                del net[(u, nxt)]
            if nxt in walk:
                # excise the cycle; its edges stay consumed
                walk = walk[: walk.index(nxt) + 1]
            else:
                walk.append(nxt)
        paths.append(tuple(b.label(i) for i in walk))
    return MengerResult(rule.spec, rule.format_vertex(v), radius,
                        flow_value, tuple(paths), rule.degree)


def validate_disjoint_paths(b: BallGraph, result: MengerResult) -> None:
    """Re-check a path system against the ball: real edges, multiplicities
    respected, interior self-avoidance, all paths source-to-boundary."""
    labels = {b.label(i): i for i in range(len(b.vertices) + 1)}
    usage: dict[tuple[int, int], int] = {}
    for path in result.paths:
        idx = [labels[p] for p in path]
        if idx[0] != 0 or idx[-1] != b.boundary_index:
            raise GraphError("path must run from the center to the boundary")
        if len(set(idx)) != len(idx):
            raise GraphError("path revisits a vertex")
        for a, c in zip(idx, idx[1:]):
            key = (a, c) if a < c else (c, a)
            usage[key] = usage.get(key, 0) + 1
            if usage[key] > b.bundles.get(key, 0):
                raise GraphError(f"edge multiplicity exceeded on {key}")
    if len(result.paths) != result.flow_value:
        raise GraphError("flow value does not match the number of paths")


# ---------------------------------------------------------------------------
# neighbor-decomposition inequalities between adjacent roots
# ---------------------------------------------------------------------------


@dataclass
class InequalityReport:
    family: str
    n_max: int
    pairs_checked: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures and self.pairs_checked > 0


def neighbor_decomposition_report(rule: GraphRule, n_max: int, *,
                                  budget: int | None = None) -> InequalityReport:
    """For adjacent roots u ~ v, splitting an n-step walk from u at its first
    visit to v yields
    sigma_n(u) <= sigma_{n+1}(v) + sum_m sigma_m(v) sigma_{n-m}(v) + sigma_n(v);
    checked for every orbit representative and each of its neighbors."""
    kwargs = {} if budget is None else {"budget": budget}
    report = InequalityReport(rule.spec, n_max)
    series: dict[VertexId, SawCountSeries] = {}

    def counts(x: VertexId) -> SawCountSeries:
        if x not in series:
            series[x] = count_saws(rule, x, n_max + 1, **kwargs)
        return series[x]

    for rep in rule.orbit_reps:
        su = counts(rep)
        targets = sorted({t for t, _ in rule.neighbor_bundles(rep)})
        for t in targets:
            sv = counts(t)
            report.pairs_checked += 1
            for n in range(1, n_max + 1):
                rhs = sv.sigma(n + 1) + sv.sigma(n) + sum(
                    sv.sigma(m) * sv.sigma(n - m) for m in range(1, n))
                if su.sigma(n) > rhs:
                    report.failures.append(
                        f"u={rule.format_vertex(rep)} v={rule.format_vertex(t)} "
                        f"n={n}: {su.sigma(n)} > {rhs}")
    return report


def submultiplicativity_report(rule: GraphRule, total: int, *,
                               budget: int | None = None) -> InequalityReport:
    """sigma_{m+n}(v) <= sigma_m(v) * sup-over-reps sigma_n, for every orbit
    representative v and every split m + n <= total."""
    kwargs = {} if budget is None else {"budget": budget}
    report = InequalityReport(rule.spec, total)
    all_series = [count_saws(rule, rep, total, **kwargs)
                  for rep in rule.orbit_reps]
    sup = [max(s.sigma(k) for s in all_series) for k in range(total + 1)]
    for rep, s in zip(rule.orbit_reps, all_series):
        report.pairs_checked += 1
        for m in range(1, total):
            for n in range(1, total - m + 1):
                if s.sigma(m + n) > s.sigma(m) * sup[n]:
                    report.failures.append(
                        f"v={rule.format_vertex(rep)} m={m} n={n}")
    return report
