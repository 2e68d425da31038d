import pytest

import sawlab._fastcount as fastcount
from sawlab.counting import (count_extendable, count_saws, count_saws_avoiding,
                             count_saws_midedge)
from sawlab.graphs import GraphError, parse_family

from oracles import (brute_extendable_series, brute_midedge_series,
                     brute_saw_series)

ORACLE_CASES = [("ladder", 8), ("hex", 8), ("loop:2", 8), ("loop:3", 8),
                ("loop:4", 7), ("tree:3", 7), ("decor3", 8), ("decor4", 6),
                ("interp:3:1", 8), ("interp:4:2", 8)]


@pytest.mark.parametrize("spec,n", ORACLE_CASES)
def test_counts_match_bruteforce(spec, n):
    rule = parse_family(spec)
    series = count_saws(rule, None, n)
    assert list(series.counts) == brute_saw_series(rule, rule.root, n)


@pytest.mark.parametrize("spec,n", [("hex", 9), ("loop:4", 10), ("decor3", 10)])
def test_counts_match_bruteforce_from_second_rep_or_neighbor(spec, n):
    rule = parse_family(spec)
    root = rule.orbit_reps[-1] if len(rule.orbit_reps) > 1 else \
        rule.neighbor_bundles(rule.root)[0][0]
    series = count_saws(rule, root, n)
    assert list(series.counts) == brute_saw_series(rule, root, n)


def test_frozen_spec_examples():
    assert count_saws(parse_family("tree:3"), None, 3).counts == (1, 3, 6, 12)
    assert count_saws(parse_family("ladder"), None, 4).counts == (1, 3, 6, 12, 20)
    assert count_saws(parse_family("loop:4"), None, 3).counts == (1, 4, 6, 12)


def test_sigma_zero_and_one():
    for spec in ("ladder", "hex", "loop:5", "tree:4", "decor4"):
        rule = parse_family(spec)
        series = count_saws(rule, None, 1)
        assert series.counts[0] == 1
        assert series.counts[1] == rule.degree


@pytest.mark.parametrize("spec,n", [("ladder", 10), ("loop:6", 12),
                                    ("hex", 10), ("interp:4:1", 10)])
def test_fast_and_slow_paths_agree(spec, n, monkeypatch):
    rule = parse_family(spec)
    fast = count_saws(rule, None, n)
    monkeypatch.setattr(fastcount, "HAVE_NUMBA", False)
    slow = count_saws(rule, None, n)
    assert fast.counts == slow.counts
    assert fast.nodes_used == slow.nodes_used


def test_thread_count_does_not_change_results():
    rule = parse_family("hex")
    base = count_saws(rule, None, 12)
    for threads in (2, 4, 8):
        again = count_saws(rule, None, 12, threads=threads)
        assert again.counts == base.counts
        assert again.nodes_used == base.nodes_used


def test_repeated_runs_identical():
    rule = parse_family("interp:3:2")
    a = count_saws(rule, None, 10)
    b = count_saws(rule, None, 10)
    assert a == b


def test_trivial_upper_bound_all_families():
    for spec in ("ladder", "hex", "loop:3", "loop:5", "tree:3", "decor3",
                 "decor4", "interp:3:1"):
        rule = parse_family(spec)
        d = rule.degree
        series = count_saws(rule, None, 10)
        for n in range(1, 11):
            assert series.counts[n] <= d * (d - 1) ** (n - 1)


def test_counts_beyond_int64_stay_exact():
    # bundle weights of 39 parallel edges overflow 64-bit arithmetic fast;
    # the overflow proof must route this to exact big-integer counting
    rule = parse_family("loop:40")
    series = count_saws(rule, None, 30)
    assert series.counts[30] == 2 * 39**15
    assert series.counts[29] == 39**15 + 39**14
    assert 2 * 39**15 > 2**63


def test_budget_truncation_is_marked_and_deterministic():
    rule = parse_family("hex")
    full = count_saws(rule, None, 12)
    cut = count_saws(rule, None, 12, budget=500)
    assert cut.truncated
    assert not full.truncated
    assert all(a <= b for a, b in zip(cut.counts, full.counts))
    for threads in (2, 8):
        again = count_saws(rule, None, 12, budget=500, threads=threads)
        assert again.counts == cut.counts
        assert again.nodes_used == cut.nodes_used


# -- avoid-one-edge counts ---------------------------------------------------


def test_avoiding_tree_example():
    rule = parse_family("tree:3")
    e = rule.edge_between((), (0,))
    series = count_saws_avoiding(rule, (), e, 2)
    assert series.counts == (1, 2, 4)


def test_avoiding_line_example():
    rule = parse_family("loop:2")
    e = rule.edge_between((0,), (1,))
    series = count_saws_avoiding(rule, (0,), e, 5)
    assert series.counts == (1, 1, 1, 1, 1, 1)


def test_avoiding_requires_incidence():
    rule = parse_family("ladder")
    e = rule.edge_between((3, 0), (4, 0))
    with pytest.raises(GraphError):
        count_saws_avoiding(rule, (0, 0), e, 4)


@pytest.mark.parametrize("spec", ["hex", "loop:3", "ladder", "decor3"])
def test_avoiding_matches_bruteforce(spec):
    rule = parse_family(spec)
    root = rule.root
    for e, _ in rule.neighbors(root):
        series = count_saws_avoiding(rule, root, e, 6)
        assert list(series.counts) == brute_saw_series(rule, root, 6,
                                                       avoid_edge=e)


def test_avoiding_one_parallel_copy_keeps_partners():
    rule = parse_family("loop:4")
    e = rule.edge_between((0,), (1,), 1)
    series = count_saws_avoiding(rule, (0,), e, 3)
    # forward bundle shrinks from 3 to 2; leftward ray unaffected
    assert series.counts[1] == 3
    assert list(series.counts) == brute_saw_series(rule, (0,), 3, avoid_edge=e)


# -- mid-edge rooted counts --------------------------------------------------


def test_midedge_tree_first_step():
    rule = parse_family("tree:3")
    e = rule.edge_between((), (0,))
    series = count_saws_midedge(rule, e, 1)
    assert series.counts == (1, 2)


@pytest.mark.parametrize("spec,edge_args,n", [
    ("ladder", (((0, 0), (0, 1)), 0), 6),    # a rung
    ("loop:3", (((0,), (1,)), 1), 6),        # one copy of a parallel pair
    ("hex", (((0, 0, 0), (0, 0, 1)), 0), 6),
    ("tree:3", (((), (1,)), 0), 5),
])
def test_midedge_matches_bruteforce(spec, edge_args, n):
    rule = parse_family(spec)
    (a, b), k = edge_args
    e = rule.edge_between(a, b, k)
    series = count_saws_midedge(rule, e, n)
    assert list(series.counts) == brute_midedge_series(rule, e, n)


def test_midedge_parallel_partner_usable():
    # from the midpoint of one copy, walks may still cross the partner copy
    rule = parse_family("loop:3")
    e = rule.edge_between((0,), (1,), 0)
    series = count_saws_midedge(rule, e, 2)
    assert series.counts[2] == 4


# -- lookahead-extendable counts ---------------------------------------------


def test_extendable_tree_equals_plain_counts():
    rule = parse_family("tree:3")
    plain = count_saws(rule, None, 6)
    for depth in (1, 4, 9):
        ext = count_extendable(rule, (), 6, depth)
        assert ext.counts == plain.counts


def test_extendable_loop_graph_equals_plain_counts():
    rule = parse_family("loop:4")
    plain = count_saws(rule, None, 4)
    ext = count_extendable(rule, (0,), 4, 8)
    assert ext.counts == plain.counts


def test_extendable_decorated_line_drops_trapped_walks():
    rule = parse_family("decor3")
    plain = count_saws(rule, None, 6)
    ext = count_extendable(rule, (0, 0), 6, 10)
    assert all(a <= b for a, b in zip(ext.counts, plain.counts))
    assert ext.counts[6] < plain.counts[6]
    assert list(ext.counts) == brute_extendable_series(rule, (0, 0), 6, 10)


def test_extendable_never_increases_with_depth():
    rule = parse_family("decor4")
    prev = None
    for depth in (1, 2, 4, 8):
        ext = count_extendable(rule, (0, 0), 5, depth)
        if prev is not None:
            assert all(a <= b for a, b in zip(ext.counts, prev))
        prev = ext.counts


@pytest.mark.parametrize("spec,n,depth", [("decor3", 5, 6), ("ladder", 6, 4),
                                          ("loop:3", 6, 5)])
def test_extendable_matches_bruteforce(spec, n, depth):
    rule = parse_family(spec)
    ext = count_extendable(rule, rule.root, n, depth)
    assert list(ext.counts) == brute_extendable_series(rule, rule.root, n, depth)
