import math

import pytest

from sawlab.counting import count_saws
from sawlab.estimate import (check_bounds, convergence_check, estimate_mu,
                             exact_mu, fekete_envelope, growth_estimate,
                             nth_root, sup_counts)
from sawlab.graphs import GraphError, parse_family

KNOWN_MU = {
    "ladder": (math.sqrt(5) + 1) / 2,
    "hex": math.sqrt(2 + math.sqrt(2)),
    "loop:3": math.sqrt(2),
    "loop:4": math.sqrt(3),
    "tree:3": 2.0,
    "tree:4": 3.0,
}


def rep_series(spec, n):
    rule = parse_family(spec)
    return rule, [count_saws(rule, rep, n) for rep in rule.orbit_reps]


def test_exact_mu_table():
    for spec, mu in KNOWN_MU.items():
        assert exact_mu(parse_family(spec)) == pytest.approx(mu, abs=1e-15)
    assert exact_mu(parse_family("decor3")) is None
    assert exact_mu(parse_family("interp:3:1")) is None


def test_nth_root_handles_huge_integers():
    assert nth_root(10**400, 400) == pytest.approx(10.0, rel=1e-12)
    assert nth_root(0, 5) == 0.0


@pytest.mark.parametrize("spec,n", [("ladder", 16), ("hex", 14), ("loop:3", 16),
                                    ("tree:3", 12), ("loop:4", 16)])
def test_envelope_is_monotone_and_dominates_mu(spec, n):
    rule, series = rep_series(spec, n)
    env = fekete_envelope(series)
    assert all(a >= b - 1e-15 for a, b in zip(env, env[1:]))
    mu = KNOWN_MU[spec]
    assert all(x >= mu - 1e-12 for x in env)


@pytest.mark.parametrize("spec,n", [("ladder", 14), ("hex", 12), ("loop:4", 14),
                                    ("tree:3", 10), ("interp:3:1", 12),
                                    ("decor3", 14)])
def test_sup_counts_dominate_mu_powers(spec, n):
    # the orbit supremum of sigma_n is at least mu**n at every n
    rule, series = rep_series(spec, n)
    sup = sup_counts(series)
    mu = KNOWN_MU.get(spec)
    if mu is None:
        est = growth_estimate(rule, series)
        mu = est.mu_hat if spec.startswith("interp") else 1.0
    for k in range(1, len(sup)):
        assert sup[k] >= math.floor(mu**k)


def test_envelope_values_at_small_depth():
    rule, series = rep_series("tree:3", 10)
    env = fekete_envelope(series)
    assert env[9] == pytest.approx((3 * 2**9) ** 0.1, rel=1e-12)  # ~2.0839
    rule, series = rep_series("ladder", 4)
    env = fekete_envelope(series)
    assert env[3] == pytest.approx(20 ** 0.25, rel=1e-12)  # ~2.1147


def test_estimate_rejects_short_series():
    rule = parse_family("ladder")
    series = count_saws(rule, None, 6)
    with pytest.raises(GraphError):
        estimate_mu(series)


def test_estimate_rejects_truncated_series():
    rule = parse_family("hex")
    series = count_saws(rule, None, 12, budget=200)
    assert series.truncated
    with pytest.raises(GraphError):
        estimate_mu(series)


def test_loop_estimates_exact_at_modest_depth():
    for delta in (2, 3, 4):
        rule, series = rep_series(f"loop:{delta}", 20)
        est = growth_estimate(rule, series)
        assert est.mu_hat == pytest.approx(math.sqrt(delta - 1), abs=1e-6)
        assert est.diagnostics["stride"] == (1 if delta == 2 else 2)


def test_log_fit_method_runs_and_is_cross_checked():
    rule, series = rep_series("ladder", 20)
    est = growth_estimate(rule, series, method="log_fit")
    assert est.method == "log_fit"
    assert est.mu_hat == pytest.approx(KNOWN_MU["ladder"], abs=5e-2)
    assert "method_disagreement" in est.diagnostics
    assert "flagged" in est.diagnostics


def test_growth_estimate_requires_all_reps():
    rule = parse_family("decor3")
    series = [count_saws(rule, rule.root, 12)]
    with pytest.raises(GraphError):
        growth_estimate(rule, series)


def test_check_bounds_tree():
    rule, series = rep_series("tree:4", 12)
    report = check_bounds(rule, growth_estimate(rule, series))
    assert report.clauses["lower_bound"].applicable
    assert report.clauses["lower_bound"].passed
    assert report.clauses["upper_bound"].passed
    assert not report.clauses["strict_gap"].applicable  # acyclic family
    assert report.ok


def test_check_bounds_hex():
    rule, series = rep_series("hex", 14)
    report = check_bounds(rule, growth_estimate(rule, series))
    assert all(c.ok for c in report.clauses.values())
    assert report.clauses["strict_gap"].applicable
    assert report.clauses["strict_gap"].passed


def test_check_bounds_decorated_line_skips_lower_bound():
    rule, series = rep_series("decor4", 16)
    report = check_bounds(rule, growth_estimate(rule, series))
    assert not report.clauses["lower_bound"].applicable
    assert not report.clauses["lower_bound"].passed  # growth sits near 1
    assert report.ok  # inapplicable clause does not fail the report


def test_convergence_same_orbit_is_exact():
    rule = parse_family("ladder")
    a = count_saws(rule, (0, 0), 12)
    b = count_saws(rule, (5, 1), 12)
    assert convergence_check(a, b).difference == 0.0

    rule = parse_family("loop:3")
    a = count_saws(rule, (0,), 12)
    b = count_saws(rule, (1,), 12)
    assert convergence_check(a, b).difference == 0.0


def test_convergence_decorated_line_roots():
    rule = parse_family("decor3")
    line = count_saws(rule, (0, 0), 30)
    gadget = count_saws(rule, (0, 4), 30)
    report = convergence_check(line, gadget)
    assert report.n == 30
    assert report.ok
    assert report.difference < 0.1


def test_interpolation_monotone_in_segment_length():
    for delta in (3, 4):
        hats = []
        for ell in (1, 2, 3):
            rule, series = rep_series(f"interp:{delta}:{ell}", 24)
            est = growth_estimate(rule, series)
            hats.append(est.mu_hat)
            assert math.sqrt(delta - 1) - 1e-2 <= est.mu_hat <= delta - 1
            expected = (delta - 1) ** ((ell + 1) / (2 * ell + 1))
            assert est.mu_hat == pytest.approx(expected, abs=1e-9)
        assert hats == sorted(hats, reverse=True)


def test_ratios_are_exact_fractions():
    from fractions import Fraction

    rule, series = rep_series("ladder", 10)
    est = growth_estimate(rule, series)
    assert float(est.ratios[0]) == 3.0
    assert est.ratios[3] == Fraction(20, 12)
