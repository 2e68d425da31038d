"""Command-line front end: enumeration, estimation, and machine checks.

Reports are deterministic: a given command line (minus ``--threads``)
produces byte-identical output regardless of worker count or scheduling, so
report files can be diffed and re-verified.  Exact integers travel as
decimal strings; floats appear only in display fields.  A run manifest with
wall time goes to stderr, never into the canonical report.

Exit codes: 0 pass, 1 violation, 2 usage error, 3 partial/truncated result.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import __version__
from .counting import (DEFAULT_BUDGET, count_extendable, count_saws,
                       count_saws_avoiding, count_saws_midedge)
from .estimate import METHODS, check_bounds, growth_estimate
from .graphs import FAMILY_GRAMMAR, GraphError, parse_family
from .lemmas import (edge_disjoint_paths, find_strictness_cutoff,
                     neighbor_decomposition_report, strict_upper_bound_report,
                     submultiplicativity_report, verify_branch_induction)
from .redblue import certify_vertex

EXIT_PASS = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_PARTIAL = 3

CHECKS = ("pi", "bounds", "menger", "strictness", "lemmas")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sawlab",
        description="exact self-avoiding-walk enumeration and growth bounds")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--family", required=True,
                       help=f"graph family ({FAMILY_GRAMMAR})")
        p.add_argument("--threads", type=int, default=1,
                       help="worker threads for enumeration (default 1)")
        p.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                       help="node budget before truncation")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--out", help="write the report here instead of stdout")

    p_enum = sub.add_parser("enumerate", help="exact walk counts from a root")
    common(p_enum)
    p_enum.add_argument("--n", type=int, required=True, help="maximum length")
    p_enum.add_argument("--root", help="root vertex (family-specific syntax)")
    p_enum.add_argument("--avoid-edge", metavar="EDGE",
                        help="count walks never traversing this edge (u~v#k)")
    p_enum.add_argument("--mid-edge", metavar="EDGE",
                        help="root the walks at this edge's midpoint")
    p_enum.add_argument("--extendable", type=int, metavar="D",
                        help="count only walks with a D-step continuation")

    p_est = sub.add_parser("estimate", help="growth-constant estimate and bounds")
    common(p_est)
    p_est.add_argument("--n", type=int, default=20, help="series depth")
    p_est.add_argument("--method", choices=METHODS, default=METHODS[0])

    p_chk = sub.add_parser("check", help="certificate-producing verifications")
    common(p_chk)
    p_chk.add_argument("which", choices=CHECKS)
    p_chk.add_argument("--n", type=int,
                       help="depth knob: ball radius (menger), cutoff bound "
                            "(strictness), inequality depth (lemmas), series "
                            "depth (bounds)")
    p_chk.add_argument("--series-n", type=int,
                       help="series depth for the estimate behind strictness")
    p_chk.add_argument("--L", type=int, default=8, help="prefix length bound")
    p_chk.add_argument("--D", type=int, default=12, help="color search depth")
    p_chk.add_argument("--P", type=int, default=12, help="witness path bound")
    p_chk.add_argument("--root", help="vertex to certify (default: first rep)")
    return parser


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_report(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _series_payload(args, series) -> dict:
    return {
        "schema": "saw-series/1",
        "family": series.family,
        "root": series.root_label,
        "kind": series.kind,
        "n_max": series.n_max,
        "counts": [str(c) for c in series.counts],
        "avoided_edge": series.avoided_edge,
        "extendable_lookahead": series.lookahead,
        "truncated": series.truncated,
        "manifest": _manifest(args),
    }


def _series_csv(series) -> str:
    lines = ["n,count"]
    lines += [f"{n},{c}" for n, c in enumerate(series.counts)]
    return "\n".join(lines) + "\n"


def _manifest(args) -> dict:
    # deterministic subset only: no wall time, no thread count
    skip = {"out", "format", "threads", "command", "func"}
    fields = {k: v for k, v in sorted(vars(args).items())
              if k not in skip and v is not None}
    return {"tool": "sawlab", "version": __version__, "parameters": fields,
            "deterministic": "output is independent of --threads and scheduling"}


def _stderr_manifest(args, started: float) -> None:
    info = {"argv": sys.argv[1:], "wall_time_s": round(time.time() - started, 3),
            "version": __version__}
    print(json.dumps(info, sort_keys=True), file=sys.stderr)


def _estimate_payload(args, rule, series_list, est, report) -> dict:
    return {
        "schema": "growth-estimate/1",
        "family": est.family,
        "n_max": est.n_max,
        "method": est.method,
        "mu_hat": est.mu_hat,
        "mu_exact": est.mu_exact,
        "fekete_upper": list(est.fekete_upper),
        "ratios": [f"{r.numerator}/{r.denominator}" for r in est.ratios],
        "diagnostics": est.diagnostics,
        "clauses": {name: {"applicable": c.applicable, "passed": c.passed,
                           "detail": c.detail}
                    for name, c in report.clauses.items()},
        "orbit_roots": [s.root_label for s in series_list],
        "manifest": _manifest(args),
    }


def _estimate_csv(series_list, est) -> str:
    from .estimate import sup_counts

    sup = sup_counts(series_list)
    lines = ["n,sup_count,fekete_upper"]
    lines.append(f"0,{sup[0]},")
    for n in range(1, len(sup)):
        lines.append(f"{n},{sup[n]},{est.fekete_upper[n - 1]!r}")
    return "\n".join(lines) + "\n"


def cmd_enumerate(args) -> int:
    rule = parse_family(args.family)
    if args.n < 0:
        raise GraphError("--n must be >= 0")
    chosen = sum(x is not None
                 for x in (args.avoid_edge, args.mid_edge, args.extendable))
    if chosen > 1:
        raise GraphError("--avoid-edge, --mid-edge and --extendable are exclusive")
    root = rule.parse_vertex(args.root) if args.root else rule.root
    if args.avoid_edge:
        edge = rule.parse_edge(args.avoid_edge)
        series = count_saws_avoiding(rule, root, edge, args.n,
                                     budget=args.budget, threads=args.threads)
    elif args.mid_edge:
        edge = rule.parse_edge(args.mid_edge)
        series = count_saws_midedge(rule, edge, args.n, budget=args.budget,
                                    threads=args.threads)
    elif args.extendable is not None:
        series = count_extendable(rule, root, args.n, args.extendable,
                                  budget=args.budget)
    else:
        series = count_saws(rule, root, args.n, budget=args.budget,
                            threads=args.threads)
    if args.format == "csv":
        _emit(args, _series_csv(series))
    else:
        _emit(args, _json_report(_series_payload(args, series)))
    return EXIT_PARTIAL if series.truncated else EXIT_PASS


def _rep_series(rule, n, budget, threads):
    return [count_saws(rule, rep, n, budget=budget, threads=threads)
            for rep in rule.orbit_reps]


def cmd_estimate(args) -> int:
    rule = parse_family(args.family)
    series_list = _rep_series(rule, args.n, args.budget, args.threads)
    if any(s.truncated for s in series_list):
        print("series truncated by the node budget; increase --budget",
              file=sys.stderr)
        return EXIT_PARTIAL
    est = growth_estimate(rule, series_list, args.method)
    report = check_bounds(rule, est)
    if args.format == "csv":
        _emit(args, _estimate_csv(series_list, est))
    else:
        _emit(args, _json_report(_estimate_payload(args, rule, series_list,
                                                   est, report)))
    return EXIT_PASS


def _check_pi(args, rule) -> tuple[dict, int]:
    root = rule.parse_vertex(args.root) if args.root else rule.root
    cert = certify_vertex(rule, root, args.L, args.D, args.P,
                          budget=args.budget)
    payload = {
        "schema": "reroute-certificate/1",
        "check": "pi",
        "family": cert.family,
        "vertex": rule.format_vertex(cert.vertex),
        "bounds": {"L": cert.prefix_bound, "D": cert.color_depth,
                   "P": cert.path_bound},
        "mode": cert.mode,
        "outcome": cert.outcome,
        "prefixes_checked": cert.prefixes_checked,
        "triples_checked": cert.triples_checked,
        "note": cert.note,
        "violation": None,
    }
    if cert.violation is not None:
        t = cert.violation.triple
        payload["violation"] = {
            "prefix": [rule.format_vertex(v) for v in t.vertices],
            "prefix_edges": [rule.format_edge(e) for e in t.edges],
            "leaving": rule.format_edge(t.leaving),
            "unmatched_red": [rule.format_edge(e)
                              for e in cert.violation.unmatched_red],
            "mode": cert.violation.mode,
        }
    code = {"certified": EXIT_PASS, "violation": EXIT_VIOLATION,
            "partial": EXIT_PARTIAL}[cert.outcome]
    return payload, code


def _check_bounds(args, rule) -> tuple[dict, int]:
    n = args.n or 20
    series_list = _rep_series(rule, n, args.budget, args.threads)
    if any(s.truncated for s in series_list):
        return {"check": "bounds", "error": "series truncated"}, EXIT_PARTIAL
    est = growth_estimate(rule, series_list)
    report = check_bounds(rule, est)
    payload = {
        "schema": "bound-report/1",
        "check": "bounds",
        "family": report.family,
        "degree": report.degree,
        "n_max": n,
        "mu_hat": est.mu_hat,
        "mu_exact": est.mu_exact,
        "clauses": {name: {"applicable": c.applicable, "passed": c.passed,
                           "detail": c.detail}
                    for name, c in report.clauses.items()},
        "ok": report.ok,
    }
    return payload, EXIT_PASS if report.ok else EXIT_VIOLATION


def _check_menger(args, rule) -> tuple[dict, int]:
    radius = args.n or 4
    expect_full = rule.vertex_transitive and rule.is_simple
    results = []
    all_full = True
    for rep in rule.orbit_reps:
        res = edge_disjoint_paths(rule, rep, radius)
        all_full = all_full and res.ok
        results.append({
            "root": res.root_label,
            "radius": res.radius,
            "flow": res.flow_value,
            "degree": res.degree,
            "paths": [list(p) for p in res.paths],
        })
    ok = all_full or not expect_full
    payload = {
        "schema": "disjoint-paths/1",
        "check": "menger",
        "family": rule.spec,
        "radius": radius,
        "expect_full_flow": expect_full,
        "results": results,
        "ok": ok,
    }
    return payload, EXIT_PASS if ok else EXIT_VIOLATION


def _check_strictness(args, rule) -> tuple[dict, int]:
    bound_n = args.n or 12
    series_n = args.series_n or 20
    cutoff = find_strictness_cutoff(rule, bound_n, budget=args.budget)
    payload = {
        "schema": "strictness/1",
        "check": "strictness",
        "family": rule.spec,
        "degree": rule.degree,
        "searched_to": cutoff.searched_to,
        "cutoff": cutoff.cutoff,
    }
    if not cutoff.found:
        payload["note"] = "strictness not witnessed at this bound"
        payload["ok"] = False
        return payload, EXIT_PARTIAL
    series_list = _rep_series(rule, series_n, args.budget, args.threads)
    if any(s.truncated for s in series_list):
        return {"check": "strictness", "error": "series truncated"}, EXIT_PARTIAL
    est = growth_estimate(rule, series_list)
    report = strict_upper_bound_report(rule, est, cutoff)
    payload.update({
        "bound": report.bound,
        "bound_expression": f"(({rule.degree - 1})^{report.cutoff} - 1)"
                            f"^(1/{report.cutoff})",
        "pair_counts": {k: str(v) for k, v in sorted(report.pair_counts.items())},
        "envelope_ok": report.envelope_ok,
        "mu_hat_ok": report.mu_hat_ok,
        "ok": report.ok,
    })
    return payload, EXIT_PASS if report.ok else EXIT_VIOLATION


def _check_lemmas(args, rule) -> tuple[dict, int]:
    depth = args.n or 12
    induction = verify_branch_induction(8, 50)
    decomposition = neighbor_decomposition_report(rule, depth, budget=args.budget)
    submult = submultiplicativity_report(rule, min(depth + 2, 14),
                                         budget=args.budget)
    ok = induction.ok and decomposition.ok and submult.ok
    payload = {
        "schema": "lemma-suite/1",
        "check": "lemmas",
        "family": rule.spec,
        "branch_induction": {
            "delta_max": induction.delta_max,
            "b_max": induction.b_max,
            "cases_checked": induction.cases_checked,
            "counterexamples": induction.counterexamples,
        },
        "neighbor_decomposition": {
            "n_max": decomposition.n_max,
            "pairs_checked": decomposition.pairs_checked,
            "failures": decomposition.failures,
        },
        "submultiplicativity": {
            "n_max": submult.n_max,
            "pairs_checked": submult.pairs_checked,
            "failures": submult.failures,
        },
        "ok": ok,
    }
    return payload, EXIT_PASS if ok else EXIT_VIOLATION


def cmd_check(args) -> int:
    if args.format == "csv":
        raise GraphError("check reports are JSON only")
    rule = parse_family(args.family)
    handler = {"pi": _check_pi, "bounds": _check_bounds,
               "menger": _check_menger, "strictness": _check_strictness,
               "lemmas": _check_lemmas}[args.which]
    payload, code = handler(args, rule)
    payload["manifest"] = _manifest(args)
    _emit(args, _json_report(payload))
    return code


def main(argv=None) -> int:
    started = time.time()
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"enumerate": cmd_enumerate, "estimate": cmd_estimate,
                "check": cmd_check}
    try:
        code = handlers[args.command](args)
    except GraphError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _stderr_manifest(args, started)
    return code


if __name__ == "__main__":
    sys.exit(main())
