"""Command line entry point (``dichroma``)."""
from __future__ import annotations

import argparse
import json
import logging
import sys

from . import bounds, constructions, erdos_posa, harness, solver
from .digraph import format_edge_list, read_edge_list, to_dot
from .random_model import ModelParams, p_theorem1, p_theorem2, sample

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_UNDECIDED = 3


def _parse_kv(text: str) -> dict:
    out = {}
    if not text:
        return out
    for item in text.split(","):
        if "=" not in item:
            raise ValueError(f"expected key=value, got {item!r}")
        key, value = item.split("=", 1)
        out[key.strip()] = _number(value.strip())
    return out


def _number(text: str):
    try:
        return int(text)
    except ValueError:
        return float(text)


def _emit(payload, out=None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _budget(args) -> solver.SolverBudget:
    return solver.SolverBudget(args.budget_nodes, args.budget_secs)


def cmd_gen(args) -> int:
    if args.theorem1 is not None:
        p = p_theorem1(args.theorem1, args.n)
    elif args.theorem2 is not None:
        p = p_theorem2(args.theorem2, args.n)
    elif args.p is not None:
        p = args.p
    else:
        raise ValueError("give --p, --theorem1 DELTA or --theorem2 K")
    D = sample(ModelParams(args.n, p, args.seed))
    text = to_dot(D) if args.format == "dot" else format_edge_list(D)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_dot(args) -> int:
    sys.stdout.write(to_dot(read_edge_list(args.input)))
    return EXIT_OK


def cmd_solve(args) -> int:
    D = read_edge_list(args.input)
    budget = _budget(args)
    try:
        if args.what == "chi":
            value, coloring = solver.chromatic_number_exact(D, budget)
            witness = list(coloring.colors)
        elif args.what == "alpha":
            value, keep = solver.max_acyclic_set_exact(D, budget)
            witness = sorted(keep)
        elif args.what == "fvs":
            value, fvs = solver.min_fvs_exact(D, budget)
            witness = sorted(fvs)
        else:
            fast = solver.two_colorable_fast(D)
            coloring = solver.k_colorable(D, 2, budget)
            value = coloring is not None
            witness = None if coloring is None else list(coloring.colors)
            _emit({"value": value, "witness": witness, "status": "ok",
                   "fast": "certified_yes" if fast else "unknown"})
            return EXIT_OK
    except solver.BudgetExhausted as exc:
        _emit({"value": None, "witness": None, "status": "undecided",
               "lower": exc.lower, "upper": exc.upper})
        return EXIT_UNDECIDED
    _emit({"value": value, "witness": witness, "status": "ok"})
    return EXIT_OK


def cmd_bounds(args) -> int:
    report = bounds.evaluate(args.name, **_parse_kv(args.params))
    _emit(report.to_dict())
    return EXIT_OK


def cmd_construct(args) -> int:
    params = _parse_kv(args.params)
    if args.theorem == 1:
        cert = constructions.theorem1_pipeline(
            int(params["delta"]), int(params["g"]), int(params["n"]), args.seed,
            exact_threshold=int(params.get("exact_threshold", constructions.EXACT_ALPHA_THRESHOLD)),
        )
        _emit(cert.to_dict(), args.out)
        return EXIT_OK if cert.ok else EXIT_FAIL
    n, k = int(params["n"]), int(params["k"])
    D = sample(ModelParams(n, p_theorem2(k, n), args.seed))
    report = constructions.theorem2_audit(
        D, k, float(params["eps"]), int(params.get("subset_budget", 1000)), args.seed,
        exhaustive_size=int(params["exhaustive_size"]) if "exhaustive_size" in params else None,
    )
    _emit(report.to_dict(), args.out)
    return EXIT_FAIL if report.fast_disagreements or report.arcs_check_failures else EXIT_OK


def cmd_verify_cert(args) -> int:
    with open(args.cert, encoding="utf-8") as fh:
        cert = constructions.ConstructionCertificate.from_json(fh.read())
    problems = constructions.validate_certificate(cert, resample=not args.no_resample)
    for p in problems:
        print(f"MISMATCH: {p}")
    if problems:
        return EXIT_FAIL
    print("certificate OK")
    return EXIT_OK


def cmd_eposa(args) -> int:
    D = read_edge_list(args.input)
    try:
        dec = erdos_posa.decompose(D, args.t, _budget(args))
    except solver.BudgetExhausted:
        _emit({"status": "undecided"})
        return EXIT_UNDECIDED
    payload = dec.to_dict()
    payload["status"] = "ok"
    payload["verified"] = not erdos_posa.verify_decomposition(D, dec)
    _emit(payload)
    return EXIT_OK


def cmd_shortcycle(args) -> int:
    D = read_edge_list(args.input)
    try:
        cyc, trace = erdos_posa.short_cycle_witness(D, _budget(args), args.t)
    except solver.BudgetExhausted:
        _emit({"status": "undecided"})
        return EXIT_UNDECIDED
    _emit({"status": "ok", "cycle": list(cyc.vertices), "trace": trace})
    return EXIT_OK


def cmd_experiment_run(args) -> int:
    config = harness.ExperimentConfig.load(args.config)
    if args.out:
        config.output_path = args.out
    if args.parallelism is not None:
        config.parallelism = args.parallelism
    summary = harness.run_experiment(config)
    for check in summary["checks"]:
        kind = "HARD" if check["hard"] else "info"
        mark = "PASS" if check["passed"] else "FAIL"
        print(f"[{mark}] {kind:4s} {check['name']}: {check['detail']}")
    print(f"report written to {config.output_path}")
    return EXIT_OK if summary["all_hard_passed"] else EXIT_FAIL


def cmd_experiment_verify(args) -> int:
    ok, problems = harness.verify_report(args.report, args.fraction)
    for p in problems:
        print(f"FAIL: {p}")
    if ok:
        print("report OK")
    return EXIT_OK if ok else EXIT_FAIL


def _add_budget(p):
    p.add_argument("--budget-nodes", type=int, default=10_000_000)
    p.add_argument("--budget-secs", type=float, default=120.0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dichroma", description="Digraph colouring laboratory.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="sample D(n, p) as an edge list")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float)
    p.add_argument("--seed", type=int, default=0)
    grp = p.add_mutually_exclusive_group()
    grp.add_argument("--theorem1", type=float, metavar="DELTA", help="use p = DELTA/(4en)")
    grp.add_argument("--theorem2", type=int, metavar="K", help="use p = K^2/n")
    p.add_argument("--format", choices=("edges", "dot"), default="edges")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("dot", help="convert an edge list to DOT")
    p.add_argument("--input", required=True)
    p.set_defaults(func=cmd_dot)

    p = sub.add_parser("solve", help="exact chi / alpha / fvs / 2-colourability")
    p.add_argument("--input", required=True)
    p.add_argument("--what", choices=("chi", "alpha", "fvs", "2col"), required=True)
    _add_budget(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bounds", help="evaluate an analytic bound")
    p.add_argument("--name", required=True, choices=bounds.bound_names())
    p.add_argument("--params", default="", help="comma separated key=value pairs")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("construct", help="run a construction and write its certificate")
    p.add_argument("--theorem", type=int, choices=(1, 2), required=True)
    p.add_argument("--params", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify-cert", help="recheck a construction certificate")
    p.add_argument("cert")
    p.add_argument("--no-resample", action="store_true")
    p.set_defaults(func=cmd_verify_cert)

    p = sub.add_parser("eposa", help="t disjoint dicycles or a feedback vertex set")
    p.add_argument("--input", required=True)
    p.add_argument("--t", type=int, required=True)
    _add_budget(p)
    p.set_defaults(func=cmd_eposa)

    p = sub.add_parser("shortcycle", help="short dicycle witness for a 3-chromatic digraph")
    p.add_argument("--input", required=True)
    p.add_argument("--t", type=int)
    _add_budget(p)
    p.set_defaults(func=cmd_shortcycle)

    p = sub.add_parser("experiment", help="Monte Carlo experiments")
    esub = p.add_subparsers(dest="action", required=True)
    r = esub.add_parser("run")
    r.add_argument("--config", required=True)
    r.add_argument("--out")
    r.add_argument("--parallelism", type=int)
    r.set_defaults(func=cmd_experiment_run)
    v = esub.add_parser("verify")
    v.add_argument("--report", required=True)
    v.add_argument("--fraction", type=float, default=0.05)
    v.set_defaults(func=cmd_experiment_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
