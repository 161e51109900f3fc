"""Command line entry point: ``cfchroma <command> ...``.

Exit codes: 0 success/feasible, 1 infeasible or algorithmic failure,
2 usage or input error, 3 unknown (resource limit hit), 4 oracle
disagreement.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

from . import colorers, generators
from .core import (
    SCHEMA_VERSION,
    ADParams,
    CFError,
    PartialColoring,
    dumps,
    is_almost_disjoint,
    is_cf,
    is_weak_cf,
    load_instance,
    system_to_dict,
)
from .solver import (
    FEASIBLE,
    INFEASIBLE,
    STRICT,
    UNKNOWN,
    WEAK,
    ExtensionProblem,
    OracleCapExceeded,
    brute_oracle,
    export_cnf,
    feasible_cf,
    solve_chi,
    solve_chi_cf,
    solve_wchi_cf,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_UNKNOWN, EXIT_ORACLE = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load(path):
    try:
        return load_instance(path)
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read instance {path}: {exc}") from exc


def _load_coloring(path) -> PartialColoring:
    try:
        with open(path) as fh:
            d = json.load(fh)
        if "coloring" in d:
            d = d["coloring"]
        elif "witness" in d:
            d = d["witness"]
        return PartialColoring.from_dict(d)
    except (OSError, ValueError, KeyError, TypeError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read coloring {path}: {exc}") from exc


# -- gen -------------------------------------------------------------------------

def cmd_gen(args) -> int:
    fixed = None
    fam = args.family
    try:
        if fam == "quad":
            system = generators.gen_quad(args.m)
        elif fam == "product":
            system = generators.gen_product_gadget(args.lam, args.n, args.k, args.t)
        elif fam == "affine":
            system = generators.gen_affine_lines(args.q)
        elif fam == "grid":
            system, fixed = generators.gen_grid_gadget(args.rows, args.cols)
        elif fam == "lift0":
            base, _ = _load(args.base)
            system = generators.gen_lift0(base, args.t, cap=args.cap, sample=args.sample, seed=args.seed)
        elif fam == "union":
            system = generators.gen_union([_load(p)[0] for p in args.parts])
        elif fam == "complete":
            system = generators.complete_graph(args.n)
        else:
            raise UsageError(f"unknown family {fam}")
    except generators.GadgetError as exc:
        raise UsageError(str(exc)) from exc
    mu = system.meta.get("mu")
    if mu is not None:
        ok, _ = is_almost_disjoint(system, ADParams(mu))
        ad = f"{mu}-almost disjoint: {'yes' if ok else 'NO'}"
    else:
        ad = "almost disjointness not advertised"
    summary = f"{fam}: {system.ground_size} vertices, {len(system.edges)} edges, {ad}\n"
    _emit(dumps(system_to_dict(system, fixed)), args.out)
    (sys.stdout if args.out else sys.stderr).write(summary)
    return EXIT_OK


# -- solve -----------------------------------------------------------------------

def cmd_solve(args) -> int:
    system, fixed = _load(args.instance)
    mode = args.mode
    report: dict = {"schema": SCHEMA_VERSION, "mode": mode}
    if args.optimize:
        if args.chi:
            res = solve_chi(system, max_palette=args.max_palette, node_limit=args.node_limit,
                            threads=args.threads)
            report["target"] = "chi"
        elif mode == WEAK:
            res = solve_wchi_cf(system, max_palette=args.max_palette, node_limit=args.node_limit,
                                threads=args.threads)
            report["target"] = "wchi_cf"
        else:
            res = solve_chi_cf(system, max_palette=args.max_palette, node_limit=args.node_limit,
                               threads=args.threads)
            report["target"] = "chi_cf"
        report.update(res.to_dict(args.timing))
        _emit(dumps(report), args.out)
        return {FEASIBLE: EXIT_OK, INFEASIBLE: EXIT_FAIL, UNKNOWN: EXIT_UNKNOWN}[res.verdict]
    if args.palette is None:
        raise UsageError("give --palette X or --optimize")
    if fixed is None or args.ignore_fixed:
        fixed = PartialColoring(args.palette)
    else:
        fixed = PartialColoring(args.palette, fixed.assignment)
    problem = ExtensionProblem(system, fixed, args.palette, mode=mode)
    report["palette"] = args.palette
    if args.backend == "cnf":
        res = solve_via_cnf(problem)
    else:
        res = feasible_cf(problem, node_limit=args.node_limit, threads=args.threads,
                          heuristic=args.heuristic)
    report.update(res.to_dict(args.timing))
    code = {FEASIBLE: EXIT_OK, INFEASIBLE: EXIT_FAIL, UNKNOWN: EXIT_UNKNOWN}[res.verdict]
    if args.oracle:
        try:
            orc = brute_oracle(problem)
            report["oracle"] = orc.verdict
            if res.verdict != UNKNOWN and orc.verdict != res.verdict:
                code = EXIT_ORACLE
        except OracleCapExceeded as exc:
            report["oracle"] = f"skipped: {exc}"
    _emit(dumps(report), args.out)
    return code


def solve_via_cnf(problem: ExtensionProblem):
    """Delegate to an external SAT solver through the CNF encoding (needs python-sat)."""
    from .solver import SolveResult

    try:
        from pysat.solvers import Solver
    except ImportError as exc:
        raise UsageError("the cnf backend needs the optional python-sat package") from exc
    cnf = export_cnf(problem)
    with Solver(name="cadical153", bootstrap_with=cnf.clauses) as s:
        sat = s.solve()
        model = s.get_model() if sat else None
    if not sat:
        return SolveResult(INFEASIBLE, stats={"backend": "cnf", "complete": True})
    w = cnf.decode(model)
    check = is_cf(problem.system, w) if problem.mode == STRICT else is_weak_cf(problem.system, w)
    if not check.ok or not w.extends(problem.fixed):
        raise CFError("decoded SAT model failed verification")
    return SolveResult(FEASIBLE, w, stats={"backend": "cnf", "complete": True})


# -- color -----------------------------------------------------------------------

def cmd_color(args) -> int:
    system, fixed = _load(args.instance)
    alg = args.algorithm
    report: dict = {"schema": SCHEMA_VERSION, "algorithm": alg}
    try:
        if alg == "greedy-max":
            palette = args.palette or len(system.support)
            res = colorers.greedy_max_color(system, {}, palette, total=args.total)
            f, weak = res.coloring, not args.total
            report["certificate"] = {"witness": {str(i): c for i, c in sorted(res.witness.items())}}
        elif alg == "disjointify":
            res = colorers.disjointify_color(system, args.palette or 2)
            f, weak = res.coloring, True
            report["certificate"] = {"deficiency": res.table}
        elif alg == "witness-reduce":
            res = colorers.reduce_via_witness(system, args.tau, args.palette)
            f, weak = res.coloring, False
            report["certificate"] = {"witness": sorted(res.witness), "report": res.report,
                                     "removed": [sorted(F) for F in res.decomposition.removed]}
        elif alg in ("ind0", "layered"):
            x = args.palette or colorers.cf_bound(0 if alg == "ind0" else 1, args.d, args.k)
            base = PartialColoring(x, fixed.assignment if fixed is not None else {})
            if alg == "ind0":
                problem = ExtensionProblem(system, base, x, spill_bound=args.k, mode=WEAK)
                res = colorers.extend_ind0(problem, args.d)
                f = res.coloring
                report["certificate"] = {"chosen": {str(i): list(p) for i, p in sorted(res.chosen.items())},
                                         "max_new_later": res.max_new_later}
            else:
                if args.layering:
                    with open(args.layering) as fh:
                        layering = colorers.LayeringCertificate.from_dict(json.load(fh))
                else:
                    layering = colorers.find_layering(system, args.d)
                    if layering is None:
                        report["error"] = "no layering found"
                        _emit(dumps(report), args.out)
                        return EXIT_FAIL
                f = colorers.layered_extend(system, layering, x, args.d, args.k, fixed=base)
                report["certificate"] = {"layering": layering.to_dict()}
            weak = True
        else:
            raise UsageError(f"unknown algorithm {alg}")
    except colorers.ColoringFailure as exc:
        report["error"] = str(exc)
        report["where"] = list(exc.where) if exc.where else None
        _emit(dumps(report), args.out)
        return EXIT_FAIL
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    check = is_weak_cf(system, f) if weak else is_cf(system, f)
    report["coloring"] = f.to_dict()
    report["verified"] = {"weak": weak, "ok": check.ok}
    _emit(dumps(report), args.out)
    return EXIT_OK if check.ok or alg == "disjointify" else EXIT_FAIL


# -- verify / refute / cnf ---------------------------------------------------------

def cmd_verify(args) -> int:
    system, _ = _load(args.instance)
    f = _load_coloring(args.coloring)
    try:
        rep = is_weak_cf(system, f) if args.weak else is_cf(system, f)
    except CFError as exc:
        raise UsageError(str(exc)) from exc
    _emit(dumps({"schema": SCHEMA_VERSION, **rep.to_dict()}), args.out)
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_refute(args) -> int:
    system, _ = _load(args.instance)
    if system.meta.get("family") != "product":
        raise UsageError("refute needs a product gadget instance (meta.family = product)")
    f = _load_coloring(args.coloring)
    try:
        ref = generators.refute_product_coloring(system, f)
    except generators.GadgetError as exc:
        raise UsageError(str(exc)) from exc
    out = {"schema": SCHEMA_VERSION, "refutation": ref.to_dict() if ref else None}
    _emit(dumps(out), args.out)
    return EXIT_OK if ref else EXIT_FAIL


def cmd_cnf(args) -> int:
    system, fixed = _load(args.instance)
    if fixed is None or args.ignore_fixed:
        fixed = PartialColoring(args.palette)
    else:
        fixed = PartialColoring(args.palette, fixed.assignment)
    cnf = export_cnf(ExtensionProblem(system, fixed, args.palette, mode=args.mode))
    _emit(cnf.dimacs(), args.out)
    return EXIT_OK


# -- bench -----------------------------------------------------------------------

def _bench_rows(suite: str, node_limit, backend: str):
    if suite in ("quad", "all"):
        for m in range(4, 9):
            yield "quad", f"m={m}", generators.gen_quad(m)
    if suite in ("affine", "all"):
        for q in (2, 3, 5):
            yield "affine", f"q={q}", generators.gen_affine_lines(q)
    if suite in ("lift", "all"):
        base = generators.gen_affine_lines(3)
        yield "lift", "depth=0", base
        yield "lift", "depth=1", generators.gen_lift0(base, 2)


def _bench_value(system, fn, node_limit, backend, mode, span):
    res = fn(system, node_limit=node_limit)
    if res.optimum is not None:
        return str(res.optimum), "exact"
    lower = res.lower_bound
    if backend == "cnf" and lower is not None:
        for p in range(lower, lower + span):
            if solve_via_cnf(ExtensionProblem.free(system, p, mode)).verdict == FEASIBLE:
                return str(p), "exact-cnf"
        return f">={lower + span}", "cnf-bound"
    return f">={lower}", res.verdict


BENCH_NODE_LIMIT = 100_000


def cmd_bench(args) -> int:
    # sweeps should finish; rows that hit the limit report a proven lower bound
    if args.node_limit == -1:
        args.node_limit = BENCH_NODE_LIMIT if "CFCHROMA_NODE_LIMIT" not in os.environ else -1
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["suite", "instance", "vertices", "edges", "chi", "chi_cf", "wchi_cf", "status"])
    for suite, name, system in _bench_rows(args.suite, args.node_limit, args.backend):
        cols = []
        status = []
        try:
            big = len(system.edges) > 1000
            for fn, mode in ((solve_chi, STRICT), (solve_chi_cf, STRICT), (solve_wchi_cf, WEAK)):
                if big and fn is not solve_wchi_cf:
                    cols.append("")
                    continue
                val, st = _bench_value(system, fn, args.node_limit, args.backend, mode, args.cnf_span)
                cols.append(val)
                status.append(st)
        except Exception as exc:  # keep the sweep going; the row records the failure
            cols += [""] * (3 - len(cols))
            status.append(f"error: {exc}")
        w.writerow([suite, name, system.ground_size, len(system.edges), *cols, ";".join(status)])
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


# -- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cfchroma", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", help="write output here instead of stdout")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--node-limit", type=int, default=-1,
                        help="search node limit (default: CFCHROMA_NODE_LIMIT or built-in)")
        sp.add_argument("--threads", type=int, default=1)

    g = sub.add_parser("gen", help="generate an instance file")
    common(g)
    g.add_argument("family", choices=["quad", "product", "affine", "grid", "lift0", "union", "complete"])
    g.add_argument("--m", type=int, default=6)
    g.add_argument("--lambda", dest="lam", type=int, default=6)
    g.add_argument("--n", type=int, default=3)
    g.add_argument("--k", type=int, default=1)
    g.add_argument("--t", type=int, default=3)
    g.add_argument("--q", type=int, default=3)
    g.add_argument("--rows", type=int, default=4)
    g.add_argument("--cols", type=int, default=6)
    g.add_argument("--base")
    g.add_argument("--cap", type=int, default=10**6)
    g.add_argument("--sample", type=int)
    g.add_argument("parts", nargs="*", help="instance files for the union family")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="decide or optimize conflict-free colorability")
    common(s)
    s.add_argument("instance")
    s.add_argument("--mode", choices=[STRICT, WEAK], default=STRICT)
    s.add_argument("--palette", type=int)
    s.add_argument("--optimize", action="store_true")
    s.add_argument("--chi", action="store_true", help="with --optimize: proper chromatic number")
    s.add_argument("--max-palette", type=int)
    s.add_argument("--oracle", action="store_true", help="cross-check with brute force when within cap")
    s.add_argument("--ignore-fixed", action="store_true")
    s.add_argument("--backend", choices=["search", "cnf"], default="search")
    s.add_argument("--heuristic", choices=["degree", "wdeg"], default="degree")
    s.add_argument("--timing", action="store_true", help="include wall-clock seconds in the report")
    s.set_defaults(func=cmd_solve)

    c = sub.add_parser("color", help="run a constructive coloring procedure")
    common(c)
    c.add_argument("instance")
    c.add_argument("--algorithm", required=True,
                   choices=["greedy-max", "disjointify", "ind0", "layered", "witness-reduce"])
    c.add_argument("--palette", type=int)
    c.add_argument("--d", type=int, default=2)
    c.add_argument("--k", type=int, default=0)
    c.add_argument("--tau", type=int, default=2)
    c.add_argument("--total", action="store_true")
    c.add_argument("--layering")
    c.set_defaults(func=cmd_color)

    v = sub.add_parser("verify", help="check a coloring")
    common(v)
    v.add_argument("instance")
    v.add_argument("coloring")
    v.add_argument("--weak", action="store_true")
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("refute", help="find a homogeneous set killing a product-gadget coloring")
    common(r)
    r.add_argument("instance")
    r.add_argument("coloring")
    r.set_defaults(func=cmd_refute)

    n = sub.add_parser("cnf", help="export DIMACS CNF")
    common(n)
    n.add_argument("instance")
    n.add_argument("--palette", type=int, required=True)
    n.add_argument("--mode", choices=[STRICT, WEAK], default=STRICT)
    n.add_argument("--ignore-fixed", action="store_true")
    n.set_defaults(func=cmd_cnf)

    b = sub.add_parser("bench", help="parameter sweeps as CSV")
    common(b)
    b.add_argument("--suite", choices=["quad", "affine", "lift", "all"], default="all")
    b.add_argument("--backend", choices=["search", "cnf"], default="search",
                   help="cnf: settle node-limited rows with an external SAT solver")
    b.add_argument("--cnf-span", type=int, default=2,
                   help="with --backend cnf: palettes tried above the search lower bound")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except BrokenPipeError:
        sys.stderr.close()
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
