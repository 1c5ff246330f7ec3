"""optproof command line.

Exit status: 0 success, 1 a law suite failed, 2 bad usage or malformed
input, 3 search budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import cnf, dimacs
from .combinators import (FreshAllocator, SharedVariables, lemma1_tree_back, mono_shield, product,
                          sum_formulas, to_dpll_equivalent, union_disjoint)
from .families import FAMILIES, hard_family
from .gadgets import GadgetError, c_transform, e_transform, exact_size_formula, mono_sum, v_formula
from .laws import UnknownSuite, run_law_suite, suite_names
from .optimal import BudgetExhausted, NoRefutation, Oracle, OracleConfig
from .reductions import (ReductionError, reduce_eminsat, reduce_ots_conp, reduce_ots_to_obv,
                         reduce_parity_sat)
from .resolution import (ResolutionError, f_transform, format_proof, g_transform, is_optimal_resolution_pair,
                         min_regular_proof, parse_proof, proof_to_dot, push_pivot_to_leaves, reduce_orp,
                         validate_regular_proof)
from .trees import INFINITE, Kind, TreeDiscipline, TreeSyntaxError, format_tree, parse_tree, tree_to_dot

BUDGET_ENV = "OPTPROOF_BUDGET"
EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 1, 2, 3


class UsageError(Exception):
    pass


def _default_budget():
    raw = os.environ.get(BUDGET_ENV)
    if not raw:
        return None
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{BUDGET_ENV} must be an integer, got {raw!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise UsageError(f"expected a list of integers, got {text!r}") from None


def _clause(text: str) -> cnf.Clause:
    return frozenset(_int_list(text))


def _fmt(v) -> str:
    return "inf" if v == INFINITE else str(v)


def _emit(args, f: cnf.Formula, meta: dict | None = None, comments=()):
    if args.output:
        dimacs.write_dimacs(args.output, f, comments)
        if meta is not None:
            dimacs.write_sidecar(args.output, meta)
    else:
        sys.stdout.write(dimacs.format_dimacs(f, comments))
        if meta is not None:
            sys.stdout.write("c meta " + json.dumps(meta, sort_keys=True) + "\n")


def _roles_meta(alloc: FreshAllocator, **extra) -> dict:
    meta = {"roles": alloc.role_table()}
    meta.update(extra)
    return meta


# subcommands


def cmd_gen(args):
    alloc = FreshAllocator()
    meta = None
    if args.family in FAMILIES:
        f = hard_family(args.family, args.param, alloc)
    elif args.family == "vn":
        f = v_formula(args.param, alloc)
        meta = _roles_meta(alloc, method="dpllmono", allowed=sorted(alloc.branchable(f)))
    else:
        kind = TreeDiscipline(Kind(args.method))
        f = exact_size_formula(args.param, kind, alloc, args.construction)
        allowed = sorted(alloc.branchable(f)) if kind.kind is Kind.DPLL_MONO else None
        meta = _roles_meta(alloc, method=args.method, allowed=allowed, size=args.param)
    _emit(args, f, meta)
    return 0


def _shift_apart(f, h):
    off = cnf.max_var(f)
    return cnf.rename(h, {v: v + off for v in cnf.variables(h)})


def cmd_combine(args):
    f, h = dimacs.read_dimacs(args.a), dimacs.read_dimacs(args.b)
    if args.rename:
        h = _shift_apart(f, h)
    alloc = FreshAllocator.above(f, h)
    meta = None
    if args.op == "union":
        out = union_disjoint(f, h)
    elif args.op == "product":
        out = product(f, h)
    elif args.method == "dpllmono":
        out, x = mono_sum(f, h, alloc)
        meta = _roles_meta(alloc, connective=x, method="dpllmono", allowed=sorted(alloc.branchable(out)))
    else:
        out, x = sum_formulas(f, h, alloc)
        meta = _roles_meta(alloc, connective=x)
    _emit(args, out, meta)
    return 0


def cmd_transform(args):
    if args.kind == "lemma1-back":
        shadow = {int(k): v for k, v in json.loads(Path(args.map).read_text())["shadow"].items()}
        print(format_tree(lemma1_tree_back(parse_tree(args.input), shadow)))
        return 0
    if args.kind == "push":
        p = parse_proof(Path(args.input).read_text())
        if args.pivot is None:
            raise UsageError("push needs --pivot")
        sys.stdout.write(format_proof(push_pivot_to_leaves(p, args.pivot)))
        return 0
    f = dimacs.read_dimacs(args.input)
    alloc = FreshAllocator.above(f)
    meta = None
    if args.kind == "lemma1":
        out = to_dpll_equivalent(f, alloc)
        meta = _roles_meta(alloc, shadow={str(k): v for k, v in sorted(alloc.shadow.items())}, method="dpll")
    elif args.kind == "shield":
        out = mono_shield(f, alloc)
        meta = _roles_meta(alloc, shadow={str(k): v for k, v in sorted(alloc.shadow.items())}, method="dpll")
    elif args.kind == "cx":
        xs = _int_list(args.vars or "")
        out = c_transform(f, xs, alloc)
        meta = _roles_meta(alloc, method="dpllmono", allowed=sorted(alloc.branchable(out)), X=xs)
    elif args.kind == "ex":
        xs = _int_list(args.vars) if args.vars else sorted(cnf.variables(f))
        out = e_transform(f, alloc, xs)
        meta = _roles_meta(alloc, method="dpllmono", allowed=sorted(alloc.branchable(out)), X=xs)
    elif args.kind == "gx":
        if args.clause is None:
            raise UsageError("gx needs --clause")
        x = args.fresh or alloc.new("x")
        out = g_transform(f, _clause(args.clause), x)
        meta = {"x": x}
    else:
        x = args.fresh or alloc.new("x")
        alloc.reserve(cnf.formula([[x]]))
        y = alloc.new("y")
        out = f_transform(f, x, y)
        meta = {"x": x, "y": y}
    _emit(args, out, meta)
    return 0


def _discipline(args, meta: dict) -> TreeDiscipline:
    method = args.method or meta.get("method") or "bt"
    if args.allowed is not None:
        allowed = _int_list(args.allowed)
    else:
        allowed = meta.get("allowed")
    return TreeDiscipline.parse(method, allowed)


def cmd_opt(args):
    f = dimacs.read_dimacs(args.input)
    meta = dimacs.read_sidecar(args.input)
    budget = args.budget if args.budget is not None else _default_budget()
    cfg = OracleConfig(_discipline(args, meta), budget, decompose=not args.no_decompose)
    o = Oracle(f, cfg)
    if args.obv is not None:
        if o.size() == INFINITE:
            raise NoRefutation("formula has no search tree under this discipline")
        print("true" if o.is_root(args.obv) else "false")
    elif args.ots is not None:
        print("true" if o.within(args.ots) else "false")
    elif args.tree:
        if o.size() == INFINITE:
            raise NoRefutation("formula has no search tree under this discipline")
        print(format_tree(o.tree()))
    elif args.roots:
        print(" ".join(map(str, o.roots())))
    else:
        print(_fmt(o.size()))
    return 0


def cmd_res(args):
    f = dimacs.read_dimacs(args.input)
    budget = args.budget if args.budget is not None else _default_budget()
    if budget is None and not args.validate:
        raise UsageError(f"regular resolution search needs --budget or {BUDGET_ENV}")
    if args.validate:
        p = parse_proof(Path(args.validate).read_text())
        ok = validate_regular_proof(f, p)
        print("valid" if ok else "invalid")
        return 0 if ok else EXIT_FAIL
    if args.orp:
        g, d = (_clause(c) for c in args.orp)
        print("true" if is_optimal_resolution_pair(f, g, d, budget) else "false")
        return 0
    r = min_regular_proof(f, budget)
    if args.witness:
        if r.witness is None:
            print("c satisfiable")
        else:
            sys.stdout.write(format_proof(r.witness))
    else:
        print(_fmt(r.size))
    return 0


def _read_seq(paths, rename: bool):
    seq = []
    for p in paths:
        f = dimacs.read_dimacs(p)
        if rename and seq:
            f = _shift_apart(frozenset().union(*seq) or cnf.FALSE, f)
        seq.append(f)
    return seq


def cmd_reduce(args):
    alloc = FreshAllocator()
    if args.kind == "paritysat":
        seq = _read_seq(args.inputs, args.rename)
        out = reduce_parity_sat(seq, TreeDiscipline(Kind(args.method or "bt")), alloc)
    else:
        if len(args.inputs) != 1:
            raise UsageError(f"{args.kind} takes exactly one input formula")
        f = dimacs.read_dimacs(args.inputs[0])
        if args.kind == "otsconp":
            out = reduce_ots_conp(f, TreeDiscipline(Kind(args.method or "bt")), alloc)
        elif args.kind == "otstoobv":
            if args.k is None:
                raise UsageError("otstoobv needs --k")
            out = reduce_ots_to_obv(f, args.k, alloc)
        elif args.kind == "eminsat":
            if args.x is None or args.y is None:
                raise UsageError("eminsat needs --x and --y")
            out = reduce_eminsat(f, _int_list(args.x), _int_list(args.y), alloc)
        else:
            out = reduce_orp(f, alloc, args.hard_threshold)
    _emit(args, out.formula, out.sidecar())
    return 0


def cmd_verify(args):
    suites = suite_names() if args.suite == "all" else [args.suite]
    budget = args.budget if args.budget is not None else _default_budget()
    ok = True
    reports = []
    for s in suites:
        r = run_law_suite(s, args.samples, args.seed, args.max_vars, budget)
        print(f"{s}: {r.instances} instances, {len(r.failures)} failures, "
              f"{r.budget_exhaustions} budget exhaustions, {r.elapsed:.2f}s", file=sys.stderr)
        reports.append(r.to_dict())
        ok &= r.passed
    text = json.dumps(reports[0] if len(reports) == 1 else reports, indent=2, sort_keys=True) + "\n"
    if args.report:
        Path(args.report).write_text(text)
    else:
        sys.stdout.write(text)
    return 0 if ok else EXIT_FAIL


def cmd_export_dot(args):
    if args.what == "tree":
        text = Path(args.input).read_text() if Path(args.input).is_file() else args.input
        sys.stdout.write(tree_to_dot(parse_tree(text.strip())))
    else:
        sys.stdout.write(proof_to_dot(parse_proof(Path(args.input).read_text())))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="optproof", description="Optimal search trees and regular resolution proofs.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a formula")
    p.add_argument("family", choices=sorted(FAMILIES) + ["vn", "im"])
    p.add_argument("param", type=int)
    p.add_argument("--method", choices=[k.value for k in Kind], default="bt", help="tree kind for im")
    p.add_argument("--construction", choices=["binary", "unary"], default="binary", help="block scheme for im")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("combine", help="union, sum or product of two formulas")
    p.add_argument("op", choices=["union", "sum", "product"])
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--rename", action="store_true", help="shift the second formula's variables apart")
    p.add_argument("--method", choices=["bt", "dpllmono"], default="bt", help="sum flavour")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_combine)

    p = sub.add_parser("transform", help="formula, tree and proof transformations")
    p.add_argument("kind", choices=["lemma1", "lemma1-back", "shield", "cx", "ex", "gx", "fxy", "push"])
    p.add_argument("input", help="DIMACS file; a tree for lemma1-back; a proof trace for push")
    p.add_argument("--vars", help="X variables for cx/ex")
    p.add_argument("--clause", help="the clause gamma for gx")
    p.add_argument("--fresh", type=int, help="id of the fresh variable for gx/fxy")
    p.add_argument("--map", help="sidecar JSON holding the shadow map (lemma1-back)")
    p.add_argument("--pivot", type=int, help="variable to push to the leaves (push)")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("opt", help="optimal search trees")
    p.add_argument("input")
    q = p.add_mutually_exclusive_group()
    q.add_argument("--size", action="store_true", help="print the optimal size (default)")
    q.add_argument("--tree", action="store_true", help="print an optimal tree")
    q.add_argument("--roots", action="store_true", help="print every optimal root variable")
    q.add_argument("--obv", type=int, metavar="VAR", help="is VAR an optimal branching variable")
    q.add_argument("--ots", type=int, metavar="K", help="is there a tree of size at most K")
    p.add_argument("--method", choices=[k.value for k in Kind])
    p.add_argument("--allowed", help="branchable variables, comma separated")
    p.add_argument("--budget", type=int, help="node budget")
    p.add_argument("--no-decompose", action="store_true", help="do not split variable-disjoint parts")
    p.set_defaults(func=cmd_opt)

    p = sub.add_parser("res", help="regular resolution")
    p.add_argument("input")
    q = p.add_mutually_exclusive_group()
    q.add_argument("--min-size", action="store_true", help="print the minimum proof size (default)")
    q.add_argument("--witness", action="store_true", help="print a minimum proof trace")
    q.add_argument("--orp", nargs=2, metavar=("C1", "C2"), help="optimal resolution pair question")
    q.add_argument("--validate", metavar="PROOF", help="check a proof trace")
    p.add_argument("--budget", type=int, help="largest step count searched")
    p.set_defaults(func=cmd_res)

    p = sub.add_parser("reduce", help="build a reduction instance")
    p.add_argument("kind", choices=["paritysat", "otsconp", "otstoobv", "eminsat", "orp"])
    p.add_argument("inputs", nargs="+")
    p.add_argument("--method", choices=[k.value for k in Kind])
    p.add_argument("--k", type=int)
    p.add_argument("--x", help="X variables for eminsat")
    p.add_argument("--y", help="Y variables for eminsat")
    p.add_argument("--hard-threshold", type=int)
    p.add_argument("--rename", action="store_true", help="shift paritysat inputs apart")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("verify", help="run a law suite")
    p.add_argument("suite", choices=suite_names() + ["all"])
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-vars", type=int, default=4)
    p.add_argument("--budget", type=int, help="node budget per oracle call")
    p.add_argument("--report", help="write the JSON report here")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("export-dot", help="Graphviz output for a tree or a proof")
    p.add_argument("what", choices=["tree", "proof"])
    p.add_argument("input", help="tree text or file; proof trace file")
    p.set_defaults(func=cmd_export_dot)
    return ap


def run_command(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else 0
    try:
        return args.func(args)
    except BudgetExhausted as e:
        print(f"budget exhausted: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except NoRefutation as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAIL
    except (UsageError, UnknownSuite, cnf.FormulaError, TreeSyntaxError, GadgetError, ReductionError,
            ResolutionError, SharedVariables, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(run_command())


if __name__ == "__main__":
    main()
