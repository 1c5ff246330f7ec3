"""Seeded law-checking harness.

Each suite draws random instances, computes both sides of a size identity
with the oracles and records every disagreement.  Reports carry no timing
so that the same seed and flags always give byte-identical JSON.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import random
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

from . import cnf
from .combinators import (FreshAllocator, lemma1_tree_back, mono_shield, product, product_tree,
                          sum_formulas, to_dpll_equivalent)
from .gadgets import c_transform, e_transform, exact_size_formula
from .optimal import BudgetExhausted, Oracle, OracleConfig
from .reductions import (decide, eminsat_holds, first_unsat_index, reduce_eminsat, reduce_ots_conp,
                         reduce_ots_to_obv, reduce_parity_sat)
from .resolution import all_min_regular_proofs, g_transform, has_leaf_step, min_regular_size, reduce_orp, is_optimal_resolution_pair
from .trees import BACKTRACKING, DPLL, DPLL_MONO, INFINITE, Kind, TreeDiscipline, tree_size, validate_tree


class UnknownSuite(ValueError):
    pass


# random instances


def random_formula(rng: random.Random, variables, n_clauses: int, max_width: int = 3) -> cnf.Formula:
    """Random k-CNF, k = min(max_width, n); one clause in four is a literal shorter."""
    variables = list(variables)
    k = min(max_width, len(variables))
    out = set()
    for _ in range(n_clauses):
        w = k - 1 if k > 1 and rng.random() < 0.25 else k
        vs = rng.sample(variables, w)
        out.add(frozenset(v if rng.random() < 0.5 else -v for v in vs))
    return frozenset(out)


def random_sized(rng: random.Random, variables, max_clauses: int = 0) -> cnf.Formula:
    """Random CNF with up to about four clauses per variable."""
    n = len(variables)
    hi = max_clauses or 4 * n + 2
    return random_formula(rng, variables, rng.randint(min(n + 1, hi), hi))


def random_unsat(rng: random.Random, variables, max_clauses: int = 0) -> cnf.Formula:
    while True:
        f = random_sized(rng, variables, max_clauses)
        if not cnf.is_satisfiable(f):
            return f


def random_sat(rng: random.Random, variables, max_clauses: int = 0) -> cnf.Formula:
    while True:
        f = random_sized(rng, variables, max_clauses)
        if cnf.is_satisfiable(f):
            return f


def _vars(rng, max_vars, start=1, least=1):
    n = rng.randint(least, max(least, max_vars))
    return list(range(start, start + n))


def fingerprint(*parts) -> str:
    text = "|".join(cnf.format_formula(p) if isinstance(p, frozenset) else str(p) for p in parts)
    return hashlib.sha256(text.encode()).hexdigest()[:12]


def _num(v):
    return "inf" if v == INFINITE else v


# report


@dataclass
class LawSuiteReport:
    suite: str
    samples: int
    seed: int
    max_vars: int
    instances: int = 0
    failures: list = field(default_factory=list)
    budget_exhaustions: int = 0
    exploratory: bool = False
    elapsed: float = 0.0  # kept out of the JSON form

    @property
    def passed(self) -> bool:
        return self.exploratory or not self.failures

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "samples": self.samples,
            "seed": self.seed,
            "max_vars": self.max_vars,
            "instances": self.instances,
            "failures": sorted(self.failures, key=lambda d: (d["fingerprint"], json.dumps(d, sort_keys=True))),
            "budget_exhaustions": self.budget_exhaustions,
            "exploratory": self.exploratory,
            "passed": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


class _Ctx:
    def __init__(self, rng: random.Random, max_vars: int, node_budget: Optional[int]):
        self.rng = rng
        self.max_vars = max_vars
        self.node_budget = node_budget

    def size(self, f, d: TreeDiscipline = BACKTRACKING):
        return Oracle(f, OracleConfig(d, self.node_budget)).size()

    def oracle(self, f, d: TreeDiscipline = BACKTRACKING) -> Oracle:
        return Oracle(f, OracleConfig(d, self.node_budget))

    def pair(self):
        f = random_unsat(self.rng, _vars(self.rng, self.max_vars))
        h = random_unsat(self.rng, _vars(self.rng, self.max_vars, start=self.max_vars + 1))
        return f, h


# each check returns a list of (fingerprint, expected, actual, what) mismatches


def _law_union(c: _Ctx):
    f, h = c.pair()
    want = min(c.size(f), c.size(h))
    got = c.size(f | h)
    return [(fingerprint(f, h), want, got, "s(F∪H)")] if want != got else []


def _law_sum(c: _Ctx):
    f, h = c.pair()
    alloc = FreshAllocator.above(f, h)
    g, x = sum_formulas(f, h, alloc)
    o = c.oracle(g)
    want = c.size(f) + c.size(h) + 1
    out = []
    if o.size() != want:
        out.append((fingerprint(f, h), want, o.size(), "s(F+H)"))
    if not o.is_root(x):
        out.append((fingerprint(f, h), True, False, "connective is an optimal root"))
    return out


def _law_product(c: _Ctx):
    f, h = c.pair()
    sf, sh = c.size(f), c.size(h)
    p = product(f, h)
    want = sf * sh + sf + sh
    got = c.size(p)
    out = []
    if got != want:
        out.append((fingerprint(f, h), want, got, "s(F·H)"))
    t = product_tree(c.oracle(f).tree(), c.oracle(h).tree())
    if not validate_tree(p, t) or tree_size(t) != want:
        out.append((fingerprint(f, h), want, tree_size(t), "product tree"))
    return out


def _law_lemma1(c: _Ctx):
    f = random_unsat(c.rng, _vars(c.rng, c.max_vars))
    alloc = FreshAllocator.above(f)
    g = to_dpll_equivalent(f, alloc)
    want = c.size(f)
    o = c.oracle(g, DPLL)
    out = []
    if o.size() != want:
        out.append((fingerprint(f), want, o.size(), "s_DPLL(image)"))
    back = lemma1_tree_back(o.tree(), alloc.shadow, cnf.variables(f))
    if not validate_tree(f, back) or tree_size(back) != want:
        out.append((fingerprint(f), want, tree_size(back), "tree mapped back"))
    return out


def _law_shield(c: _Ctx):
    vs = _vars(c.rng, c.max_vars)
    f = random_unsat(c.rng, vs) if c.rng.random() < 0.8 else random_sized(c.rng, vs)
    g = mono_shield(f, FreshAllocator.above(f))
    want = c.size(f, DPLL_MONO)
    got = c.size(g, DPLL)
    return [(fingerprint(f), _num(want), _num(got), "s_DPLL(shield)")] if want != got else []


def _law_cx(c: _Ctx):
    rng = c.rng
    nx, ny = rng.randint(0, 2), rng.randint(0, 2)
    xs, ys = list(range(1, nx + 1)), list(range(nx + 1, nx + ny + 1))
    if not xs and not ys:
        ys = [1]
    f = random_unsat(rng, xs + ys, 6) if rng.random() < 0.7 else random_sized(rng, xs + ys, 6)
    xs = sorted(cnf.variables(f) & set(xs))
    rest = cnf.variables(f) - set(xs)
    alloc = FreshAllocator.above(f)
    g = c_transform(f, xs, alloc)
    got = c.size(g, TreeDiscipline(Kind.DPLL_MONO, frozenset(cnf.variables(f))))
    want = 2 ** len(xs) - 1
    for bits in itertools.product((False, True), repeat=len(xs)):
        part = cnf.restrict(f, dict(zip(xs, bits)))
        want += c.size(part, TreeDiscipline(Kind.DPLL_MONO, frozenset(rest)))
    return [(fingerprint(f, xs), _num(want), _num(got), "s(c_X(F))")] if want != got else []


def all_small_formulas(xs, max_clauses: int):
    """Every formula over ``xs`` with at most ``max_clauses`` non-tautological clauses."""
    lits = [l for v in xs for l in (v, -v)]
    clauses = [frozenset(c) for w in range(len(xs) + 1) for c in itertools.combinations(lits, w)
               if not cnf.is_tautology(frozenset(c))]
    for k in range(max_clauses + 1):
        for combo in itertools.combinations(clauses, k):
            yield frozenset(combo)


def ex_size_case(g, xs, size_fn) -> tuple:
    alloc = FreshAllocator.above(g, cnf.formula([[x] for x in xs]))
    e = e_transform(g, alloc, xs)
    allowed = alloc.branchable(e) | set(xs)
    want = 2 ** (len(xs) + 1) - 1 + 2 * cnf.count_models(g, xs)
    got = size_fn(e, TreeDiscipline(Kind.DPLL_MONO, frozenset(allowed)))
    return want, got


def _law_ex(c: _Ctx):
    xs = list(range(1, c.rng.randint(1, 2) + 1))
    g = random_formula(c.rng, xs, c.rng.randint(0, 3), 2)
    want, got = ex_size_case(g, xs, c.size)
    return [(fingerprint(g, xs), want, _num(got), "s(e_X(G))")] if want != got else []


def _law_exact(c: _Ctx):
    m = c.rng.randint(0, 12)
    kind = c.rng.choice([BACKTRACKING, DPLL_MONO, DPLL])
    alloc = FreshAllocator()
    f = exact_size_formula(m, kind, alloc)
    allowed = alloc.branchable(f) if kind.kind is Kind.DPLL_MONO else None
    got = c.size(f, TreeDiscipline(kind.kind, allowed))
    return [(fingerprint(m, kind.kind.value), m, _num(got), "exact size")] if got != m else []


RES_VARS = 3


def _res_pair(c: _Ctx):
    n = min(c.max_vars, RES_VARS)
    f = random_unsat(c.rng, _vars(c.rng, n), 5)
    h = random_unsat(c.rng, _vars(c.rng, n, start=n + 1), 5)
    return f, h


def _law_res_union(c: _Ctx):
    f, h = _res_pair(c)
    budget = 16
    want = min(min_regular_size(f, budget, c.node_budget), min_regular_size(h, budget, c.node_budget))
    got = min_regular_size(f | h, budget, c.node_budget)
    return [(fingerprint(f, h), want, got, "regular size of union")] if want != got else []


def gx_instance(rng: random.Random, max_vars: int):
    """An unsatisfiable F and a clause γ that F cannot do without."""
    while True:
        f = random_unsat(rng, _vars(rng, min(max_vars, RES_VARS)), 5)
        needed = [c for c in cnf.sorted_clauses(f) if cnf.is_satisfiable(f - {frozenset(c)})]
        if needed:
            return f, frozenset(rng.choice(needed))


def gx_check(f, gamma, budget=16, node_budget=None) -> list:
    x = cnf.max_var(f) + 1
    g = g_transform(f, gamma, x)
    proofs = all_min_regular_proofs(g, budget, node_budget)
    problems = []
    if any(sum(s.pivot == x for s in p.steps) != 1 for p in proofs):
        problems.append("a minimum proof does not resolve x exactly once")
    if not any(has_leaf_step(p, frozenset([x]), gamma | {-x}) for p in proofs):
        problems.append("no minimum proof resolves x at the leaves")
    return problems


def _law_res_gx(c: _Ctx):
    f, gamma = gx_instance(c.rng, c.max_vars)
    return [(fingerprint(f, sorted(gamma)), "ok", p, "g_x proofs") for p in gx_check(f, gamma, node_budget=c.node_budget)]


def _random_parity_seq(rng, r):
    seq, start = [], 1
    for i in range(r):
        vs = list(range(start, start + rng.randint(1, 3)))
        start = vs[-1] + 1
        unsat = i >= r - 2 or rng.random() < 0.4
        seq.append(random_unsat(rng, vs, 6) if unsat else random_sat(rng, vs, 6))
    return seq


def _law_reductions(c: _Ctx):
    rng = c.rng
    which = rng.choice(["paritysat", "otsconp", "otstoobv", "eminsat"])
    nb = c.node_budget
    if which == "paritysat":
        seq = _random_parity_seq(rng, rng.choice([2, 4]))
        want = first_unsat_index(seq) % 2 == 1
        got = decide(reduce_parity_sat(seq), nb)
        key = fingerprint(which, *seq)
    elif which == "otsconp":
        vs = _vars(rng, min(c.max_vars, 3))
        g = random_sized(rng, vs, 6)
        kind = rng.choice([BACKTRACKING, DPLL, DPLL_MONO])
        want = not cnf.is_satisfiable(g)
        got = decide(reduce_ots_conp(g, kind), nb)
        key = fingerprint(which, g, kind.kind.value)
    elif which == "otstoobv":
        vs = _vars(rng, min(c.max_vars, 3))
        g = random_sized(rng, vs, 6)
        k = rng.randint(0, 4)
        s = c.size(g, TreeDiscipline(Kind.DPLL_MONO, frozenset(vs)))
        want = s <= k
        got = decide(reduce_ots_to_obv(g, k), nb)
        key = fingerprint(which, g, k)
    else:
        f = random_formula(rng, [1, 2], rng.randint(0, 3), 2)
        want = eminsat_holds(f, [1], [2])
        got = decide(reduce_eminsat(f, [1], [2]), nb)
        key = fingerprint(which, f)
    return [(key, want, got, which)] if want != got else []


def _law_orp(c: _Ctx):
    f = random_sized(c.rng, _vars(c.rng, min(c.max_vars, 2)), 4)
    out = reduce_orp(f)
    (g1, d1), (g2, d2) = out.pairs
    unsat = not cnf.is_satisfiable(f)
    got = (is_optimal_resolution_pair(out.formula, g1, d1, 24, c.node_budget),
           is_optimal_resolution_pair(out.formula, g2, d2, 24, c.node_budget))
    want = (unsat, not unsat)
    return [(fingerprint(f), list(want), list(got), "orp")] if want != got else []


def _law_cross(c: _Ctx):
    f = random_unsat(c.rng, _vars(c.rng, min(c.max_vars, RES_VARS)), 6)
    bt, dp, mono = c.size(f), c.size(f, DPLL), c.size(f, DPLL_MONO)
    reg = min_regular_size(f, bt, c.node_budget)
    out = []
    if not reg <= bt:
        out.append((fingerprint(f), f"<= {bt}", reg, "regular vs backtracking"))
    if not dp <= mono <= bt:
        out.append((fingerprint(f), "dpll <= mono <= bt", [dp, mono, bt], "tree disciplines"))
    return out


# exploratory: do sum and product laws carry over to regular resolution?


def _explore_res_sum(c: _Ctx):
    n = min(c.max_vars, 2)
    f = random_unsat(c.rng, _vars(c.rng, n), 4)
    h = random_unsat(c.rng, _vars(c.rng, n, start=n + 1), 4)
    g, _ = sum_formulas(f, h, FreshAllocator.above(f, h))
    want = min_regular_size(f, 16, c.node_budget) + min_regular_size(h, 16, c.node_budget) + 1
    got = min_regular_size(g, 24, c.node_budget)
    return [(fingerprint(f, h), want, got, "regular size of sum")] if want != got else []


def _explore_res_product(c: _Ctx):
    n = min(c.max_vars, 2)
    f = random_unsat(c.rng, _vars(c.rng, n), 3)
    h = random_unsat(c.rng, _vars(c.rng, n, start=n + 1), 3)
    sf, sh = min_regular_size(f, 16, c.node_budget), min_regular_size(h, 16, c.node_budget)
    want = sf * sh + sf + sh
    got = min_regular_size(product(f, h), want + 2, c.node_budget)
    return [(fingerprint(f, h), want, got, "regular size of product")] if want != got else []


SUITES: dict[str, Callable] = {
    "union": _law_union,
    "sum": _law_sum,
    "product": _law_product,
    "lemma1": _law_lemma1,
    "shield": _law_shield,
    "cx-size": _law_cx,
    "ex-size": _law_ex,
    "exact-size": _law_exact,
    "res-union": _law_res_union,
    "res-gx": _law_res_gx,
    "reductions": _law_reductions,
    "orp": _law_orp,
    "cross": _law_cross,
}
EXPLORATORY: dict[str, Callable] = {
    "res-sum": _explore_res_sum,
    "res-product": _explore_res_product,
}


def suite_names() -> list[str]:
    return sorted(SUITES) + sorted(EXPLORATORY)


def run_law_suite(suite: str, samples: int, seed: int, max_vars: int = 4,
                  node_budget: Optional[int] = None) -> LawSuiteReport:
    check = SUITES.get(suite) or EXPLORATORY.get(suite)
    if check is None:
        raise UnknownSuite(f"unknown suite {suite!r}; choose from {', '.join(suite_names())}")
    if samples < 0 or max_vars < 1:
        raise ValueError("samples must be non-negative and max_vars positive")
    report = LawSuiteReport(suite, samples, seed, max_vars, exploratory=suite in EXPLORATORY)
    start = time.perf_counter()
    for i in range(samples):
        # one generator per sample keeps instances independent of earlier exhaustion
        rng = random.Random(f"{suite}:{seed}:{i}")
        ctx = _Ctx(rng, max_vars, node_budget)
        try:
            bad = check(ctx)
        except BudgetExhausted:
            report.budget_exhaustions += 1
            continue
        report.instances += 1
        for key, want, got, what in bad:
            report.failures.append({"fingerprint": key, "check": what, "expected": _num(want), "actual": _num(got)})
    report.elapsed = time.perf_counter() - start
    return report
