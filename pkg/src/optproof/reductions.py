"""Reductions from satisfiability-style problems to optimal tree questions.

Each builder returns a ``ReductionOutput``; ``decide`` asks the oracle the
question the reduction poses (optimal branching variable or tree size bound)
so it can be compared with the ground truth computed directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import cnf
from .combinators import FreshAllocator, check_disjoint, sum_formulas, to_dpll_equivalent
from .gadgets import c_gadget, exact_size_formula, mono_sum
from .optimal import Oracle, OracleConfig
from .trees import BACKTRACKING, DPLL_MONO, INFINITE, Kind, TreeDiscipline


class ReductionError(ValueError):
    pass


@dataclass
class ReductionOutput:
    formula: cnf.Formula
    discipline: TreeDiscipline
    expected_semantics: str
    distinguished: Optional[int] = None
    bound: Optional[int] = None
    # for resolution-pair reductions: two (gamma, delta) leaf pairs
    pairs: tuple = ()
    roles: dict = field(default_factory=dict)

    def sidecar(self) -> dict:
        d = self.discipline
        return {
            "method": d.kind.value,
            "allowed": None if d.allowed is None else sorted(d.allowed),
            "distinguished": self.distinguished,
            "bound": self.bound,
            "pairs": [[cnf.sorted_clause(g), cnf.sorted_clause(h)] for g, h in self.pairs],
            "roles": self.roles,
            "semantics": self.expected_semantics,
        }


def _kind(kind) -> Kind:
    return kind.kind if isinstance(kind, TreeDiscipline) else Kind(kind)


def decide(out: ReductionOutput, node_budget: Optional[int] = None, decompose: bool = True) -> bool:
    """OBV(formula, distinguished) or OTS(formula, bound), whichever is posed.

    Decomposition into variable-disjoint parts is on by default; the union
    law it relies on is checked on its own with decomposition off.
    """
    o = Oracle(out.formula, OracleConfig(out.discipline, node_budget, decompose=decompose))
    if out.distinguished is not None:
        if o.size() == INFINITE:
            return False
        return o.is_root(out.distinguished)
    if out.bound is not None:
        return o.within(out.bound)
    raise ReductionError("reduction poses neither a branching nor a size question")


def _oracle_size(f, kind: Kind) -> float:
    d = TreeDiscipline(Kind.BACKTRACKING if kind is Kind.DPLL else kind)
    return Oracle(f, OracleConfig(d)).size()


def _finish(f: cnf.Formula, kind: Kind, alloc: FreshAllocator) -> tuple[cnf.Formula, TreeDiscipline]:
    if kind is Kind.DPLL:
        f = to_dpll_equivalent(f, alloc)
        return f, TreeDiscipline(Kind.DPLL)
    if kind is Kind.DPLL_MONO:
        return f, TreeDiscipline(Kind.DPLL_MONO, alloc.branchable(f))
    return f, BACKTRACKING


# parity(sat)


def first_unsat_index(seq: Sequence[cnf.Formula]) -> Optional[int]:
    for i, f in enumerate(seq, 1):
        if not cnf.is_satisfiable(f):
            return i
    return None


def reduce_parity_sat(seq: Sequence[cnf.Formula], kind=BACKTRACKING, alloc: FreshAllocator | None = None,
                      hard_size: Optional[int] = None) -> ReductionOutput:
    """``G ∪ D`` whose sum variable x is an optimal branching variable
    iff the first unsatisfiable formula of ``seq`` has odd index.

    Every padding block H has the same exact size, chosen above the largest
    optimal size among the unsatisfiable members of ``seq`` unless given.
    """
    kind = _kind(kind)
    if kind is Kind.DPLL_MONO:
        raise ReductionError("parity reduction is built for backtracking and DPLL")
    r = len(seq)
    if r == 0 or r % 2:
        raise ReductionError("sequence length must be even and positive")
    check_disjoint(*seq)
    if cnf.is_satisfiable(seq[-1]) or cnf.is_satisfiable(seq[-2]):
        raise ReductionError("the last two formulas must be unsatisfiable")
    sizes = [_oracle_size(f, Kind.BACKTRACKING) for f in seq]
    need = max(s for s in sizes if s != INFINITE) + 1
    if hard_size is None:
        hard_size = need
    elif hard_size < need:
        raise ReductionError(f"hard block size must exceed every s(F_i); need at least {need}")
    alloc = alloc or FreshAllocator()
    alloc.reserve(*seq)

    def h():
        return exact_size_formula(hard_size, BACKTRACKING, alloc)

    def add(f, g):
        return sum_formulas(f, g, alloc)[0]

    def chain(fs):
        # F_a ∪ (H + H + (F_{a+2} ∪ ...(F_last)))
        out = fs[-1]
        for f in reversed(fs[:-1]):
            out = f | add(h(), add(h(), out))
        return out

    odd, even = list(seq[0::2]), list(seq[1::2])
    g, x = sum_formulas(cnf.FALSE, chain(odd), alloc)
    d = add(h(), chain(even))
    f, disc = _finish(g | d, kind, alloc)
    return ReductionOutput(
        f, disc,
        "distinguished variable is an optimal branching variable iff the first unsatisfiable formula has odd index",
        distinguished=x,
        roles=alloc.role_table(),
    )


# OTS is coNP-hard


def reduce_ots_conp(g: cnf.Formula, kind=BACKTRACKING, alloc: FreshAllocator | None = None) -> ReductionOutput:
    """``G ∪ H`` with s(H) = 2^(n+1) and bound 2^n: a tree within the bound
    exists iff G is unsatisfiable."""
    kind = _kind(kind)
    alloc = alloc or FreshAllocator()
    alloc.reserve(g)
    n = len(cnf.variables(g))
    block = Kind.DPLL_MONO if kind is Kind.DPLL_MONO else Kind.BACKTRACKING
    hard = exact_size_formula(2 ** (n + 1), TreeDiscipline(block), alloc)
    f, disc = _finish(g | hard, kind, alloc)
    return ReductionOutput(
        f, disc,
        "a tree within the bound exists iff G is unsatisfiable",
        bound=2 ** n,
        roles=alloc.role_table(),
    )


# OTS to OBV under DPLL-Mono


def reduce_ots_to_obv(g: cnf.Formula, k: int, alloc: FreshAllocator | None = None) -> ReductionOutput:
    """``(⊥ +_a G) ∪ I_{k+1}`` with the gadget sum: a is an optimal
    branching variable iff s(G) <= k, under restricted DPLL-Mono."""
    if k < 0:
        raise ReductionError("k must be non-negative")
    alloc = alloc or FreshAllocator()
    alloc.reserve(g)
    left, a = mono_sum(cnf.FALSE, g, alloc)
    pad = exact_size_formula(k + 1, DPLL_MONO, alloc)
    f = left | pad
    return ReductionOutput(
        f, TreeDiscipline(Kind.DPLL_MONO, alloc.branchable(f)),
        "distinguished variable is an optimal branching variable iff s(G) <= k",
        distinguished=a,
        roles=alloc.role_table(),
    )


# e-minsat


def eminsat_holds(f: cnf.Formula, xs, ys) -> bool:
    """Is there an assignment to X under which at most half of the Y-assignments satisfy F?"""
    xs, ys = sorted(xs), sorted(ys)
    half = 2 ** len(ys) // 2
    for bits in range(2 ** len(xs)):
        assign = {x: bool(bits >> i & 1) for i, x in enumerate(xs)}
        if cnf.count_models(cnf.restrict(f, assign), ys) <= half:
            return True
    return False


def eminsat_k(n: int) -> int:
    # Smallest pad that caps exactly the restrictions with more than half
    # of the Y-models; the cap must sit inside [2^n - 1, 2^(n+1) - 1].
    return 2 ** n + 2 ** (n - 1)


def reduce_eminsat(f: cnf.Formula, xs, ys, alloc: FreshAllocator | None = None) -> ReductionOutput:
    """``c_X(c_Y(F ∪ I_1) ∪ I_k)`` with a size bound met iff some X-assignment
    leaves F with at most half of its Y-models."""
    xs, ys = frozenset(xs), frozenset(ys)
    n = len(xs)
    if n != len(ys):
        raise ReductionError("|X| and |Y| must be equal")
    if n == 0:
        raise ReductionError("need at least one X variable")
    if xs & ys:
        raise ReductionError("X and Y overlap")
    if not cnf.variables(f) <= xs | ys:
        raise ReductionError("F mentions variables outside X ∪ Y")
    alloc = alloc or FreshAllocator()
    alloc.reserve(f, cnf.formula([[v] for v in xs | ys]))
    k = eminsat_k(n)
    one = exact_size_formula(1, DPLL_MONO, alloc)
    inner = c_gadget(f | one, ys, alloc)
    pad = exact_size_formula(k, DPLL_MONO, alloc)
    out = c_gadget(inner | pad, xs, alloc)
    for v in xs:
        alloc.roles.setdefault(v, "X")
    for v in ys:
        alloc.roles.setdefault(v, "Y")
    allowed = (alloc.branchable(out) | xs | ys)
    return ReductionOutput(
        out, TreeDiscipline(Kind.DPLL_MONO, allowed),
        "a tree within the bound exists iff some X-assignment leaves at most half of the Y-models",
        bound=2 ** n + 2 ** n * k - 2,
        roles=alloc.role_table(),
    )
