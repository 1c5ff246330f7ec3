"""Restricted-branching gadgets and formulas of exactly known optimal size.

Under DPLL-Mono with branching restricted to the non-auxiliary variables,
``c_X(F)`` forces a complete tree over X above everything else:

    s(c_X(F)) = 2^|X| - 1 + sum over X' of s(F|X')

where X' ranges over the total assignments to X.
"""

from __future__ import annotations

from typing import Iterable

from . import cnf
from .combinators import FreshAllocator, sum_formulas, to_dpll_equivalent
from .families import complete_k
from .trees import Kind, TreeDiscipline


class GadgetError(ValueError):
    pass


def c_gadget(f: cnf.Formula, xs: Iterable[int], alloc: FreshAllocator) -> cnf.Formula:
    """The c_X clause set; X variables need not occur in ``f``."""
    alloc.reserve(f)
    xs = sorted(set(xs))
    a = alloc.new("a")
    b = alloc.new("b")
    vs = [alloc.new("v") for _ in xs]
    out = {c | {-a, -b} for c in f}
    for x, v in zip(xs, vs):
        out.add(frozenset((-x, v)))
        out.add(frozenset((x, v)))
    wide = frozenset(-v for v in vs)
    out.add(wide | {a})
    out.add(wide | {b})
    return frozenset(out)


def c_transform(f: cnf.Formula, xs: Iterable[int], alloc: FreshAllocator) -> cnf.Formula:
    xs = frozenset(xs)
    extra = xs - cnf.variables(f)
    if extra:
        raise GadgetError(f"variables {sorted(extra)} do not occur in the formula")
    return c_gadget(f, xs, alloc)


def zero_block(alloc: FreshAllocator) -> cnf.Formula:
    """``{z, ¬z}``: refuted by unit propagation alone."""
    z = alloc.new("z")
    return cnf.formula([[z], [-z]])


def mono_sum(f: cnf.Formula, g: cnf.Formula, alloc: FreshAllocator) -> tuple[cnf.Formula, int]:
    """Sum for DPLL-Mono: ``c_{x}((F ∨ x) ∪ (G ∨ ¬x))``, size s(F) + s(G) + 1."""
    inner, x = sum_formulas(f, g, alloc)
    return c_gadget(inner, [x], alloc), x


def v_formula(n: int, alloc: FreshAllocator) -> cnf.Formula:
    """V_n = c_X({y, ¬y}) over n fresh X variables; optimal DMST size 2^n - 1."""
    if n < 0:
        raise GadgetError("n must be non-negative")
    xs = alloc.block(n, "x")
    y = alloc.new("y")
    return c_gadget(cnf.formula([[y], [-y]]), xs, alloc)


def e_transform(g: cnf.Formula, alloc: FreshAllocator, xs: Iterable[int] | None = None) -> cnf.Formula:
    """Formula of optimal DMST size 2^(n+1) - 1 + 2|Mod(G)|, with n = |X|.

    Built as ``c_{X ∪ {y}}(G ∪ I_1)`` for a fresh y: the complete tree runs
    over n + 1 variables and every leaf that satisfies G still has to refute
    the size-1 block.
    """
    xs = cnf.variables(g) if xs is None else frozenset(xs)
    if not cnf.variables(g) <= xs:
        raise GadgetError("G mentions variables outside X")
    alloc.reserve(g, cnf.formula([[x] for x in xs]))
    y = alloc.new("y")
    one = exact_size_formula(1, TreeDiscipline(Kind.DPLL_MONO), alloc)
    return c_gadget(g | one, set(xs) | {y}, alloc)


def _powers(m: int) -> list[int]:
    return [n for n in range(m.bit_length() - 1, -1, -1) if m >> n & 1]


def exact_size_formula(m: int, kind: TreeDiscipline, alloc: FreshAllocator, method: str = "binary") -> cnf.Formula:
    """A formula whose optimal tree size under ``kind`` is exactly ``m``.

    ``binary`` sums one block of size 2^n - 1 per set bit of m (each sum adds
    one more node); ``unary`` chains m sums of size-0 blocks.  Backtracking
    uses the empty clause and complete formulas, DPLL-Mono the zero block and
    V_n.  For DPLL the backtracking block goes through the DPLL-equivalent image.
    Under DPLL-Mono only the non-auxiliary variables may be branched on.
    """
    if m < 0:
        raise GadgetError("size must be non-negative")
    if method not in ("binary", "unary"):
        raise GadgetError(f"unknown method {method!r}")
    k = kind.kind if isinstance(kind, TreeDiscipline) else Kind(kind)
    steps = _powers(m) if method == "binary" else [0] * m
    if k is Kind.DPLL:
        bt = exact_size_formula(m, TreeDiscipline(Kind.BACKTRACKING), alloc, method)
        return to_dpll_equivalent(bt, alloc)
    if k is Kind.BACKTRACKING:
        f = cnf.FALSE
        for n in steps:
            f, _ = sum_formulas(f, complete_k(n, alloc), alloc)
        return f
    f = zero_block(alloc)
    for n in steps:
        block = zero_block(alloc) if n == 0 else v_formula(n, alloc)
        f, _ = mono_sum(f, block, alloc)
    return f
