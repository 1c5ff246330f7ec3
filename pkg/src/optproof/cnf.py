"""CNF formulas over integer variables and the elementary operations on them.

Literals are nonzero ints in DIMACS style (``3`` is x3, ``-3`` is its
negation).  A clause is a ``frozenset`` of literals and a formula is a
``frozenset`` of clauses, so duplicate clauses collapse and equal formulas
hash equally.  The empty clause is ``frozenset()``.
"""

from __future__ import annotations

import itertools
import re
from typing import Iterable, Mapping

Clause = frozenset
Formula = frozenset
Assignment = Mapping[int, bool]

EMPTY_CLAUSE: Clause = frozenset()
FALSE: Formula = frozenset([EMPTY_CLAUSE])
TRUE: Formula = frozenset()


class FormulaError(ValueError):
    pass


def clause(*lits: int) -> Clause:
    for lit in lits:
        if not isinstance(lit, int) or lit == 0:
            raise FormulaError(f"bad literal {lit!r}")
    return frozenset(lits)


def formula(clauses: Iterable[Iterable[int]]) -> Formula:
    return frozenset(clause(*c) for c in clauses)


def variables(f: Formula | Clause) -> frozenset[int]:
    if f and isinstance(next(iter(f)), int):
        return frozenset(abs(lit) for lit in f)
    return frozenset(abs(lit) for c in f for lit in c)


def has_empty(f: Formula) -> bool:
    return EMPTY_CLAUSE in f


def is_tautology(c: Clause) -> bool:
    return any(-lit in c for lit in c)


def assignment_literals(assign: Assignment) -> frozenset[int]:
    return frozenset(v if val else -v for v, val in assign.items())


def restrict(f: Formula, assign: Assignment) -> Formula:
    """Simplify ``f`` under a partial assignment (the F|I operation)."""
    if not assign:
        return f
    true_lits = assignment_literals(assign)
    out = set()
    for c in f:
        if c & true_lits:
            continue
        out.add(frozenset(lit for lit in c if -lit not in true_lits))
    return frozenset(out)


def restrict_lit(f: Formula, lit: int) -> Formula:
    return restrict(f, {abs(lit): lit > 0})


def unit_propagate(f: Formula) -> tuple[Formula, dict[int, bool]]:
    """Propagate unit clauses to a fixpoint.

    A conflict shows up as the empty clause in the residual; propagation
    stops there.
    """
    forced: dict[int, bool] = {}
    while EMPTY_CLAUSE not in f:
        units = {next(iter(c)) for c in f if len(c) == 1}
        if not units:
            break
        for lit in units:
            if -lit in units:
                # both polarities forced at once: settle on the positive one
                forced[abs(lit)] = True
                return restrict(f, {abs(lit): True}), forced
        step = {abs(lit): lit > 0 for lit in units}
        forced.update(step)
        f = restrict(f, step)
    return f, forced


def pure_literals(f: Formula) -> dict[int, bool]:
    lits = {lit for c in f for lit in c}
    return {abs(lit): lit > 0 for lit in lits if -lit not in lits}


def pure_eliminate(f: Formula) -> tuple[Formula, dict[int, bool]]:
    """One simultaneous pass of the monotone literal rule."""
    pure = pure_literals(f)
    if not pure:
        return f, {}
    return restrict(f, pure), pure


def dpll_closure(f: Formula) -> Formula:
    """D(F): unit propagation and the monotone literal rule until nothing changes."""
    while True:
        f, _ = unit_propagate(f)
        if EMPTY_CLAUSE in f:
            return f
        f, pure = pure_eliminate(f)
        if not pure:
            return f


def up_closure(f: Formula) -> Formula:
    return unit_propagate(f)[0]


def is_satisfiable(f: Formula) -> bool:
    f, _ = unit_propagate(f)
    if EMPTY_CLAUSE in f:
        return False
    if not f:
        return True
    # branch on a literal of a shortest clause
    lit = next(iter(min(f, key=len)))
    return is_satisfiable(restrict_lit(f, lit)) or is_satisfiable(restrict_lit(f, -lit))


def count_models(f: Formula, universe: Iterable[int]) -> int:
    """Number of total assignments over ``universe`` satisfying ``f``."""
    universe = frozenset(universe)
    missing = variables(f) - universe
    if missing:
        raise FormulaError(f"universe lacks variables {sorted(missing)}")
    return _count(f, len(universe))


def _count(f: Formula, free: int) -> int:
    if EMPTY_CLAUSE in f:
        return 0
    if not f:
        return 1 << free
    v = abs(next(iter(min(f, key=len))))
    rest = free - 1
    return _count(restrict(f, {v: False}), rest) + _count(restrict(f, {v: True}), rest)


def brute_force_models(f: Formula, universe: Iterable[int]) -> int:
    """Truth-table model count; exponential, meant as a cross-check."""
    order = sorted(universe)
    total = 0
    for bits in itertools.product((False, True), repeat=len(order)):
        true_lits = {v if b else -v for v, b in zip(order, bits)}
        if all(c & true_lits for c in f):
            total += 1
    return total


def disjunction(lit: int, f: Formula) -> Formula:
    """``lit ∨ F``: add ``lit`` to every clause."""
    return frozenset(c | {lit} for c in f)


def rename(f: Formula, mapping: Mapping[int, int]) -> Formula:
    def ren(lit):
        v = mapping.get(abs(lit), abs(lit))
        return v if lit > 0 else -v

    return frozenset(frozenset(ren(lit) for lit in c) for c in f)


def max_var(*fs: Formula) -> int:
    return max((v for f in fs for v in variables(f)), default=0)


# canonical text form: {1 -2, 3}; the empty clause prints as []


def sorted_clause(c: Clause) -> list[int]:
    return sorted(c, key=lambda lit: (abs(lit), lit < 0))


def sorted_clauses(f: Formula) -> list[list[int]]:
    rows = [sorted_clause(c) for c in f]
    rows.sort(key=lambda row: [(abs(lit), lit < 0) for lit in row])
    return rows


def format_clause(c: Clause) -> str:
    if not c:
        return "[]"
    return " ".join(str(lit) for lit in sorted_clause(c))


def format_formula(f: Formula) -> str:
    return "{" + ", ".join(format_clause(frozenset(c)) for c in sorted_clauses(f)) + "}"


_TOKEN = re.compile(r"-?x?(\d+)")


def parse_clause(text: str) -> Clause:
    text = text.strip()
    if text in ("[]", "⊥", ""):
        return EMPTY_CLAUSE
    lits = []
    for tok in text.replace("∨", " ").replace("v", " ").split():
        tok = tok.replace("¬", "-").replace("~", "-")
        m = _TOKEN.fullmatch(tok)
        if not m:
            raise FormulaError(f"bad literal token {tok!r}")
        v = int(m.group(1))
        lits.append(-v if tok.startswith("-") else v)
    return clause(*lits)


def parse_formula(text: str) -> Formula:
    """Parse the canonical text form, e.g. ``{x1 -x2, x3}`` or ``{1 -2, []}``."""
    text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise FormulaError("formula text must be wrapped in braces")
    body = text[1:-1].strip()
    if not body:
        return TRUE
    return frozenset(parse_clause(part) for part in body.split(","))
