"""Ways of combining formulas with predictable optimal tree sizes.

For variable-disjoint F and H the optimal backtracking tree sizes obey

    s(F ∪ H) = min(s(F), s(H))
    s(F +x H) = s(F) + s(H) + 1          (both unsatisfiable)
    s(F · H) = s(F)s(H) + s(F) + s(H)    (both unsatisfiable)
"""

from __future__ import annotations

from typing import Iterable

from . import cnf
from .trees import Node, SearchTree, replace_empty

# roles whose variables are never branched on under restricted branching
AUX_ROLES = frozenset({"v", "a", "b", "z"})


class SharedVariables(ValueError):
    pass


class FreshAllocator:
    """Hands out variable ids above every id seen so far, remembering roles."""

    def __init__(self, next_id: int = 1):
        if next_id < 1:
            raise ValueError("variable ids start at 1")
        self.next_id = next_id
        self.roles: dict[int, str] = {}
        # shadow variable -> original, filled by the DPLL-equivalent and shield images
        self.shadow: dict[int, int] = {}

    @classmethod
    def above(cls, *formulas: cnf.Formula) -> "FreshAllocator":
        return cls(cnf.max_var(*formulas) + 1)

    def reserve(self, *formulas: cnf.Formula) -> None:
        self.next_id = max(self.next_id, cnf.max_var(*formulas) + 1)

    def new(self, role: str = "fresh") -> int:
        v = self.next_id
        self.next_id += 1
        self.roles[v] = role
        return v

    def block(self, n: int, role: str = "fresh") -> list[int]:
        return [self.new(role) for _ in range(n)]

    def auxiliary(self) -> frozenset[int]:
        return frozenset(v for v, r in self.roles.items() if r in AUX_ROLES)

    def branchable(self, f: cnf.Formula) -> frozenset[int]:
        return cnf.variables(f) - self.auxiliary()

    def role_table(self) -> dict[str, list[int]]:
        table: dict[str, list[int]] = {}
        for v, r in sorted(self.roles.items()):
            table.setdefault(r, []).append(v)
        return table


def check_disjoint(*fs: cnf.Formula) -> None:
    seen: set[int] = set()
    for f in fs:
        vs = cnf.variables(f)
        if seen & vs:
            raise SharedVariables(f"formulas share variables {sorted(seen & vs)}")
        seen |= vs


def union_disjoint(f: cnf.Formula, h: cnf.Formula) -> cnf.Formula:
    check_disjoint(f, h)
    return f | h


def sum_formulas(f: cnf.Formula, h: cnf.Formula, alloc: FreshAllocator) -> tuple[cnf.Formula, int]:
    """``F +x H = (F ∨ x) ∪ (H ∨ ¬x)`` with a fresh connective ``x``."""
    check_disjoint(f, h)
    alloc.reserve(f, h)
    x = alloc.new("sum")
    return cnf.disjunction(x, f) | cnf.disjunction(-x, h), x


def product(f: cnf.Formula, h: cnf.Formula) -> cnf.Formula:
    check_disjoint(f, h)
    return frozenset(g | d for g in f for d in h)


def product_tree(tf: SearchTree, th: SearchTree) -> SearchTree:
    """Put a copy of ``th`` in place of every empty subtree of ``tf``."""
    return replace_empty(tf, th)


def _shadow_pairs(xs: Iterable[int], alloc: FreshAllocator) -> tuple[dict[int, int], set]:
    ys = {}
    pairs = set()
    for x in sorted(xs):
        y = alloc.new("shadow")
        alloc.shadow[y] = x
        ys[x] = y
        pairs.add(frozenset((x, -y)))
        pairs.add(frozenset((-x, y)))
    return ys, pairs


def to_dpll_equivalent(f: cnf.Formula, alloc: FreshAllocator) -> cnf.Formula:
    """Formula whose DPLL trees are exactly the backtracking trees of ``f``.

    Each variable x gets a shadow y tied to it by ``x ∨ ¬y, ¬x ∨ y``; every
    literal x becomes ``x ∨ y`` and every ¬x becomes ``¬x ∨ ¬y``.  The shadow
    map y -> x is recorded in ``alloc.shadow``.
    """
    alloc.reserve(f)
    ys, pairs = _shadow_pairs(cnf.variables(f), alloc)
    image = set(pairs)
    for c in f:
        lits = set()
        for lit in c:
            y = ys[abs(lit)]
            lits.add(lit)
            lits.add(y if lit > 0 else -y)
        image.add(frozenset(lits))
    return frozenset(image)


class UnknownVariable(ValueError):
    pass


def lemma1_tree_back(t: SearchTree, mapping: dict[int, int], originals=None) -> SearchTree:
    """Turn a DPLL tree of the DPLL-equivalent image back into a backtracking tree.

    Shadow nodes are relabelled with their original variable.  The pair
    clauses make y equivalent to x, so the false/true subtrees keep their
    places.  ``originals`` optionally lists the legal non-shadow variables.
    """
    if t is None:
        return None
    if t.var in mapping:
        var = mapping[t.var]
    elif originals is None or t.var in originals:
        var = t.var
    else:
        raise UnknownVariable(f"variable {t.var} belongs to neither alphabet")
    return Node(var, lemma1_tree_back(t.left, mapping, originals), lemma1_tree_back(t.right, mapping, originals))


def mono_shield(f: cnf.Formula, alloc: FreshAllocator) -> cnf.Formula:
    """``{x ∨ ¬y, ¬x ∨ y} ∪ F``: the monotone literal rule never applies to it."""
    alloc.reserve(f)
    _, pairs = _shadow_pairs(cnf.variables(f), alloc)
    return frozenset(pairs) | f
