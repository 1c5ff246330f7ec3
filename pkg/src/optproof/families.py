"""Standard unsatisfiable families used as padding blocks and benchmarks."""

from __future__ import annotations

import itertools

from . import cnf
from .combinators import FreshAllocator


def complete_k(n: int, alloc: FreshAllocator) -> cnf.Formula:
    """All 2^n full-width clauses over n fresh variables.

    Every clause survives until all n variables are set, so each branch of a
    backtracking tree must set all of them: optimal size exactly 2^n - 1.
    """
    xs = alloc.block(n, "hard")
    return frozenset(
        frozenset(x if bit else -x for x, bit in zip(xs, signs))
        for signs in itertools.product((False, True), repeat=n)
    )


def pigeonhole(holes: int, alloc: FreshAllocator) -> cnf.Formula:
    """holes+1 pigeons into ``holes`` holes; p[i][j] = pigeon i sits in hole j."""
    pigeons = holes + 1
    p = [[alloc.new("hard") for _ in range(holes)] for _ in range(pigeons)]
    clauses = [frozenset(row) for row in p]
    for j in range(holes):
        for i, k in itertools.combinations(range(pigeons), 2):
            clauses.append(frozenset((-p[i][j], -p[k][j])))
    return frozenset(clauses)


def tseitin_complete(n: int, alloc: FreshAllocator) -> cnf.Formula:
    """Tseitin parity contradiction on K_n, vertex 1 charged 1, the rest 0."""
    if n < 2:
        raise ValueError("Tseitin formulas need a graph with at least 2 vertices")
    edge = {}
    for u, w in itertools.combinations(range(n), 2):
        edge[u, w] = edge[w, u] = alloc.new("hard")
    clauses = []
    for u in range(n):
        inc = [edge[u, w] for w in range(n) if w != u]
        charge = 1 if u == 0 else 0
        # forbid every sign pattern whose parity differs from the charge
        for signs in itertools.product((0, 1), repeat=len(inc)):
            if sum(signs) % 2 != charge:
                clauses.append(frozenset(-e if s else e for e, s in zip(inc, signs)))
    return frozenset(clauses)


FAMILIES = {
    "php": pigeonhole,
    "tseitin": tseitin_complete,
    "completek": complete_k,
}


def hard_family(family: str, param: int, alloc: FreshAllocator) -> cnf.Formula:
    if param < 1:
        raise ValueError("family parameter must be at least 1")
    try:
        build = FAMILIES[family.lower()]
    except KeyError:
        raise ValueError(f"unknown family {family!r}; choose from {sorted(FAMILIES)}") from None
    return build(param, alloc)
