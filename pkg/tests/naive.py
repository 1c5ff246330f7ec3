"""Slow, obviously-correct reference oracles used to check the fast engines.

They share nothing with the packed search beyond the clause-level helpers
in ``cnf``, which have their own tests.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache

from optproof import cnf


def _closure(f, kind):
    if kind == "dpll":
        return cnf.dpll_closure(f)
    if kind == "dpllmono":
        return cnf.up_closure(f)
    return f


def tree_size(f, kind="bt", allowed=None):
    """Plain recursion over every branching variable, no bounds."""
    allowed = None if allowed is None else frozenset(allowed)

    @lru_cache(maxsize=None)
    def s(g):
        g = _closure(g, kind)
        if cnf.EMPTY_CLAUSE in g:
            return 0
        best = math.inf
        for v in sorted(cnf.variables(g)):
            if allowed is not None and v not in allowed:
                continue
            a = s(cnf.restrict(g, {v: False}))
            b = s(cnf.restrict(g, {v: True}))
            best = min(best, 1 + a + b)
        return best

    return s(cnf.formula(f))


def satisfiable(f):
    vs = sorted(cnf.variables(f))
    for bits in itertools.product((False, True), repeat=len(vs)):
        if not cnf.restrict(f, dict(zip(vs, bits))):
            return True
    return False


def _resolvents(nodes):
    for (a, ba), (b, bb) in itertools.combinations(nodes, 2):
        for lit in a:
            if -lit in b and abs(lit) not in ba | bb:
                r = (a - {lit}) | (b - {-lit})
                yield (a, ba), (b, bb), (r, ba | bb | {abs(lit)})


def regular_proof_sets(f, max_steps):
    """All minimum regular refutations as sets of steps, by level-wise growth.

    A step is (parent, parent, result) with nodes as (clause, pivots below).
    Returns (size, list of step sets); size is inf for satisfiable F.
    """
    f = cnf.formula(f)
    leaves = {(c, frozenset()) for c in f}
    if any(not c for c in f):
        return 0, [frozenset()]
    if satisfiable(f):
        return math.inf, []
    level = {frozenset()}
    for k in range(1, max_steps + 1):
        nxt = set()
        for steps in level:
            nodes = leaves | {s[2] for s in steps}
            for a, b, r in _resolvents(sorted(nodes, key=lambda n: (sorted(n[0]), sorted(n[1])))):
                step = (a, b, r) if (sorted(a[0]), sorted(a[1])) <= (sorted(b[0]), sorted(b[1])) else (b, a, r)
                if step in steps:
                    continue
                nxt.add(steps | {step})
        done = [s for s in nxt if _complete(s)]
        if done:
            return k, done
        level = nxt
    raise RuntimeError("step bound too small")


def _complete(steps):
    roots = [s for s in steps if not s[2][0]]
    if len(roots) != 1:
        return False
    used = {p for s in steps for p in s[:2]}
    return all(s[2] in used for s in steps if s is not roots[0])


def proof_step_set(p):
    """The fast engine's proof in the same step-set form."""
    below = p.pivots_below()
    node = [(p.clause(r), below[r]) for r in range(len(p.leaves) + len(p.steps))]
    out = set()
    for i, s in enumerate(p.steps):
        a, b, r = node[s.left], node[s.right], node[len(p.leaves) + i]
        key = lambda n: (sorted(n[0]), sorted(n[1]))
        out.add((a, b, r) if key(a) <= key(b) else (b, a, r))
    return frozenset(out)
