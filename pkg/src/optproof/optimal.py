"""Exact optimal search trees by memoised exhaustive search with branch and bound.

``optimal_size`` returns an ``int`` or ``INFINITE`` (``math.inf``) when no
refutation exists under the discipline: the formula is satisfiable, or under
restricted branching no allowed variable is left to branch on.  Running out of
the node budget raises ``BudgetExhausted``; it is never reported as infinite.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional

from . import _packed as pk
from . import cnf
from .trees import BACKTRACKING, INFINITE, Kind, Node, SearchTree, TreeDiscipline

_CLOSURES = {
    Kind.BACKTRACKING: pk.identity,
    Kind.DPLL: pk.dpll_closure,
    Kind.DPLL_MONO: pk.unit_propagate,
}


class BudgetExhausted(RuntimeError):
    """The search hit its node budget before the answer was settled."""


class NoRefutation(ValueError):
    """The formula has no search tree under the given discipline."""


@dataclass(frozen=True)
class OracleConfig:
    discipline: TreeDiscipline = BACKTRACKING
    node_budget: Optional[int] = None
    memo_enabled: bool = True
    # Split variable-disjoint parts and take the minimum.  Sound by the union
    # law, so it must stay off when that law itself is under test.
    decompose: bool = False

    def __post_init__(self):
        if self.node_budget is not None and self.node_budget < 1:
            raise ValueError("node_budget must be at least 1")


@dataclass
class SearchStats:
    expanded: int = 0
    memo_hits: int = 0


class Oracle:
    """Optimal-tree search over the subformulas of one formula."""

    def __init__(self, f: cnf.Formula, cfg: OracleConfig = OracleConfig()):
        self.cfg = cfg
        self.packer = pk.Packer(cnf.variables(f))
        d = cfg.discipline
        if d.allowed is None:
            self.allowed = (1 << len(self.packer.order)) - 1
        else:
            self.allowed = self.packer.mask(d.allowed)
        self._close = _CLOSURES[d.kind]
        self.memo: dict = {}
        # lower bounds learned from searches that were cut off
        self.floor: dict = {}
        self._width_bound = d.kind is Kind.BACKTRACKING
        self.stats = SearchStats()
        self.root = self._close(self.packer.pack(f))

    # packed-level search

    def _tick(self):
        self.stats.expanded += 1
        budget = self.cfg.node_budget
        if budget is not None and self.stats.expanded > budget:
            raise BudgetExhausted(f"node budget {budget} exhausted")

    def children(self, f, bit):
        return self._close(pk.assign(f, bit, False)), self._close(pk.assign(f, bit, True))

    def candidates(self, f) -> int:
        return pk.var_mask(f) & self.allowed

    def lower_bound(self, f) -> int:
        if f is pk.BOT:
            return 0
        lb = self.floor.get(f, 1)
        if self._width_bound and f:
            # every leaf falsifies a clause, so all paths are at least as long
            # as the narrowest clause and the top levels are complete
            w = min((p | n).bit_count() for p, n in f)
            lb = max(lb, (1 << w) - 1)
        return lb

    def order(self, f, cand: int) -> list[int]:
        """Candidate bits, most promising first: those in the narrowest clauses."""
        score: dict[int, int] = {}
        for p, n in f:
            m = (p | n) & cand
            w = 1 << (24 - min((p | n).bit_count(), 24))
            for b in pk.bits(m):
                score[b] = score.get(b, 0) + w
        return sorted(score, key=lambda b: (-score[b], b))

    def solve(self, f, bound=INFINITE):
        """Exact size if it is below ``bound``; otherwise some value >= ``bound``.

        ``INFINITE`` is only returned when it is the exact answer.
        """
        if f is pk.BOT:
            return 0
        if not f:
            return INFINITE
        memo = self.memo if self.cfg.memo_enabled else None
        if memo is not None:
            hit = memo.get(f)
            if hit is not None:
                self.stats.memo_hits += 1
                return hit
            floor = self.floor.get(f)
            if floor is not None and floor >= bound:
                return floor
        self._tick()
        if self.cfg.decompose:
            parts = pk.components(f)
            if len(parts) > 1:
                return self._solve_parts(f, parts, bound, memo)
        if pk.satisfiable(f):
            if memo is not None:
                memo[f] = INFINITE
            return INFINITE
        best = INFINITE
        cut = False
        for bit in self.order(f, self.candidates(f)):
            limit = min(best, bound)
            lo, hi = self.children(f, bit)
            if not lo or not hi:
                continue  # one side satisfiable: this root cannot refute
            lb_lo = self.lower_bound(lo)
            lb_hi = self.lower_bound(hi)
            if 1 + lb_lo + lb_hi >= limit:
                cut |= bound < best
                continue
            a = self.solve(lo, limit - 1 - lb_hi)
            if a == INFINITE:
                continue
            lb_hi = self.lower_bound(hi)
            if 1 + a + lb_hi >= limit:
                cut |= bound < best
                continue
            b = self.solve(hi, limit - 1 - a)
            if b == INFINITE:
                continue
            total = 1 + a + b
            if total < limit:
                best = total
            else:
                cut |= bound < best
        return self._settle(f, best, bound, cut, memo)

    def _settle(self, f, best, bound, cut, memo):
        if best < bound or not cut:
            if memo is not None:
                memo[f] = best
            return best
        if memo is not None and self.floor.get(f, 0) < bound:
            self.floor[f] = bound
        return bound

    def _solve_parts(self, f, parts, bound, memo):
        best = INFINITE
        cut = False
        for part in sorted(parts, key=len):
            limit = min(best, bound)
            v = self.solve(part, limit)
            if v < limit:
                best = v
            elif v != INFINITE and bound < best:
                cut = True
        return self._settle(f, best, bound, cut, memo)

    def branch_cost(self, f, bit):
        lo, hi = self.children(f, bit)
        return 1 + self.solve(lo) + self.solve(hi)

    def best_roots(self, f) -> list[int]:
        s = self.solve(f)
        if f is pk.BOT or s == INFINITE:
            return []
        return [bit for bit in pk.bits(self.candidates(f)) if self.branch_cost(f, bit) == s]

    def build_tree(self, f) -> SearchTree:
        if f is pk.BOT:
            return None
        roots = self.best_roots(f)
        if not roots:
            raise NoRefutation("formula has no search tree under this discipline")
        bit = roots[0]
        lo, hi = self.children(f, bit)
        return Node(self.packer.var(bit), self.build_tree(lo), self.build_tree(hi))

    def iter_trees(self, f) -> Iterator[SearchTree]:
        if f is pk.BOT:
            yield None
            return
        for bit in self.best_roots(f):
            lo, hi = self.children(f, bit)
            for left in self.iter_trees(lo):
                for right in self.iter_trees(hi):
                    yield Node(self.packer.var(bit), left, right)

    # formula-level API

    def size(self):
        return self.solve(self.root)

    def tree(self) -> SearchTree:
        return self.build_tree(self.root)

    def roots(self) -> list[int]:
        return [self.packer.var(bit) for bit in self.best_roots(self.root)]

    def is_root(self, x: int) -> bool:
        s = self.size()
        if s == INFINITE:
            raise NoRefutation("formula has no search tree under this discipline")
        if self.root is pk.BOT:
            return False
        bit = self.packer.bit.get(x)
        if bit is None or not bit & self.candidates(self.root):
            return False
        return self.branch_cost(self.root, bit) == s

    def within(self, k: int) -> bool:
        if k < 0:
            return False
        return self.solve(self.root, k + 1) <= k


def optimal_size(f: cnf.Formula, cfg: OracleConfig = OracleConfig()):
    return Oracle(f, cfg).size()


def optimal_tree(f: cnf.Formula, cfg: OracleConfig = OracleConfig()) -> SearchTree:
    """A minimum-size search tree; ties go to the lowest variable id."""
    return Oracle(f, cfg).tree()


def optimal_trees(f: cnf.Formula, cfg: OracleConfig = OracleConfig()) -> Iterator[SearchTree]:
    """Every minimum-size search tree.  Only sensible for tiny formulas."""
    o = Oracle(f, cfg)
    if o.size() == INFINITE:
        raise NoRefutation("formula has no search tree under this discipline")
    return o.iter_trees(o.root)


def optimal_roots(f: cnf.Formula, cfg: OracleConfig = OracleConfig()) -> list[int]:
    o = Oracle(f, cfg)
    if o.size() == INFINITE:
        raise NoRefutation("formula has no search tree under this discipline")
    return o.roots()


def is_optimal_branch_var(f: cnf.Formula, x: int, cfg: OracleConfig = OracleConfig()) -> bool:
    return Oracle(f, cfg).is_root(x)


def has_tree_within(f: cnf.Formula, k: int, cfg: OracleConfig = OracleConfig()) -> bool:
    return Oracle(f, cfg).within(k)
