"""Regular resolution refutations as DAGs and an exact minimum-size search.

Proof size is the number of resolution steps.  Node references index the
leaves first and then the steps, so in a proof with L leaves step i is node
L + i and the root is the last node.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple, Optional, Sequence

from . import _packed as pk
from . import cnf
from .combinators import FreshAllocator, check_disjoint
from .gadgets import exact_size_formula
from .optimal import BudgetExhausted
from .reductions import ReductionOutput
from .trees import BACKTRACKING, INFINITE, TreeDiscipline


class ResolutionError(ValueError):
    pass


def resolve(c1: cnf.Clause, c2: cnf.Clause, pivot: int) -> cnf.Clause:
    v = abs(pivot)
    if v in c1 and -v in c2:
        return (c1 - {v}) | (c2 - {-v})
    if -v in c1 and v in c2:
        return (c1 - {-v}) | (c2 - {v})
    raise ResolutionError(f"clauses do not clash on variable {v}")


class ResolutionStep(NamedTuple):
    pivot: int
    left: int
    right: int
    resolvent: cnf.Clause


@dataclass
class ResolutionProof:
    leaves: list
    steps: list

    @property
    def size(self) -> int:
        return len(self.steps)

    @property
    def root(self) -> int:
        return len(self.leaves) + len(self.steps) - 1

    def clause(self, ref: int) -> cnf.Clause:
        if ref < len(self.leaves):
            return self.leaves[ref]
        return self.steps[ref - len(self.leaves)].resolvent

    def parents(self, ref: int) -> tuple:
        if ref < len(self.leaves):
            return ()
        s = self.steps[ref - len(self.leaves)]
        return (s.left, s.right)

    def pivots_below(self) -> list[frozenset]:
        """For every node, the pivots of all steps it depends on."""
        below: list[frozenset] = [frozenset()] * len(self.leaves)
        for s in self.steps:
            below.append(below[s.left] | below[s.right] | {s.pivot})
        return below


def validate_regular_proof(f: cnf.Formula, p: ResolutionProof) -> bool:
    """Leaves from F, correct resolvents, root ⊥, no path repeating a pivot."""
    f = cnf.formula(f)
    if any(c not in f for c in p.leaves):
        return False
    if not p.leaves and not p.steps:
        return False
    below: list[frozenset] = [frozenset()] * len(p.leaves)
    for i, s in enumerate(p.steps):
        ref = len(p.leaves) + i
        if not (0 <= s.left < ref and 0 <= s.right < ref) or s.pivot <= 0:
            return False
        try:
            r = resolve(p.clause(s.left), p.clause(s.right), s.pivot)
        except ResolutionError:
            return False
        if r != s.resolvent:
            return False
        # a pivot seen below this step would repeat on some root-to-leaf path
        if s.pivot in below[s.left] or s.pivot in below[s.right]:
            return False
        below.append(below[s.left] | below[s.right] | {s.pivot})
    return p.clause(p.root) == cnf.EMPTY_CLAUSE


def is_regular(p: ResolutionProof) -> bool:
    below = [frozenset()] * len(p.leaves)
    for s in p.steps:
        if s.pivot in below[s.left] or s.pivot in below[s.right]:
            return False
        below.append(below[s.left] | below[s.right] | {s.pivot})
    return True


# exact search


class _Search:
    """Iterative deepening over canonical step sequences.

    A node is (pos, neg, below) over packed bits, ``below`` being the pivots
    it depends on.  Pruning keeps every minimum-size proof:

    * a clause sharing a variable with its own ``below`` set (tautologies
      included) can never lose that variable without a repeated pivot;
    * a node whose clause and ``below`` both contain those of another node
      is dominated: rerouting its uses to the smaller node and dropping its
      step gives a strictly smaller regular proof, so no minimum proof holds
      both;
    * steps are emitted in the order that always takes the smallest
      available step next, so each DAG is enumerated once;
    * every derived clause except the root is used by a later step, each
      step consumes at most two unused nodes and removes at most one literal
      of each clause it uses.
    """

    def __init__(self, f: cnf.Formula, node_budget: Optional[int] = None):
        self.packer = pk.Packer(cnf.variables(f))
        self.clauses = [frozenset(c) for c in cnf.sorted_clauses(f)]
        # tautologies cannot occur in a regular refutation
        self.clauses = [c for c in self.clauses if not cnf.is_tautology(c)]
        self.leaves = [(self.packer.mask(l for l in c if l > 0), self.packer.mask(-l for l in c if l < 0), 0)
                       for c in self.clauses]
        self.node_budget = node_budget
        self.expanded = 0

    def _tick(self):
        self.expanded += 1
        if self.node_budget is not None and self.expanded > self.node_budget:
            raise BudgetExhausted(f"node budget {self.node_budget} exhausted")

    def proofs(self, size: int) -> Iterator[list]:
        """All canonical step sequences of exactly ``size`` steps."""
        nodes = list(self.leaves)
        nl = len(nodes)
        unused: list[int] = []
        steps: list = []

        def rec(remaining, prev_key, prev_ref):
            self._tick()
            if remaining == 0:
                yield list(steps)
                return
            count = len(nodes)
            for i in range(count):
                pi, ni, bi = nodes[i]
                for j in range(i + 1, count):
                    pj, nj, bj = nodes[j]
                    clash = (pi & nj) | (ni & pj)
                    if not clash or clash & (clash - 1):
                        continue
                    if clash & (bi | bj):
                        continue
                    key = (nodes[i], nodes[j]) if nodes[i] < nodes[j] else (nodes[j], nodes[i])
                    uses_prev = i == prev_ref or j == prev_ref
                    if prev_key is not None and not uses_prev and key <= prev_key:
                        continue
                    rp = (pi | pj) & ~clash
                    rn = (ni | nj) & ~clash
                    rb = bi | bj | clash
                    if (rp | rn) & rb:
                        continue
                    last = remaining == 1
                    if last != (not rp and not rn):
                        continue
                    # unused derived nodes after this step
                    left_unused = [u for u in unused if u != i and u != j]
                    if last:
                        if left_unused:
                            continue
                    else:
                        r_after = remaining - 1
                        if len(left_unused) + 1 - r_after > 1:
                            continue
                        width = (rp | rn).bit_count()
                        if width > r_after:
                            continue
                        if any((nodes[u][0] | nodes[u][1]).bit_count() > r_after for u in left_unused):
                            continue
                        if self._dominated(nodes, rp, rn, rb, nl):
                            continue
                    ref = len(nodes)
                    nodes.append((rp, rn, rb))
                    saved = unused[:]
                    unused[:] = left_unused + [ref]
                    steps.append((clash, i, j))
                    yield from rec(remaining - 1, key, ref)
                    steps.pop()
                    unused[:] = saved
                    nodes.pop()

        yield from rec(size, None, None)

    @staticmethod
    def _dominated(nodes, rp, rn, rb, nl) -> bool:
        for k, (p, n, b) in enumerate(nodes):
            if not (p & ~rp) and not (n & ~rn) and not (b & ~rb):
                return True
            if k >= nl and not (rp & ~p) and not (rn & ~n) and not (rb & ~b):
                return True
        return False

    def to_proof(self, steps) -> ResolutionProof:
        pk_ = self.packer
        leaves = list(self.clauses)
        out = []
        clauses = list(leaves)
        for bit, i, j in steps:
            r = resolve(clauses[i], clauses[j], pk_.var(bit))
            out.append(ResolutionStep(pk_.var(bit), i, j, r))
            clauses.append(r)
        return prune_unused_leaves(ResolutionProof(leaves, out))


def prune_unused_leaves(p: ResolutionProof) -> ResolutionProof:
    """Drop leaves no step refers to and renumber."""
    used = sorted({r for s in p.steps for r in (s.left, s.right) if r < len(p.leaves)})
    if not p.steps:
        used = [i for i, c in enumerate(p.leaves) if not c][:1]
    remap = {old: new for new, old in enumerate(used)}
    shift = len(p.leaves) - len(used)

    def ref(r):
        return remap[r] if r < len(p.leaves) else r - shift

    steps = [ResolutionStep(s.pivot, ref(s.left), ref(s.right), s.resolvent) for s in p.steps]
    return ResolutionProof([p.leaves[i] for i in used], steps)


@dataclass
class MinProofResult:
    size: float
    witness: Optional[ResolutionProof]
    expanded: int


def _search_min(f: cnf.Formula, budget: int, node_budget: Optional[int], want_all: bool):
    if budget < 0:
        raise ValueError("budget must be non-negative")
    f = cnf.formula(f)
    if cnf.EMPTY_CLAUSE in f:
        proof = ResolutionProof([cnf.EMPTY_CLAUSE], [])
        return 0, [proof], 0
    if cnf.is_satisfiable(f):
        return INFINITE, [], 0
    s = _Search(f, node_budget)
    for size in range(1, budget + 1):
        found = []
        for steps in s.proofs(size):
            found.append(s.to_proof(steps))
            if not want_all:
                break
        if found:
            return size, found, s.expanded
    raise BudgetExhausted(f"no regular refutation with at most {budget} steps was found")


def min_regular_size(f: cnf.Formula, budget: int, node_budget: Optional[int] = None):
    """Fewest resolution steps in a regular refutation; ``INFINITE`` if F is
    satisfiable.  ``BudgetExhausted`` if none fits in ``budget`` steps."""
    return _search_min(f, budget, node_budget, False)[0]


def min_regular_proof(f: cnf.Formula, budget: int, node_budget: Optional[int] = None) -> MinProofResult:
    size, found, expanded = _search_min(f, budget, node_budget, False)
    return MinProofResult(size, found[0] if found else None, expanded)


def all_min_regular_proofs(f: cnf.Formula, budget: int, node_budget: Optional[int] = None) -> list[ResolutionProof]:
    """Every minimum-size regular refutation, one per proof DAG."""
    return _search_min(f, budget, node_budget, True)[1]


def tree_to_resolution(f: cnf.Formula, t) -> ResolutionProof:
    """Read a backtracking search tree of F as a tree-like regular refutation.

    Each leaf contributes a clause falsified by its path; a node whose
    children both mention its variable resolves them, otherwise it passes on
    the child clause that does not.  So the size is at most the tree size.
    """
    from .trees import validate_tree

    f = cnf.formula(f)
    if not validate_tree(f, t):
        raise ResolutionError("not a backtracking search tree of the formula")
    # shortest falsified clause first keeps the derived clauses small
    order = [frozenset(c) for c in sorted(cnf.sorted_clauses(f), key=len)]
    leaves: list = []
    index: dict = {}
    steps: list = []

    def leaf(c):
        if c not in index:
            index[c] = len(leaves)
            leaves.append(c)
        return ("leaf", index[c])

    def walk(node, path):
        if node is None:
            lits = cnf.assignment_literals(path)
            falsified = next(c for c in order if all(-l in lits for l in c))
            return leaf(falsified), falsified
        lo, clo = walk(node.left, {**path, node.var: False})
        if node.var not in clo:
            return lo, clo
        hi, chi = walk(node.right, {**path, node.var: True})
        if -node.var not in chi:
            return hi, chi
        r = resolve(clo, chi, node.var)
        steps.append((node.var, lo, hi, r))
        return ("step", len(steps) - 1), r

    walk(t, {})

    def ref(r):
        return r[1] if r[0] == "leaf" else len(leaves) + r[1]

    return ResolutionProof(leaves, [ResolutionStep(v, ref(a), ref(b), r) for v, a, b, r in steps])


# pivot-isolating transformations


def _fresh(vs, f):
    for v in vs:
        if v <= 0:
            raise ResolutionError("fresh variables must be positive ids")
        if v in cnf.variables(f):
            raise ResolutionError(f"variable {v} occurs in the formula")


def g_transform(f: cnf.Formula, gamma: cnf.Clause, x: int) -> cnf.Formula:
    """``{x, ¬x ∨ γ} ∪ F ∖ {γ}`` for a clause γ that F needs."""
    f = cnf.formula(f)
    gamma = frozenset(gamma)
    if gamma not in f:
        raise ResolutionError("gamma is not a clause of F")
    _fresh([x], f)
    if cnf.is_satisfiable(f):
        raise ResolutionError("F must be unsatisfiable")
    rest = f - {gamma}
    if not cnf.is_satisfiable(rest):
        raise ResolutionError("F without gamma must be satisfiable")
    return rest | {frozenset([x]), gamma | {-x}}


def _f_image(f: cnf.Formula, x: int, y: int) -> cnf.Formula:
    return cnf.disjunction(-y, f) | {frozenset([x]), frozenset([-x, y])}


def f_transform(f: cnf.Formula, x: int, y: int) -> cnf.Formula:
    """``{x, ¬x ∨ y} ∪ {¬y ∨ δ | δ ∈ F}``."""
    f = cnf.formula(f)
    if x == y:
        raise ResolutionError("x and y must differ")
    _fresh([x, y], f)
    if cnf.is_satisfiable(f):
        raise ResolutionError("F must be unsatisfiable")
    return _f_image(f, x, y)


def push_pivot_to_leaves(p: ResolutionProof, x: int) -> ResolutionProof:
    """Resolve x once, at the leaves, instead of wherever the proof does.

    The leaf ``¬x ∨ γ`` is replaced by its resolvent with the unit ``x``;
    ¬x disappears from everything derived from it, and each old x-step
    becomes its own non-unit parent.
    """
    x = abs(x)
    unit = frozenset([x])
    xsteps = [i for i, s in enumerate(p.steps) if s.pivot == x]
    if not xsteps:
        raise ResolutionError(f"the proof never resolves on {x}")
    nl = len(p.leaves)
    for i in xsteps:
        s = p.steps[i]
        if p.clause(s.left) != unit and p.clause(s.right) != unit:
            raise ResolutionError("an x-step does not use the unit clause x")
        if s.left >= nl and p.clause(s.left) == unit or s.right >= nl and p.clause(s.right) == unit:
            raise ResolutionError("the unit clause x must be a leaf")
    neg = [i for i, c in enumerate(p.leaves) if -x in c]
    if len(neg) != 1:
        raise ResolutionError("exactly one leaf may contain ¬x")
    neg_leaf = neg[0]
    units = [i for i, c in enumerate(p.leaves) if c == unit]
    if len(xsteps) == 1:
        s = p.steps[xsteps[0]]
        if {s.left, s.right} == {units[0], neg_leaf}:
            return p

    leaves = list(p.leaves)
    # node 0 of the new proof's steps is the leaf-level x-resolution
    new_steps = [ResolutionStep(x, units[0], neg_leaf, resolve(leaves[units[0]], leaves[neg_leaf], x))]
    where: dict[int, int] = {}
    for i in range(nl):
        where[i] = i
    where[neg_leaf] = nl  # uses of ¬x ∨ γ now see γ
    clause_of = {nl: new_steps[0].resolvent}
    for i in range(nl):
        clause_of.setdefault(i, leaves[i])
    for i, s in enumerate(p.steps):
        ref = nl + i
        if s.pivot == x:
            other = s.right if p.clause(s.left) == unit and s.left < nl else s.left
            where[ref] = where[other]
            continue
        a, b = where[s.left], where[s.right]
        r = resolve(clause_of[a], clause_of[b], s.pivot)
        new_ref = nl + len(new_steps)
        new_steps.append(ResolutionStep(s.pivot, a, b, r))
        clause_of[new_ref] = r
        where[ref] = new_ref
    out = ResolutionProof(leaves, new_steps)
    return _drop_dead_steps(out)


def _drop_dead_steps(p: ResolutionProof) -> ResolutionProof:
    nl = len(p.leaves)
    live = {p.root}
    for i in range(len(p.steps) - 1, -1, -1):
        if nl + i in live:
            live.update((p.steps[i].left, p.steps[i].right))
    keep = [i for i in range(len(p.steps)) if nl + i in live]
    remap = {nl + old: nl + new for new, old in enumerate(keep)}

    def ref(r):
        return r if r < nl else remap[r]

    steps = [ResolutionStep(s.pivot, ref(s.left), ref(s.right), s.resolvent) for s in (p.steps[i] for i in keep)]
    return prune_unused_leaves(ResolutionProof(p.leaves, steps))


# optimal resolution pair


def _clash(g: cnf.Clause, d: cnf.Clause) -> list[int]:
    return sorted(abs(l) for l in g if -l in d)


def has_leaf_step(p: ResolutionProof, gamma: cnf.Clause, delta: cnf.Clause) -> bool:
    nl = len(p.leaves)
    for s in p.steps:
        if s.left < nl and s.right < nl and {p.leaves[s.left], p.leaves[s.right]} == {gamma, delta}:
            return True
    return False


def is_optimal_resolution_pair(f: cnf.Formula, gamma: cnf.Clause, delta: cnf.Clause, budget: int,
                               node_budget: Optional[int] = None) -> bool:
    """Does some minimum regular refutation resolve the leaves γ and δ?"""
    f = cnf.formula(f)
    gamma, delta = frozenset(gamma), frozenset(delta)
    if gamma not in f or delta not in f:
        raise ResolutionError("both clauses must belong to the formula")
    if len(_clash(gamma, delta)) != 1:
        raise ResolutionError("the clauses must clash on exactly one variable")
    return any(has_leaf_step(p, gamma, delta) for p in all_min_regular_proofs(f, budget, node_budget))


def reduce_orp(f: cnf.Formula, alloc: FreshAllocator | None = None, hard_threshold: Optional[int] = None) -> ReductionOutput:
    """``f^x_y(F) ∪ f^w_z(H)`` for a block H whose minimum regular refutation
    has ``hard_threshold + 1`` steps.

    H is a chain of sums of empty clauses: it is minimally unsatisfiable with
    one more clause than its tree size, so its regular and tree sizes agree.
    The default threshold 2^n - 1 bounds the size of any refutation of an
    unsatisfiable F over n variables.
    """
    f = cnf.formula(f)
    n = len(cnf.variables(f))
    if hard_threshold is None:
        hard_threshold = 2 ** n - 1
    if hard_threshold < 0:
        raise ResolutionError("hard_threshold must be non-negative")
    alloc = alloc or FreshAllocator()
    alloc.reserve(f)
    h = exact_size_formula(hard_threshold + 1, BACKTRACKING, alloc, method="unary")
    x, y, w, z = alloc.new("x"), alloc.new("y"), alloc.new("w"), alloc.new("z-res")
    left = _f_image(f, x, y)
    right = _f_image(h, w, z)
    check_disjoint(left, right)
    return ReductionOutput(
        left | right, TreeDiscipline(),
        "resolving x with ¬x∨y is optimal iff F is unsatisfiable; w with ¬w∨z iff F is satisfiable",
        pairs=((frozenset([x]), frozenset([-x, y])), (frozenset([w]), frozenset([-w, z]))),
        roles=alloc.role_table(),
    )


# text formats


def format_proof(p: ResolutionProof) -> str:
    """Trace lines: ``L id lits 0`` for leaves, ``R id pivot left right lits 0``."""
    lines = []
    for i, c in enumerate(p.leaves):
        lits = " ".join(map(str, cnf.sorted_clause(c)))
        lines.append(f"L {i} {lits} 0".replace("  ", " "))
    nl = len(p.leaves)
    for i, s in enumerate(p.steps):
        lits = " ".join(map(str, cnf.sorted_clause(s.resolvent)))
        lines.append(f"R {nl + i} {s.pivot} {s.left} {s.right} {lits} 0".replace("  ", " "))
    return "\n".join(lines) + "\n"


def parse_proof(text: str) -> ResolutionProof:
    leaves, steps = [], []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        try:
            nums = [int(t) for t in tok[1:]]
        except ValueError:
            raise ResolutionError(f"line {lineno}: non-integer token") from None
        if not nums or nums[-1] != 0:
            raise ResolutionError(f"line {lineno}: missing terminating 0")
        nums = nums[:-1]
        if tok[0] == "L":
            if steps:
                raise ResolutionError(f"line {lineno}: leaves must precede steps")
            if not nums or nums[0] != len(leaves):
                raise ResolutionError(f"line {lineno}: leaf ids must count up from 0")
            leaves.append(frozenset(nums[1:]))
        elif tok[0] == "R":
            if len(nums) < 4 or nums[0] != len(leaves) + len(steps):
                raise ResolutionError(f"line {lineno}: bad step header")
            _, pivot, left, right, *lits = nums
            steps.append(ResolutionStep(pivot, left, right, frozenset(lits)))
        else:
            raise ResolutionError(f"line {lineno}: unknown record {tok[0]!r}")
    return ResolutionProof(leaves, steps)


def proof_to_dot(p: ResolutionProof, name: str = "proof") -> str:
    lines = [f"digraph {name} {{", "  rankdir=BT;", "  node [shape=box];"]
    nl = len(p.leaves)
    for ref in range(nl + len(p.steps)):
        label = cnf.format_clause(p.clause(ref))
        shape = ", style=rounded" if ref < nl else ""
        lines.append(f'  n{ref} [label="{label}"{shape}];')
    for i, s in enumerate(p.steps):
        for parent in (s.left, s.right):
            lines.append(f'  n{parent} -> n{nl + i} [label="{s.pivot}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
