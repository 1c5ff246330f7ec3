# Bitmask formulas for the search engines.  A clause is a (pos, neg) pair of
# int masks over bit positions; a formula is a frozenset of such pairs.  Any
# formula containing the empty clause is normalised to BOT so the memo tables
# see a single conflict state.

from __future__ import annotations

from .cnf import Formula

BOT = frozenset([(0, 0)])
TOP: frozenset = frozenset()


class Packer:
    def __init__(self, variables):
        self.order = sorted(variables)
        self.bit = {v: 1 << i for i, v in enumerate(self.order)}

    def pack(self, f: Formula) -> frozenset:
        out = set()
        for c in f:
            p = n = 0
            for lit in c:
                if lit > 0:
                    p |= self.bit[lit]
                else:
                    n |= self.bit[-lit]
            if not p and not n:
                return BOT
            out.add((p, n))
        return frozenset(out)

    def mask(self, vs) -> int:
        m = 0
        for v in vs:
            if v in self.bit:
                m |= self.bit[v]
        return m

    def var(self, bit: int) -> int:
        return self.order[bit.bit_length() - 1]

    def unpack(self, pf: frozenset) -> Formula:
        out = set()
        for p, n in pf:
            lits = [self.var(b) for b in bits(p)] + [-self.var(b) for b in bits(n)]
            out.add(frozenset(lits))
        return frozenset(out)


def bits(mask: int):
    while mask:
        low = mask & -mask
        yield low
        mask ^= low


def var_mask(f: frozenset) -> int:
    m = 0
    for p, n in f:
        m |= p | n
    return m


def assign(f: frozenset, bit: int, value: bool) -> frozenset:
    out = []
    if value:
        for p, n in f:
            if p & bit:
                continue
            if n & bit:
                n ^= bit
                if not p and not n:
                    return BOT
            out.append((p, n))
    else:
        for p, n in f:
            if n & bit:
                continue
            if p & bit:
                p ^= bit
                if not p and not n:
                    return BOT
            out.append((p, n))
    return frozenset(out)


def assign_many(f: frozenset, pos: int, neg: int) -> frozenset:
    """Set every bit of ``pos`` true and every bit of ``neg`` false."""
    out = []
    for p, n in f:
        if p & pos or n & neg:
            continue
        p &= ~neg
        n &= ~pos
        if not p and not n:
            return BOT
        out.append((p, n))
    return frozenset(out)


def unit_propagate(f: frozenset) -> frozenset:
    while f is not BOT:
        pos = neg = 0
        for p, n in f:
            if p and not n and not (p & (p - 1)):
                pos |= p
            elif n and not p and not (n & (n - 1)):
                neg |= n
        if not pos and not neg:
            return f
        if pos & neg:
            return BOT
        f = assign_many(f, pos, neg)
    return f


def pure_pass(f: frozenset) -> frozenset:
    allp = alln = 0
    for p, n in f:
        allp |= p
        alln |= n
    pure_p = allp & ~alln
    pure_n = alln & ~allp
    if not pure_p and not pure_n:
        return f
    return frozenset((p, n) for p, n in f if not (p & pure_p or n & pure_n))


def dpll_closure(f: frozenset) -> frozenset:
    while True:
        f = unit_propagate(f)
        if f is BOT:
            return f
        g = pure_pass(f)
        if len(g) == len(f):
            return f
        f = g


def identity(f: frozenset) -> frozenset:
    return f


def satisfiable(f: frozenset) -> bool:
    f = unit_propagate(f)
    if f is BOT:
        return False
    if not f:
        return True
    p, n = min(f, key=lambda c: (c[0] | c[1]).bit_count())
    if p:
        bit = p & -p
        return satisfiable(assign(f, bit, True)) or satisfiable(assign(f, bit, False))
    bit = n & -n
    return satisfiable(assign(f, bit, False)) or satisfiable(assign(f, bit, True))


def components(f: frozenset) -> list[frozenset]:
    """Split into variable-disjoint parts (clauses sharing no variables)."""
    groups: list[tuple[int, list]] = []
    for c in f:
        m = c[0] | c[1]
        merged_mask = m
        merged = [c]
        rest = []
        for gm, gc in groups:
            if gm & merged_mask:
                merged_mask |= gm
                merged.extend(gc)
            else:
                rest.append((gm, gc))
        # a later group may now touch the grown mask
        changed = True
        while changed:
            changed = False
            keep = []
            for gm, gc in rest:
                if gm & merged_mask:
                    merged_mask |= gm
                    merged.extend(gc)
                    changed = True
                else:
                    keep.append((gm, gc))
            rest = keep
        groups = rest + [(merged_mask, merged)]
    return [frozenset(gc) for _, gc in groups]
