"""Search trees, tree disciplines and tree validation."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

from . import cnf

INFINITE = math.inf


class Kind(enum.Enum):
    BACKTRACKING = "bt"
    DPLL = "dpll"
    DPLL_MONO = "dpllmono"


@dataclass(frozen=True)
class TreeDiscipline:
    kind: Kind = Kind.BACKTRACKING
    allowed: Optional[frozenset] = None

    @classmethod
    def parse(cls, method: str, allowed=None) -> "TreeDiscipline":
        return cls(Kind(method), None if allowed is None else frozenset(allowed))

    def closure(self, f: cnf.Formula) -> cnf.Formula:
        if self.kind is Kind.DPLL:
            return cnf.dpll_closure(f)
        if self.kind is Kind.DPLL_MONO:
            return cnf.up_closure(f)
        return f

    def may_branch(self, v: int) -> bool:
        return self.allowed is None or v in self.allowed


BACKTRACKING = TreeDiscipline(Kind.BACKTRACKING)
DPLL = TreeDiscipline(Kind.DPLL)
DPLL_MONO = TreeDiscipline(Kind.DPLL_MONO)


class Node(NamedTuple):
    var: int
    left: "SearchTree"  # var = false
    right: "SearchTree"  # var = true


SearchTree = Optional[Node]
EMPTY: SearchTree = None


def leaf(v: int) -> Node:
    return Node(v, None, None)


def tree_size(t: SearchTree) -> int:
    size = 0
    stack = [t]
    while stack:
        t = stack.pop()
        if t is not None:
            size += 1
            stack.append(t.left)
            stack.append(t.right)
    return size


def empty_subtrees(t: SearchTree) -> int:
    if t is None:
        return 1
    return empty_subtrees(t.left) + empty_subtrees(t.right)


def tree_vars(t: SearchTree) -> set[int]:
    if t is None:
        return set()
    return {t.var} | tree_vars(t.left) | tree_vars(t.right)


def replace_empty(t: SearchTree, sub: SearchTree) -> SearchTree:
    if t is None:
        return sub
    return Node(t.var, replace_empty(t.left, sub), replace_empty(t.right, sub))


def rename_tree(t: SearchTree, mapping) -> SearchTree:
    if t is None:
        return None
    return Node(mapping.get(t.var, t.var), rename_tree(t.left, mapping), rename_tree(t.right, mapping))


def validate_tree(f: cnf.Formula, t: SearchTree, d: TreeDiscipline = BACKTRACKING) -> bool:
    """Is ``t`` a search tree of ``f`` under discipline ``d``?"""
    f = d.closure(f)
    if t is None:
        return cnf.EMPTY_CLAUSE in f
    if cnf.EMPTY_CLAUSE in f:
        return False
    if t.var not in cnf.variables(f) or not d.may_branch(t.var):
        return False
    return validate_tree(cnf.restrict(f, {t.var: False}), t.left, d) and validate_tree(
        cnf.restrict(f, {t.var: True}), t.right, d
    )


def format_tree(t: SearchTree) -> str:
    """Parenthetic notation: ``()`` or ``(x T1 T2)``."""
    if t is None:
        return "()"
    return f"({t.var} {format_tree(t.left)} {format_tree(t.right)})"


class TreeSyntaxError(ValueError):
    pass


def parse_tree(text: str) -> SearchTree:
    tokens = text.replace("(", " ( ").replace(")", " ) ").split()
    pos = 0

    def parse():
        nonlocal pos
        if pos >= len(tokens) or tokens[pos] != "(":
            raise TreeSyntaxError(f"expected '(' at token {pos}")
        pos += 1
        if pos < len(tokens) and tokens[pos] == ")":
            pos += 1
            return None
        tok = tokens[pos].lstrip("xyv")
        try:
            var = int(tok)
        except ValueError:
            raise TreeSyntaxError(f"bad variable {tokens[pos]!r}") from None
        pos += 1
        left = parse()
        right = parse()
        if pos >= len(tokens) or tokens[pos] != ")":
            raise TreeSyntaxError(f"expected ')' at token {pos}")
        pos += 1
        return Node(var, left, right)

    t = parse()
    if pos != len(tokens):
        raise TreeSyntaxError("trailing tokens after tree")
    return t


def tree_to_dot(t: SearchTree, name: str = "tree") -> str:
    lines = [f"digraph {name} {{", "  node [shape=circle];"]
    counter = 0

    def walk(t):
        nonlocal counter
        ident = f"n{counter}"
        counter += 1
        if t is None:
            lines.append(f'  {ident} [shape=point, label=""];')
            return ident
        lines.append(f'  {ident} [label="{t.var}"];')
        left = walk(t.left)
        right = walk(t.right)
        lines.append(f'  {ident} -> {left} [label="0", style=dashed];')
        lines.append(f'  {ident} -> {right} [label="1"];')
        return ident

    walk(t)
    lines.append("}")
    return "\n".join(lines) + "\n"
