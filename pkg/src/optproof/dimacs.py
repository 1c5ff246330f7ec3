"""DIMACS CNF reading and writing, plus the JSON sidecar for metadata."""

from __future__ import annotations

import json
from pathlib import Path

from . import cnf


class DimacsError(cnf.FormulaError):
    pass


def parse_dimacs(text: str) -> cnf.Formula:
    """Clauses may span lines; a bare ``0`` is the empty clause."""
    clauses = []
    current: list[int] = []
    header = None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(f"line {lineno}: bad problem line {line!r}")
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise DimacsError(f"line {lineno}: bad problem line {line!r}") from None
            continue
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError(f"line {lineno}: bad literal {tok!r}") from None
            if lit == 0:
                clauses.append(current)
                current = []
            else:
                current.append(lit)
    if current:
        raise DimacsError("last clause is missing its terminating 0")
    if header is None:
        raise DimacsError("missing 'p cnf' line")
    nvars, nclauses = header
    if nclauses != len(clauses):
        raise DimacsError(f"header announces {nclauses} clauses, found {len(clauses)}")
    f = cnf.formula(clauses)
    if cnf.max_var(f) > nvars:
        raise DimacsError(f"variable {cnf.max_var(f)} exceeds the declared {nvars}")
    return f


def format_dimacs(f: cnf.Formula, comments=()) -> str:
    lines = [f"c {c}" for c in comments]
    cl = cnf.sorted_clauses(f)
    lines.append(f"p cnf {cnf.max_var(f)} {len(cl)}")
    lines += [" ".join(map(str, c + [0])) for c in cl]
    return "\n".join(lines) + "\n"


def read_dimacs(path) -> cnf.Formula:
    return parse_dimacs(Path(path).read_text())


def write_dimacs(path, f: cnf.Formula, comments=()) -> None:
    Path(path).write_text(format_dimacs(f, comments))


def sidecar_path(path) -> Path:
    return Path(str(path) + ".json")


def write_sidecar(path, meta: dict) -> None:
    sidecar_path(path).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


def read_sidecar(path) -> dict:
    p = sidecar_path(path)
    return json.loads(p.read_text()) if p.exists() else {}
