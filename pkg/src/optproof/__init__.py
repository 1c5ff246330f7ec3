"""Exact optimal search trees and regular resolution proofs for small CNF formulas."""

from .cnf import clause, formula, parse_formula, format_formula
from .optimal import BudgetExhausted, NoRefutation, OracleConfig, optimal_size, optimal_tree, has_tree_within
from .trees import BACKTRACKING, DPLL, DPLL_MONO, INFINITE, Kind, TreeDiscipline

__version__ = "0.1.0"
