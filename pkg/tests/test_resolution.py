import random

import pytest
from hypothesis import given, settings

from optproof import cnf
from optproof.cnf import parse_formula as P
from optproof.laws import gx_check, gx_instance
from optproof.optimal import BudgetExhausted, optimal_tree
from optproof.resolution import (ResolutionError, ResolutionProof, ResolutionStep, all_min_regular_proofs,
                                 f_transform, format_proof, g_transform, has_leaf_step, is_optimal_resolution_pair,
                                 is_regular, min_regular_proof, min_regular_size, parse_proof, proof_to_dot,
                                 push_pivot_to_leaves, reduce_orp, resolve, tree_to_resolution,
                                 validate_regular_proof)
from optproof.trees import INFINITE, parse_tree, tree_size

from conftest import formulas, unsat_formulas
from naive import proof_step_set, regular_proof_sets

K2 = P("{1 2, 1 -2, -1 2, -1 -2}")
K3 = P("{1 2 3, 1 2 -3, 1 -2 3, 1 -2 -3, -1 2 3, -1 2 -3, -1 -2 3, -1 -2 -3}")
C = frozenset


def test_resolve():
    assert resolve(C([1, 2]), C([-1, 3]), 1) == C([2, 3])
    assert resolve(C([-1]), C([1]), 1) == cnf.EMPTY_CLAUSE
    # tautological resolvents are allowed
    assert resolve(C([1, 2]), C([-1, -2]), 1) == C([2, -2])
    with pytest.raises(ResolutionError):
        resolve(C([1]), C([2]), 1)
    with pytest.raises(ResolutionError):
        resolve(C([1]), C([1, 2]), 1)


def test_frozen_minimum_sizes():
    assert min_regular_size(P("{1, -1}"), 5) == 1
    assert min_regular_size(K2, 5) == 3
    assert min_regular_size(K3, 8) == 7
    assert min_regular_size(P("{[]}"), 3) == 0
    assert min_regular_size(P("{1 2}"), 3) == INFINITE
    assert min_regular_size(P("{1, 2, -1 -2}"), 5) == 2


def test_budget_is_reported_not_guessed():
    with pytest.raises(BudgetExhausted):
        min_regular_size(K3, 4)


def test_validator_rejects_broken_proofs():
    f = P("{1, -1}")
    good = min_regular_proof(f, 3).witness
    assert validate_regular_proof(f, good)
    assert not validate_regular_proof(P("{1, -1 2}"), good)
    bad = ResolutionProof(good.leaves, [ResolutionStep(1, 0, 1, C([2]))])
    assert not validate_regular_proof(f, bad)
    assert not validate_regular_proof(f, ResolutionProof([], []))
    # resolving x twice on one path
    g = P("{1 2, -1 2, -2 1, -1 -2}")
    p = ResolutionProof([C([1, 2]), C([-1, 2]), C([-2, 1]), C([-1, -2])], [
        ResolutionStep(1, 0, 1, C([2])),
        ResolutionStep(1, 2, 3, C([-2])),
        ResolutionStep(2, 4, 5, cnf.EMPTY_CLAUSE),
    ])
    assert validate_regular_proof(g, p)
    irregular = ResolutionProof([C([1, 2]), C([-1, 2]), C([-1, -2])], [
        ResolutionStep(2, 1, 2, C([-1])),
        ResolutionStep(1, 0, 3, C([2])),
        ResolutionStep(2, 4, 2, C([-1])),
    ])
    assert not is_regular(irregular)


def test_all_minimum_proofs_of_k2():
    proofs = all_min_regular_proofs(K2, 5)
    assert all(validate_regular_proof(K2, p) and p.size == 3 for p in proofs)
    _, sets = regular_proof_sets(K2, 3)
    assert {proof_step_set(p) for p in proofs} == set(sets)


@settings(max_examples=40)
@given(unsat_formulas(max_vars=3, max_clauses=5))
def test_minimum_matches_naive_growth(f):
    size, sets = regular_proof_sets(f, 8)
    proofs = all_min_regular_proofs(f, 8)
    assert proofs[0].size == size
    assert {proof_step_set(p) for p in proofs} == set(sets)


@settings(max_examples=40)
@given(formulas(max_vars=3, max_clauses=5, tautologies=True))
def test_dropping_tautologies_keeps_the_minimum(f):
    # the naive growth resolves tautological clauses freely
    if cnf.is_satisfiable(f):
        return
    assert min_regular_size(f, 8) == regular_proof_sets(f, 8)[0]


@settings(max_examples=40)
@given(unsat_formulas(max_vars=3, max_clauses=5), unsat_formulas(first=4, max_vars=2, max_clauses=4))
def test_union_law(f, h):
    assert min_regular_size(f | h, 12) == min(min_regular_size(f, 12), min_regular_size(h, 12))


@settings(max_examples=40)
@given(unsat_formulas(max_vars=3, max_clauses=6))
def test_tree_to_resolution_bounds_regular_size(f):
    t = optimal_tree(f)
    p = tree_to_resolution(f, t)
    assert validate_regular_proof(f, p)
    assert p.size <= tree_size(t)
    assert min_regular_size(f, 12) <= p.size


def test_g_and_f_transform_checks():
    f = P("{1, -1 2, -1 -2}")
    assert g_transform(f, C([1]), 5) == P("{5, -5 1, -1 2, -1 -2}")
    with pytest.raises(ResolutionError):
        g_transform(f, C([3]), 5)
    with pytest.raises(ResolutionError):
        g_transform(f, C([1]), 2)
    with pytest.raises(ResolutionError):
        g_transform(P("{1 2}"), C([1, 2]), 5)
    with pytest.raises(ResolutionError):
        g_transform(P("{1, -1, 2, -2}"), C([1]), 5)
    assert f_transform(P("{1, -1}"), 2, 3) == P("{2, -2 3, -3 1, -3 -1}")
    with pytest.raises(ResolutionError):
        f_transform(P("{1, -1}"), 2, 2)


def test_three_step_proof_of_k2():
    # pivots 2, 2, 1
    p = ResolutionProof([C([1, 2]), C([1, -2]), C([-1, 2]), C([-1, -2])], [
        ResolutionStep(2, 0, 1, C([1])),
        ResolutionStep(2, 2, 3, C([-1])),
        ResolutionStep(1, 4, 5, cnf.EMPTY_CLAUSE),
    ])
    assert validate_regular_proof(K2, p) and p.size == 3


def test_g_and_f_transform_examples():
    g = g_transform(P("{1, -1}"), C([1]), 5)
    assert g == P("{5, -5 1, -1}")
    assert min_regular_size(g, 6) == 2
    assert all(sum(s.pivot == 5 for s in p.steps) == 1 for p in all_min_regular_proofs(g, 6))
    assert is_optimal_resolution_pair(g, C([5]), C([-5, 1]), 6)
    assert is_optimal_resolution_pair(P("{1, -1}"), C([1]), C([-1]), 4)
    f = f_transform(P("{[]}"), 1, 2)
    assert f == P("{1, -1 2, -2}")
    assert min_regular_size(f, 6) == 2
    assert min_regular_size(f_transform(P("{1, -1}"), 2, 3), 6) == 3
    with pytest.raises(ResolutionError):
        f_transform(P("{1 2}"), 3, 4)
    with pytest.raises(ResolutionError):
        f_transform(P("{1, -1}"), 1, 4)
    h = g_transform(K2, C([1, 2]), 5)
    assert all(sum(s.pivot == 5 for s in p.steps) == 1 for p in all_min_regular_proofs(h, 8))


def test_g_and_f_transform_sizes():
    f = P("{1, -1 2, -1 -2}")
    g = g_transform(f, C([1]), 5)
    assert min_regular_size(g, 8) == min_regular_size(f, 8) + 1
    ff = f_transform(f, 5, 6)
    assert min_regular_size(ff, 10) == min_regular_size(f, 8) + 2


def test_push_worked_example():
    g = g_transform(P("{1, -1 2, -1 -2}"), C([1]), 5)
    t = parse_tree("(2 (1 (5 () ()) ()) (1 (5 () ()) ()))")
    p = tree_to_resolution(g, t)
    assert p.size == 5 and validate_regular_proof(g, p)
    q = push_pivot_to_leaves(p, 5)
    assert q.size == 4 and validate_regular_proof(g, q)
    assert sum(s.pivot == 5 for s in q.steps) == 1
    assert has_leaf_step(q, C([5]), C([-5, 1]))
    # already at the leaves: nothing to do
    assert push_pivot_to_leaves(q, 5) == q


def test_push_errors():
    p = min_regular_proof(P("{1, -1}"), 3).witness
    with pytest.raises(ResolutionError):
        push_pivot_to_leaves(p, 7)


def test_push_on_random_g_instances():
    rng = random.Random("push")
    for _ in range(15):
        f, gamma = gx_instance(rng, 3)
        x = cnf.max_var(f) + 1
        g = g_transform(f, gamma, x)
        p = tree_to_resolution(g, optimal_tree(g))
        if not any(s.pivot == x for s in p.steps):
            continue
        q = push_pivot_to_leaves(p, x)
        assert validate_regular_proof(g, q)
        assert q.size <= p.size


def test_gx_minimum_proofs_resolve_x_once_at_leaves():
    rng = random.Random("gx")
    for _ in range(10):
        f, gamma = gx_instance(rng, 3)
        assert gx_check(f, gamma) == []


def test_optimal_pair_queries():
    f = g_transform(P("{1, -1 2, -1 -2}"), C([1]), 5)
    assert is_optimal_resolution_pair(f, C([5]), C([-5, 1]), 8)
    with pytest.raises(ResolutionError):
        is_optimal_resolution_pair(f, C([5]), C([9]), 8)
    with pytest.raises(ResolutionError):
        is_optimal_resolution_pair(K2, C([1, 2]), C([-1, -2]), 8)


@pytest.mark.parametrize("f", ["{1, -1}", "{1, 2, -1 -2}", "{1 2}", "{}", "{1, -2}", "{[]}"])
def test_orp_end_to_end(f):
    f = P(f)
    out = reduce_orp(f)
    (g1, d1), (g2, d2) = out.pairs
    unsat = not cnf.is_satisfiable(f)
    budget = 2 ** len(cnf.variables(f)) + 4
    assert is_optimal_resolution_pair(out.formula, g1, d1, budget) == unsat
    assert is_optimal_resolution_pair(out.formula, g2, d2, budget) == (not unsat)


def test_orp_rejects_negative_threshold():
    with pytest.raises(ResolutionError):
        reduce_orp(P("{1, -1}"), hard_threshold=-1)


def test_trace_roundtrip_and_dot():
    p = min_regular_proof(K2, 5).witness
    text = format_proof(p)
    assert parse_proof(text) == p
    assert text.splitlines()[-1].startswith("R 6 ")
    assert proof_to_dot(p).count("->") == 6
    for bad in ["L 0 1", "X 0 1 0", "R 0 1 0 0", "L 1 1 0", "L 0 a 0"]:
        with pytest.raises(ResolutionError):
            parse_proof(bad)
    # well-formed text can still describe a wrong proof; the validator catches that
    assert not validate_regular_proof(K2, parse_proof("R 0 1 0 0 0"))
