"""The nine acceptance criteria, one test each.

Expected values come from the slow oracles in ``naive`` (or from direct
model counting) whenever the instance is small enough for them; the packed
engine answers for the constructed formulas.
"""

import itertools
import json
import random
import time

from optproof import cnf
from optproof.cli import run_command
from optproof.combinators import FreshAllocator, lemma1_tree_back, mono_shield, product, product_tree, sum_formulas, \
    to_dpll_equivalent
from optproof.gadgets import c_transform, e_transform, exact_size_formula, v_formula
from optproof.laws import (all_small_formulas, gx_instance, random_sat, random_sized, random_unsat, run_law_suite,
                           suite_names)
from optproof.optimal import Oracle, OracleConfig, optimal_size
from optproof.reductions import (decide, reduce_eminsat, reduce_ots_conp, reduce_ots_to_obv, reduce_parity_sat)
from optproof.resolution import (all_min_regular_proofs, g_transform, has_leaf_step, is_optimal_resolution_pair,
                                 min_regular_size, push_pivot_to_leaves, reduce_orp, tree_to_resolution,
                                 validate_regular_proof)
from optproof.trees import BACKTRACKING, DPLL, DPLL_MONO, Kind, TreeDiscipline, tree_size, validate_tree

import naive

K2 = cnf.parse_formula("{1 2, 1 -2, -1 2, -1 -2}")


def pair(rng):
    f = random_unsat(rng, range(1, rng.randint(1, 4) + 1))
    h = random_unsat(rng, range(5, 5 + rng.randint(1, 4)))
    return f, h


def models(f, universe):
    universe = sorted(universe)
    return sum(1 for bits in itertools.product((False, True), repeat=len(universe))
               if not cnf.restrict(f, dict(zip(universe, bits))))


def mono(allowed, decompose=True):
    return OracleConfig(TreeDiscipline(Kind.DPLL_MONO, frozenset(allowed)), decompose=decompose)


def test_criterion_1_algebraic_laws(acceptance):
    acceptance["n"] = 1
    rng = random.Random("acceptance-1")
    start = time.perf_counter()
    bad = []
    for i in range(200):
        f, h = pair(rng)
        sf, sh = naive.tree_size(f), naive.tree_size(h)
        if optimal_size(f | h) != min(sf, sh):
            bad.append((i, "union"))
        s, _ = sum_formulas(f, h, FreshAllocator.above(f, h))
        if optimal_size(s) != sf + sh + 1:
            bad.append((i, "sum"))
        p = product(f, h)
        want = sf * sh + sf + sh
        if optimal_size(p) != want:
            bad.append((i, "product"))
        t = product_tree(Oracle(f).tree(), Oracle(h).tree())
        if not validate_tree(p, t) or tree_size(t) != want:
            bad.append((i, "product tree"))
    elapsed = time.perf_counter() - start
    acceptance["detail"] = f"200 pairs, {len(bad)} mismatches, {elapsed:.1f}s"
    assert bad == []
    assert elapsed < 120


def test_criterion_2_lemma1_simulation(acceptance):
    acceptance["n"] = 2
    rng = random.Random("acceptance-2")
    bad = []
    for i in range(100):
        f = random_unsat(rng, range(1, rng.randint(1, 4) + 1))
        alloc = FreshAllocator.above(f)
        g = to_dpll_equivalent(f, alloc)
        want = naive.tree_size(f)
        o = Oracle(g, OracleConfig(DPLL))
        if o.size() != want:
            bad.append((i, "size"))
        back = lemma1_tree_back(o.tree(), alloc.shadow, cnf.variables(f))
        if not validate_tree(f, back) or tree_size(back) != want:
            bad.append((i, "tree back"))
    acceptance["detail"] = f"100 formulas, {len(bad)} mismatches"
    assert bad == []


def test_criterion_3_monotone_shield(acceptance):
    acceptance["n"] = 3
    rng = random.Random("acceptance-3")
    bad = []
    for i in range(100):
        vs = range(1, rng.randint(1, 4) + 1)
        f = random_unsat(rng, vs) if i % 5 else random_sized(rng, vs)
        g = mono_shield(f, FreshAllocator.above(f))
        if cnf.pure_literals(g):
            bad.append((i, "pure literal"))
        if optimal_size(g, OracleConfig(DPLL)) != naive.tree_size(f, "dpllmono"):
            bad.append((i, "size"))
    acceptance["detail"] = f"100 formulas, {len(bad)} mismatches"
    assert bad == []


def c_case(f, xs):
    rest = sorted(cnf.variables(f) - set(xs))
    want = 2 ** len(xs) - 1
    for bits in itertools.product((False, True), repeat=len(xs)):
        want += naive.tree_size(cnf.restrict(f, dict(zip(xs, bits))), "dpllmono", rest)
    g = c_transform(f, xs, FreshAllocator.above(f))
    return want, optimal_size(g, mono(cnf.variables(f)))


def test_criterion_4_restricted_gadgets(acceptance):
    acceptance["n"] = 4
    start = time.perf_counter()
    bad = []
    for n in (1, 2, 3):
        a = FreshAllocator()
        v = v_formula(n, a)
        if optimal_size(v, mono(a.branchable(v))) != 2 ** n - 1:
            bad.append(("V", n))
    # c_X: every formula over two variables with up to three clauses, and over
    # three variables with up to two, for every X of size at most 2
    c_count = 0
    for f in itertools.chain(all_small_formulas([1, 2], 3), all_small_formulas([1, 2, 3], 2)):
        vs = sorted(cnf.variables(f))
        for k in range(min(len(vs), 2) + 1):
            for xs in itertools.combinations(vs, k):
                want, got = c_case(f, list(xs))
                c_count += 1
                if want != got:
                    bad.append(("c", cnf.format_formula(f), xs))
    # then |X| <= 2 with two further variables, seeded
    rng = random.Random("acceptance-4")
    for _ in range(150):
        nx, ny = rng.randint(0, 2), rng.randint(1, 2)
        f = random_sized(rng, range(1, nx + ny + 1), 6)
        xs = sorted(cnf.variables(f) & set(range(1, nx + 1)))
        want, got = c_case(f, xs)
        c_count += 1
        if want != got:
            bad.append(("c", cnf.format_formula(f), xs))
    # e_X: every G over n <= 2 variables with up to three clauses
    e_count = 0
    for n in (0, 1, 2):
        xs = list(range(1, n + 1))
        for g in all_small_formulas(xs, 3):
            a = FreshAllocator.above(g, cnf.formula([[x] for x in xs]))
            e = e_transform(g, a, xs)
            want = 2 ** (n + 1) - 1 + 2 * models(g, xs)
            e_count += 1
            if optimal_size(e, mono(a.branchable(e) | set(xs))) != want:
                bad.append(("e", cnf.format_formula(g)))
    elapsed = time.perf_counter() - start
    acceptance["detail"] = f"V_1..V_3, {c_count} c_X cases, {e_count} e_X cases, {len(bad)} mismatches, {elapsed:.1f}s"
    assert bad == []
    assert elapsed < 300


def test_criterion_5_exact_size(acceptance):
    acceptance["n"] = 5
    bad = []
    checked = 0
    for kind in (BACKTRACKING, DPLL_MONO, DPLL):
        for method in ("binary", "unary"):
            for m in range(13):
                a = FreshAllocator()
                f = exact_size_formula(m, kind, a, method)
                allowed = a.branchable(f) if kind is DPLL_MONO else None
                got = optimal_size(f, OracleConfig(TreeDiscipline(kind.kind, allowed), decompose=False))
                checked += 1
                if got != m:
                    bad.append((kind.kind.value, method, m, got))
                if kind is BACKTRACKING and method == "binary" and naive.tree_size(f) != m:
                    bad.append(("naive", m))
    acceptance["detail"] = f"m=0..12, three kinds, two constructions ({checked} formulas), {len(bad)} mismatches"
    assert bad == []


def parity_seq(rng, r):
    seq, start = [], 1
    for i in range(r):
        vs = list(range(start, start + rng.randint(1, 3)))
        start = vs[-1] + 1
        unsat = i >= r - 2 or rng.random() < 0.4
        seq.append(random_unsat(rng, vs, 6) if unsat else random_sat(rng, vs, 6))
    return seq


def first_unsat(seq):
    return next(i for i, f in enumerate(seq, 1) if not naive.satisfiable(f))


def test_criterion_6_reductions(acceptance):
    acceptance["n"] = 6
    rng = random.Random("acceptance-6")
    start = time.perf_counter()
    bad = []
    parity = 0
    for r in (2, 4):
        for i in range(12):
            seq = parity_seq(rng, r)
            kind = DPLL if r == 2 and i % 3 == 0 else BACKTRACKING
            parity += 1
            if decide(reduce_parity_sat(seq, kind)) != (first_unsat(seq) % 2 == 1):
                bad.append(("paritysat", r, i))
    kinds = [BACKTRACKING, DPLL, DPLL_MONO]
    for i in range(54):
        g = random_sized(rng, range(1, rng.randint(1, 3) + 1), 6)
        if decide(reduce_ots_conp(g, kinds[i % 3])) != (not naive.satisfiable(g)):
            bad.append(("otsconp", i))
    for i in range(60):
        vs = range(1, rng.randint(1, 3) + 1)
        g = random_unsat(rng, vs, 6) if i % 4 else random_sized(rng, vs, 6)
        k = rng.randint(0, 5)
        if decide(reduce_ots_to_obv(g, k)) != (naive.tree_size(g, "dpllmono") <= k):
            bad.append(("otstoobv", i))
    emin = 0
    for f in all_small_formulas([1, 2], 3):
        half = 1
        want = any(models(cnf.restrict(f, {1: b}), [2]) <= half for b in (False, True))
        emin += 1
        if decide(reduce_eminsat(f, [1], [2])) != want:
            bad.append(("eminsat", cnf.format_formula(f)))
    elapsed = time.perf_counter() - start
    acceptance["detail"] = (f"{parity} parity sequences, 54 ots-conp, 60 ots-to-obv, {emin} e-minsat; "
                            f"{len(bad)} disagreements, {elapsed:.1f}s")
    assert bad == []
    assert elapsed < 1800


def test_criterion_7_resolution(acceptance):
    acceptance["n"] = 7
    bad = []
    if min_regular_size(cnf.parse_formula("{1, -1}"), 4) != 1:
        bad.append("{x,-x}")
    if min_regular_size(K2, 6) != 3:
        bad.append("K2")
    rng = random.Random("acceptance-7")
    for i in range(60):
        f = random_unsat(rng, range(1, rng.randint(1, 3) + 1), 5)
        h = random_unsat(rng, range(4, 4 + rng.randint(1, 2)), 4)
        want = min(naive.regular_proof_sets(f, 10)[0], naive.regular_proof_sets(h, 10)[0])
        if min_regular_size(f | h, 16) != want:
            bad.append(("union", i))
    pushes = 0
    for i in range(60):
        f, gamma = gx_instance(rng, 3)
        x = cnf.max_var(f) + 1
        g = g_transform(f, gamma, x)
        proofs = all_min_regular_proofs(g, 16)
        if any(sum(s.pivot == x for s in p.steps) != 1 for p in proofs):
            bad.append(("gx once", i))
        if not any(has_leaf_step(p, frozenset([x]), gamma | {-x}) for p in proofs):
            bad.append(("gx leaf", i))
        for p in proofs + [tree_to_resolution(g, Oracle(g).tree())]:
            if not any(s.pivot == x for s in p.steps):
                continue
            q = push_pivot_to_leaves(p, x)
            pushes += 1
            if not validate_regular_proof(g, q) or q.size > p.size:
                bad.append(("push", i))
    orp = 0
    for i in range(24):
        f = random_sized(rng, range(1, rng.randint(1, 2) + 1), 4)
        out = reduce_orp(f)
        (g1, d1), (g2, d2) = out.pairs
        unsat = not naive.satisfiable(f)
        orp += 1
        got = (is_optimal_resolution_pair(out.formula, g1, d1, 24),
               is_optimal_resolution_pair(out.formula, g2, d2, 24))
        if got != (unsat, not unsat):
            bad.append(("orp", i))
    acceptance["detail"] = f"base sizes, 60 unions, 60 g_x instances ({pushes} pushes), {orp} orp; {len(bad)} problems"
    assert bad == []


def shared_pool():
    rng = random.Random("acceptance-pool")
    pool = [cnf.parse_formula("{1, -1}"), K2, cnf.parse_formula("{1, 2, -1 -2}"),
            cnf.parse_formula("{1 2 3, 1 2 -3, 1 -2 3, 1 -2 -3, -1 2 3, -1 2 -3, -1 -2 3, -1 -2 -3}")]
    pool += [random_unsat(rng, range(1, rng.randint(1, 3) + 1), 6) for _ in range(120)]
    return pool


def test_criterion_8_cross_calculus(acceptance):
    acceptance["n"] = 8
    bad = []
    pool = shared_pool()
    for i, f in enumerate(pool):
        bt = optimal_size(f)
        dp = optimal_size(f, OracleConfig(DPLL))
        mo = optimal_size(f, OracleConfig(DPLL_MONO))
        reg = min_regular_size(f, bt)
        if not (reg <= bt and dp <= mo <= bt):
            bad.append((i, reg, dp, mo, bt))
    acceptance["detail"] = f"{len(pool)} unsatisfiable formulas, {len(bad)} violations"
    assert bad == []


def test_criterion_9_determinism(acceptance, tmp_path, capsys):
    acceptance["n"] = 9
    differ = []
    for suite in suite_names():
        a = run_law_suite(suite, 4, 1234).to_json()
        b = run_law_suite(suite, 4, 1234).to_json()
        if a != b:
            differ.append(suite)
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        run_command(["verify", "all", "--samples", "3", "--seed", "99", "--report", str(p)])
    capsys.readouterr()
    if paths[0].read_bytes() != paths[1].read_bytes():
        differ.append("cli verify all")
    assert len(json.loads(paths[0].read_text())) == len(suite_names())
    acceptance["detail"] = f"{len(suite_names())} suites plus the CLI report, {len(differ)} differences"
    assert differ == []
