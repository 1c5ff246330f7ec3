import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from optproof import cnf

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE = {}


def clauses_over(variables, max_clauses=6, min_size=0, tautologies=False):
    lit = st.sampled_from(variables).flatmap(lambda v: st.sampled_from([v, -v]))
    clause = st.frozensets(lit, min_size=1, max_size=len(variables))
    if not tautologies:
        clause = clause.filter(lambda c: not cnf.is_tautology(c))
    return st.frozensets(clause, min_size=min_size, max_size=max_clauses)


def formulas(first=1, max_vars=3, max_clauses=6, tautologies=False):
    return st.integers(1, max_vars).flatmap(
        lambda n: clauses_over(list(range(first, first + n)), max_clauses, tautologies=tautologies))


def unsat_formulas(first=1, max_vars=3, max_clauses=8):
    return formulas(first, max_vars, max_clauses).filter(lambda f: not cnf.is_satisfiable(f))


@pytest.fixture
def acceptance(request):
    """Record a criterion's outcome for the end-of-run summary."""
    record = {}
    yield record
    n = record.get("n")
    if n is not None:
        failed = request.node.rep_call.failed if hasattr(request.node, "rep_call") else True
        ACCEPTANCE[n] = ("FAIL" if failed else "PASS", record.get("detail", ""))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    setattr(item, "rep_" + rep.when, rep)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        status, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {status}  {detail}")
