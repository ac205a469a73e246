import pytest

from ddsqe.baselines import CapExceeded, dp_resolution_qe, enum_sa_qe, qe_gbl, qe_gbl_step
from ddsqe.benchgen import BASE_BLOCK, component_map, gen_copies
from ddsqe.cnf import Cnf, EcnfFormula
from ddsqe.oracle import equivalent_to_oracle, oracle_qe

from conftest import sweep


def lits(g):
    return [list(c.lits) for c in g.clauses]


def test_dp_example(example):
    assert lits(dp_resolution_qe(example, [3]).g) == [[-1, 2]]


def test_dp_no_quantifiers():
    phi = EcnfFormula.from_lists([[1, 2], [-2]], set())
    assert lits(dp_resolution_qe(phi).g) == [[1, 2], [-2]]


def test_dp_drops_tautologies():
    # resolving (x | a | b) with (~x | ~a) on x would give a | ~a | b
    phi = EcnfFormula.from_lists([[1, 2, 3], [-1, -2]], {1})
    r = dp_resolution_qe(phi)
    assert r.g.clauses == () and r.stats["resolvents"] == 0


def test_dp_order_must_match():
    with pytest.raises(ValueError):
        dp_resolution_qe(EcnfFormula.from_lists([[1, 2]], {1}), [2])


def test_dp_clause_cap():
    phi = EcnfFormula.from_lists([[1, v] for v in range(2, 8)] + [[-1, -v] for v in range(2, 8)], {1})
    with pytest.raises(CapExceeded):
        dp_resolution_qe(phi, clause_cap=10)


def test_dp_stays_in_components():
    phi = gen_copies(BASE_BLOCK, 6)
    r = dp_resolution_qe(phi, components=component_map(BASE_BLOCK, 6))
    assert len(r.g.clauses) == 6


def test_enumsa_example(example):
    r = enum_sa_qe(example)
    assert r.stats["models"] == 3
    assert equivalent_to_oracle(r.g, example)


def test_enumsa_unsat():
    r = enum_sa_qe(EcnfFormula.from_lists([[1, 2], [-1, 2], [-2]], {1}))
    assert lits(r.g) == [[]] and r.stats["models"] == 0


def test_enumsa_no_free_variables():
    r = enum_sa_qe(EcnfFormula.from_lists([[1, 2]], {1, 2}))
    assert r.g.clauses == () and r.stats["models"] == 1


def test_enumsa_model_count_grows_exponentially():
    counts = [enum_sa_qe(gen_copies(BASE_BLOCK, k)).stats["models"] for k in (1, 2, 3, 4)]
    assert counts == [3, 9, 27, 81]


def test_enumsa_caps():
    with pytest.raises(CapExceeded):
        enum_sa_qe(gen_copies(BASE_BLOCK, 8), max_models=100)
    with pytest.raises(CapExceeded, match="time"):
        enum_sa_qe(gen_copies(BASE_BLOCK, 15), time_cap=0.05)


def test_qegbl_step_example(example):
    g, added = qe_gbl_step(example.cnf, 3)
    assert [c.lits for c in added] == [(-1, 2)]
    assert [c.lits for c in g.clauses] == [(-1, 2)]


def test_qegbl_blocked_adds_nothing():
    f = Cnf.from_lists([[1, 2], [1, 3]])
    g, added = qe_gbl_step(f, 1)
    assert added == [] and g.clauses == ()


@pytest.mark.parametrize("algo", [dp_resolution_qe, enum_sa_qe, qe_gbl])
def test_baselines_match_oracle(algo):
    for _, phi in sweep()[:200]:
        g = algo(phi).g
        assert not any(c.vars & phi.quantified for c in g.clauses)
        assert equivalent_to_oracle(g, phi)


def test_qegbl_example_result(example):
    assert oracle_qe(EcnfFormula(qe_gbl(example).g, frozenset())) == oracle_qe(example)
