import random

import pytest

from ddsqe.cnf import Assignment, Cnf, EcnfFormula
from ddsqe.oracle import (OracleCapExceeded, check_dsequent, check_scoped_redundancy,
                          classify_point, cnf_table, equivalent_to_oracle,
                          find_removable_boundary_point, first_difference, is_redundant,
                          is_removable, is_z_boundary_point, oracle_qe)
from ddsqe.dseq import DSequent

import props


def test_oracle_qe_example(example):
    t = oracle_qe(example)
    assert t.vars == (1, 2)
    # rows indexed by y1 + 2*y2: only y1=1, y2=0 is excluded
    assert t.bits.tolist() == [True, False, True, True]
    assert t == cnf_table([[-1, 2]], (1, 2))


def test_oracle_qe_no_quantifiers():
    phi = EcnfFormula.from_lists([[1, 2], [-1]], set())
    assert oracle_qe(phi) == cnf_table(phi.cnf)


def test_oracle_qe_all_quantified_unsat():
    phi = EcnfFormula.from_lists([[1], [-1]], {1})
    t = oracle_qe(phi)
    assert t.vars == () and t.bits.tolist() == [False]


def test_oracle_cap():
    phi = EcnfFormula.from_lists([[v] for v in range(1, 23)], {1})
    with pytest.raises(OracleCapExceeded):
        oracle_qe(phi)
    assert oracle_qe(phi, cap=22).count() == 1


def test_equivalence_examples(example):
    assert equivalent_to_oracle([[-1, 2]], example)
    assert not equivalent_to_oracle([[1]], example)
    point, gv, ev = first_difference([[1]], example)
    assert point == {1: False, 2: False} and (gv, ev) == (False, True)
    plain = EcnfFormula.from_lists([[1, 2], [-2]], set())
    assert equivalent_to_oracle(plain.cnf, plain)


def test_equivalence_rejects_quantified_in_g(example):
    with pytest.raises(ValueError):
        equivalent_to_oracle([[3]], example)


def test_boundary_point_examples():
    f = Cnf.from_lists([[1, 2]])
    assert is_z_boundary_point(f, {1: False, 2: False}, {1})
    assert not is_z_boundary_point(f, {1: False, 2: False}, set())
    assert not is_z_boundary_point(f, {1: True, 2: False}, {1})
    # {1,2} hits the clause but is not minimal
    assert not is_z_boundary_point(f, {1: False, 2: False}, {1, 2})


def test_classify_point_minimal_sets():
    f = Cnf.from_lists([[1, 2], [2, 3], [1, 3]])
    bc = classify_point(f, {1: False, 2: False, 3: False})
    assert bc.falsified_clause_ids == {0, 1, 2}
    assert sorted(sorted(z) for z in bc.minimal_z_sets) == [[1, 2], [1, 3], [2, 3]]
    for z in bc.minimal_z_sets:
        assert is_z_boundary_point(f, bc.point, z)


def test_removable_examples(example):
    assert not is_removable(Cnf.from_lists([[1]]), {1: False}, {1})
    assert is_removable(Cnf.from_lists([[1], [-1]]), {1: False}, {1})
    assert is_removable(example.cnf, {1: True, 2: False, 3: False}, {3})


def test_scoped_redundancy_examples():
    # x = 1, y1 = 2, y2 = 3
    phi = EcnfFormula.from_lists([[1, 2], [-1, 3]], {1})
    assert check_scoped_redundancy(phi, Assignment([2]), {1}, {1})
    assert not check_scoped_redundancy(phi, Assignment(), {1}, {1})
    assert check_scoped_redundancy(phi, Assignment(), set(), {1})
    assert check_scoped_redundancy(EcnfFormula.from_lists([[1]], {1}), Assignment(), {1}, {1})
    assert not check_scoped_redundancy(EcnfFormula.from_lists([[1], [-1]], {1}),
                                       Assignment(), {1}, {1})


@pytest.mark.parametrize("z,w,q", [({1}, set(), ()), ({1}, {1}, (1,)), ({2}, {2}, ())])
def test_scoped_redundancy_malformed(z, w, q):
    phi = EcnfFormula.from_lists([[1, 2], [-1, 3]], {1})
    with pytest.raises(ValueError):
        check_scoped_redundancy(phi, Assignment(q), z, w)


def test_check_dsequent_example():
    phi = EcnfFormula.from_lists([[1, 2], [-1, 3]], {1})
    assert check_dsequent(DSequent([2], {1}, {1}, "x"), phi)
    # clause D-sequent: s falsifies C = (y1 | y2) entirely
    phi2 = EcnfFormula.from_lists([[1, 2], [3, 1], [-3, 2]], {3})
    assert check_dsequent(DSequent([-1, -2], {3}, {3}, "clause"), phi2)


def test_removable_point_search_matches_definition():
    for phi in props.instances(3, 7, 25, 9):
        f = phi.cnf
        xs = f.variables() & phi.quantified
        for x in xs:
            p = find_removable_boundary_point(f, {x}, xs)
            direct = [pt for pt in props.points(f.variables())
                      if not f.evaluate(pt)
                      and all(x in c.vars for c in f.clauses if not c.evaluate(pt))
                      and not props.flip_repairable(f, pt, xs)]
            assert (p is None) == (not direct)
            if p is not None:
                assert p in direct


def test_is_redundant_definition():
    # x = 1 monotone: its clauses can be dropped
    phi = EcnfFormula.from_lists([[1, 2], [1, 3]], {1})
    assert is_redundant(phi, {1})
    phi = EcnfFormula.from_lists([[1, 2], [-1, 3]], {1})
    assert not is_redundant(phi, {1})


SMALL = props.instances(3, 7, 20, 11)


def test_flip_and_clause_forms():
    n, bad = props.check_flip_characterization(SMALL)
    assert n > 100 and bad == 0


def test_redundancy_vs_boundary_points():
    n, bad = props.check_redundancy_vs_boundary(SMALL)
    assert n > 30 and bad == 0


def test_removability_survives_cofactoring():
    n, bad = props.check_removable_under_cofactor(SMALL, random.Random(1))
    assert n > 100 and bad == 0


def test_blocked_is_locally_redundant():
    n, bad = props.check_blocked_local(SMALL, random.Random(2))
    assert n > 50 and bad == 0


def test_empty_clause_makes_all_local():
    n, bad = props.check_empty_clause_local(SMALL, random.Random(3))
    assert n > 20 and bad == 0


def test_scoped_implies_plain_redundancy():
    n, bad = props.check_scoped_implies_plain(SMALL, random.Random(4))
    assert n > 100 and bad == 0
