"""Brute-force semantics: truth tables, boundary points, removability.

Everything here enumerates points explicitly with numpy and is meant as
ground truth for small formulas.  A point over an ordered variable list
``vs`` is an integer whose bit ``j`` holds the value of ``vs[j]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .cnf import Assignment, Clause, Cnf, EcnfFormula, QeError, cofactor

DEFAULT_CAP = 20


class OracleCapExceeded(QeError):
    pass


def _lits(c):
    return c.lits if isinstance(c, Clause) else tuple(c)


def _check_cap(n, cap):
    if n > cap:
        raise OracleCapExceeded(f"{n} variables exceed the oracle cap of {cap}")


def _columns(vs):
    n = len(vs)
    idx = np.arange(1 << n, dtype=np.int64)
    return {v: ((idx >> j) & 1).astype(bool) for j, v in enumerate(vs)}, 1 << n


def _eval(clauses, cols, size):
    out = np.ones(size, dtype=bool)
    for c in clauses:
        lits = _lits(c)
        if not lits:
            return np.zeros(size, dtype=bool)
        cv = np.zeros(size, dtype=bool)
        for l in lits:
            col = cols[abs(l)]
            cv |= col if l > 0 else ~col
        out &= cv
    return out


def _vars_of(clauses):
    return {abs(l) for c in clauses for l in _lits(c)}


@dataclass(frozen=True)
class TruthTable:
    """A Boolean function over ``vars`` (ascending), one bit per point."""

    vars: tuple
    bits: np.ndarray

    def __eq__(self, other):
        return (isinstance(other, TruthTable) and self.vars == other.vars
                and np.array_equal(self.bits, other.bits))

    def __hash__(self):
        return hash((self.vars, self.bits.tobytes()))

    def value(self, point) -> bool:
        idx = sum(1 << j for j, v in enumerate(self.vars) if point[v])
        return bool(self.bits[idx])

    def point(self, idx) -> dict:
        return {v: bool((idx >> j) & 1) for j, v in enumerate(self.vars)}

    def count(self) -> int:
        return int(self.bits.sum())


def cnf_table(g, vs=None, cap=DEFAULT_CAP) -> TruthTable:
    clauses = g.clauses if isinstance(g, Cnf) else list(g)
    vs = tuple(sorted(_vars_of(clauses) if vs is None else vs))
    _check_cap(len(vs), cap)
    cols, size = _columns(vs)
    return TruthTable(vs, _eval(clauses, cols, size))


def _exists_table(clauses, keep, elim, cap):
    keep = tuple(sorted(keep))
    elim = tuple(sorted(elim))
    _check_cap(len(keep) + len(elim), cap)
    cols, size = _columns(keep + elim)
    sat = _eval(clauses, cols, size)
    bits = sat.reshape(1 << len(elim), 1 << len(keep)).any(axis=0)
    return TruthTable(keep, bits)


def oracle_qe(phi: EcnfFormula, cap=DEFAULT_CAP, over=None) -> TruthTable:
    """Truth table of ``exists X [F]`` over Y (or over ``over`` if given)."""
    fv = phi.cnf.variables()
    keep = set(fv - phi.quantified) if over is None else set(over)
    return _exists_table(phi.clauses, keep, fv & phi.quantified - keep, cap)


def _comparison_tables(g, phi, cap):
    gcl = g.clauses if isinstance(g, Cnf) else list(g)
    gv = _vars_of(gcl)
    bad = gv & phi.quantified
    if bad:
        raise ValueError(f"G mentions quantified variables {sorted(bad)}")
    over = gv | (phi.cnf.variables() - phi.quantified)
    return cnf_table(gcl, over, cap), oracle_qe(phi, cap, over)


def equivalent_to_oracle(g, phi: EcnfFormula, cap=DEFAULT_CAP) -> bool:
    """True iff ``g`` and ``exists X [F]`` agree on every Y-point."""
    gt, ot = _comparison_tables(g, phi, cap)
    return gt == ot


def first_difference(g, phi: EcnfFormula, cap=DEFAULT_CAP):
    """First Y-point where ``g`` and ``exists X [F]`` differ, or None.

    Returns ``(point, g_value, exists_value)``.
    """
    gt, ot = _comparison_tables(g, phi, cap)
    diff = np.flatnonzero(gt.bits != ot.bits)
    if not len(diff):
        return None
    idx = int(diff[0])
    return gt.point(idx), bool(gt.bits[idx]), bool(ot.bits[idx])


def implies(f, clause, cap=DEFAULT_CAP) -> bool:
    """Truth-table check that ``f`` implies ``clause``."""
    fcl = f.clauses if isinstance(f, Cnf) else list(f)
    lits = _lits(clause)
    vs = sorted(_vars_of(fcl) | {abs(l) for l in lits})
    _check_cap(len(vs), cap)
    cols, size = _columns(vs)
    return not (_eval(fcl, cols, size) & ~_eval([lits], cols, size)).any()


def falsified_clauses(f: Cnf, point) -> list:
    return [c for c in f.clauses if not c.evaluate(point)]


def is_z_boundary_point(f: Cnf, point, z) -> bool:
    z = set(z)
    if not z:
        return False
    fals = falsified_clauses(f, point)
    if not fals:
        return False
    hits = [c.vars & z for c in fals]
    if not all(hits):
        return False
    # hitting is monotone, so dropping one element at a time suffices
    return all(any(h == {u} for h in hits) for u in z)


@dataclass(frozen=True)
class BoundaryClassification:
    point: dict
    falsified_clause_ids: frozenset
    minimal_z_sets: list


def classify_point(f: Cnf, point, within=None) -> BoundaryClassification:
    """Falsified clauses of ``point`` and every Z (inside ``within``) for
    which it is a Z-boundary point, i.e. the minimal hitting sets."""
    fals = falsified_clauses(f, point)
    universe = set().union(*(c.vars for c in fals)) if fals else set()
    if within is not None:
        universe &= set(within)
    universe = sorted(universe)
    sets = []
    if fals:
        for r in range(1, len(universe) + 1):
            for z in combinations(universe, r):
                zs = set(z)
                if any(s <= zs for s in sets):
                    continue
                if all(c.vars & zs for c in fals):
                    sets.append(frozenset(z))
    return BoundaryClassification(dict(point), frozenset(c.id for c in fals), sets)


def is_removable(f: Cnf, point, flip, cap=DEFAULT_CAP) -> bool:
    """True iff no assignment reached from ``point`` by flipping only
    variables of ``flip`` satisfies ``f``."""
    flip = set(flip) & f.variables()
    _check_cap(len(flip), cap)
    fixed = Assignment(v if b else -v for v, b in point.items() if v not in flip)
    rest = cofactor(f, fixed)
    if any(c.is_empty() for c in rest.clauses):
        return True
    t = cnf_table(rest, flip, cap)
    return not t.bits.any()


def find_removable_boundary_point(f: Cnf, z, flip, cap=DEFAULT_CAP):
    """A point that is a V-boundary point of ``f`` for some nonempty
    V subset of ``z`` and cannot be repaired by flipping ``flip``.

    Returns the lowest such point as a dict, or None.
    """
    z = set(z)
    fv = f.variables()
    w = sorted(set(flip) & fv)
    rest = sorted(fv - set(w))
    _check_cap(len(w) + len(rest), cap)
    cols, size = _columns(rest + w)
    sat = _eval(f.clauses, cols, size)
    no_z_falsified = _eval([c for c in f.clauses if not (c.vars & z)], cols, size)
    repairable = sat.reshape(1 << len(w), 1 << len(rest)).any(axis=0)
    repairable = np.tile(repairable, 1 << len(w))
    bad = ~sat & no_z_falsified & ~repairable
    hits = np.flatnonzero(bad)
    if not len(hits):
        return None
    idx = int(hits[0])
    vs = rest + w
    return {v: bool((idx >> j) & 1) for j, v in enumerate(vs)}


def check_scoped_redundancy(phi: EcnfFormula, q, z, w, cap=DEFAULT_CAP) -> bool:
    """Is Z redundant in ``exists X [F|q]`` with scope W?"""
    q = Assignment(q)
    z, w = frozenset(z), frozenset(w)
    if not z <= w:
        raise ValueError("Z must be a subset of the scope W")
    if w & q.vars:
        raise ValueError("scope variables must be unassigned by q")
    if not w <= phi.quantified:
        raise ValueError("scope must consist of quantified variables")
    if not z:
        return True
    return find_removable_boundary_point(cofactor(phi.cnf, q), z, w, cap) is None


def check_dsequent(ds, phi: EcnfFormula, cap=DEFAULT_CAP) -> bool:
    """Does the D-sequent hold for ``phi``?"""
    cond = Assignment(ds.condition)
    if not ds.vars <= ds.scope:
        raise ValueError("malformed D-sequent: vars not contained in scope")
    if ds.scope & cond.vars:
        raise ValueError("malformed D-sequent: scope meets condition")
    return check_scoped_redundancy(phi, cond, ds.vars, ds.scope, cap)


def is_redundant(phi: EcnfFormula, z, cap=DEFAULT_CAP) -> bool:
    """Plain redundancy: dropping the Z-clauses keeps ``exists X [F]``."""
    z = set(z)
    keep = phi.cnf.variables() - phi.quantified
    reduced = Cnf(tuple(c for c in phi.clauses if not (c.vars & z)), phi.num_vars)
    t1 = _exists_table(phi.clauses, keep, phi.cnf.variables() & phi.quantified, cap)
    t2 = _exists_table(reduced.clauses, keep, reduced.variables() & phi.quantified, cap)
    return t1 == t2
