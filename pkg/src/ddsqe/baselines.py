"""Reference QE algorithms: DP resolution, model enumeration, QE-GBL.

These exist to be compared against DDS.  DP and EnumSA scale to the
benchmark families; QE-GBL finds boundary points with the brute-force
oracle and is therefore limited to small formulas.
"""

from __future__ import annotations

import sys
import time
from dataclasses import dataclass, field

import numpy as np

from .cnf import Clause, Cnf, EcnfFormula, QeError, resolve_clauses
from .oracle import DEFAULT_CAP, OracleCapExceeded, find_removable_boundary_point


class CapExceeded(QeError):
    """A baseline ran past its clause, model or time budget."""


@dataclass
class BaselineResult:
    g: Cnf | None
    complete: bool
    stats: dict = field(default_factory=dict)
    wall_ms: float = 0.0


def _dedupe(clauses):
    seen, out = set(), []
    for c in clauses:
        if c not in seen:
            seen.add(c)
            out.append(c)
    return out


# ---- DP -------------------------------------------------------------------

def dp_resolution_qe(phi: EcnfFormula, order=None, clause_cap=200_000,
                     components=None) -> BaselineResult:
    """Eliminate X one variable at a time by clause distribution.

    ``order`` lists the quantified variables; by default they go in
    ascending order.  With ``components`` (var -> component id) every
    resolvent is checked to stay inside one component.
    """
    t0 = time.perf_counter()
    order = sorted(phi.quantified) if order is None else list(order)
    if set(order) != set(phi.quantified):
        raise ValueError("order must list exactly the quantified variables")
    clauses = _dedupe(c.lits for c in phi.clauses)
    added = 0
    for x in order:
        pos = [c for c in clauses if x in c]
        neg = [c for c in clauses if -x in c]
        rest = [c for c in clauses if x not in c and -x not in c]
        new = []
        for a in pos:
            for b in neg:
                if any(-l in b for l in a if l != x):
                    continue    # tautology
                r = resolve_clauses(a, b, x).lits
                if components is not None and len({components[abs(l)] for l in r}) > 1:
                    raise QeError(f"resolvent {r} spans components")
                new.append(r)
        added += len(new)
        clauses = _dedupe(rest + new)
        if len(clauses) > clause_cap:
            raise CapExceeded(f"{len(clauses)} clauses exceed the cap of {clause_cap}")
    if () in clauses:
        clauses = [()]
    g = Cnf(tuple(Clause(c, i) for i, c in enumerate(clauses)), phi.num_vars)
    return BaselineResult(g, True, {"resolvents": added, "clauses": len(clauses)},
                          (time.perf_counter() - t0) * 1000.0)


# ---- EnumSA ---------------------------------------------------------------

def _models(clauses, order, deadline):
    """Yield satisfying total assignments in branching order.

    Plain DPLL with unit propagation, no learning, false tried first.
    The search is not restarted between models: the caller appends
    blocking clauses to ``clauses`` and the search sees them when it
    resumes.
    """
    val = {}

    def propagate():
        changed = True
        while changed:
            changed = False
            for c in clauses:
                free = None
                nfree = 0
                for l in c:
                    b = val.get(abs(l))
                    if b is None:
                        nfree += 1
                        free = l
                    elif b == (l > 0):
                        break
                else:
                    if nfree == 0:
                        return False
                    if nfree == 1:
                        val[abs(free)] = free > 0
                        changed = True
        return True

    def search(i):
        if deadline is not None and time.perf_counter() > deadline:
            raise CapExceeded("time cap reached")
        if not propagate():
            return
        while i < len(order) and order[i] in val:
            i += 1
        if i == len(order):
            yield dict(val)
            return
        v = order[i]
        saved = dict(val)
        for b in (False, True):
            val[v] = b
            yield from search(i + 1)
            val.clear()
            val.update(saved)

    yield from search(0)


def _complement_cnf(cubes, ys, num_vars, cap):
    """CNF over ``ys`` true exactly on the union of the Y-points ``cubes``."""
    if len(ys) > cap:
        raise OracleCapExceeded(f"{len(ys)} free variables exceed the cap of {cap}")
    covered = np.zeros(1 << len(ys), dtype=bool)
    for cube in cubes:
        covered[sum(1 << j for j, y in enumerate(ys) if cube[y])] = True
    out = []
    for idx in np.flatnonzero(~covered):
        idx = int(idx)
        lits = tuple(-y if (idx >> j) & 1 else y for j, y in enumerate(ys))
        out.append(Clause(lits, len(out)))
    return Cnf(tuple(out), num_vars)


def enum_sa_qe(phi: EcnfFormula, max_models=20_000, time_cap=None,
               table_cap=DEFAULT_CAP) -> BaselineResult:
    """Enumerate the Y-projections of satisfying points with blocking clauses.

    Each model found is projected on Y and blocked; when F plus the
    blocking clauses is unsatisfiable, G is the exact complement of the
    blocked cubes.  Raises CapExceeded past ``max_models`` or ``time_cap``.
    """
    t0 = time.perf_counter()
    deadline = None if time_cap is None else t0 + time_cap
    ys = sorted(phi.nonquantified)
    order = ys + sorted(phi.cnf.variables() & phi.quantified)
    clauses = [c.lits for c in phi.clauses]
    cubes = []
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 2 * len(order) + 1000))
    try:
        for m in _models(clauses, order, deadline):
            cube = {y: m[y] for y in ys}
            cubes.append(cube)
            if len(cubes) > max_models:
                raise CapExceeded(f"more than {max_models} models")
            if not ys:
                break
            clauses.append(tuple(-y if cube[y] else y for y in ys))
    finally:
        sys.setrecursionlimit(limit)
    if not cubes:
        g = Cnf((Clause((), 0),), phi.num_vars)
    elif not ys:
        g = Cnf((), phi.num_vars)
    else:
        g = _complement_cnf(cubes, ys, phi.num_vars, table_cap)
    return BaselineResult(g, True, {"models": len(cubes)},
                          (time.perf_counter() - t0) * 1000.0)


# ---- QE-GBL ---------------------------------------------------------------

def _falsified(clauses, point):
    return [c for c in clauses if not any(point[abs(l)] == (l > 0) for l in c.lits)]


def qe_gbl_step(f: Cnf, x: int, cap=DEFAULT_CAP, next_id=None):
    """Make ``x`` redundant in ``f`` and drop its clauses.

    While some {x}-boundary point cannot be repaired by flipping ``x``,
    resolve a clause it falsifies with a clause the flipped point
    falsifies; the resolvent excludes the point.  Returns the new CNF and
    the resolvents added.
    """
    clauses = list(f.clauses)
    nid = (max((c.id for c in clauses), default=-1) + 1) if next_id is None else next_id
    added = []
    while True:
        p = find_removable_boundary_point(Cnf(tuple(clauses), f.num_vars), {x}, {x}, cap)
        if p is None:
            break
        a = _falsified(clauses, p)[0]
        p[x] = not p[x]
        b = next(c for c in _falsified(clauses, p) if x in c.vars)
        r = resolve_clauses(a, b, x, nid)
        nid += 1
        clauses.append(r)
        added.append(r)
    kept = tuple(c for c in clauses if x not in c.vars)
    return Cnf(kept, f.num_vars), added


def qe_gbl(phi: EcnfFormula, cap=DEFAULT_CAP) -> BaselineResult:
    t0 = time.perf_counter()
    n = len(phi.cnf.variables())
    if n > cap:
        raise OracleCapExceeded(f"{n} variables exceed the cap of {cap}")
    f = phi.cnf
    total = 0
    for x in sorted(phi.quantified):
        f, added = qe_gbl_step(f, x, cap)
        total += len(added)
    lits = _dedupe(c.lits for c in f.clauses)
    if () in lits:
        lits = [()]
    g = Cnf(tuple(Clause(c, i) for i, c in enumerate(lits)), phi.num_vars)
    return BaselineResult(g, True, {"resolvents": total},
                          (time.perf_counter() - t0) * 1000.0)

