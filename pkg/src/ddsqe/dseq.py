"""D-sequents: representation, atomic derivations, join, sym/asym split.

A D-sequent ``(s, W) -> Z`` says that the variables Z are redundant with
scope W in the subspace ``s`` of the current formula.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .cnf import (Assignment, QeError, falsifying_assignment,
                  resolvable, resolve_assignments)

CLAUSE = "clause"
BLOCKED = "blocked"
JOIN = "join"
MONOTONE = "monotone"


class DSequentError(QeError):
    pass


class NotBlockedError(DSequentError):
    pass


@dataclass(frozen=True)
class DSequent:
    condition: Assignment
    scope: frozenset
    vars: frozenset
    origin: str
    clause_id: int | None = field(default=None, compare=False)
    parents: tuple = field(default=(), compare=False, repr=False)
    # built only from clause D-sequents; exempt from component locality
    clause_like: bool = field(default=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "condition", Assignment(self.condition))
        object.__setattr__(self, "scope", frozenset(self.scope))
        object.__setattr__(self, "vars", frozenset(self.vars))
        if not self.vars <= self.scope:
            raise DSequentError(f"vars {sorted(self.vars)} not inside scope {sorted(self.scope)}")
        if self.scope & self.condition.vars:
            raise DSequentError("scope intersects the condition")

    @property
    def var(self) -> int:
        (v,) = self.vars
        return v

    def is_active(self, q) -> bool:
        return self.condition <= q

    def mentions(self, v: int) -> bool:
        return v in self.condition or -v in self.condition

    def to_json(self) -> dict:
        return {
            "condition": self.condition.sorted(),
            "scope": sorted(self.scope),
            "vars": sorted(self.vars),
            "origin": self.origin,
        }

    def __str__(self):
        cond = ",".join(f"{abs(l)}={int(l > 0)}" for l in self.condition.sorted())
        return f"({cond}) -> {{{','.join(map(str, sorted(self.vars)))}}}"


class ActiveDSequentSet:
    """At most one active D-sequent per redundant variable."""

    def __init__(self):
        self.by_var = {}

    def add(self, ds: DSequent):
        v = ds.var
        if v in self.by_var:
            raise DSequentError(f"variable {v} already has an active D-sequent")
        self.by_var[v] = ds

    def replace(self, ds: DSequent):
        self.by_var[ds.var] = ds

    def remove(self, v: int) -> DSequent:
        return self.by_var.pop(v)

    def get(self, v, default=None):
        return self.by_var.get(v, default)

    def __getitem__(self, v):
        return self.by_var[v]

    def __contains__(self, v):
        return v in self.by_var

    def __len__(self):
        return len(self.by_var)

    def __iter__(self):
        return iter(self.by_var.values())

    def vars(self):
        return self.by_var.keys()

    def split(self, v: int):
        return split_sym_asym(self.by_var.values(), v)


def split_sym_asym(dseqs, v: int):
    """Partition D-sequents into those whose condition omits / assigns ``v``."""
    sym, asym = [], []
    for ds in dseqs:
        (asym if ds.mentions(v) else sym).append(ds)
    return sym, asym


def atomic_from_falsified_clause(clause, x: int, clause_id=None) -> DSequent:
    """``(s, {x}) -> {x}`` where s is the shortest assignment falsifying
    ``clause``."""
    lits = getattr(clause, "lits", clause)
    if any(abs(l) == x for l in lits):
        raise DSequentError(f"variable {x} occurs in the falsified clause")
    if clause_id is None:
        clause_id = getattr(clause, "id", None)
    return DSequent(falsifying_assignment(lits), {x}, {x}, CLAUSE,
                    clause_id=clause_id, clause_like=True)


def atomic_from_blocked_var(view, v: int, origin=BLOCKED) -> DSequent:
    """D-sequent for a variable blocked in the marked cofactor.

    ``view`` exposes ``clause_lits(cid)``, ``occurrences(lit)``,
    ``value(var)`` (True/False/None) and ``ds`` (the active set).  For
    each pair of clauses resolvable on ``v``, one side must be satisfied
    by the current assignment or contain a redundant variable; the
    condition collects one satisfying literal, or the condition of that
    variable's D-sequent, per pair.
    """
    ds = view.ds
    cond = set()
    scope = {v}
    used = []
    for a in view.occurrences(v):
        la = view.clause_lits(a)
        for b in view.occurrences(-v):
            lb = view.clause_lits(b)
            if not resolvable(la, lb, v):
                continue
            sat = [l for l in la + lb if view.value(abs(l)) == (l > 0)]
            if sat:
                known = [l for l in sat if l in cond]
                cond.add(known[0] if known else min(sat, key=abs))
                continue
            red = sorted({abs(l) for l in la + lb if abs(l) != v and abs(l) in ds})
            if not red:
                raise NotBlockedError(
                    f"variable {v} is not blocked: clauses {a} and {b} resolve")
            reason = ds[red[0]]
            cond.update(reason.condition)
            scope |= reason.scope
            used.append(reason)
    # a reason's scope may hold a variable the search has since assigned
    scope -= {abs(l) for l in cond}
    return DSequent(Assignment(cond), scope, {v}, origin, parents=tuple(used))


def join_dsequents(s0: DSequent, s1: DSequent, v: int) -> DSequent:
    """Join two D-sequents for the same variables at ``v``."""
    if s0.vars != s1.vars:
        raise DSequentError("joined D-sequents must state the same variables")
    cond = resolve_assignments(s0.condition, s1.condition, v)
    if (s0.condition.vars & s1.scope) or (s1.condition.vars & s0.scope):
        raise DSequentError("join side condition violated: a scope meets the other condition")
    return DSequent(cond, s0.scope | s1.scope, s0.vars, JOIN, parents=(s0, s1),
                    clause_like=s0.clause_like and s1.clause_like)


def with_condition(ds: DSequent, extra) -> DSequent:
    """Same D-sequent restricted to a smaller subspace."""
    return replace(ds, condition=ds.condition.union(Assignment(extra)))


class StaticView:
    """Adapter presenting a fixed formula, assignment and D-sequent set
    to :func:`atomic_from_blocked_var`."""

    def __init__(self, cnf, q=(), ds=None):
        self._lits = {c.id: c.lits for c in cnf.clauses}
        self._occ = {}
        for c in cnf.clauses:
            for l in c.lits:
                self._occ.setdefault(l, []).append(c.id)
        self._q = Assignment(q)
        self.ds = ds if ds is not None else ActiveDSequentSet()

    def clause_lits(self, cid):
        return self._lits[cid]

    def occurrences(self, lit):
        return self._occ.get(lit, [])

    def value(self, var):
        return self._q.value(var)
