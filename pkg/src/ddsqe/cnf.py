"""Clauses, CNF and existentially quantified CNF formulas, assignments.

Literals use the DIMACS convention: a positive integer ``v`` is the
variable ``v`` with true polarity, ``-v`` its negation.  An assignment is
stored as the set of literals it makes true, so ``{3, -5}`` reads
``v3=1, v5=0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping


class QeError(Exception):
    """Base class for errors raised by this package."""


class ParseError(QeError):
    def __init__(self, message, line=None, col=None):
        self.line = line
        self.col = col
        where = ""
        if line is not None:
            where = f"line {line}"
            if col is not None:
                where += f", col {col}"
            where += ": "
        super().__init__(where + message)


class TautologyError(QeError):
    pass


class NotResolvableError(QeError):
    pass


class IncompatibleAssignments(QeError):
    pass


def _normalize(lits):
    seen = {}
    for lit in lits:
        lit = int(lit)
        if lit == 0:
            raise ValueError("0 is not a literal")
        prev = seen.get(abs(lit))
        if prev is None:
            seen[abs(lit)] = lit
        elif prev != lit:
            raise TautologyError(f"clause contains both {lit} and {-lit}")
    return tuple(seen[v] for v in sorted(seen))


@dataclass(frozen=True)
class Clause:
    """A disjunction of literals, sorted by variable, with a stable id."""

    lits: tuple
    id: int = field(default=-1, compare=False)

    @classmethod
    def of(cls, lits: Iterable[int], id: int = -1) -> "Clause":
        return cls(_normalize(lits), id)

    @property
    def vars(self) -> frozenset:
        return frozenset(abs(l) for l in self.lits)

    def is_empty(self) -> bool:
        return not self.lits

    def __len__(self):
        return len(self.lits)

    def __iter__(self):
        return iter(self.lits)

    def evaluate(self, point: Mapping[int, bool]) -> bool:
        return any(point[abs(l)] == (l > 0) for l in self.lits)

    def __str__(self):
        return " ".join(str(l) for l in self.lits + (0,))


@dataclass(frozen=True)
class Cnf:
    clauses: tuple
    num_vars: int

    def __post_init__(self):
        for c in self.clauses:
            for l in c.lits:
                if abs(l) > self.num_vars:
                    raise ValueError(
                        f"literal {l} exceeds num_vars={self.num_vars}")

    @classmethod
    def from_lists(cls, clauses: Iterable[Iterable[int]], num_vars=None) -> "Cnf":
        cls_ = tuple(Clause.of(c, i) for i, c in enumerate(clauses))
        if num_vars is None:
            num_vars = max((abs(l) for c in cls_ for l in c.lits), default=0)
        return cls(cls_, num_vars)

    def variables(self) -> frozenset:
        return frozenset(abs(l) for c in self.clauses for l in c.lits)

    def evaluate(self, point: Mapping[int, bool]) -> bool:
        return all(c.evaluate(point) for c in self.clauses)

    def as_lists(self) -> list:
        return [list(c.lits) for c in self.clauses]

    def by_id(self, cid: int) -> Clause:
        for c in self.clauses:
            if c.id == cid:
                return c
        raise KeyError(cid)

    def __len__(self):
        return len(self.clauses)

    def __iter__(self):
        return iter(self.clauses)


@dataclass(frozen=True)
class EcnfFormula:
    """The formula ``exists X [F]``."""

    cnf: Cnf
    quantified: frozenset

    def __post_init__(self):
        object.__setattr__(self, "quantified", frozenset(self.quantified))
        bad = [v for v in self.quantified if not 1 <= v <= self.cnf.num_vars]
        if bad:
            raise ValueError(f"quantified variables out of range: {sorted(bad)}")

    @classmethod
    def from_lists(cls, clauses, quantified, num_vars=None) -> "EcnfFormula":
        cnf = Cnf.from_lists(clauses, num_vars)
        if num_vars is None and quantified:
            n = max(cnf.num_vars, max(quantified))
            cnf = Cnf(cnf.clauses, n)
        return cls(cnf, frozenset(quantified))

    @property
    def clauses(self):
        return self.cnf.clauses

    @property
    def num_vars(self) -> int:
        return self.cnf.num_vars

    @property
    def nonquantified(self) -> frozenset:
        """Y: the variables of F that are not quantified."""
        return self.cnf.variables() - self.quantified


class Assignment(frozenset):
    """A partial assignment, stored as the set of literals it makes true.

    Construction rejects a variable bound to both values.
    """

    def __new__(cls, lits: Iterable[int] = ()):
        self = super().__new__(cls, (int(l) for l in lits))
        for l in self:
            if l == 0 or -l in self:
                raise IncompatibleAssignments(f"variable {abs(l)} bound twice")
        return self

    @classmethod
    def from_dict(cls, values: Mapping[int, bool]) -> "Assignment":
        return cls(v if b else -v for v, b in values.items())

    def to_dict(self) -> dict:
        return {abs(l): l > 0 for l in self}

    @property
    def vars(self) -> frozenset:
        return frozenset(abs(l) for l in self)

    def value(self, v: int):
        if v in self:
            return True
        if -v in self:
            return False
        return None

    def compatible(self, other) -> bool:
        return not any(-l in other for l in self)

    def union(self, *others) -> "Assignment":
        out = set(self)
        for o in others:
            if any(-l in out for l in o):
                raise IncompatibleAssignments(
                    f"{sorted(out, key=abs)} and {sorted(o, key=abs)} disagree")
            out.update(o)
        return Assignment(out)

    def subset_of(self, other) -> bool:
        return self <= other

    def restrict_to(self, variables) -> "Assignment":
        variables = set(variables)
        return Assignment(l for l in self if abs(l) in variables)

    def sorted(self) -> list:
        return sorted(self, key=abs)

    def __repr__(self):
        body = ", ".join(f"{abs(l)}={int(l > 0)}" for l in self.sorted())
        return f"Assignment({{{body}}})"


def compatible(a, b) -> bool:
    return not any(-l in b for l in a)


def union(a, b) -> Assignment:
    return Assignment(a).union(b)


def subset_of(a, b) -> bool:
    return frozenset(a) <= frozenset(b)


def restrict_to(a, variables) -> Assignment:
    return Assignment(a).restrict_to(variables)


def falsifying_assignment(clause) -> Assignment:
    """The shortest assignment falsifying ``clause``."""
    lits = clause.lits if isinstance(clause, Clause) else clause
    return Assignment(-l for l in lits)


def cofactor(f: Cnf, q) -> Cnf:
    """F|q: drop clauses satisfied by q, strip literals falsified by q."""
    q = frozenset(q)
    out = []
    for c in f.clauses:
        if any(l in q for l in c.lits):
            continue
        out.append(Clause(tuple(l for l in c.lits if -l not in q), c.id))
    return Cnf(tuple(out), f.num_vars)


def clash_vars(a, b) -> list:
    """Variables occurring with opposite signs in ``a`` and ``b``."""
    b = set(b)
    return [abs(l) for l in a if -l in b]


def resolvable(a, b, v: int) -> bool:
    return clash_vars(a, b) == [v]


def resolve_clauses(c1, c2, v: int, id: int = -1) -> Clause:
    """Resolvent of two clauses on ``v``."""
    l1 = c1.lits if isinstance(c1, Clause) else tuple(c1)
    l2 = c2.lits if isinstance(c2, Clause) else tuple(c2)
    clash = clash_vars(l1, l2)
    if clash != [v]:
        raise NotResolvableError(
            f"clauses clash on {sorted(clash)}, expected exactly [{v}]")
    return Clause.of([l for l in l1 + l2 if abs(l) != v], id)


def resolve_assignments(q1, q2, v: int) -> Assignment:
    """Resolvent of two assignments that disagree exactly on ``v``."""
    clash = clash_vars(q1, q2)
    if clash != [v]:
        raise NotResolvableError(
            f"assignments disagree on {sorted(clash)}, expected exactly [{v}]")
    return Assignment(l for l in set(q1) | set(q2) if abs(l) != v)


def z_clauses(f: Cnf, z) -> set:
    """Ids of the clauses of ``f`` that contain a variable of ``z``."""
    z = set(z)
    return {c.id for c in f.clauses if any(abs(l) in z for l in c.lits)}


def parse_qdimacs(text: str) -> EcnfFormula:
    """Parse the QDIMACS subset: a header, ``e`` lines, then clauses.

    Duplicate literals inside a clause are merged; tautologies, ``a``
    lines and out-of-range variables are errors.
    """
    num_vars = None
    quantified = set()
    clauses = []
    pending = []
    pending_line = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        col = raw.find(line[0]) + 1
        if line.startswith("p"):
            parts = line.split()
            if num_vars is not None:
                raise ParseError("duplicate header", lineno, col)
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError("expected 'p cnf <vars> <clauses>'", lineno, col)
            try:
                num_vars, _ = int(parts[2]), int(parts[3])
            except ValueError:
                raise ParseError("non-integer header field", lineno, col) from None
            if num_vars < 0:
                raise ParseError("negative variable count", lineno, col)
            continue
        if num_vars is None:
            raise ParseError("clause or prefix before 'p cnf' header", lineno, col)
        if line[0] == "a":
            raise ParseError("universal quantifier lines are not supported", lineno, col)
        if line[0] == "e":
            if clauses or pending:
                raise ParseError("quantifier line after clauses", lineno, col)
            tokens = line.split()[1:]
            vals = _ints(tokens, raw, lineno)
            if not vals or vals[-1] != 0:
                raise ParseError("quantifier line must end with 0", lineno, col)
            for v in vals[:-1]:
                if not 1 <= v <= num_vars:
                    raise ParseError(f"variable {v} out of range 1..{num_vars}",
                                     lineno, raw.find(str(v)) + 1)
                quantified.add(v)
            continue
        for tok, lit in zip(line.split(), _ints(line.split(), raw, lineno)):
            if lit == 0:
                try:
                    clauses.append(Clause.of(pending, len(clauses)))
                except TautologyError as e:
                    raise ParseError(f"tautological clause ({e})", pending_line) from None
                pending = []
                pending_line = None
                continue
            if abs(lit) > num_vars:
                raise ParseError(f"variable {abs(lit)} out of range 1..{num_vars}",
                                 lineno, raw.find(tok) + 1)
            if pending_line is None:
                pending_line = lineno
            pending.append(lit)
    if num_vars is None:
        raise ParseError("missing 'p cnf' header")
    if pending:
        raise ParseError("last clause is not terminated by 0", pending_line)
    return EcnfFormula(Cnf(tuple(clauses), num_vars), frozenset(quantified))


def _ints(tokens, raw, lineno):
    out = []
    for tok in tokens:
        try:
            out.append(int(tok))
        except ValueError:
            raise ParseError(f"unexpected token {tok!r}", lineno,
                             raw.find(tok) + 1) from None
    return out


def emit_dimacs(g: Cnf, comments=()) -> str:
    """DIMACS text for ``g``; the empty clause is written as a lone ``0``."""
    lines = [f"c {c}" for c in comments]
    lines.append(f"p cnf {g.num_vars} {len(g.clauses)}")
    lines.extend(str(c) for c in g.clauses)
    return "\n".join(lines) + "\n"


def emit_qdimacs(phi: EcnfFormula, comments=()) -> str:
    lines = [f"c {c}" for c in comments]
    lines.append(f"p cnf {phi.num_vars} {len(phi.clauses)}")
    if phi.quantified:
        lines.append("e " + " ".join(str(v) for v in sorted(phi.quantified)) + " 0")
    lines.extend(str(c) for c in phi.clauses)
    return "\n".join(lines) + "\n"


def parse_dimacs(text: str) -> Cnf:
    """Plain DIMACS; ``e`` lines, if present, are rejected."""
    phi = parse_qdimacs(text)
    if phi.quantified:
        raise ParseError("expected quantifier-free DIMACS")
    return phi.cnf
