"""Quantifier elimination for existentially quantified CNF formulas."""

from .cnf import (Assignment, Clause, Cnf, EcnfFormula, ParseError, QeError,
                  cofactor, emit_dimacs, parse_qdimacs, resolve_assignments,
                  resolve_clauses, z_clauses)
from .engine import EngineConfig, QeResult, Stats, run_qe

__all__ = [
    "Assignment", "Clause", "Cnf", "EcnfFormula", "ParseError", "QeError",
    "cofactor", "emit_dimacs", "parse_qdimacs", "resolve_assignments",
    "resolve_clauses", "z_clauses", "EngineConfig", "QeResult", "Stats", "run_qe",
]
