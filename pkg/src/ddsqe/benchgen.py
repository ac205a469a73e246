"""Instance generators: k-copy compositional formulas and random formulas."""

from __future__ import annotations

import json
import random

from .cnf import Clause, Cnf, EcnfFormula, emit_qdimacs

# Gate pair on inputs a=v1, b=v2 (quantified), outputs p=v3, s=v4:
#   p <-> a AND b,   s <-> a OR b
# exists a,b [F] is (not p or s): 4 variables, 6 clauses, 3 output patterns.
BASE_BLOCK = EcnfFormula.from_lists(
    [[-3, 1], [-3, 2], [3, -1, -2],
     [4, -1], [4, -2], [-4, 1, 2]],
    quantified={1, 2}, num_vars=4)


def gen_copies(base: EcnfFormula, k: int) -> EcnfFormula:
    """Conjunction of ``k`` copies of ``base`` over disjoint variables."""
    if k < 1:
        raise ValueError("k must be at least 1")
    n = base.num_vars
    clauses = []
    quantified = set()
    for i in range(k):
        off = i * n
        for c in base.clauses:
            clauses.append(Clause(tuple(l + off if l > 0 else l - off for l in c.lits),
                                  len(clauses)))
        quantified.update(v + off for v in base.quantified)
    return EcnfFormula(Cnf(tuple(clauses), k * n), frozenset(quantified))


def copy_components(base: EcnfFormula, k: int) -> list:
    n = base.num_vars
    return [list(range(i * n + 1, (i + 1) * n + 1)) for i in range(k)]


def component_map(base: EcnfFormula, k: int) -> dict:
    return {v: i for i, comp in enumerate(copy_components(base, k)) for v in comp}


def gen_random_ecnf(seed, n_vars, n_clauses, clause_len, x_fraction) -> EcnfFormula:
    """Seeded random formula; X is the ``round(x_fraction * n_vars)``
    lowest-numbered variables."""
    if n_vars < 1 or n_clauses < 0 or clause_len < 1:
        raise ValueError("parameters must be positive")
    if clause_len > n_vars:
        raise ValueError("clause length exceeds the number of variables")
    if not 0.0 <= x_fraction <= 1.0:
        raise ValueError("x_fraction must lie in [0, 1]")
    rng = random.Random(seed)
    clauses = []
    for i in range(n_clauses):
        vs = rng.sample(range(1, n_vars + 1), clause_len)
        clauses.append(Clause.of([v if rng.random() < 0.5 else -v for v in vs], i))
    nx = round(x_fraction * n_vars)
    return EcnfFormula(Cnf(tuple(clauses), n_vars), frozenset(range(1, nx + 1)))


def sweep_params(count, seed=0, max_vars=12, max_x=8, min_vars=3):
    """Parameter tuples for a batch of random instances.

    Variables 3..max_vars, at most ``max_x`` quantified and at least two
    free, clause length 2 or 3, and up to three clauses per variable.
    """
    rng = random.Random(seed)
    out = []
    for i in range(count):
        n = rng.randint(min_vars, max_vars)
        nx = rng.randint(1, min(max_x, n - 2))
        m = rng.randint(1, 3 * n)
        k = rng.choice((2, 3))
        out.append({"seed": seed * 100003 + i, "n_vars": n, "n_clauses": m,
                    "clause_len": k, "x_fraction": nx / n})
    return out


def sweep_instances(count, seed=0, **kw):
    return [(p, gen_random_ecnf(**p)) for p in sweep_params(count, seed, **kw)]


def write_sweep(directory, count, seed=0, **kw):
    """Write QDIMACS files plus ``manifest.json`` listing their parameters."""
    from pathlib import Path
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    manifest = []
    for i, (p, phi) in enumerate(sweep_instances(count, seed, **kw)):
        name = f"rand_{i:04d}.qdimacs"
        (d / name).write_text(emit_qdimacs(phi, [json.dumps(p, sort_keys=True)]))
        manifest.append({"file": name, **p})
    (d / "manifest.json").write_text(json.dumps(manifest, indent=1) + "\n")
    return manifest
