import functools

import pytest

from ddsqe.benchgen import sweep_instances
from ddsqe.cnf import EcnfFormula

# y1 = v1, y2 = v2, x = v3;  F = (~y1 | ~x) & (y2 | x)
EXAMPLE_CLAUSES = [[-1, -3], [2, 3]]
EXAMPLE_TEXT = "p cnf 3 2\ne 3 0\n-1 -3 0\n2 3 0\n"


@pytest.fixture
def example():
    return EcnfFormula.from_lists(EXAMPLE_CLAUSES, {3})


@functools.lru_cache(maxsize=None)
def sweep(count=500, seed=0):
    return tuple(sweep_instances(count, seed))
