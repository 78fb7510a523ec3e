import random

import pytest

from zp2mass import codecore
from zp2mass.codecore import FpCode

# Four inequivalent self-orthogonal codes over Z_9 of length 4 and type {1, 1}
WORKED_EXAMPLE = [
    [[1, 1, 4, 0], [0, 3, 6, 0]],
    [[1, 1, 4, 3], [0, 3, 6, 0]],
    [[1, 1, 4, 6], [0, 3, 6, 3]],
    [[1, 7, 7, 0], [0, 0, 0, 3]],
]


@pytest.fixture
def rng():
    return random.Random(20240601)


@pytest.fixture
def worked_codes():
    return [codecore.from_generators(3, 4, rows) for rows in WORKED_EXAMPLE]


@pytest.fixture
def worked_residue():
    return FpCode.from_rows(3, 4, [[1, 1, 1, 0]])


@pytest.fixture
def worked_torsion():
    return FpCode.from_rows(3, 4, [[1, 1, 1, 0], [0, 1, 2, 0]])
