import random
from fractions import Fraction

import pytest

from ifslab.measures import DyadicMeasure


def random_exact_measure(rng: random.Random, resolution: int,
                         max_cells: int = 24, wmax: int = 64) -> DyadicMeasure:
    """Random exact probability measure with small-integer weights."""
    n_cells = rng.randint(2, max(2, min(max_cells, 1 << resolution)))
    ks = rng.sample(range(1 << resolution), n_cells)
    ws = [rng.randint(1, wmax) for _ in ks]
    total = sum(ws)
    return DyadicMeasure(resolution, {k: Fraction(w, total)
                                      for k, w in zip(ks, ws)})


def random_float_measure(rng: random.Random, resolution: int,
                         max_cells: int = 24) -> DyadicMeasure:
    n_cells = rng.randint(2, max(2, min(max_cells, 1 << resolution)))
    ks = rng.sample(range(1 << resolution), n_cells)
    ws = [rng.random() + 0.01 for _ in ks]
    total = sum(ws)
    return DyadicMeasure(resolution, {k: w / total for k, w in zip(ks, ws)})


@pytest.fixture
def rng():
    return random.Random(20260809)
