import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))  # makes `oracles` importable

from wowaopt import (
    Assignment,
    Explicit,
    ProbabilityVector,
    ScenarioInstance,
    Selection,
    generate_weights,
)

GOLDEN = Path(__file__).parent / "golden"

# The worked shortest-path example: 5 arcs, 4 scenarios, 3 s-t paths.
PATHS_COSTS = [
    [5.0, 6.0, 0.0, 5.0, 0.0],
    [1.0, 6.0, 4.0, 0.0, 0.0],
    [1.0, 6.0, 6.0, 0.0, 0.0],
    [2.0, 6.0, 6.0, 0.0, 0.0],
]
PATHS_FEASIBLE = ((0, 3), (0, 2, 4), (1, 4))
PATHS_V = [0.5, 0.3, 0.2, 0.0]
PATHS_P = [0.5, 0.2, 0.2, 0.1]


@pytest.fixture
def paths_instance() -> ScenarioInstance:
    return ScenarioInstance(PATHS_COSTS, PATHS_P, PATHS_V, Explicit(PATHS_FEASIBLE))


def random_instance(rng: np.random.RandomState, kind: str, size: int, k: int,
                    alpha_range=(-4.0, -0.5), q=None) -> ScenarioInstance:
    """Random instance in the style of the benchmark generator (test helper)."""
    numer = rng.randint(1, 101, size=k)
    p = ProbabilityVector(numer / numer.sum())
    v = generate_weights(10.0 ** rng.uniform(*alpha_range), k)
    if kind == "selection":
        n = size
        problem = Selection(q=q if q is not None else max(1, size // 4))
    else:
        n = size * size
        problem = Assignment(m=size)
    costs = rng.randint(0, 101, size=(k, n)).astype(float)
    return ScenarioInstance(costs, p, v, problem)
