import numpy as np
import pytest

from polarize import Graph


@pytest.fixture
def k2():
    return Graph(2, [(0, 1, 1.0)])


@pytest.fixture
def triangle():
    return Graph(3, [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)])


@pytest.fixture
def star4():
    return Graph(4, [(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)])


def laplacian_3(w01: float, w02: float, w12: float) -> np.ndarray:
    """Dense 3-node Laplacian from the three pair weights, for oracles."""
    return np.array(
        [
            [w01 + w02, -w01, -w02],
            [-w01, w01 + w12, -w12],
            [-w02, -w12, w02 + w12],
        ]
    )
