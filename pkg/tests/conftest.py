import numpy as np
import pytest

from divopt import Family, Instance, euclidean_instance


@pytest.fixture
def t4() -> Instance:
    """4-node worked example; pairwise values 1..6, all distinct.

    0-based distances: d01=1 d02=2 d03=3 d12=4 d13=5 d23=6.
    Known optima for m=3: MaxSum 15 on {1,2,3}, MaxMin 4 on {1,2,3},
    MaxMinSum 9 on {1,2,3}, MinDiff 2 on {1,2,3}; MaxMean 5.25 on all 4.
    """
    d = np.array([[0, 1, 2, 3],
                  [1, 0, 4, 5],
                  [2, 4, 0, 6],
                  [3, 5, 6, 0]], dtype=float)
    return Instance(name="t4", family=Family.CUSTOM, distances=d)


@pytest.fixture
def unit_square() -> Instance:
    # corners of [0,1]^2: sides 1, diagonals sqrt(2)
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    return euclidean_instance(pts, name="unit_square", family=Family.CUSTOM)


@pytest.fixture
def flat3() -> Instance:
    # every pairwise distance equal: spectrum has a single value
    d = np.full((3, 3), 2.5)
    np.fill_diagonal(d, 0.0)
    return Instance(name="flat3", family=Family.CUSTOM, distances=d)
