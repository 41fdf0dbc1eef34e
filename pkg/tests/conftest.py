"""Shared fixtures: frequency studies are memoized per session.

Several test modules check different facts about the same handful of solved
shapes (square, disk, hexagon, slabs).  Solving is the expensive part, so a
single session-scoped cache hands out each (shape, q) study exactly once.
"""

import pytest

from freqbounds import solver


@pytest.fixture(scope="session")
def study():
    cache = {}

    def solve(key, shape, q, h=None):
        k = (key, float(q), h)
        if k not in cache:
            cache[k] = solver.solve_with_study(shape, q, h=h)
        return cache[k]

    return solve
