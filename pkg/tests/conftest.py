import math

import numpy as np
import pytest

from symmlab.grid import Box, GridSpec


def band(lo, hi, closure="halfopen"):
    return Box(((lo, hi),)).with_closure(closure)


@pytest.fixture
def wedge_mu():
    from symmlab.generators import wedge
    from symmlab.slicing import distribution

    grid = GridSpec.aligned(band(1, 2), 1000)
    return distribution(wedge(), grid)


def sin_mu(n=2000, lo=1.0, hi=2.0, pad=True):
    """Distribution r (pi/2 + sin r) on (lo, hi) with n cells there; with ``pad``
    the grid extends past both ends where the distribution vanishes."""
    from symmlab.grid import GridFunction

    g = GridSpec.aligned(band(lo, hi), n) if pad else GridSpec(((lo, hi),), (n,))
    r = g.centers(0)
    inside = (r > lo) & (r < hi)
    return GridFunction(g, np.where(inside, r * (math.pi / 2 + np.sin(r)), 0.0))


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
