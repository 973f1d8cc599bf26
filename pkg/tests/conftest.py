from fractions import Fraction

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from fourvertex.even import FerroIsingInstance
from fourvertex.instances import double_loop, octahedron, theta4
from fourvertex.planar import canonical_label

settings.register_profile("repo", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


class ScriptedRng:
    """Stand-in for ``numpy.random.Generator`` that replays fixed draws.

    ``random()`` pops from ``uniforms``; ``integers(lo, hi)`` pops from
    ``ints`` and checks the value is in range.  Acceptance thresholds seen by
    ``random()`` comparisons can be inspected afterwards via ``calls``.
    """

    def __init__(self, uniforms=(), ints=()):
        self.uniforms = list(uniforms)
        self.ints = list(ints)
        self.calls = []

    def random(self):
        u = self.uniforms.pop(0)
        self.calls.append(("random", u))
        return u

    def integers(self, lo, hi=None):
        if hi is None:
            lo, hi = 0, lo
        k = self.ints.pop(0)
        assert lo <= k < hi, (lo, k, hi)
        self.calls.append(("integers", k))
        return k


@pytest.fixture
def theta():
    return theta4(2)


@pytest.fixture
def octa():
    return canonical_label(octahedron(2))


@pytest.fixture
def loop_instance():
    return double_loop(2, planar_outer=(0, 2))


@pytest.fixture
def single_edge():
    """Two circuits joined by one edge with ``beta_e = 4`` (``x = 3/5``)."""
    return FerroIsingInstance.from_couplings(2, [(0, 1, 4)])


@pytest.fixture
def triangle():
    """Triangle with every ``x_e = 1/2``."""
    return FerroIsingInstance.from_x(3, [(0, 1, Fraction(1, 2)), (1, 2, Fraction(1, 2)), (0, 2, Fraction(1, 2))])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
