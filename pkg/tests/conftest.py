import math

import numpy as np
import pytest

from bitension.fields import Lattice
from bitension.geometry import chart_catalog
from bitension.presets import build_map


def curved_region(counts):
    """Sphere-polar:2 patch used for convergence studies (away from the poles)."""
    return Lattice.over([(0.0, 1.0), (1.0, 2.0)], (counts, counts))


def sphere_map(counts, embedded=False, seed=3, amplitude=0.4):
    src = chart_catalog("sphere-polar:2")
    tgt = chart_catalog("sphere-embedded:2" if embedded else "sphere-polar:2")
    return build_map("random-smooth", src, tgt, curved_region(counts),
                     {"seed": seed, "amplitude": amplitude})


def line(lo, hi, n, periodic=False):
    return Lattice.over([(lo, hi)], [n], [periodic])


def cubic_1d(n=101, lo=0.0, hi=1.0):
    e1 = chart_catalog("euclidean:1")
    return build_map("cubic", e1, e1, line(lo, hi, n))


def great_circle_1d(n=41, c=1.0, embedded=False):
    e1 = chart_catalog("euclidean:1")
    tgt = chart_catalog("sphere-embedded:2" if embedded else "sphere-polar:2")
    return build_map("great-circle", e1, tgt, line(0.0, 1.0, n), {"c": c})


def order(e_h, e_h2):
    return math.log2(e_h / e_h2)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_LINES = []


@pytest.fixture
def criterion(capsys):
    """Record one PASS/FAIL line for an acceptance criterion and assert it."""
    def report(number, passed, detail):
        line = f"{'PASS' if passed else 'FAIL'} criterion {number}: {detail}"
        _LINES.append((number, line))
        with capsys.disabled():
            print("\n" + line)
        assert passed, line
    return report


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_LINES):
            terminalreporter.write_line(line)
