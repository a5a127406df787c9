"""Shared fixtures: one instance per family, a seeded generator, and a
wall-clock reporter used by the acceptance suite."""

import time

import numpy as np
import pytest

from onephase.solutions import (DiskComplement, Hairpin, HalfPlane, Scherk,
                                TwoPlane, Wedge)


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture(scope="session")
def halfplane():
    return HalfPlane()


@pytest.fixture(scope="session")
def twoplane():
    return TwoPlane(0.5)


@pytest.fixture(scope="session")
def wedge():
    return Wedge(1.0)


@pytest.fixture(scope="session")
def hairpin():
    return Hairpin(1.0)


@pytest.fixture(scope="session")
def disk():
    return DiskComplement(1.0)


@pytest.fixture(scope="session")
def scherk():
    return Scherk(0.5, 1.0)


@pytest.fixture
def stopwatch():
    """Context manager printing the elapsed wall time of a named block."""

    class _Watch:
        def __init__(self):
            self.elapsed = {}

        def __call__(self, label):
            watch = self

            class _Ctx:
                def __enter__(self):
                    self.t0 = time.perf_counter()
                    return self

                def __exit__(self, *exc):
                    dt = time.perf_counter() - self.t0
                    watch.elapsed[label] = dt
                    print(f"[time] {label}: {dt:.2f} s")
                    return False

            return _Ctx()

    return _Watch()
