import numpy as np
import pytest

from spinfactor import SpinSpace


@pytest.fixture
def space4():
    return SpinSpace(4)


@pytest.fixture
def space6():
    return SpinSpace(6)


@pytest.fixture
def e1(space4):
    return space4.basis(0)


@pytest.fixture
def cmin(space4):
    # (e1 + i e2)/2, the canonical minimal tripotent
    return space4.minimal_tripotent(0, 1)


def assert_close(actual, expected, tol=1e-12):
    actual = np.asarray(actual)
    expected = np.asarray(expected)
    gap = float(np.max(np.abs(actual - expected)))
    assert gap <= tol, f"max deviation {gap:.3e} > {tol:.1e}"
