import numpy as np
import pytest

from mpnls import build_grid, validate_symbol


@pytest.fixture
def sym1():
    """1D Laplacian symbol."""
    return validate_symbol([[1.0]])


@pytest.fixture
def sym2():
    """2D anisotropic symbol with eigenvalues 1 and 3."""
    return validate_symbol([[2.0, 1.0], [1.0, 2.0]])


@pytest.fixture
def grid1():
    return build_grid(1, 64, np.pi)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
