import os
import sys
from fractions import Fraction

import pytest

PACKAGE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if PACKAGE_DIR not in sys.path:
    sys.path.insert(0, PACKAGE_DIR)

from singularity import SingularityModel  # noqa: E402

DATA_DIR = os.path.join(PACKAGE_DIR, "data")
GOLDEN_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "golden")


def data_path(*parts: str) -> str:
    return os.path.join(DATA_DIR, *parts)


@pytest.fixture
def plane():
    return SingularityModel.affine(2)


@pytest.fixture
def space():
    return SingularityModel.affine(3)


@pytest.fixture
def half_plane():
    """(A^2, 1/2·H1)"""
    return SingularityModel.affine(2, [Fraction(1, 2), 0])


@pytest.fixture
def even_plane():
    """A^2/μ_2(1,1)"""
    return SingularityModel.cyclic_quotient((1, 1), 2)


@pytest.fixture
def a2_singularity():
    """A^2/μ_3(1,2)"""
    return SingularityModel.cyclic_quotient((1, 2), 3)
