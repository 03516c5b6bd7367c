import numpy as np
import pytest

from covlab import Ball, Ellipsoid, VPolytope


@pytest.fixture
def square():
    return VPolytope([[1.0, 1.0], [1.0, -1.0]])


@pytest.fixture
def diamond():
    return VPolytope([[1.0, 0.0], [0.0, 1.0]])


def make_bodies_2d():
    """A small zoo of well-conditioned 2-d bodies for parametrized tests."""
    return [
        Ball(1.0, 2),
        Ball(2.5, 2),
        Ellipsoid([2.0, 0.5]),
        VPolytope([[1.0, 1.0], [1.0, -1.0]]),
        VPolytope([[1.5, 0.2], [0.4, 1.3], [-1.0, 1.1]]),
    ]
