import pytest

from polymut.geom import Polygon, Vector2


def P(*coords):
    """Polygon from (x, y) pairs."""
    return Polygon([Vector2(x, y) for x, y in coords])


@pytest.fixture
def p2_triangle():
    return P((1, 0), (0, 1), (-1, -1))


@pytest.fixture
def p114_triangle():
    return P((0, -1), (1, 2), (-1, 2))
