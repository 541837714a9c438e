import numpy as np
import pytest
from hypothesis import strategies as st

from wcm_inclusion.cm_engine import cm_sequence, verify_cm
from wcm_inclusion.setmaps import (
    constant_map,
    linear_map,
    pl_convex_function,
    pl_subdifferential_map,
    sample_grid,
    table_map,
)

LT = lambda offset=0.0: {"normal": [1.0], "relation": "<", "offset": offset}  # noqa: E731
EQ = lambda offset=0.0: {"normal": [1.0], "relation": "==", "offset": offset}  # noqa: E731
GT = lambda offset=0.0: {"normal": [1.0], "relation": ">", "offset": offset}  # noqa: E731
LE = lambda offset=0.0: {"normal": [1.0], "relation": "<=", "offset": offset}  # noqa: E731

ROTATION = [[0.0, -1.0], [1.0, 0.0]]


def abs_function():
    return pl_convex_function([1.0, -1.0])


def kink_function():
    # f(x) = max(x, -2x)
    return pl_convex_function([1.0, -2.0])


def hinge_function():
    # f(x) = max(0, x)
    return pl_convex_function([0.0, 1.0])


def planar_function():
    # f(x, y) = max(x, y, 0)
    return pl_convex_function([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])


def sign_map():
    """Values inside the subdifferential of |x|."""
    return table_map([([LT()], [[-1.0]]), ([EQ()], [[-1.0], [1.0]]), ([GT()], [[1.0]])])


def anti_sign_map():
    """F(x) = {-sign(x)} with F(0) = {1}: not weakly monotone."""
    return table_map([([LE()], [[1.0]]), ([GT()], [[-1.0]])])


def non_wcm_map():
    """F(x) = {0} away from 0, F(0) = {0, 1}."""
    return table_map([([EQ()], [[0.0], [1.0]]), ([], [[0.0]])])


LINE = sample_grid(([-1.0], [1.0]), [5])
SQUARE = sample_grid(([-1.0, -1.0], [1.0, 1.0]), [3, 3])
CROSS = [np.array(p, dtype=float) for p in ([1, 0], [0, 1], [-1, 0], [0, -1])]


def corpus():
    """(name, map, samples) for the classification hierarchy."""
    return [
        ("constant", constant_map([[-1.0], [1.0]]), sample_grid(([-1.0], [1.0]), [3])),
        ("pl_abs", pl_subdifferential_map(abs_function()), LINE),
        ("pl_kink", pl_subdifferential_map(kink_function()), LINE),
        ("pl_planar", pl_subdifferential_map(planar_function()), SQUARE),
        ("rotation", linear_map(ROTATION), CROSS),
        ("identity", linear_map(np.eye(2)), SQUARE),
        ("sign", sign_map(), LINE),
        ("non_wcm", non_wcm_map(), sample_grid(([0.0], [1.0]), [2])),
        ("anti_sign", anti_sign_map(), sample_grid(([-1.0], [1.0]), [3])),
    ]


def pl_corpus():
    """(name, function, x0) triples for solver properties."""
    return [
        ("abs", abs_function(), [0.0]),
        ("kink", kink_function(), [0.5]),
        ("hinge", hinge_function(), [-0.3]),
        ("planar", planar_function(), [0.0, 0.0]),
        ("planar_off_axis", planar_function(), [-0.4, 0.2]),
    ]


def longest_cm_prefix(seq: cm_sequence, tol: float = 0.0) -> cm_sequence:
    ok, m = verify_cm(seq, tol)
    return seq if ok else seq.prefix(m - 1)


@st.composite
def lattice_pairs(draw, min_length=1, max_length=6, dimension=None):
    """Lists of (x, v) pairs with small integer coordinates."""
    n = dimension or draw(st.integers(min_value=1, max_value=3))
    k = draw(st.integers(min_value=min_length, max_value=max_length))
    vec = st.lists(st.integers(min_value=-3, max_value=3), min_size=n, max_size=n)
    return draw(st.lists(st.tuples(vec, vec), min_size=k, max_size=k))


@pytest.fixture
def rotation():
    return linear_map(ROTATION)


@pytest.fixture
def two_point_constant():
    return constant_map([[-1.0], [1.0]])
