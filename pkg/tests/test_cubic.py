import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import bisect_roots
from gspam.structure_learning import (DiscriminantError, cubic_roots_general, cubic_roots_trig,
                                      depressed)


@st.composite
def three_root_cubics(draw):
    p = -draw(st.floats(1e-3, 1e3))
    bound = 2.0 * (-p / 3.0) ** 1.5
    q = draw(st.floats(-0.999, 0.999)) * bound
    return p, q


@given(three_root_cubics())
@settings(max_examples=300, deadline=None)
def test_roots_match_bisection(pq):
    p, q = pq
    roots = cubic_roots_trig(p, q)
    ref = bisect_roots(p, q)
    scale = max(1.0, abs(p), abs(q))
    for r, b in zip(roots, ref):
        assert abs(r**3 + p * r + q) <= 1e-9 * scale
        assert abs(r - b) <= 1e-9 * max(1.0, abs(b))


def test_roots_descending_and_sum_to_zero():
    roots = cubic_roots_trig(-7.0, 6.0)
    assert roots == pytest.approx((2.0, 1.0, -3.0))
    assert sum(roots) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("p,q", [(1.0, 0.0), (-3.0, 2.0), (-3.0, 5.0), (0.0, 1.0)])
def test_rejects_fewer_than_three_roots(p, q):
    with pytest.raises(DiscriminantError):
        cubic_roots_trig(p, q)


def test_general_cubic():
    # (x-1)(x-2)(x+4) = x^3 - 3x^2 ... expand: x^3 + x^2 - 10x + 8
    assert cubic_roots_general(1.0, -10.0, 8.0) == pytest.approx((2.0, 1.0, -4.0))
    p, q = depressed(1.0, -10.0, 8.0)
    assert np.isclose(p, -10 - 1 / 3)
