import math

import pytest
from hypothesis import given, settings, strategies as st

from normtower.unramified import UnramifiedElt, build_unramified, frobenius, valuation


def elt(fd, coords):
    return UnramifiedElt(coords, fd)


def test_build_trivial_extension():
    fd = build_unramified(3, 1, 4)
    assert fd.d == 1
    z = elt(fd, fd.zeta())
    # generator of the roots of unity in Q_3 is a primitive square root of 1
    assert z * z == 1
    assert z != elt(fd, fd.one())
    assert z.frobenius(1) == z  # Frobenius is the identity


def test_build_degree2():
    fd = build_unramified(3, 2, 4)
    z = elt(fd, fd.zeta())
    assert z**8 == 1
    assert z**4 != 1
    assert z.frobenius(1) == z**3


def test_build_degree4_p5():
    fd = build_unramified(5, 4, 3)
    z = elt(fd, fd.zeta())
    assert z.frobenius(4) == z
    assert z.frobenius(2) != z


def test_rejects_p2_and_composites():
    with pytest.raises(ValueError):
        build_unramified(2, 2, 3)
    with pytest.raises(ValueError):
        build_unramified(15, 2, 3)


def test_frobenius_is_ring_automorphism_of_exact_order():
    fd = build_unramified(3, 4, 4)
    z = elt(fd, fd.zeta())
    x = 1 + z + z**2
    y = 2 * z + z**3
    assert (x * y).frobenius(1) == x.frobenius(1) * y.frobenius(1)
    assert (x + y).frobenius(1) == x.frobenius(1) + y.frobenius(1)
    for e in (1, 2, 3):
        assert z.frobenius(e) != z
    assert z.frobenius(4) == z
    assert z.frobenius(-1) == z.frobenius(3)


def test_valuation_examples():
    fd = build_unramified(3, 2, 4)
    z = elt(fd, fd.zeta())
    assert (3 * z).valuation() == 1
    assert (1 + z).valuation() == 0
    assert elt(fd, fd.zero()).valuation() == math.inf


@st.composite
def field_elements(draw):
    p = draw(st.sampled_from([3, 5]))
    d = draw(st.integers(1, 3))
    fd = build_unramified(p, d, 4)
    coords = [draw(st.integers(0, fd.q - 1)) for _ in range(d)]
    coords2 = [draw(st.integers(0, fd.q - 1)) for _ in range(d)]
    coords3 = [draw(st.integers(0, fd.q - 1)) for _ in range(d)]
    return fd, elt(fd, coords), elt(fd, coords2), elt(fd, coords3)


@settings(deadline=None, max_examples=60)
@given(field_elements())
def test_ring_axioms(data):
    fd, x, y, z = data
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x * y == y * x


@settings(deadline=None, max_examples=60)
@given(field_elements())
def test_valuation_multiplicative_below_precision(data):
    fd, x, y, _ = data
    vx, vy = x.valuation(), y.valuation()
    if vx is math.inf or vy is math.inf:
        return
    if vx + vy < fd.N:
        assert (x * y).valuation() == vx + vy
