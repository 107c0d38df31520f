from itertools import combinations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from beamkey.gf import GF256, BinaryField, vandermonde

elems = st.integers(min_value=0, max_value=255)


@given(elems, elems, elems)
def test_field_axioms(a, b, c):
    f = GF256
    assert f.mul(a, b) == f.mul(b, a)
    assert f.mul(a, f.mul(b, c)) == f.mul(f.mul(a, b), c)
    assert f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c))
    assert f.mul(a, 1) == a
    assert f.mul(a, 0) == 0


@given(st.integers(min_value=1, max_value=255))
def test_inverses(a):
    assert GF256.mul(a, GF256.inv(a)) == 1


def test_inv_of_zero_rejected():
    with pytest.raises(ZeroDivisionError):
        GF256.inv(0)


def test_small_fields_build():
    for exp in (1, 2, 3, 4):
        f = BinaryField(exp)
        nonzero = list(range(1, f.order))
        for a in nonzero:
            assert f.mul(a, f.inv(a)) == 1


def test_non_primitive_poly_rejected():
    # x^2 + 1 = (x+1)^2 over GF(2) is reducible
    with pytest.raises(ValueError):
        BinaryField(2, primitive_poly=0b101)


def test_rank_and_matmul():
    f = GF256
    a = np.array([[1, 2], [3, 4]])
    assert f.rank(a) == 2
    singular = np.array([[1, 2], [2, 4]])  # row2 = 2*row1 in GF(256)
    assert f.rank(singular) == 1
    ident = f.matmul(a, np.array([[1, 0], [0, 1]]))
    assert np.array_equal(ident, a)


def test_vandermonde_any_columns_invertible():
    # exhaustive over every column subset up to 12 packets
    f = GF256
    for m in range(2, 13):
        for k in range(1, m):
            v = vandermonde(f, k, m)
            assert v.shape == (k, m)
            assert np.all(v[0] == 1)
            for cols in combinations(range(m), k):
                assert f.rank(v[:, list(cols)]) == k


def test_vandermonde_zero_node_when_field_full():
    gf4 = BinaryField(2)
    v = vandermonde(gf4, 3, 4)  # needs all four field elements as nodes
    for cols in combinations(range(4), 3):
        assert gf4.rank(v[:, list(cols)]) == 3
    with pytest.raises(ValueError):
        vandermonde(gf4, 2, 5)
