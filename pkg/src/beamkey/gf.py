"""GF(2^k) arithmetic with log/exp tables, plus the small amount of linear
algebra the key combiner needs (Vandermonde construction, rank).

Addition in a characteristic-2 field is XOR; multiplication goes through
precomputed discrete-log tables, the standard trick for byte-sized fields.
The exp table is doubled so products of two logs never need a modulo.
"""

from __future__ import annotations

import numpy as np

# Primitive polynomials (bit patterns, mod-2) with x as a primitive element.
_PRIMITIVE_POLY = {
    1: 0b11,
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10001001,
    8: 0b100011101,  # x^8 + x^4 + x^3 + x^2 + 1
}


class BinaryField:
    """GF(2**exponent) backed by numpy log/exp tables."""

    def __init__(self, exponent: int, primitive_poly: int | None = None):
        if exponent < 1 or exponent > 16:
            raise ValueError("field exponent must be in 1..16")
        if primitive_poly is None:
            if exponent not in _PRIMITIVE_POLY:
                raise ValueError(f"no default primitive polynomial for exponent {exponent}")
            primitive_poly = _PRIMITIVE_POLY[exponent]
        self.exponent = exponent
        self.order = 1 << exponent
        self.poly = primitive_poly

        charac = self.order - 1
        exp = np.zeros(2 * charac, dtype=np.int64)
        log = np.zeros(self.order, dtype=np.int64)
        x = 1
        for i in range(charac):
            exp[i] = x
            log[x] = i
            x <<= 1
            if x & self.order:
                x ^= primitive_poly
        if x != 1:
            raise ValueError("polynomial is not primitive for generator x")
        exp[charac:] = exp[:charac]
        self._exp = exp
        self._log = log
        self._charac = charac

    def _check(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any((a < 0) | (a >= self.order)):
            raise ValueError(f"element out of range for GF({self.order})")
        return a

    def add(self, a, b):
        return np.bitwise_xor(self._check(a), self._check(b))

    def mul(self, a, b):
        a = self._check(a)
        b = self._check(b)
        out = self._exp[self._log[a] + self._log[b]]
        return np.where((a == 0) | (b == 0), 0, out)

    def inv(self, a):
        a = self._check(a)
        if np.any(a == 0):
            raise ZeroDivisionError("0 has no inverse")
        return self._exp[self._charac - self._log[a]]

    def pow(self, a, n: int):
        a = self._check(a)
        if n == 0:
            return np.ones_like(a)
        out = np.where(a == 0, 0, self._exp[(self._log[a] * (n % self._charac)) % self._charac])
        return out

    def element(self, i: int) -> int:
        """The i-th power of the generator; i in 0..order-2 gives distinct nonzero elements."""
        return int(self._exp[i % self._charac])

    def matmul(self, a, b):
        """Matrix product over the field; a is (r,m), b is (m,c) or (m,)."""
        a = self._check(np.atleast_2d(a))
        b = self._check(b)
        vec = b.ndim == 1
        b2 = b[:, None] if vec else b
        out = np.zeros((a.shape[0], b2.shape[1]), dtype=np.int64)
        for k in range(a.shape[1]):
            out ^= self.mul(a[:, k][:, None], b2[k][None, :])
        return out[:, 0] if vec else out

    def rank(self, a) -> int:
        """Row rank via Gaussian elimination over the field."""
        m = self._check(np.atleast_2d(a)).copy()
        rows, cols = m.shape
        r = 0
        for c in range(cols):
            if r >= rows:
                break
            pivots = np.nonzero(m[r:, c])[0]
            if pivots.size == 0:
                continue
            p = r + int(pivots[0])
            if p != r:
                m[[r, p]] = m[[p, r]]
            m[r] = self.mul(m[r], self.inv(m[r, c]))
            others = np.nonzero(m[:, c])[0]
            others = others[others != r]
            if others.size:
                m[others] ^= self.mul(m[others, c][:, None], m[r][None, :])
            r += 1
        return r

    def is_invertible(self, a) -> bool:
        a = np.atleast_2d(a)
        return a.shape[0] == a.shape[1] and self.rank(a) == a.shape[0]


GF256 = BinaryField(8)


def vandermonde(field: BinaryField, rows: int, cols: int) -> np.ndarray:
    """Vandermonde matrix V[i,j] = alpha_j**i over distinct nodes.

    Every square submatrix formed by any ``rows`` columns is invertible
    (a Vandermonde determinant over distinct nodes), which is exactly the
    combiner property the key protocol relies on. Nodes are the nonzero
    powers of the generator; zero joins as a last resort when cols equals
    the field size, so cols <= order is required.
    """
    if rows < 1 or cols < 1:
        raise ValueError("matrix dimensions must be >= 1")
    if cols > field.order:
        raise ValueError(
            f"need {cols} distinct nodes but GF({field.order}) has only "
            f"{field.order}; use a larger field"
        )
    node_list = [field.element(j) for j in range(min(cols, field.order - 1))]
    if cols == field.order:
        node_list.append(0)
    nodes = np.array(node_list, dtype=np.int64)
    v = np.zeros((rows, cols), dtype=np.int64)
    v[0] = 1
    for i in range(1, rows):
        v[i] = field.mul(v[i - 1], nodes)
    return v
