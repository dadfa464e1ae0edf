"""Dense arithmetic in the Kronecker product of n copies of G(3).

Each particle contributes an 8-element basis ``{1, s1, s2, s3, Is1, Is2, Is3, I}``
encoded as a 3-bit code whose bit ``k`` is set when the element contains the
direction ``sigma_{k+1}``.  The multiparticle index concatenates the per-particle
codes with particle 1 in the most significant position, so an n-particle
multivector is a flat array of ``8**n`` real coefficients.

The relative vectors ``s_k`` are spacetime bivectors, so basis elements living
in different particle spaces commute and the multiparticle structure constants
are plain products of per-particle signs.  Grades reported here are spacetime
(MSTA) grades: ``{1: 0, s_k: 2, Is_k: 2, I: 4}`` summed over particles.

A :class:`CMultivector` carries an extra commuting imaginary ``j`` (``j*j = -1``)
used for propagators, Hamiltonians in even/odd form and density operators.
"""

from __future__ import annotations

from functools import lru_cache, reduce
from numbers import Real
from typing import Mapping

import numpy as np

MAX_PARTICLES = 6

# Names ordered by 3-bit code.  Code 5 stores Is2 = sigma3*sigma1.
NAMES = ("1", "s1", "s2", "Is3", "s3", "Is2", "Is1", "I")
CODES = {name: code for code, name in enumerate(NAMES)}

# Sign of each named element relative to the canonical ascending blade.
_CANON = np.array([1, 1, 1, 1, 1, -1, 1, 1])
_STA_GRADE = np.array([0, 2, 2, 2, 2, 2, 2, 4])
_REVERSE = np.array([1, -1, -1, -1, -1, -1, -1, 1])
EVEN_CODES = (0, 3, 5, 6)


def _reorder_sign(a: int, b: int) -> int:
    a >>= 1
    swaps = 0
    while a:
        swaps += bin(a & b).count("1")
        a >>= 1
    return -1 if swaps & 1 else 1


def _build_table() -> np.ndarray:
    table = np.empty((8, 8), dtype=np.int8)
    for i in range(8):
        for k in range(8):
            table[i, k] = _CANON[i] * _CANON[k] * _CANON[i ^ k] * _reorder_sign(i, k)
    table.setflags(write=False)
    return table


#: ``CAYLEY[i, k]`` is the sign in ``e_i e_k = CAYLEY[i, k] e_{i ^ k}`` for one particle.
CAYLEY = _build_table()


def _check_n(n: int) -> int:
    if not isinstance(n, (int, np.integer)) or n < 1 or n > MAX_PARTICLES:
        raise ValueError(f"particle count must be an integer in [1, {MAX_PARTICLES}], got {n!r}")
    return int(n)


def split_index(index: int, n: int) -> tuple[int, ...]:
    """Per-particle 3-bit codes of a multiparticle basis index, particle 1 first."""
    return tuple((index >> (3 * (n - 1 - a))) & 7 for a in range(n))


def join_codes(codes) -> int:
    index = 0
    for c in codes:
        index = (index << 3) | int(c)
    return index


def basis_product(i: int, k: int, n: int) -> tuple[int, int]:
    """Product of two basis elements: returns ``(index, sign)``."""
    _check_n(n)
    size = 8**n
    if not (0 <= i < size and 0 <= k < size):
        raise ValueError("basis index out of range")
    sign = 1
    for ci, ck in zip(split_index(i, n), split_index(k, n)):
        sign *= int(CAYLEY[ci, ck])
    return i ^ k, sign


@lru_cache(maxsize=None)
def _grades(n: int) -> np.ndarray:
    g = reduce(np.add.outer, [_STA_GRADE] * n).ravel()
    g.setflags(write=False)
    return g


@lru_cache(maxsize=None)
def _reverse_signs(n: int) -> np.ndarray:
    r = reduce(np.multiply.outer, [_REVERSE] * n).ravel()
    r.setflags(write=False)
    return r


@lru_cache(maxsize=None)
def _even_mask(n: int) -> np.ndarray:
    single = np.zeros(8, dtype=bool)
    single[list(EVEN_CODES)] = True
    m = reduce(np.logical_and.outer, [single] * n).ravel()
    m.setflags(write=False)
    return m


# Dense product tables are only worth their N*N memory for small n.
_TABLE_MAX_N = 3


@lru_cache(maxsize=None)
def _tables(n: int):
    size = 8**n
    sign = reduce(np.kron, [CAYLEY.astype(np.float64)] * n)  # sign[i, k]
    ar = np.arange(size)
    xor = ar[:, None] ^ ar[None, :]
    # right[i, r] = sign(i, i ^ r): c = a @ (right * b[xor])
    right = sign[ar[:, None], xor]
    # left[r, k] = sign(r ^ k, k): L(a) = a[xor] * left
    left = sign[xor, ar[None, :]]
    for t in (xor, right, left):
        t.setflags(write=False)
    return xor, right, left


def _sign_row(i: int, n: int) -> np.ndarray:
    return reduce(np.kron, [CAYLEY[c].astype(np.float64) for c in split_index(i, n)])


def _sign_col(k: int, n: int) -> np.ndarray:
    return reduce(np.kron, [CAYLEY[:, c].astype(np.float64) for c in split_index(k, n)])


def _product(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    if n <= _TABLE_MAX_N:
        xor, right, _ = _tables(n)
        return a @ (right * b[xor])
    size = 8**n
    ar = np.arange(size)
    out = np.zeros(size)
    nza, nzb = np.flatnonzero(a), np.flatnonzero(b)
    if len(nza) <= len(nzb):
        for i in nza:
            out[i ^ ar] += a[i] * _sign_row(i, n) * b
    else:
        for k in nzb:
            out[ar ^ k] += b[k] * _sign_col(k, n) * a
    return out


class Multivector:
    """Immutable element of G(3)^n stored densely over all ``8**n`` basis indices.

    Use ``*`` for the geometric product, ``~x`` for the reverse, and ``x(g)``
    for projection onto MSTA grade ``g``.
    """

    __slots__ = ("n", "coeffs")
    __array_priority__ = 1000

    def __init__(self, n: int, coeffs=None):
        n = _check_n(n)
        size = 8**n
        if coeffs is None:
            arr = np.zeros(size)
        else:
            arr = np.array(coeffs, dtype=np.float64)
            if arr.shape != (size,):
                raise ValueError(f"expected {size} coefficients, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "coeffs", arr)

    def __setattr__(self, name, value):
        raise AttributeError("Multivector is immutable")

    # constructors

    @classmethod
    def scalar(cls, n: int, value: float = 1.0) -> "Multivector":
        c = np.zeros(8 ** _check_n(n))
        c[0] = value
        return cls(n, c)

    @classmethod
    def blade(cls, n: int, factors: Mapping[int, str], value: float = 1.0) -> "Multivector":
        """Basis element with ``factors[a]`` (a name from :data:`NAMES`) in particle ``a`` (1-based)."""
        n = _check_n(n)
        codes = [0] * n
        for a, name in factors.items():
            if not 1 <= a <= n:
                raise ValueError(f"particle {a} out of range for n={n}")
            codes[a - 1] = CODES[name]
        c = np.zeros(8**n)
        c[join_codes(codes)] = value
        return cls(n, c)

    # arithmetic

    def _coerce(self, other) -> "Multivector":
        if isinstance(other, Multivector):
            if other.n != self.n:
                raise ValueError(f"mismatched particle counts {self.n} and {other.n}")
            return other
        if isinstance(other, (Real, np.floating, np.integer)):
            return Multivector.scalar(self.n, float(other))
        return NotImplemented

    def __add__(self, other):
        if isinstance(other, CMultivector):
            return CMultivector(self) + other
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Multivector(self.n, self.coeffs + o.coeffs)

    __radd__ = __add__

    def __neg__(self):
        return Multivector(self.n, -self.coeffs)

    def __pos__(self):
        return self

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, CMultivector):
            return CMultivector(self) * other
        if isinstance(other, (Real, np.floating, np.integer)):
            return Multivector(self.n, self.coeffs * float(other))
        if isinstance(other, Multivector):
            self._coerce(other)
            return Multivector(self.n, _product(self.coeffs, other.coeffs, self.n))
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (Real, np.floating, np.integer)):
            return Multivector(self.n, self.coeffs * float(other))
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (Real, np.floating, np.integer)):
            return Multivector(self.n, self.coeffs / float(other))
        return NotImplemented

    def __invert__(self):
        return self.reverse()

    def __call__(self, grade: int) -> "Multivector":
        return self.grade(grade)

    def reverse(self) -> "Multivector":
        return Multivector(self.n, self.coeffs * _reverse_signs(self.n))

    def grade(self, g: int) -> "Multivector":
        return Multivector(self.n, np.where(_grades(self.n) == g, self.coeffs, 0.0))

    def scalar_part(self) -> float:
        return float(self.coeffs[0])

    def is_even(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.coeffs[~_even_mask(self.n)]) <= tol))

    def norm_inf(self) -> float:
        return float(np.max(np.abs(self.coeffs)))

    def norm_l1(self) -> float:
        return float(np.sum(np.abs(self.coeffs)))

    def allclose(self, other, atol: float = 1e-12) -> bool:
        other = self._coerce(other)
        return bool(np.max(np.abs(self.coeffs - other.coeffs)) <= atol)

    def __eq__(self, other):
        if not isinstance(other, Multivector):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self.coeffs, other.coeffs))

    __hash__ = None

    def terms(self, tol: float = 0.0):
        """Yield ``(per-particle names, coefficient)`` for each term above ``tol``."""
        for idx in np.flatnonzero(np.abs(self.coeffs) > tol):
            yield tuple(NAMES[c] for c in split_index(int(idx), self.n)), float(self.coeffs[idx])

    def __repr__(self):
        parts = []
        for names, value in self.terms(1e-15):
            label = " ".join(f"{nm}^{a + 1}" for a, nm in enumerate(names) if nm != "1") or "1"
            parts.append(f"{value:+.6g}*{label}")
        return f"Multivector(n={self.n}: {' '.join(parts) or '0'})"


def scalar(n: int, value: float = 1.0) -> Multivector:
    return Multivector.scalar(n, value)


def isig(n: int, a: int, k: int) -> Multivector:
    """The bivector ``I sigma_k`` in particle space ``a``."""
    return Multivector.blade(n, {a: f"Is{k}"})


def sig(n: int, a: int, k: int) -> Multivector:
    """The relative vector ``sigma_k`` in particle space ``a``."""
    return Multivector.blade(n, {a: f"s{k}"})


def pseudoscalar(n: int, a: int) -> Multivector:
    return Multivector.blade(n, {a: "I"})


def bivector(n: int, a: int, components) -> Multivector:
    """``sum_k c_k I sigma_k`` in particle space ``a``."""
    out = Multivector(n)
    for k, c in enumerate(components, start=1):
        if c:
            out = out + float(c) * isig(n, a, k)
    return out


def vector(n: int, a: int, components) -> Multivector:
    out = Multivector(n)
    for k, c in enumerate(components, start=1):
        if c:
            out = out + float(c) * sig(n, a, k)
    return out


def embed(x: Multivector, n: int, a: int) -> Multivector:
    """Copy a single-particle element into particle space ``a`` of an n-particle algebra."""
    if x.n != 1:
        raise ValueError("embed expects a single-particle multivector")
    n = _check_n(n)
    if not 1 <= a <= n:
        raise ValueError(f"particle {a} out of range for n={n}")
    c = np.zeros(8**n)
    shift = 3 * (n - a)
    for code in range(8):
        c[code << shift] = x.coeffs[code]
    return Multivector(n, c)


def single_particle_part(x: Multivector, a: int) -> Multivector:
    """Single-particle element holding the terms of ``x`` that are identity outside particle ``a``."""
    shift = 3 * (x.n - a)
    return Multivector(1, [x.coeffs[code << shift] for code in range(8)])


def commutator(a: Multivector, b: Multivector) -> Multivector:
    """``(ab - ba) / 2``."""
    return 0.5 * (a * b - b * a)


def left_matrix(a: Multivector) -> np.ndarray:
    """Real matrix ``L`` with ``(a * b).coeffs == L @ b.coeffs``."""
    n = a.n
    if n <= _TABLE_MAX_N:
        xor, _, left = _tables(n)
        return a.coeffs[xor] * left
    size = 8**n
    return np.column_stack([_product(a.coeffs, np.eye(1, size, k).ravel(), n) for k in range(size)])


def right_matrix(b: Multivector) -> np.ndarray:
    """Real matrix ``R`` with ``(a * b).coeffs == R @ a.coeffs``."""
    n = b.n
    if n <= _TABLE_MAX_N:
        xor, right, _ = _tables(n)
        return (right * b.coeffs[xor]).T
    size = 8**n
    return np.column_stack([_product(np.eye(1, size, k).ravel(), b.coeffs, n) for k in range(size)])


class CMultivector:
    """``plus + j*minus`` with a central formal imaginary ``j``, ``j*j = -1``."""

    __slots__ = ("plus", "minus")
    __array_priority__ = 1000

    def __init__(self, plus: Multivector, minus: Multivector | None = None):
        if minus is None:
            minus = Multivector(plus.n)
        if plus.n != minus.n:
            raise ValueError("plus and minus parts must share a particle count")
        object.__setattr__(self, "plus", plus)
        object.__setattr__(self, "minus", minus)

    def __setattr__(self, name, value):
        raise AttributeError("CMultivector is immutable")

    @property
    def n(self) -> int:
        return self.plus.n

    @classmethod
    def scalar(cls, n: int, value: complex = 1.0) -> "CMultivector":
        value = complex(value)
        return cls(Multivector.scalar(n, value.real), Multivector.scalar(n, value.imag))

    def _coerce(self, other) -> "CMultivector":
        if isinstance(other, CMultivector):
            if other.n != self.n:
                raise ValueError(f"mismatched particle counts {self.n} and {other.n}")
            return other
        if isinstance(other, Multivector):
            if other.n != self.n:
                raise ValueError(f"mismatched particle counts {self.n} and {other.n}")
            return CMultivector(other)
        if isinstance(other, (Real, complex, np.number)):
            return CMultivector.scalar(self.n, other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return CMultivector(self.plus + o.plus, self.minus + o.minus)

    __radd__ = __add__

    def __neg__(self):
        return CMultivector(-self.plus, -self.minus)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (Real, np.floating, np.integer)):
            return CMultivector(self.plus * float(other), self.minus * float(other))
        if isinstance(other, (complex, np.complexfloating)):
            re, im = other.real, other.imag
            return CMultivector(self.plus * re - self.minus * im, self.plus * im + self.minus * re)
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        a, b, c, d = self.plus, self.minus, o.plus, o.minus
        return CMultivector(a * c - b * d, a * d + b * c)

    def __rmul__(self, other):
        if isinstance(other, (Real, complex, np.number)):
            return self * other
        if isinstance(other, Multivector):
            return CMultivector(other) * self
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (Real, np.floating, np.integer)):
            return self * (1.0 / float(other))
        return NotImplemented

    def times_j(self) -> "CMultivector":
        return CMultivector(-self.minus, self.plus)

    def dagger(self) -> "CMultivector":
        """Reverse both parts and conjugate ``j``."""
        return CMultivector(self.plus.reverse(), -self.minus.reverse())

    def conj_j(self) -> "CMultivector":
        return CMultivector(self.plus, -self.minus)

    def scalar_part(self) -> complex:
        return complex(self.plus.coeffs[0], self.minus.coeffs[0])

    def grade(self, g: int) -> "CMultivector":
        return CMultivector(self.plus.grade(g), self.minus.grade(g))

    def norm_inf(self) -> float:
        return max(self.plus.norm_inf(), self.minus.norm_inf())

    def norm_l1(self) -> float:
        return self.plus.norm_l1() + self.minus.norm_l1()

    def allclose(self, other, atol: float = 1e-12) -> bool:
        o = self._coerce(other)
        return (self - o).norm_inf() <= atol

    def __eq__(self, other):
        if not isinstance(other, CMultivector):
            return NotImplemented
        return self.plus == other.plus and self.minus == other.minus

    __hash__ = None

    def __repr__(self):
        return f"CMultivector(plus={self.plus!r}, minus={self.minus!r})"


def j_unit(n: int) -> CMultivector:
    return CMultivector(Multivector(n), Multivector.scalar(n))


def as_cmv(x) -> CMultivector:
    return x if isinstance(x, CMultivector) else CMultivector(x)


def cmv_exp(x, tol: float = 1e-13, max_terms: int = 64) -> CMultivector:
    """Exponential by scaling and squaring of a truncated Taylor series.

    ``x`` is scaled by ``2**-s`` until its l1 coefficient norm (which bounds
    the max-coefficient norm and is submultiplicative for this product) is at
    most 0.5.  The series stops once a term's l1 norm drops below
    ``tol * 2**-s``, since each squaring roughly doubles the truncation error.
    """
    x = as_cmv(x)
    norm = x.norm_l1()
    s = 0
    if norm > 0.5:
        s = int(np.ceil(np.log2(norm / 0.5)))
    y = x / float(2**s) if s else x
    threshold = tol * 2.0**-s
    total = CMultivector.scalar(x.n, 1.0)
    term = total
    for k in range(1, max_terms):
        term = (term * y) / float(k)
        total = total + term
        if term.norm_l1() < threshold:
            break
    for _ in range(s):
        total = total * total
    return total


def mv_exp(x: Multivector, tol: float = 1e-13) -> Multivector:
    """Exponential of a real multivector (no ``j``)."""
    return cmv_exp(x, tol).plus
