"""Qubit states as E-correlated even multivectors.

A pure n-qubit state is an even multivector ``psi`` with ``psi * E == psi``,
where ``E`` is the correlator idempotent.  The complex unit of ordinary
quantum mechanics is right-multiplication by ``J = I sigma_3^1 E``.

Amplitude ordering puts particle 1 in the most significant bit, and
computational basis state ``b`` corresponds to ``prod_a (-I sigma_2^a)^{b_a} E``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .ga import CMultivector, Multivector, embed, isig, scalar, single_particle_part


def correlator_E(n: int) -> Multivector:
    """``prod_{a=2..n} (1 - I sigma_3^1 I sigma_3^a) / 2``."""
    if n < 1:
        raise ValueError("correlator needs at least one particle")
    out = scalar(n)
    for a in range(2, n + 1):
        out = out * (0.5 * (1.0 - isig(n, 1, 3) * isig(n, a, 3)))
    return out


def complex_J(n: int) -> Multivector:
    return isig(n, 1, 3) * correlator_E(n)


@lru_cache(maxsize=None)
def _spinor_basis(n: int):
    """Sparse rows of the 2**(n+1) real basis spinors.

    Row ``2*b`` is ``R_b E`` and row ``2*b + 1`` is ``R_b J``.  Every row has
    ``2**(n-1)`` nonzeros on disjoint supports, with squared norm ``2**(1-n)``.
    """
    E = correlator_E(n)
    J = complex_J(n)
    width = 2 ** (n - 1)
    idx = np.empty((2 ** (n + 1), width), dtype=np.int64)
    val = np.empty((2 ** (n + 1), width))
    for b in range(2**n):
        rot = scalar(n)
        for a in range(1, n + 1):
            if (b >> (n - a)) & 1:
                rot = rot * (-isig(n, a, 2))
        for part, unit in enumerate((E, J)):
            coeffs = (rot * unit).coeffs
            nz = np.flatnonzero(coeffs)
            idx[2 * b + part] = nz
            val[2 * b + part] = coeffs[nz]
    idx.setflags(write=False)
    val.setflags(write=False)
    return idx, val


@dataclass(frozen=True)
class Spinor:
    """Pure state; ``value`` is even and right-stabilized by the correlator."""

    value: Multivector

    @property
    def n(self) -> int:
        return self.value.n

    def norm2(self) -> float:
        """``2**(n-1) <psi ~psi>_0``; unity for physical states."""
        return float(2 ** (self.n - 1) * (self.value * ~self.value).scalar_part())

    def norm(self) -> float:
        return float(np.sqrt(self.norm2()))

    def normalized(self) -> "Spinor":
        return Spinor(self.value / self.norm())

    def __add__(self, other: "Spinor") -> "Spinor":
        return Spinor(self.value + other.value)

    def __sub__(self, other: "Spinor") -> "Spinor":
        return Spinor(self.value - other.value)

    def __mul__(self, k: float) -> "Spinor":
        return Spinor(self.value * k)

    __rmul__ = __mul__


def spinor_from_amplitudes(amps) -> Spinor:
    """Build a spinor from ``2**n`` complex amplitudes (particle 1 = most significant bit)."""
    amps = np.asarray(amps, dtype=complex).ravel()
    size = amps.size
    n = size.bit_length() - 1
    if size < 2 or 2**n != size:
        raise ValueError(f"amplitude count must be a power of two >= 2, got {size}")
    idx, val = _spinor_basis(n)
    weights = np.empty(2 * size)
    weights[0::2] = amps.real
    weights[1::2] = amps.imag
    coeffs = np.zeros(8**n)
    np.add.at(coeffs, idx.ravel(), (val * weights[:, None]).ravel())
    return Spinor(Multivector(n, coeffs))


def amplitudes_from_spinor(psi: Spinor | Multivector) -> np.ndarray:
    value = psi.value if isinstance(psi, Spinor) else psi
    n = value.n
    idx, val = _spinor_basis(n)
    proj = 2 ** (n - 1) * np.sum(value.coeffs[idx] * val, axis=1)
    return proj[0::2] + 1j * proj[1::2]


def apply_j(psi: Spinor) -> Spinor:
    return Spinor(psi.value * complex_J(psi.n))


def apply(U, psi: Spinor) -> Spinor:
    """Act with ``U = U+ + j U-`` on a spinor, ``j`` realized as right-multiplication by J."""
    if isinstance(U, CMultivector):
        out = U.plus * psi.value
        if np.any(U.minus.coeffs):
            out = out + U.minus * psi.value * complex_J(psi.n)
        return Spinor(out)
    return Spinor(U * psi.value)


def is_correlated(psi: Spinor, atol: float = 1e-12) -> bool:
    return (psi.value * correlator_E(psi.n)).allclose(psi.value, atol)


def single_qubit_spinor(direction) -> Multivector:
    """Single-particle spinor whose polarization points along the unit 3-vector ``direction``."""
    x, y, z = np.asarray(direction, dtype=float)
    theta = np.arccos(np.clip(z, -1.0, 1.0))
    phi = np.arctan2(y, x)
    return spinor_from_amplitudes([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)]).value


def product_state(*directions) -> Spinor:
    """Separable n-qubit spinor with the given polarization directions."""
    vec = np.ones(1, dtype=complex)
    for d in directions:
        single = amplitudes_from_spinor(single_qubit_spinor(d))
        vec = np.kron(vec, single)
    return spinor_from_amplitudes(vec)


@dataclass(frozen=True)
class SpinObservables:
    """Per-particle spin bivector components, polarization vectors and entanglement angles."""

    S: np.ndarray  # (n, 3) coefficients of I sigma_k^a in the spin bivector
    p: np.ndarray  # (n, 3) polarization vectors
    lengths: np.ndarray  # (n,)
    theta: np.ndarray  # (n,) entanglement angles, cos(theta) = length


def spin_bivector_mv(psi: Spinor) -> Multivector:
    """``2**(n-1) psi J ~psi`` restricted to single-particle bivectors."""
    n = psi.n
    full = 2 ** (n - 1) * (psi.value * complex_J(n) * ~psi.value)
    out = Multivector(n)
    for a in range(1, n + 1):
        part = single_particle_part(full, a)
        out = out + embed(part.grade(2), n, a)
    return out


def spin_bivector(psi: Spinor) -> SpinObservables:
    n = psi.n
    full = 2 ** (n - 1) * (psi.value * complex_J(n) * ~psi.value)
    S = np.empty((n, 3))
    for a in range(1, n + 1):
        part = single_particle_part(full, a)
        # Is1, Is2, Is3 live at codes 6, 5, 3.
        S[a - 1] = [part.coeffs[6], part.coeffs[5], part.coeffs[3]]
    # S = I p, so p = -I S has the same components as S.
    p = S.copy()
    lengths = np.linalg.norm(p, axis=1)
    if n == 2:
        # arccos is ill-conditioned near 1; pair the length with the concurrence instead.
        a = amplitudes_from_spinor(psi)
        conc = 2.0 * abs(a[0] * a[3] - a[1] * a[2])
        theta = np.full(2, np.arctan2(conc, lengths.mean()))
    else:
        theta = np.arccos(np.clip(lengths, 0.0, 1.0))
    return SpinObservables(S=S, p=p, lengths=lengths, theta=theta)


def entanglement_angle(psi: Spinor, a: int) -> float:
    return float(spin_bivector(psi).theta[a - 1])


def two_qubit_parameterize(upsilon: Multivector, zeta: Multivector, theta: float, alpha: float) -> Spinor:
    """``upsilon^1 zeta^2 (cos(theta/2) E + sin(theta/2) I s2^1 I s2^2 J) exp(alpha J)``."""
    E = correlator_E(2)
    J = complex_J(2)
    K = isig(2, 1, 2) * isig(2, 2, 2)
    core = np.cos(theta / 2) * E + np.sin(theta / 2) * (K * J)
    # exp(alpha J) on E-correlated elements: (1 - E) + E cos(alpha) + J sin(alpha).
    phase = (1.0 - E) + np.cos(alpha) * E + np.sin(alpha) * J
    return Spinor(embed(upsilon, 2, 1) * embed(zeta, 2, 2) * core * phase)
