"""Lagrangians, Noether charges and constants of motion of the dipolar pair."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import oracle
from .ga import CMultivector, Multivector, as_cmv, embed, isig, mv_exp
from .hamiltonians import dipolar_hamiltonian, interchange_Pi
from .spin import Spinor, apply, complex_J, correlator_E


def lagrangian_single(psi: Multivector, psi_dot: Multivector, gamma_b: Multivector) -> float:
    """``<psi_dot I s3 ~psi - gamma B psi I s3 ~psi>_0`` for one particle."""
    Is3 = isig(psi.n, 1, 3)
    return (psi_dot * Is3 * ~psi - gamma_b * psi * Is3 * ~psi).scalar_part()


def lagrangian_two(psi: Spinor, psi_dot: Spinor, H) -> float:
    """``2**(n-1) <psi_dot J ~psi - H psi E ~psi>_0``.

    ``H`` may carry a ``j`` part; it acts on ``psi`` with ``j`` as right-J.
    """
    n = psi.n
    J = complex_J(n)
    E = correlator_E(n)
    kinetic = (psi_dot.value * J * ~psi.value).scalar_part()
    Hpsi = apply(as_cmv(H), psi).value
    potential = (Hpsi * E * ~psi.value).scalar_part()
    return 2 ** (n - 1) * (kinetic - potential)


def kinetic_factorized(upsilon, zeta, upsilon_dot, zeta_dot, theta: float) -> float:
    """``cos(theta) <zeta_dot Is3 ~zeta (u ~u) + u_dot Is3 ~u (zeta ~zeta)>`` (single-particle factors)."""
    Is3 = isig(1, 1, 3)
    uu = (upsilon * ~upsilon).scalar_part()
    zz = (zeta * ~zeta).scalar_part()
    return float(
        np.cos(theta)
        * ((zeta_dot * Is3 * ~zeta).scalar_part() * uu + (upsilon_dot * Is3 * ~upsilon).scalar_part() * zz)
    )


def potential_factorized(upsilon, zeta, theta: float, H: Multivector) -> float:
    """Potential ``-2 <H psi E ~psi>`` of the parameterized two-qubit spinor.

    Equals ``<H (u Is3 ~u)^1 (z Is3 ~z)^2> + sin(theta) <H u^1 z^2 (Is1^1 Is2^2 + Is2^1 Is1^2) ~u^1 ~z^2>``
    minus ``<H>_0 |u|^2 |z|^2``.
    """
    Is3 = isig(1, 1, 3)
    u1, z2 = embed(upsilon, 2, 1), embed(zeta, 2, 2)
    spins = embed(upsilon * Is3 * ~upsilon, 2, 1) * embed(zeta * Is3 * ~zeta, 2, 2)
    cross = isig(2, 1, 1) * isig(2, 2, 2) + isig(2, 1, 2) * isig(2, 2, 1)
    mag = (upsilon * ~upsilon).scalar_part() * (zeta * ~zeta).scalar_part()
    return (
        (H * spins).scalar_part()
        + np.sin(theta) * (H * u1 * z2 * cross * ~u1 * ~z2).scalar_part()
        - H.scalar_part() * mag
    )


def noether_charge(psi: Spinor, phi: Spinor) -> float:
    """``2**(n-1) <phi J ~psi>_0``, conserved when ``phi`` generates a symmetry."""
    if psi.n != phi.n:
        raise ValueError("mismatched particle counts")
    n = psi.n
    return float(2 ** (n - 1) * (phi.value * complex_J(n) * ~psi.value).scalar_part())


@dataclass(frozen=True)
class ConservedQuantity:
    """A symmetry generator and its Noether charge.

    ``generator`` acts from the left (``phi = P psi`` with ``j`` as right-J);
    ``None`` marks the phase symmetry ``phi = psi J``.
    """

    name: str
    generator: CMultivector | None

    def variation(self, psi: Spinor) -> Spinor:
        if self.generator is None:
            return Spinor(psi.value * complex_J(psi.n))
        return apply(self.generator, psi)

    def charge(self, psi: Spinor) -> float:
        return noether_charge(psi, self.variation(psi))


def double_quantum_generators() -> tuple[Multivector, Multivector]:
    I = lambda a, k: isig(2, a, k)  # noqa: E731
    return (
        I(1, 1) * I(2, 1) - I(1, 2) * I(2, 2),
        I(1, 1) * I(2, 2) + I(1, 2) * I(2, 1),
    )


def _j(x: Multivector) -> CMultivector:
    return CMultivector(Multivector(x.n), x)


def conserved_set_two_spin(d: float = 1.0, H=None) -> list[ConservedQuantity]:
    """The six independent constants of motion of the z-axis dipolar pair."""
    if H is None:
        H = dipolar_hamiltonian(2, 1, 2, d)
    H = as_cmv(H)
    Pi = interchange_Pi(2)
    dq1, dq2 = double_quantum_generators()
    return [
        ConservedQuantity("phase", None),
        ConservedQuantity("energy", -H.times_j()),
        ConservedQuantity("z_angular_momentum", CMultivector(0.5 * (isig(2, 1, 3) + isig(2, 2, 3)))),
        ConservedQuantity("interchange", _j(Pi)),
        ConservedQuantity("double_quantum_1", _j(dq1)),
        ConservedQuantity("double_quantum_2", _j(dq2)),
    ]


def total_spin_square(psi: Spinor) -> float:
    """``<S S>_0`` of the spin bivector, which the dipolar coupling does not conserve."""
    n = psi.n
    full = 2 ** (n - 1) * (psi.value * complex_J(n) * ~psi.value)
    S = full.grade(2)
    return (S * S).scalar_part()


def _pauli_basis(n: int) -> list[np.ndarray]:
    singles = [oracle.ID2] + [oracle.PAULI[k] for k in "xyz"]
    mats = [np.ones((1, 1), dtype=complex)]
    for _ in range(n):
        mats = [np.kron(m, s) for m in mats for s in singles]
    return mats


def commutant_dimension(H, rel_tol: float = 1e-9) -> int:
    """Dimension of the space of two-spin observables commuting with ``H``.

    Builds the real superoperator ``X -> i[H, X]`` on the 16 Pauli strings in the
    oracle representation and counts its null space by SVD.
    """
    n = H.n
    if n != 2:
        raise ValueError("commutant_dimension supports two spins only")
    Hm = oracle.to_matrix(H) if not isinstance(H, np.ndarray) else H
    basis = _pauli_basis(n)
    dim = 2**n
    cols = []
    for P in basis:
        C = 1j * (Hm @ P - P @ Hm)
        cols.append([np.trace(Q @ C).real / dim for Q in basis])
    M = np.array(cols).T
    sv = np.linalg.svd(M, compute_uv=False)
    if sv[0] == 0.0:
        return len(basis)
    return int(np.sum(sv <= rel_tol * sv[0]))


def rotor(bivec: Multivector, angle: float) -> Multivector:
    """``exp(-angle B / 2)`` for a unit bivector ``B``."""
    return mv_exp(bivec * (-angle / 2.0))
