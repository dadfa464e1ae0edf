"""Conventional complex-matrix quantum mechanics for cross-checking.

Nothing here touches the multivector product kernel.  Multivectors enter only
through their coefficient arrays and the basis naming, and are mapped by the
rule ``I sigma_k^a -> i sigma_k`` at tensor slot ``a`` with ``j -> i``.
"""

from __future__ import annotations

from functools import reduce

import numpy as np

from .ga import NAMES, CMultivector, Multivector, split_index

PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}
ID2 = np.eye(2, dtype=complex)

_EVEN_IMAGE = {
    "1": ID2,
    "Is1": 1j * PAULI["x"],
    "Is2": 1j * PAULI["y"],
    "Is3": 1j * PAULI["z"],
}


def kron_all(mats) -> np.ndarray:
    return reduce(np.kron, mats)


def embed_op(op: np.ndarray, n: int, a: int) -> np.ndarray:
    """Place a 2x2 operator at slot ``a`` (1-based, slot 1 most significant)."""
    return kron_all([op if k == a else ID2 for k in range(1, n + 1)])


def _mv_matrix(x: Multivector, tol: float) -> np.ndarray:
    n = x.n
    out = np.zeros((2**n, 2**n), dtype=complex)
    for idx in np.flatnonzero(x.coeffs):
        value = x.coeffs[idx]
        names = [NAMES[c] for c in split_index(int(idx), n)]
        if any(nm not in _EVEN_IMAGE for nm in names):
            if abs(value) <= tol:
                continue
            raise ValueError(f"odd-sector term {names} has no image in the correspondence")
        out += value * kron_all([_EVEN_IMAGE[nm] for nm in names])
    return out


def to_matrix(x, tol: float = 0.0) -> np.ndarray:
    """Complex ``2**n x 2**n`` image of an even multivector (or ``plus + j minus``)."""
    if isinstance(x, CMultivector):
        return _mv_matrix(x.plus, tol) + 1j * _mv_matrix(x.minus, tol)
    return _mv_matrix(x, tol)


def to_vector(psi) -> np.ndarray:
    """Amplitude column of a spinor.

    The correlator maps to a projector fixing ``|0...0>``, so the column is the
    image matrix applied to that basis vector.
    """
    value = getattr(psi, "value", psi)
    return to_matrix(value)[:, 0].copy()


def dipolar_matrix(n: int, a: int, b: int, d: float, axis=(0.0, 0.0, 1.0)) -> np.ndarray:
    """``(d/4) (sum_k s_k (x) s_k - 3 (n.s) (x) (n.s))`` on slots ``a``, ``b``."""
    u = np.asarray(axis, dtype=float)
    ns = u[0] * PAULI["x"] + u[1] * PAULI["y"] + u[2] * PAULI["z"]
    H = np.zeros((2**n, 2**n), dtype=complex)
    for s in PAULI.values():
        H += embed_op(s, n, a) @ embed_op(s, n, b)
    H -= 3.0 * embed_op(ns, n, a) @ embed_op(ns, n, b)
    return (d / 4.0) * H


def zeeman_matrix(n: int, a: int, gamma_b) -> np.ndarray:
    """Hermitian image of the generator ``gamma B`` (``psi_dot = gamma B psi``): ``-g.sigma``."""
    g = np.asarray(gamma_b, dtype=float)
    op = -(g[0] * PAULI["x"] + g[1] * PAULI["y"] + g[2] * PAULI["z"])
    return embed_op(op, n, a)


def spec_matrix(spec) -> np.ndarray:
    H = np.zeros((2**spec.n, 2**spec.n), dtype=complex)
    for p in spec.pairs:
        H += dipolar_matrix(spec.n, p.a, p.b, p.d, p.axis)
    for z in spec.zeeman:
        H += zeeman_matrix(spec.n, z.a, z.gamma_b)
    return H


def check_hermitian(M: np.ndarray, atol: float = 1e-12) -> None:
    if not np.allclose(M, M.conj().T, atol=atol, rtol=0):
        raise ValueError("matrix is not Hermitian")


def unitary(Hmat: np.ndarray, t: float) -> np.ndarray:
    """``exp(-i H t)`` from the Hermitian eigendecomposition."""
    check_hermitian(Hmat)
    w, V = np.linalg.eigh(Hmat)
    return (V * np.exp(-1j * w * t)) @ V.conj().T


def matrix_evolve(v, Hmat: np.ndarray, t: float) -> np.ndarray:
    return unitary(Hmat, t) @ np.asarray(v, dtype=complex)


def partial_trace(M: np.ndarray, keep: int, n: int | None = None) -> np.ndarray:
    """Reduced 2x2 operator on slot ``keep`` (1-based)."""
    dim = M.shape[0]
    if n is None:
        n = dim.bit_length() - 1
    T = M.reshape([2] * (2 * n))
    k = keep - 1
    # Move the kept row/column axes to the front, trace out everything else.
    rows = [k] + [i for i in range(n) if i != k]
    cols = [n + k] + [n + i for i in range(n) if i != k]
    T = T.transpose(rows + cols).reshape(2, 2 ** (n - 1), 2, 2 ** (n - 1))
    return np.einsum("aibi->ab", T)


def bloch_vector(rho2: np.ndarray) -> np.ndarray:
    tr = np.trace(rho2).real
    return np.array([np.trace(PAULI[k] @ rho2).real / tr for k in "xyz"])


def projector(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


def expectation(v, Hmat: np.ndarray) -> float:
    v = np.asarray(v, dtype=complex)
    return float(np.real(v.conj() @ Hmat @ v))
