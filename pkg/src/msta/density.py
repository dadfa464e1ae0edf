"""Density operators inside the even subalgebra and the random-neighbour decoherence model.

A pure state's density operator is ``rho* = 2**(n-1) psi (E + J) ~psi``.  Its
reversion-even part ``rho+`` and reversion-odd part ``rho-`` are recombined as
``rho = rho+ - j rho-``, which keeps every observable even.  Normalization puts
the scalar part at 1, so ``to_matrix(rho) / 2**n`` is the usual trace-one matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .dynamics import action_matrix, evolve_observable, parallel_map, propagator_series
from .ga import CMultivector, Multivector, isig, pseudoscalar, scalar, sig
from .hamiltonians import dipolar_hamiltonian
from .spin import Spinor, _spinor_basis, complex_J, correlator_E, spin_bivector

_NORM_TOL = 1e-9


@dataclass(frozen=True)
class BlochState:
    """Polarization vector of one spin, ``|p| <= 1``."""

    p: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if p.shape != (3,):
            raise ValueError("a Bloch vector has three components")
        if np.linalg.norm(p) > 1.0 + 1e-12:
            raise ValueError(f"Bloch vector longer than 1: {np.linalg.norm(p)!r}")
        object.__setattr__(self, "p", p)

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.p))


@dataclass(frozen=True)
class DensityOp:
    value: CMultivector

    @property
    def n(self) -> int:
        return self.value.n

    def trace(self) -> float:
        """Scalar part, 1 for a normalized state."""
        return float(self.value.plus.scalar_part())

    def is_hermitian(self, atol: float = 1e-12) -> bool:
        return self.value.dagger().allclose(self.value, atol)

    def evolve(self, U: CMultivector) -> "DensityOp":
        return DensityOp(U * self.value * U.dagger())


def _split(rho_star: Multivector) -> CMultivector:
    rev = ~rho_star
    plus = 0.5 * (rho_star + rev)
    minus = 0.5 * (rho_star - rev)
    return CMultivector(plus, -minus)


def density_from_spinor(psi: Spinor) -> DensityOp:
    norm2 = psi.norm2()
    if abs(norm2 - 1.0) > _NORM_TOL:
        raise ValueError(f"spinor is not normalized (norm^2 = {norm2!r})")
    n = psi.n
    rho_star = 2 ** (n - 1) * (psi.value * (correlator_E(n) + complex_J(n)) * ~psi.value)
    return DensityOp(_split(rho_star))


def mix(states, weights) -> DensityOp:
    states = list(states)
    w = np.asarray(weights, dtype=float)
    if not states or w.shape != (len(states),):
        raise ValueError("need one weight per state")
    if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
        raise ValueError("weights must be nonnegative and sum to 1")
    n = states[0].n
    if any(s.n != n for s in states):
        raise ValueError("states must share a particle count")
    total = CMultivector(Multivector(n))
    for s, wk in zip(states, w):
        total = total + s.value * float(wk)
    return DensityOp(total)


def expectation(o, rho: DensityOp) -> float:
    """``<o+ rho+ + o- rho->_0`` for ``o = o+ + j o-``."""
    o = o if isinstance(o, CMultivector) else CMultivector(o)
    if o.n != rho.n:
        raise ValueError("observable and state have different particle counts")
    return float((o * rho.value).scalar_part().real)


def polarization_observable(n: int, a: int, k: int) -> CMultivector:
    """``-j I sigma_k^a``, whose expectation is the ``k`` Bloch component of spin ``a``."""
    return CMultivector(Multivector(n), -isig(n, a, k))


def reduce_to_particle(rho: DensityOp, a: int) -> BlochState:
    """Bloch vector of spin ``a``, read from the single-particle ``-j I sigma_k^a`` terms."""
    if not 1 <= a <= rho.n:
        raise ValueError(f"particle {a} out of range for n={rho.n}")
    shift = 3 * (rho.n - a)
    minus = rho.value.minus.coeffs
    trace = rho.trace()
    return BlochState(np.array([-minus[c << shift] for c in (6, 5, 3)]) / trace)


def von_neumann_entropy(p) -> float:
    """Entropy in bits of a spin with Bloch vector ``p`` (or its length)."""
    r = p.length if isinstance(p, BlochState) else float(np.linalg.norm(p))
    if r > 1.0 + 1e-12:
        raise ValueError("Bloch length exceeds 1")
    r = min(r, 1.0)
    out = 0.0
    for w in (0.5 * (1 + r), 0.5 * (1 - r)):
        if w > 0:
            out -= w * np.log2(w)
    return float(out)


def _bloch(p0) -> np.ndarray:
    return (p0 if isinstance(p0, BlochState) else BlochState(p0)).p


def _tide_factors(d: float, t: float) -> tuple[float, float]:
    c = np.cos(d * t / 2.0)
    return np.cos(d * t) * c, c * c


def random_env_evolve(p0, d: float, t: float) -> BlochState:
    """Spin 1 coupled along ``z`` to a completely random spin 2, closed form.

    Transverse components shrink by ``cos(dt) cos(dt/2)``, the longitudinal
    one by ``cos(dt/2)**2``.
    """
    p = _bloch(p0)
    transverse, longitudinal = _tide_factors(d, t)
    return BlochState(np.array([transverse * p[0], transverse * p[1], longitudinal * p[2]]))


def random_env_constructive(p0, d: float, t: float) -> BlochState:
    """Same model by evolving ``1 - j p.(I sigma)^1`` and keeping spin-1 terms only."""
    p = _bloch(p0)
    n = 2
    rho = CMultivector(scalar(n), -sum((p[k] * isig(n, 1, k + 1) for k in range(3)), Multivector(n)))
    H = dipolar_hamiltonian(n, 1, 2, d)
    evolved = evolve_observable(rho, H, t)
    return reduce_to_particle(DensityOp(evolved), 1)


@lru_cache(maxsize=None)
def _polarization_forms(n: int, a: int) -> np.ndarray:
    """Symmetric matrices ``Q_k`` with ``p_k^a = x^T Q_k x`` in real spinor coordinates."""
    idx, val = _spinor_basis(n)
    size = idx.shape[0]

    def basis_spinor(r):
        c = np.zeros(8**n)
        c[idx[r]] = val[r]
        return c

    def pol(c):
        return spin_bivector(Spinor(Multivector(n, c))).p[a - 1]

    diag = [pol(basis_spinor(r)) for r in range(size)]
    Q = np.empty((3, size, size))
    for r in range(size):
        Q[:, r, r] = diag[r]
        for s in range(r + 1, size):
            both = pol(basis_spinor(r) + basis_spinor(s))
            Q[:, r, s] = Q[:, s, r] = 0.5 * (both - diag[r] - diag[s])
    Q.setflags(write=False)
    return Q


def _qubit_amplitudes(u: np.ndarray) -> np.ndarray:
    """Rows of ``(cos(theta/2), exp(i phi) sin(theta/2))`` for unit vectors ``u``."""
    theta = np.arccos(np.clip(u[:, 2], -1.0, 1.0))
    phi = np.arctan2(u[:, 1], u[:, 0])
    return np.stack([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)], axis=1)


def random_env_sampled(p0, d: float, t_grid, samples: int, seed: int) -> np.ndarray:
    """Monte Carlo version: average spin-1 polarization over ``samples`` random partner directions.

    ``p0`` must be a unit vector (a pure system state).  Returns an array of
    shape ``(len(t_grid), 3)``.
    """
    p = _bloch(p0)
    if abs(np.linalg.norm(p) - 1.0) > 1e-12:
        raise ValueError("sampling mode needs a pure (unit) initial polarization")
    if samples < 1:
        raise ValueError("samples must be positive")
    rng = np.random.default_rng(seed)
    partners = rng.normal(size=(samples, 3))
    partners /= np.linalg.norm(partners, axis=1, keepdims=True)
    sys_amp = _qubit_amplitudes(p[None, :])[0]
    amps = np.einsum("i,sj->sij", sys_amp, _qubit_amplitudes(partners)).reshape(samples, 4)
    x = np.empty((samples, 8))
    x[:, 0::2] = amps.real
    x[:, 1::2] = amps.imag
    Q = _polarization_forms(2, 1)
    H = dipolar_hamiltonian(2, 1, 2, d)
    out = []
    for t in np.asarray(t_grid, dtype=float):
        y = x @ action_matrix(propagator_series(H, t), 2).T
        out.append(np.einsum("si,kij,sj->k", y, Q, y) / samples)
    return np.array(out)


GEOMETRIES = ("equator", "poles")


def tides_scan(geometry: str, t_grid, d: float = 1.0, constructive: bool = False) -> list[tuple[float, float, float]]:
    """``(t, signed_length, entropy_bits)`` for a spin beside (equator) or above (poles) a random neighbour.

    The coupling axis is ``z``; the equator case starts polarized along ``x``,
    the poles case along ``z``.  The signed length is the component along the
    initial direction.
    """
    if geometry not in GEOMETRIES:
        raise ValueError(f"geometry must be one of {GEOMETRIES}, got {geometry!r}")
    k = 0 if geometry == "equator" else 2
    p0 = np.zeros(3)
    p0[k] = 1.0
    evolve = random_env_constructive if constructive else random_env_evolve
    t = np.asarray(t_grid, dtype=float)

    def row(tk):
        state = evolve(p0, d, float(tk))
        signed = float(state.p[k])
        return float(tk), signed, von_neumann_entropy(abs(signed))

    return parallel_map(row, t)


def z_idempotent(n: int, a: int, sign: int = 1) -> Multivector:
    """``(1 +/- sigma_3^a) / 2``; not even, used only for the conventional construction."""
    return 0.5 * (scalar(n) + sign * sig(n, a, 3))


def z_plus(n: int) -> Multivector:
    out = scalar(n)
    for a in range(1, n + 1):
        out = out * z_idempotent(n, a)
    return out


def pseudoscalar_correlator(n: int) -> Multivector:
    """``prod_a (1 - I^1 I^a) / 2``, identifying every particle's pseudoscalar with one imaginary."""
    out = scalar(n)
    for a in range(2, n + 1):
        out = out * (0.5 * (scalar(n) - pseudoscalar(n, 1) * pseudoscalar(n, a)))
    return out
