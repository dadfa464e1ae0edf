"""Time evolution of spinors and observables under ``exp(-j H t)``.

Three propagator constructions are provided for the two-spin dipolar problem:
a product of three commuting closed-form exponentials, the eigenbasis form,
and the generic scaled-and-squared series.  Trajectories evaluate the exact
propagator independently at every sample time.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .ga import CMultivector, Multivector, as_cmv, bivector, cmv_exp, isig, scalar
from .hamiltonians import dipolar_hamiltonian, interchange_Pi
from .spin import Spinor, _spinor_basis, apply, complex_J, correlator_E, spin_bivector


def _closed_exp(generator: Multivector, phi: float) -> CMultivector:
    """``exp(j phi X)`` for ``X*X = 1``: ``cos(phi) + j X sin(phi)``."""
    return CMultivector(scalar(generator.n, np.cos(phi)), np.sin(phi) * generator)


def propagator_factored(n: int, d: float, t: float, n_vec=(0.0, 0.0, 1.0), a: int = 1, b: int = 2) -> CMultivector:
    """``exp(-j (In)^a (In)^b 3dt/4) exp(-j Pi dt/2) exp(j dt/4)`` for one dipolar pair."""
    u = np.asarray(n_vec, dtype=float)
    axial = bivector(n, a, u) * bivector(n, b, u)
    Pi = interchange_Pi(n, a, b)
    one = scalar(n)
    return (
        _closed_exp(axial, -3.0 * d * t / 4.0)
        * _closed_exp(Pi, -d * t / 2.0)
        * _closed_exp(one, d * t / 4.0)
    )


def _jexp(phi: float, x: Multivector) -> CMultivector:
    """``exp(j phi) x``."""
    return CMultivector(np.cos(phi) * x, np.sin(phi) * x)


def propagator_eigen(d: float, t: float) -> CMultivector:
    """Eigenbasis form for the z-axis pair, valid on E-correlated spinors.

    ``exp(j d t/2) E - (1 + exp(-j d t))/2 Is2^1 E Is2^1 + (1 - exp(-j d t))/2 Is2^1 E Is2^2``

    The ``E`` term carries ``exp(j d t/2)`` because ``H E = -(d/2) E``.
    """
    E = correlator_E(2)
    s21, s22 = isig(2, 1, 2), isig(2, 2, 2)
    A = s21 * E * s21
    B = s21 * E * s22
    return (
        _jexp(d * t / 2.0, E)
        - 0.5 * (CMultivector(A) + _jexp(-d * t, A))
        + 0.5 * (CMultivector(B) - _jexp(-d * t, B))
    )


def propagator_series(H, t: float) -> CMultivector:
    """``exp(-j H t)`` for any Hamiltonian (real 4-vector part plus ``j`` odd part)."""
    H = as_cmv(H)
    return cmv_exp(H.times_j() * (-t))


def evolve_spinor(psi0: Spinor, H, t: float) -> Spinor:
    return apply(propagator_series(H, t), psi0)


def evolve_observable(o, H, t: float) -> CMultivector:
    """``U o U^dagger`` with ``U = exp(-j H t)``."""
    U = propagator_series(H, t)
    return U * as_cmv(o) * U.dagger()


def action_matrix(U, n: int) -> np.ndarray:
    """Real matrix of ``psi -> U psi`` on the 2**(n+1) real basis spinors.

    Entry ``[r, c]`` is the ``r``-th coordinate of the image of basis spinor
    ``c`` (``R_b E`` and ``R_b J`` interleaved), so a unitary action gives an
    orthogonal matrix.
    """
    idx, val = _spinor_basis(n)
    size = 8**n
    images = []
    for r in range(idx.shape[0]):
        c = np.zeros(size)
        c[idx[r]] = val[r]
        images.append(apply(U, Spinor(Multivector(n, c))).value.coeffs)
    images = np.array(images)
    return 2 ** (n - 1) * np.einsum("crw,rw->rc", images[:, idx], val)


def spin_derivative(psi: Spinor, H) -> Multivector:
    """Rate of change of the spin bivector ``2**(n-1) psi J ~psi`` (grade 2 part)."""
    H = as_cmv(H)
    n = psi.n
    J = complex_J(n)
    # psi_dot = -j H psi = -H+ psi J + H- psi
    psi_dot = -(H.plus * psi.value * J) + H.minus * psi.value
    rate = 2 ** (n - 1) * (psi_dot * J * ~psi.value + psi.value * J * ~psi_dot)
    return rate.grade(2)


def energy(psi: Spinor, H) -> float:
    """``<psi| H |psi>`` via ``2**(n-1) <~psi (H psi)>_0``."""
    Hpsi = apply(as_cmv(H), psi).value
    return float(2 ** (psi.n - 1) * np.dot(psi.value.coeffs, Hpsi.coeffs))


def worker_count() -> int:
    raw = os.environ.get("MSTA_THREADS", "0")
    try:
        k = int(raw)
    except ValueError:
        k = 0
    if k <= 0:
        k = os.cpu_count() or 1
    return k


def parallel_map(fn, items) -> list:
    """Order-preserving map; results land in the slot of their input."""
    items = list(items)
    workers = min(worker_count(), len(items)) or 1
    if workers == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


@dataclass(frozen=True)
class Trajectory:
    """Spin observables sampled on a time grid (times in units of ``1/d``)."""

    times: np.ndarray
    p: np.ndarray  # (T, n, 3) polarization vectors
    lengths: np.ndarray  # (T, n)
    theta: np.ndarray  # (T, n)
    energy: np.ndarray  # (T,) in units of d
    spinors: tuple = ()
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        t = np.asarray(self.times)
        if t.ndim != 1 or (t.size > 1 and np.any(np.diff(t) <= 0)):
            raise ValueError("trajectory times must be strictly increasing")
        if self.p.shape[0] != t.size:
            raise ValueError("one sample per time is required")


def _check_grid(t_grid) -> np.ndarray:
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise ValueError("time grid must be a non-empty 1-D sequence")
    if t.size > 1 and np.any(np.diff(t) <= 0):
        raise ValueError("time grid must be strictly increasing")
    return t


def spin_trajectory(psi0: Spinor, H, t_grid, rate: float = 1.0, keep_spinors: bool = False, metadata=None) -> Trajectory:
    """Exact per-sample evolution; ``t_grid`` is in units of ``1/rate``."""
    t = _check_grid(t_grid)
    H = as_cmv(H)

    def sample(tk):
        psi = apply(propagator_series(H, tk / rate), psi0)
        obs = spin_bivector(psi)
        return psi, obs, energy(psi, H) / rate

    results = parallel_map(sample, t)
    p = np.array([r[1].p for r in results])
    return Trajectory(
        times=t,
        p=p,
        lengths=np.array([r[1].lengths for r in results]),
        theta=np.array([r[1].theta for r in results]),
        energy=np.array([r[2] for r in results]),
        spinors=tuple(r[0] for r in results) if keep_spinors else (),
        metadata=dict(metadata or {}),
    )


def classical_rates(p: np.ndarray, q: np.ndarray, d: float, axis=(0.0, 0.0, 1.0)):
    """Classical dipolar precession rates of two unit spin vectors.

    ``p_dot = (d/2) q x p + (3d/2)(n.q) p x n`` and the same with ``p``, ``q``
    exchanged.  These are the Poisson-bracket equations of the energy
    ``(d/4)(p.q - 3 (n.p)(n.q))``.
    """
    u = np.asarray(axis, dtype=float)
    qp = np.cross(q, p)
    p_dot = 0.5 * d * qp + 1.5 * d * np.dot(u, q) * np.cross(p, u)
    q_dot = -0.5 * d * qp + 1.5 * d * np.dot(u, p) * np.cross(q, u)
    return p_dot, q_dot


def classical_trajectory(p0, q0, d: float, t_grid, axis=(0.0, 0.0, 1.0)) -> Trajectory:
    """Fixed-step RK4 for the classical pair; step ``min(grid spacing, 0.01/d)``."""
    p = np.asarray(p0, dtype=float)
    q = np.asarray(q0, dtype=float)
    for v in (p, q):
        if abs(np.linalg.norm(v) - 1.0) > 1e-12:
            raise ValueError("initial spin vectors must be unit length")
    t = _check_grid(t_grid)
    hmax = 0.01 / abs(d) if d else np.inf
    y = np.concatenate([p, q])

    def f(state):
        a, b = classical_rates(state[:3], state[3:], d, axis)
        return np.concatenate([a, b])

    out = np.empty((t.size, 6))
    now = 0.0
    for i, target in enumerate(t):
        span = target - now
        if span < 0:
            raise ValueError("classical grid must start at or after t=0")
        steps = int(np.ceil(span / hmax - 1e-12)) if span > 0 else 0
        if steps:
            h = span / steps
            for _ in range(steps):
                k1 = f(y)
                k2 = f(y + 0.5 * h * k1)
                k3 = f(y + 0.5 * h * k2)
                k4 = f(y + h * k3)
                y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        now = target
        out[i] = y
    pv = out.reshape(t.size, 2, 3)
    lengths = np.linalg.norm(pv, axis=2)
    u = np.asarray(axis, dtype=float)
    en = 0.25 * d * (np.einsum("ti,ti->t", pv[:, 0], pv[:, 1]) - 3 * (pv[:, 0] @ u) * (pv[:, 1] @ u))
    return Trajectory(
        times=t,
        p=pv,
        lengths=lengths,
        theta=np.zeros_like(lengths),
        energy=en,
        metadata={"model": "classical", "d": d},
    )
