"""Hamiltonian generators for networks of dipolar-coupled spins.

Two-spin terms are real 4-vectors (products of one bivector per particle).
A Zeeman generator ``gamma B`` drives ``psi_dot = gamma B psi`` directly; in a
Hamiltonian, where evolution reads ``psi_dot = -j H psi``, it enters as the
odd term ``j gamma B``.  Sums therefore come back as :class:`CMultivector`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .ga import CMultivector, Multivector, bivector, cmv_exp, isig, scalar


def _unit(n_vec) -> np.ndarray:
    v = np.asarray(n_vec, dtype=float)
    if v.shape != (3,):
        raise ValueError("axis must be a 3-vector")
    if abs(np.linalg.norm(v) - 1.0) >= 1e-12:
        raise ValueError(f"axis must be a unit vector, got norm {np.linalg.norm(v)!r}")
    return v


def _check_pair(n: int, a: int, b: int) -> None:
    if a == b:
        raise ValueError("a dipolar pair needs two distinct particles")
    if not (1 <= a <= n and 1 <= b <= n):
        raise ValueError(f"particles ({a}, {b}) out of range for n={n}")


def dipolar_hamiltonian(n: int, a: int, b: int, d: float, n_vec=(0.0, 0.0, 1.0)) -> Multivector:
    """``-(d/4) (sum_k I s_k^a I s_k^b - 3 (I n)^a (I n)^b)``."""
    _check_pair(n, a, b)
    u = _unit(n_vec)
    dot = Multivector(n)
    for k in (1, 2, 3):
        dot = dot + isig(n, a, k) * isig(n, b, k)
    axial = bivector(n, a, u) * bivector(n, b, u)
    return (-d / 4.0) * (dot - 3.0 * axial)


def interchange_Pi(n: int, a: int = 1, b: int = 2) -> Multivector:
    """``(1 - sum_k I s_k^a I s_k^b) / 2``; conjugation by it swaps particles ``a`` and ``b``."""
    _check_pair(n, a, b)
    out = scalar(n)
    for k in (1, 2, 3):
        out = out - isig(n, a, k) * isig(n, b, k)
    return 0.5 * out


def zeeman(n: int, a: int, gamma_b) -> Multivector:
    """Single-particle generator ``gamma B = sum_k g_k I s_k^a`` (rad/s)."""
    if not 1 <= a <= n:
        raise ValueError(f"particle {a} out of range for n={n}")
    g = np.asarray(gamma_b, dtype=float)
    if g.shape != (3,):
        raise ValueError("gamma_b must have three components")
    return bivector(n, a, g)


@dataclass(frozen=True)
class DipolarPair:
    a: int
    b: int
    d: float
    axis: tuple = (0.0, 0.0, 1.0)


@dataclass(frozen=True)
class ZeemanTerm:
    a: int
    gamma_b: tuple


@dataclass(frozen=True)
class HamiltonianSpec:
    """A spin network: dipolar pairs plus Zeeman terms.  Particles are 1-based."""

    n: int
    pairs: tuple = ()
    zeeman: tuple = field(default=())

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        for p in self.pairs:
            if not 1 <= p.a < p.b <= self.n:
                raise ValueError(f"pair ({p.a}, {p.b}) must satisfy 1 <= a < b <= {self.n}")
            _unit(p.axis)
        for z in self.zeeman:
            if not 1 <= z.a <= self.n:
                raise ValueError(f"Zeeman particle {z.a} out of range for n={self.n}")

    @property
    def reference_rate(self) -> float:
        """Coupling used as the time unit: the first pair's ``|d|``, else 1."""
        for p in self.pairs:
            if p.d:
                return abs(p.d)
        return 1.0

    def to_dict(self) -> dict:
        return {
            "pairs": [{"a": p.a, "b": p.b, "d": p.d, "axis": list(p.axis)} for p in self.pairs],
            "zeeman": [{"a": z.a, "gamma_b": list(z.gamma_b)} for z in self.zeeman],
        }

    @classmethod
    def from_dict(cls, n: int, data: dict) -> "HamiltonianSpec":
        pairs = tuple(
            DipolarPair(int(p["a"]), int(p["b"]), float(p["d"]), tuple(float(x) for x in p.get("axis", (0, 0, 1))))
            for p in data.get("pairs", [])
        )
        zs = tuple(ZeemanTerm(int(z["a"]), tuple(float(x) for x in z["gamma_b"])) for z in data.get("zeeman", []))
        return cls(n=n, pairs=pairs, zeeman=zs)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def two_spin_spec(d: float = 1.0, axis=(0.0, 0.0, 1.0)) -> HamiltonianSpec:
    return HamiltonianSpec(n=2, pairs=(DipolarPair(1, 2, float(d), tuple(axis)),))


def chain_spec(n: int, d: float = 1.0, axis=(0.0, 0.0, 1.0)) -> HamiltonianSpec:
    """Nearest-neighbour dipolar chain on ``n`` spins."""
    pairs = tuple(DipolarPair(a, a + 1, float(d), tuple(axis)) for a in range(1, n))
    return HamiltonianSpec(n=n, pairs=pairs)


def hamiltonian_sum(spec: HamiltonianSpec) -> CMultivector:
    """Total Hamiltonian: pair 4-vectors in the real part, ``gamma B`` terms behind ``j``."""
    real = Multivector(spec.n)
    odd = Multivector(spec.n)
    for p in spec.pairs:
        real = real + dipolar_hamiltonian(spec.n, p.a, p.b, p.d, p.axis)
    for z in spec.zeeman:
        odd = odd + zeeman(spec.n, z.a, z.gamma_b)
    return CMultivector(real, odd)


def frame_transform(H, generator: CMultivector, angle: float) -> CMultivector:
    """``exp(angle G) H exp(-angle G)``."""
    forward = cmv_exp(generator * angle)
    backward = cmv_exp(generator * (-angle))
    return forward * H * backward


def diagonalizing_generator() -> CMultivector:
    """``j I s1^1 I s2^2``; at angle pi/4 it diagonalizes the z-axis two-spin Hamiltonian."""
    return CMultivector(Multivector(2), isig(2, 1, 1) * isig(2, 2, 2))
