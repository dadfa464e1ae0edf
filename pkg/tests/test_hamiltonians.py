import json

import numpy as np
import pytest

from msta import oracle
from msta.ga import CMultivector, Multivector, bivector, commutator, embed, isig, mv_exp, scalar
from msta.hamiltonians import (
    DipolarPair,
    HamiltonianSpec,
    ZeemanTerm,
    chain_spec,
    diagonalizing_generator,
    dipolar_hamiltonian,
    frame_transform,
    hamiltonian_sum,
    interchange_Pi,
    two_spin_spec,
    zeeman,
)
from msta.spin import Spinor, apply, complex_J, correlator_E, spin_bivector, spinor_from_amplitudes


def I(a, k, n=2):
    return isig(n, a, k)


class TestDipolar:
    def test_z_axis_form(self):
        H = dipolar_hamiltonian(2, 1, 2, 1.0)
        expected = 0.25 * (2 * I(1, 3) * I(2, 3) - I(1, 1) * I(2, 1) - I(1, 2) * I(2, 2))
        assert H.allclose(expected, 1e-15)

    def test_zero_coupling(self):
        assert dipolar_hamiltonian(2, 1, 2, 0.0).norm_inf() == 0.0

    @pytest.mark.parametrize("d", [1.0, -0.7, 2.5])
    def test_correlator_eigen(self, d):
        E = correlator_E(2)
        assert (dipolar_hamiltonian(2, 1, 2, d) * E).allclose(-d / 2 * E, 1e-15)

    def test_interchange_decomposition(self):
        d = 1.3
        H = dipolar_hamiltonian(2, 1, 2, d)
        rhs = d / 2 * interchange_Pi(2) - d / 4 + 3 * d / 4 * I(1, 3) * I(2, 3)
        assert H.allclose(rhs, 1e-15)

    def test_matches_oracle(self, rng):
        for _ in range(4):
            u = rng.normal(size=3)
            u /= np.linalg.norm(u)
            d = rng.uniform(-2, 2)
            H = dipolar_hamiltonian(3, 1, 3, d, u)
            assert np.abs(oracle.to_matrix(H) - oracle.dipolar_matrix(3, 1, 3, d, u)).max() < 1e-14

    def test_errors(self):
        with pytest.raises(ValueError):
            dipolar_hamiltonian(2, 1, 1, 1.0)
        with pytest.raises(ValueError):
            dipolar_hamiltonian(2, 1, 2, 1.0, (0, 0, 1.001))
        with pytest.raises(ValueError):
            dipolar_hamiltonian(2, 1, 3, 1.0)

    def test_commutes_with_interchange(self, rng):
        u = rng.normal(size=3)
        u /= np.linalg.norm(u)
        H = dipolar_hamiltonian(2, 1, 2, 1.0, u)
        assert commutator(H, interchange_Pi(2)).norm_inf() < 1e-14

    def test_total_z_commutes(self):
        d = 0.9
        H = dipolar_hamiltonian(2, 1, 2, d)
        Z = I(1, 3) + I(2, 3)
        assert (H * Z).allclose(Z * H, 1e-15)
        # |00> and |11> both sit at energy -d/2, the support of Z
        assert (H * Z).allclose(-d / 2 * Z, 1e-15)
        Hm, Zm = oracle.to_matrix(H), oracle.to_matrix(Z)
        assert np.abs(Hm @ Zm + d / 2 * Zm).max() < 1e-15

    def test_rotation_covariance(self, rng):
        B = bivector(1, 1, rng.normal(size=3))
        R1 = mv_exp(B)
        R = mv_exp(bivector(2, 1, [B.coeffs[6], B.coeffs[5], B.coeffs[3]])) * mv_exp(
            bivector(2, 2, [B.coeffs[6], B.coeffs[5], B.coeffs[3]])
        )
        # rotated axis: R1 (I s3) ~R1 read back as a bivector
        rot = R1 * isig(1, 1, 3) * ~R1
        axis = np.array([rot.coeffs[6], rot.coeffs[5], rot.coeffs[3]])
        Hz = dipolar_hamiltonian(2, 1, 2, 1.0)
        assert dipolar_hamiltonian(2, 1, 2, 1.0, axis / np.linalg.norm(axis)).allclose(R * Hz * ~R, 1e-12)


class TestInterchange:
    def test_square(self):
        assert (interchange_Pi(2) * interchange_Pi(2)).allclose(scalar(2), 1e-15)

    def test_swaps_particles(self, rng):
        Pi = interchange_Pi(3, 1, 3)
        for k in (1, 2, 3):
            assert (Pi * isig(3, 1, k) * Pi).allclose(isig(3, 3, k), 1e-15)
        even = np.zeros(8)
        even[[0, 3, 5, 6]] = 1.0
        z = Multivector(1, rng.normal(size=8) * even)
        u = Multivector(1, rng.normal(size=8) * even)

        lhs = Pi * embed(z, 3, 1) * embed(u, 3, 3)
        rhs = embed(u, 3, 1) * embed(z, 3, 3) * Pi
        assert lhs.allclose(rhs, 1e-13)

    def test_swap_matrix(self):
        swap = np.eye(4)[[0, 2, 1, 3]]
        assert np.abs(oracle.to_matrix(interchange_Pi(2)) - swap).max() < 1e-15

    def test_casimir_identity(self):
        total = Multivector(2)
        for k in (1, 2, 3):
            s = I(1, k) + I(2, k)
            total = total + s * s
        assert total.allclose(-4 * (1 + interchange_Pi(2)), 1e-14)


class TestZeeman:
    def test_precession_matches_oracle(self):
        omega = 0.8
        g = (0.0, 0.0, omega)
        spec = HamiltonianSpec(n=1, zeeman=(ZeemanTerm(1, g),))
        H = hamiltonian_sum(spec)
        from msta.dynamics import evolve_spinor

        psi0 = spinor_from_amplitudes(np.array([1, 1]) / np.sqrt(2))
        for t in (0.3, 1.1, 2.9):
            psi = evolve_spinor(psi0, H, t)
            ref = oracle.matrix_evolve(oracle.to_vector(psi0), oracle.spec_matrix(spec), t)
            assert np.abs(oracle.to_vector(psi) - ref).max() < 1e-12
            # psi_dot = omega I s3 psi turns p about -z at rate 2 omega
            p = spin_bivector(psi).p[0]
            assert np.allclose(p, [np.cos(2 * omega * t), -np.sin(2 * omega * t), 0], atol=1e-12)

    def test_generator_drives_spinor(self):
        gB = zeeman(1, 1, (0.2, -0.5, 0.4))
        H = hamiltonian_sum(HamiltonianSpec(n=1, zeeman=(ZeemanTerm(1, (0.2, -0.5, 0.4)),)))
        psi = spinor_from_amplitudes([0.6, 0.8j])
        # -j H psi == gamma B psi
        rate = apply(-H.times_j(), psi).value
        assert rate.allclose(gB * psi.value, 1e-15)

    def test_zero_and_disjoint(self):
        assert zeeman(2, 1, (0, 0, 0)).norm_inf() == 0
        a, b = zeeman(2, 1, (0, 0, 1)), zeeman(2, 2, (0, 0, -1))
        assert a * b == b * a


class TestSpec:
    def test_empty(self):
        H = hamiltonian_sum(HamiltonianSpec(n=2))
        assert H.plus.norm_inf() == 0 and H.minus.norm_inf() == 0

    def test_single_pair(self):
        H = hamiltonian_sum(two_spin_spec(1.0))
        assert H.plus == dipolar_hamiltonian(2, 1, 2, 1.0)

    def test_chain_hermitian(self):
        spec = chain_spec(3, 1.0)
        M = oracle.to_matrix(hamiltonian_sum(spec))
        oracle.check_hermitian(M)
        expected = oracle.dipolar_matrix(3, 1, 2, 1.0) + oracle.dipolar_matrix(3, 2, 3, 1.0)
        assert np.abs(M - expected).max() < 1e-15

    def test_validation(self):
        with pytest.raises(ValueError):
            HamiltonianSpec(n=2, pairs=(DipolarPair(2, 1, 1.0),))
        with pytest.raises(ValueError):
            HamiltonianSpec(n=2, pairs=(DipolarPair(1, 3, 1.0),))
        with pytest.raises(ValueError):
            HamiltonianSpec(n=2, zeeman=(ZeemanTerm(3, (0, 0, 1)),))
        with pytest.raises(ValueError):
            HamiltonianSpec(n=2, pairs=(DipolarPair(1, 2, 1.0, (1, 1, 0)),))

    def test_json_round_trip(self):
        spec = HamiltonianSpec(n=3, pairs=(DipolarPair(1, 3, 0.5, (1.0, 0.0, 0.0)),), zeeman=(ZeemanTerm(2, (0.0, 0.1, 0.0)),))
        again = HamiltonianSpec.from_dict(3, json.loads(spec.to_json()))
        assert again == spec

    def test_reference_rate(self):
        assert chain_spec(3, -2.0).reference_rate == 2.0
        assert HamiltonianSpec(n=2).reference_rate == 1.0


class TestFrame:
    def test_angle_zero(self):
        H = CMultivector(dipolar_hamiltonian(2, 1, 2, 1.0))
        assert frame_transform(H, diagonalizing_generator(), 0.0).allclose(H, 1e-15)

    def test_diagonal_form(self):
        d = 1.7
        H = CMultivector(dipolar_hamiltonian(2, 1, 2, d))
        Hp = frame_transform(H, diagonalizing_generator(), np.pi / 4)
        expected = CMultivector(d / 2 * I(1, 3) * I(2, 3), d / 4 * (I(2, 3) - I(1, 3)))
        assert Hp.allclose(expected, 1e-14)

    def test_round_trip(self):
        H = CMultivector(dipolar_hamiltonian(2, 1, 2, 1.0, (0.6, 0.0, 0.8)))
        G = diagonalizing_generator()
        back = frame_transform(frame_transform(H, G, 0.4), G, -0.4)
        assert back.allclose(H, 1e-12)

    def test_eigenvalues_on_basis_spinors(self):
        d = 1.0
        H = CMultivector(dipolar_hamiltonian(2, 1, 2, d))
        Hp = frame_transform(H, diagonalizing_generator(), np.pi / 4)
        E = correlator_E(2)
        K = I(1, 2) * I(2, 2)
        basis = [E, I(2, 2) * E, I(1, 2) * E, K * E]
        for psi, lam in zip(basis, (-d / 2, d, 0.0, -d / 2)):
            assert apply(Hp, Spinor(psi)).value.allclose(lam * psi, 1e-15)
