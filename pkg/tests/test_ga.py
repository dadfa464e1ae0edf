import numpy as np
import pytest
from hypothesis import given, settings

from conftest import random_even, random_mv, seeds
from msta import oracle
from msta.ga import (
    CAYLEY,
    CODES,
    CMultivector,
    Multivector,
    basis_product,
    bivector,
    cmv_exp,
    commutator,
    embed,
    isig,
    join_codes,
    left_matrix,
    mv_exp,
    pseudoscalar,
    right_matrix,
    scalar,
    sig,
    split_index,
)
from msta.hamiltonians import dipolar_hamiltonian, interchange_Pi
from msta.spin import complex_J, correlator_E


def idx(n, **factors):
    codes = [0] * n
    for key, name in factors.items():
        codes[int(key[1:]) - 1] = CODES[name]
    return join_codes(codes)


class TestBasisProduct:
    def test_isig1_isig2(self):
        i = idx(1, p1="Is1")
        k = idx(1, p1="Is2")
        assert basis_product(i, k, 1) == (CODES["Is3"], -1)

    def test_identity_left(self):
        for k in range(64):
            assert basis_product(0, k, 2) == (k, 1)

    def test_disjoint_supports(self):
        i = idx(2, p1="Is3")
        k = idx(2, p2="Is3")
        assert basis_product(i, k, 2) == (idx(2, p1="Is3", p2="Is3"), 1)

    def test_index_out_of_range(self):
        with pytest.raises(ValueError):
            basis_product(64, 0, 2)

    def test_cayley_rules(self):
        s = {k: CODES[f"s{k}"] for k in (1, 2, 3)}
        ii = CODES["I"]
        assert CAYLEY[s[1], s[2]] == 1 and s[1] ^ s[2] == CODES["Is3"]
        assert CAYLEY[ii, ii] == -1
        for c in range(8):
            assert CAYLEY[ii, c] == CAYLEY[c, ii]
            assert CAYLEY[c, c] * CAYLEY[0, 0] in (1, -1)
        # (I s_k)(I s_l) = -delta_kl - eps_klm I s_m
        bi = {1: isig(1, 1, 1), 2: isig(1, 1, 2), 3: isig(1, 1, 3)}
        eps = {(1, 2): 3, (2, 3): 1, (3, 1): 2}
        for k in (1, 2, 3):
            assert (bi[k] * bi[k]).allclose(scalar(1, -1.0), 0)
        for (k, l), m in eps.items():
            assert (bi[k] * bi[l]).allclose(-bi[m], 0)
            assert (bi[l] * bi[k]).allclose(bi[m], 0)

    def test_split_join_round_trip(self):
        for i in range(512):
            assert join_codes(split_index(i, 3)) == i


class TestProduct:
    def test_correlator_idempotent(self):
        E = correlator_E(2)
        assert (E * E).allclose(E, 1e-15)

    def test_j_squared(self):
        J = complex_J(2)
        assert (J * J).allclose(-correlator_E(2), 1e-15)

    def test_interchange_squares_to_one(self):
        Pi = interchange_Pi(2)
        assert (Pi * Pi).allclose(scalar(2), 1e-15)

    def test_mismatched_n(self):
        with pytest.raises(ValueError):
            scalar(1) * scalar(2)

    def test_too_many_particles(self):
        with pytest.raises(ValueError):
            Multivector(7)

    def test_associativity(self, rng):
        worst = 0.0
        for _ in range(200):
            a, b, c = (Multivector(2, rng.uniform(-1, 1, 64)) for _ in range(3))
            worst = max(worst, ((a * b) * c - a * (b * c)).norm_inf())
        assert worst < 1e-12

    def test_large_n_path_matches_matrices(self, rng):
        # n = 4 uses the sparse loop; check against the explicit left/right matrices
        a = Multivector(4, np.where(rng.random(4096) < 0.01, rng.normal(size=4096), 0.0))
        b = Multivector(4, np.where(rng.random(4096) < 0.01, rng.normal(size=4096), 0.0))
        ab = (a * b).coeffs
        col = np.zeros(4096)
        for i in np.flatnonzero(a.coeffs):
            for k in np.flatnonzero(b.coeffs):
                j, s = basis_product(int(i), int(k), 4)
                col[j] += s * a.coeffs[i] * b.coeffs[k]
        assert np.allclose(ab, col, atol=1e-13)

    def test_left_right_matrices(self, rng):
        a, b = random_mv(rng, 2), random_mv(rng, 2)
        assert np.allclose(left_matrix(a) @ b.coeffs, (a * b).coeffs, atol=1e-12)
        assert np.allclose(right_matrix(b) @ a.coeffs, (a * b).coeffs, atol=1e-12)

    def test_cross_space_commute(self, rng):
        a = embed(Multivector(1, rng.normal(size=8)), 2, 1)
        b = embed(Multivector(1, rng.normal(size=8)), 2, 2)
        assert a * b == b * a

    def test_immutable(self):
        x = scalar(1)
        with pytest.raises(ValueError):
            x.coeffs[0] = 2.0
        with pytest.raises(AttributeError):
            x.n = 3


class TestReverseGrade:
    def test_reverse_bivector(self):
        assert ~isig(1, 1, 2) == -isig(1, 1, 2)

    def test_reverse_scalar(self):
        assert ~scalar(2) == scalar(2)

    def test_reverse_four_vector(self):
        x = isig(2, 1, 3) * isig(2, 2, 3)
        assert ~x == x

    def test_reverse_pseudoscalar_and_vector(self):
        assert ~pseudoscalar(1, 1) == pseudoscalar(1, 1)
        assert ~sig(1, 1, 2) == -sig(1, 1, 2)

    @settings(max_examples=30, deadline=None)
    @given(seeds)
    def test_reverse_anti_automorphism(self, seed):
        r = np.random.default_rng(seed)
        a, b = random_mv(r, 2), random_mv(r, 2)
        assert (~(a * b)).allclose(~b * ~a, 1e-12)

    def test_grade_of_correlator(self):
        E = correlator_E(2)
        assert E(0).allclose(scalar(2, 0.5), 0)
        assert E(4).allclose(-0.5 * isig(2, 1, 3) * isig(2, 2, 3), 0)
        assert scalar(2)(0) == scalar(2)

    @settings(max_examples=20, deadline=None)
    @given(seeds)
    def test_grade_decomposition(self, seed):
        a = random_mv(np.random.default_rng(seed), 2)
        total = Multivector(2)
        for g in range(0, 9, 2):
            total = total + a(g)
        assert total == a

    def test_grade_values(self):
        assert sig(1, 1, 1)(2) == sig(1, 1, 1)
        assert pseudoscalar(1, 1)(4) == pseudoscalar(1, 1)


class TestCommutator:
    def test_dq_pair_against_matrices(self):
        a = isig(2, 1, 1) * isig(2, 2, 1)
        b = isig(2, 1, 1) * isig(2, 2, 2)
        c = commutator(a, b)
        A, B = oracle.to_matrix(a), oracle.to_matrix(b)
        assert np.allclose(oracle.to_matrix(c), 0.5 * (A @ B - B @ A), atol=1e-15)
        # frozen from the matrix commutator: (i sx (x) i sx)(i sx (x) i sy) antisymmetrized
        assert c.allclose(isig(2, 2, 3), 1e-15)

    def test_self_commutator(self, rng):
        a = random_mv(rng, 2)
        assert commutator(a, a).norm_inf() < 1e-13

    def test_disjoint_commutator(self):
        assert commutator(isig(2, 1, 3), isig(2, 2, 3)).norm_inf() == 0.0

    def test_tensor_product_identity(self, rng):
        # (A^1 B^2) x (X^1 Y^2) = (A.X)(B x Y)^2 + (B.Y)(A x X)^1 for bivectors
        def biv(a, v):
            return bivector(2, a, v)

        A, B, X, Y = (rng.normal(size=3) for _ in range(4))
        lhs = commutator(biv(1, A) * biv(2, B), biv(1, X) * biv(2, Y))
        AX = (biv(1, A) * biv(1, X) + biv(1, X) * biv(1, A)).scalar_part() / 2
        BY = (biv(2, B) * biv(2, Y) + biv(2, Y) * biv(2, B)).scalar_part() / 2
        rhs = AX * commutator(biv(2, B), biv(2, Y)) + BY * commutator(biv(1, A), biv(1, X))
        assert lhs.allclose(rhs, 1e-12)


class TestCMultivector:
    def test_j_squared(self):
        j = CMultivector(Multivector(1), scalar(1))
        assert (j * j).allclose(CMultivector(scalar(1, -1.0)), 0)

    def test_product_rule(self, rng):
        a, b, c, d = (random_mv(rng, 1) for _ in range(4))
        prod = CMultivector(a, b) * CMultivector(c, d)
        assert prod.plus.allclose(a * c - b * d, 1e-13)
        assert prod.minus.allclose(a * d + b * c, 1e-13)

    def test_dagger(self, rng):
        a, b = random_mv(rng, 2), random_mv(rng, 2)
        dag = CMultivector(a, b).dagger()
        assert dag.plus == ~a and dag.minus == -(~b)
        assert CMultivector(scalar(2)).dagger().allclose(CMultivector(scalar(2)), 0)

    def test_complex_scalars(self):
        x = CMultivector(isig(1, 1, 3)) * 1j
        assert x.minus == isig(1, 1, 3) and x.plus == Multivector(1)


class TestExp:
    def test_zero(self):
        assert cmv_exp(CMultivector(Multivector(2))).allclose(CMultivector(scalar(2)), 0)

    def test_j_pi_interchange(self):
        Pi = interchange_Pi(2)
        out = cmv_exp(CMultivector(Multivector(2), np.pi * Pi))
        assert out.allclose(CMultivector(scalar(2, -1.0)), 1e-12)

    def test_propagator_matches_oracle(self):
        H = dipolar_hamiltonian(2, 1, 2, 1.0)
        U = cmv_exp(CMultivector(Multivector(2), -0.7 * H))
        expected = oracle.unitary(oracle.dipolar_matrix(2, 1, 2, 1.0), 0.7)
        assert np.abs(oracle.to_matrix(U) - expected).max() < 1e-10

    @pytest.mark.parametrize("lam", [0.1, 1.0, 3.7, 25.0])
    def test_closed_form_for_negative_square(self, lam, rng):
        B = bivector(1, 1, rng.normal(size=3))
        B = B * (lam / np.sqrt(-(B * B).scalar_part()))
        out = mv_exp(B)
        assert out.allclose(np.cos(lam) + B * (np.sin(lam) / lam), 1e-12)

    def test_exp_of_sum_of_commuting(self, rng):
        a = isig(2, 1, 3) * 1.3
        b = isig(2, 2, 1) * -0.4
        assert mv_exp(a + b).allclose(mv_exp(a) * mv_exp(b), 1e-13)


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_oracle_homomorphism(seed):
    r = np.random.default_rng(seed)
    for n in (2, 3):
        a, b = random_even(r, n), random_even(r, n)
        assert np.abs(oracle.to_matrix(a * b) - oracle.to_matrix(a) @ oracle.to_matrix(b)).max() < 1e-12
