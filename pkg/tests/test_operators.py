import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mslab.blaschke import BlaschkeProduct
from mslab.errors import DimensionMismatch, NotInModelSpace, SingularGram, ThetaNotVanishingAtZero, VNotInDisk, WZero
from mslab.model_space import ModelSpace, ModelVector, reproducing_kernel
from mslab.nearly_invariant import random_nearly_space, random_theta, random_v
from mslab.operators import (
    OperatorMatrix,
    av_matrix,
    bv_matrix,
    compressed_shift_M,
    cyclicity_check,
    d_symmetry_check,
    defect_operators,
    defect_residuals,
    kernel_action_check,
    kernel_defect_check,
    matrix_in_basis,
    one_coords,
    shift_block_residual,
    shift_matrix,
    theta_over_z_coords,
    tto_matrix,
    tto_matrix_M,
    zero_symbol_check,
)
from mslab.rational import BoundarySymbol, RationalFn, boundary_inner_product

from helpers import A_ROOT, B_ROOT

A = 0.4 + 0.3j
AB = np.conj(A)
Z = RationalFn.z()


def mono(k):
    return RationalFn.z(k)


class TestOperatorMatrix:
    def test_algebra(self, rng):
        ms = ModelSpace(random_theta(3, rng))
        X = OperatorMatrix(rng.normal(size=(3, 3)), ms)
        Y = OperatorMatrix(rng.normal(size=(3, 3)) * 1j, ms)
        assert np.allclose((X @ Y).entries, X.entries @ Y.entries)
        assert np.allclose((X + Y - Y).entries, X.entries)
        assert np.allclose((X**2).entries, X.entries @ X.entries)
        assert np.allclose(X.H.entries, X.entries.conj().T)
        x = ModelVector(ms, [1, 2j, 3])
        assert np.allclose((X @ x).coeffs, X.entries @ x.coeffs)
        with pytest.raises(ValueError):
            X.entries[0, 0] = 1

    def test_json(self, rng):
        ms = ModelSpace(random_theta(2, rng))
        d = OperatorMatrix(np.eye(2), ms).to_json()
        assert d["basis"] == "tm" and len(d["entries"]) == 2


class TestTTO:
    def test_shift_on_fourth_power(self):
        ms = ModelSpace(BlaschkeProduct([(0.0, 4)]))
        S = tto_matrix(ms, Z).entries
        assert np.allclose(S, np.eye(4, k=-1), atol=1e-15)
        assert np.allclose(S.conj().T, np.eye(4, k=1), atol=1e-15)

    def test_identity_symbol(self, rng):
        ms = ModelSpace(random_theta(4, rng))
        assert np.abs(tto_matrix(ms, 1.0).entries - np.eye(4)).max() < 1e-12

    def test_theta_z_symbol(self, rng):
        ms = ModelSpace(random_theta(4, rng))
        assert tto_matrix(ms, ms.theta.to_rational() * Z).norm() < 1e-9

    def test_entry_convention(self, rng):
        ms = ModelSpace(random_theta(3, rng))
        g = RationalFn([0.3, 1j], [1, 0.4])
        T = tto_matrix(ms, g).entries
        for i in range(3):
            for j in range(3):
                ref = boundary_inner_product(g * ms.basis[j], ms.basis[i])
                assert abs(T[i, j] - ref) < 1e-12


class TestAv:
    def test_zero_perturbation(self, rng):
        ms = ModelSpace(random_theta(4, rng))
        assert np.array_equal(av_matrix(ms, 0).entries, shift_matrix(ms).entries)

    def test_rank_one_form(self, rng):
        ms = ModelSpace(random_theta(4, rng))
        v = 0.3 - 0.4j
        D = av_matrix(ms, v).entries - shift_matrix(ms).entries
        assert np.linalg.matrix_rank(D, tol=1e-10) == 1
        f = ModelVector(ms, rng.normal(size=4))
        ref = v * f.inner(ModelVector(ms, theta_over_z_coords(ms))) * one_coords(ms)
        assert np.allclose(D @ f.coeffs, ref, atol=1e-12)

    def test_preconditions(self):
        with pytest.raises(ThetaNotVanishingAtZero):
            av_matrix(ModelSpace(BlaschkeProduct([0.5])), 0.1)
        with pytest.raises(VNotInDisk):
            av_matrix(ModelSpace(BlaschkeProduct([0.0])), 1.0)

    @pytest.mark.parametrize("v", [0.3 - 0.2j, -0.5 + 0.1j, 0.25j])
    def test_degree2_example(self, v):
        ms = ModelSpace(BlaschkeProduct([0.0, A]))
        basis = [RationalFn([1], [1, -AB]), RationalFn([0, 1], [1, -AB])]
        M = matrix_in_basis(ms, av_matrix(ms, v), basis)
        assert np.abs(M - np.array([[0, v], [1, A - v * AB]])).max() < 1e-8

    @pytest.mark.parametrize("v", [0.3 - 0.2j, -0.5 + 0.1j])
    def test_example_one(self, v):
        ms = ModelSpace(BlaschkeProduct([(0.0, 2), A]))
        basis = [RationalFn(1.0), RationalFn([0, 1], [1, -AB]), RationalFn([0, 0, 1], [1, -AB])]
        M = matrix_in_basis(ms, av_matrix(ms, v), basis)
        assert np.abs(M - np.array([[0, 0, v], [1, 0, 0], [-AB, 1, A]])).max() < 1e-8

    @pytest.mark.parametrize("v", [0.3 - 0.2j, 0.25j])
    def test_example_two(self, v):
        ms = ModelSpace(BlaschkeProduct([0.0, (A, 2)]))
        basis = [
            RationalFn([1], [1, -AB]),
            RationalFn([0, 1], [1, -AB]),
            RationalFn([0, -A, 1], [1, -2 * AB, AB**2]),
        ]
        M = matrix_in_basis(ms, av_matrix(ms, v), basis)
        r = 1 - abs(A) ** 2
        ref = np.array([[0, -AB * v, v], [1, A + AB**2 * v, -AB * v], [0, r, A]])
        assert np.abs(M - ref).max() < 1e-8

    def test_closed_form_matches_symbol(self, rng):
        for deg in range(1, 6):
            ns = random_nearly_space(deg, rng)
            sym = BoundarySymbol([(Z * ns.h, ns.h)])
            assert np.abs(av_matrix(ns.ms, ns.v).entries - tto_matrix(ns.ms, sym).entries).max() < 1e-8
            sym_b = BoundarySymbol([(ns.h, Z * ns.h)])
            assert np.abs(bv_matrix(ns.ms, ns.v).entries - tto_matrix(ns.ms, sym_b).entries).max() < 1e-8


class TestBv:
    def test_adjoint_exact(self, rng):
        ms = ModelSpace(random_theta(4, rng))
        v = 0.2 + 0.5j
        assert np.array_equal(bv_matrix(ms, v).entries, av_matrix(ms, v).entries.conj().T)

    def test_rank_one_form(self, rng):
        ms = ModelSpace(random_theta(4, rng))
        v = -0.6 + 0.1j
        u = theta_over_z_coords(ms)
        one = one_coords(ms)
        ref = shift_matrix(ms).entries.conj().T + np.conj(v) * np.outer(u, one.conj())
        assert np.abs(bv_matrix(ms, v).entries - ref).max() < 1e-14
        # B_v 1 = conj(v) theta / z
        assert np.abs(bv_matrix(ms, v).entries @ one - np.conj(v) * u).max() < 1e-12

    @pytest.mark.parametrize("alpha", [0.3 + 0.2j, -0.7j])
    def test_fourth_power(self, alpha):
        ms = ModelSpace(BlaschkeProduct([(0.0, 4)]))
        v = np.conj(alpha)
        B = matrix_in_basis(ms, bv_matrix(ms, v), [mono(k) for k in range(4)])
        assert B[3, 0] == pytest.approx(alpha, abs=1e-12)
        assert np.abs(np.linalg.matrix_power(B, 4) - alpha * np.eye(4)).max() < 1e-9

    def test_v_zero_is_backward_shift(self):
        ms = ModelSpace(BlaschkeProduct([(0.0, 3)]))
        assert np.allclose(bv_matrix(ms, 0).entries, np.eye(3, k=1), atol=1e-15)


class TestMatrixInBasis:
    def test_tm_basis_is_identity_change(self, rng):
        ms = ModelSpace(random_theta(4, rng))
        A_ = av_matrix(ms, 0.3)
        assert np.abs(matrix_in_basis(ms, A_, ms.basis) - A_.entries).max() < 1e-12

    def test_similarity_invariants(self, rng):
        ms = ModelSpace(random_theta(4, rng))
        A_ = av_matrix(ms, -0.2 + 0.5j).entries
        T = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        basis = [ModelVector(ms, T[:, j]).to_rational() for j in range(4)]
        M = matrix_in_basis(ms, A_, basis)
        assert np.allclose(np.poly(M), np.poly(A_), atol=1e-8)
        assert np.trace(M) == pytest.approx(np.trace(A_), abs=1e-8)
        assert np.linalg.det(M) == pytest.approx(np.linalg.det(A_), abs=1e-8)

    def test_errors(self, rng):
        ms = ModelSpace(random_theta(2, rng))
        with pytest.raises(DimensionMismatch):
            matrix_in_basis(ms, np.eye(2), [RationalFn(1.0)])
        with pytest.raises(SingularGram):
            matrix_in_basis(ms, np.eye(2), [ms.basis[0], ms.basis[0] * 2])
        with pytest.raises(NotInModelSpace):
            matrix_in_basis(ms, np.eye(2), [ms.basis[0], RationalFn.z(5)])


class TestCompressedShift:
    def test_example_spectrum(self, exm_ns):
        eig = sorted(np.linalg.eigvals(compressed_shift_M(exm_ns).entries), key=lambda z: z.imag)
        assert np.allclose(eig, [B_ROOT, A_ROOT], atol=1e-12)

    def test_trivial_h(self, rng):
        from mslab.nearly_invariant import make_nearly_space

        ns = make_nearly_space(RationalFn(1.0), random_theta(3, rng))
        assert np.abs(compressed_shift_M(ns).entries - shift_matrix(ns.ms).entries).max() < 1e-14

    def test_direct_quadrature(self, exm_ns):
        M = compressed_shift_M(exm_ns).entries
        # A_z^M (h e_j) = P_M(z h e_j); its coordinates in {h e_i} are <z h e_j, h e_i>
        h = exm_ns.h
        for i, ei in enumerate(exm_ns.ms.basis):
            for j, ej in enumerate(exm_ns.ms.basis):
                assert abs(M[i, j] - boundary_inner_product(Z * h * ej, h * ei)) < 1e-12
        assert np.abs(tto_matrix_M(exm_ns, BoundarySymbol([(1.0, Z)])).entries - M.conj().T).max() < 1e-12


class TestDefects:
    def test_square_shift(self):
        ms = ModelSpace(BlaschkeProduct([(0.0, 2)]))
        d = defect_operators(ms, 0)
        assert np.allclose(d.DA.entries, np.diag([0, 1]), atol=1e-12)
        assert np.allclose(d.DB.entries, np.diag([1, 0]), atol=1e-12)
        assert d.ranks == (1, 1)

    def test_example_singular_value(self, exm_ns):
        d = defect_operators(exm_ns.ms, exm_ns.v)
        s = np.linalg.svd(d.DA.entries, compute_uv=False)
        assert s[0] == pytest.approx(math.sqrt(8) / 3, abs=1e-12)
        assert d.ranks == (1, 1)

    @pytest.mark.parametrize("r", [0.5, 0.9, 0.99])
    def test_norm_tracks_v(self, r, rng):
        ms = ModelSpace(random_theta(3, rng))
        v = r * np.exp(0.4j)
        d = defect_operators(ms, v)
        assert np.linalg.norm(d.DA.entries, 2) == pytest.approx(math.sqrt(1 - r**2), abs=1e-8)
        assert np.linalg.norm(d.DB.entries, 2) == pytest.approx(math.sqrt(1 - r**2), abs=1e-8)
        assert max(defect_residuals(ms, v, d).values()) < 1e-8


class TestSymmetryAndSymbols:
    def test_d_symmetry(self, exm_ns):
        assert d_symmetry_check(exm_ns, Z) < 1e-8
        assert d_symmetry_check(exm_ns, 2.5) < 1e-12
        herm = BoundarySymbol([(Z, 1.0), (1.0, Z)])
        assert d_symmetry_check(exm_ns, herm) < 1e-8
        A_ = tto_matrix_M(exm_ns, herm).entries
        assert np.abs(A_ - A_.conj().T).max() < 1e-12

    @pytest.mark.parametrize("p,q", [(1.0, 0.0), (RationalFn([2, 1]), RationalFn([0, 3])), (0.0, 0.0)])
    def test_zero_symbol(self, p, q, rng):
        ms = ModelSpace(random_theta(3, rng))
        assert zero_symbol_check(ms, p, q) < 1e-9

    def test_nonzero_symbol_detected(self, rng):
        ms = ModelSpace(random_theta(3, rng))
        # conj(z) is not in theta H^2 + conj(theta H^2): its operator is S_theta^*
        assert tto_matrix(ms, BoundarySymbol([(1.0, Z)])).norm() > 0.5


class TestKernelDefect:
    def test_trivial_kernel(self, exm_ns):
        assert kernel_defect_check(exm_ns, Z) == (0, 0)

    def test_zero_symbol_full_kernel(self, exm_ns):
        k, defect = kernel_defect_check(exm_ns, 0.0)
        assert k == exm_ns.dim and defect <= 1

    def test_symbol_killing_one_eigenvector(self, rng):
        ns = random_nearly_space(3, rng)
        lam = np.linalg.eigvals(compressed_shift_M(ns).entries)[0]
        # z - lambda on M kills the eigenvector for lambda
        sym = BoundarySymbol([(RationalFn([-lam, 1]), 1.0)])
        k, defect = kernel_defect_check(ns, sym)
        assert k == 1 and defect <= 1


class TestCyclicity:
    def test_fourth_power(self):
        ms = ModelSpace(BlaschkeProduct([(0.0, 4)]))
        assert all(r == 4 for r in cyclicity_check(ms, 0.3 + 0.1j))

    def test_jordan_block(self):
        ms = ModelSpace(BlaschkeProduct([(0.0, 2)]))
        assert cyclicity_check(ms, 0).a_from_1 == 2

    def test_example(self, exm_ns):
        assert tuple(cyclicity_check(exm_ns.ms, exm_ns.v)) == (2, 2, 2, 2)


class TestKernelActions:
    def test_w_zero_parts(self, rng):
        ms = ModelSpace(random_theta(4, rng))
        v = 0.3 + 0.3j
        res = kernel_action_check(ms, v, 0.0, parts=("a",))
        assert max(res.values()) < 1e-8
        A_ = av_matrix(ms, v).entries
        u = theta_over_z_coords(ms)
        assert np.abs(A_ @ u - v * one_coords(ms)).max() < 1e-12
        assert np.abs(A_.conj().T @ reproducing_kernel(ms, 0).coeffs - np.conj(v) * u).max() < 1e-12

    def test_w_zero_b_rejected(self, rng):
        with pytest.raises(WZero):
            kernel_action_check(ModelSpace(random_theta(2, rng)), 0.1, 0.0)

    @settings(max_examples=20, deadline=None)
    @given(st.integers(1, 6), st.integers(0, 2**31))
    def test_random(self, deg, seed):
        rng = np.random.default_rng(seed)
        ms = ModelSpace(random_theta(deg, rng))
        v = random_v(rng)
        w = random_v(rng, 0.8)
        if abs(w) < 1e-3:
            w = 0.5
        assert max(kernel_action_check(ms, v, w).values()) < 1e-8


def test_shift_block(rng):
    for deg in range(2, 7):
        ms = ModelSpace(random_theta(deg, rng))
        assert shift_block_residual(ms, random_v(rng)) < 1e-9

