"""Discretization layer: meshes, element families, forms, example builders."""

import math

import numpy as np
import pytest
from scipy.optimize import brentq

from spectra.galerkin import (
    BASIS_KINDS,
    BasisSpec,
    IncompatibleForm,
    Mesh1D,
    build_example_dirac,
    build_example_quartic,
    build_example_transport,
    evaluate,
    form_matrix,
    resolvent_check_transport,
    resolvent_kernel_value,
)
from spectra.hermat import HermitianMatrix, eigh_gen
from spectra.pencil import d1_gram, schur


class TestMesh:
    def test_uniform(self):
        mesh = Mesh1D.uniform(4)
        assert mesh.N == 4
        np.testing.assert_allclose(mesh.nodes, [0.0, 0.25, 0.5, 0.75, 1.0])

    def test_nodes_are_write_protected(self):
        mesh = Mesh1D.uniform(4)
        with pytest.raises(ValueError):
            mesh.nodes[0] = -1.0

    @pytest.mark.parametrize(
        "nodes",
        [
            [0.0],
            [0.0, 0.5],
            [0.1, 0.5, 1.0],
            [0.0, 0.5, 0.5, 1.0],
            [0.0, 0.7, 0.3, 1.0],
        ],
    )
    def test_rejects_bad_nodes(self, nodes):
        with pytest.raises(ValueError):
            Mesh1D(np.array(nodes))

    def test_nonuniform_is_allowed(self):
        mesh = Mesh1D(np.array([0.0, 0.1, 0.6, 1.0]))
        assert mesh.N == 3


class TestBasisSpec:
    @pytest.mark.parametrize(
        "kind,N,dim",
        [
            ("hermite_clamped", 8, 14),
            ("p1_periodic", 8, 8),
            ("p1_discontinuous", 8, 16),
            ("p0", 8, 8),
        ],
    )
    def test_dimensions(self, kind, N, dim):
        assert BasisSpec(kind, Mesh1D.uniform(N)).dim == dim

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            BasisSpec("p2", Mesh1D.uniform(4))

    def test_minimum_element_counts(self):
        with pytest.raises(ValueError):
            BasisSpec("hermite_clamped", Mesh1D.uniform(1))
        with pytest.raises(ValueError):
            BasisSpec("p1_periodic", Mesh1D.uniform(1))


class TestFormMatrix:
    def test_p0_mass_is_element_lengths(self):
        mesh = Mesh1D(np.array([0.0, 0.1, 0.6, 1.0]))
        M = form_matrix(BasisSpec("p0", mesh), BasisSpec("p0", mesh), "mass")
        np.testing.assert_allclose(M, np.diag([0.1, 0.5, 0.4]), atol=1e-16)

    def test_periodic_p1_mass_is_circulant(self):
        N = 8
        b = BasisSpec("p1_periodic", Mesh1D.uniform(N))
        M = form_matrix(b, b, "mass")
        h = 1.0 / N
        row = np.zeros(N)
        row[0], row[1], row[-1] = 2.0 * h / 3.0, h / 6.0, h / 6.0
        for i in range(N):
            np.testing.assert_allclose(M[i], np.roll(row, i), atol=1e-16)

    @pytest.mark.parametrize("kind", [k for k in BASIS_KINDS if k != "hermite_clamped"])
    def test_partition_of_unity(self, kind):
        # clamping drops the boundary value dofs, so only the unconstrained
        # families resolve the constant 1
        b = BasisSpec(kind, Mesh1D.uniform(6))
        M = form_matrix(b, b, "mass")
        assert np.sum(M).real == pytest.approx(1.0, abs=1e-14)

    def test_imaginary_form_is_scaled_real_form(self):
        b = BasisSpec("p1_periodic", Mesh1D.uniform(6))
        np.testing.assert_array_equal(
            form_matrix(b, b, "i_d_vs_val"), 1j * form_matrix(b, b, "d_vs_val")
        )

    def test_derivative_order_guard(self):
        mesh = Mesh1D.uniform(4)
        p0 = BasisSpec("p0", mesh)
        p1 = BasisSpec("p1_discontinuous", mesh)
        with pytest.raises(IncompatibleForm):
            form_matrix(p0, p0, "grad")
        with pytest.raises(IncompatibleForm):
            form_matrix(p1, p1, "dd_vs_val")

    def test_mesh_mismatch_rejected(self):
        a = BasisSpec("p0", Mesh1D.uniform(4))
        b = BasisSpec("p0", Mesh1D.uniform(5))
        with pytest.raises(ValueError):
            form_matrix(a, b, "mass")

    def test_unknown_form_rejected(self):
        b = BasisSpec("p0", Mesh1D.uniform(4))
        with pytest.raises(ValueError):
            form_matrix(b, b, "hessian")

    def test_discontinuous_mass_is_block_diagonal(self):
        N = 4
        b = BasisSpec("p1_discontinuous", Mesh1D.uniform(N))
        M = form_matrix(b, b, "mass").real
        h = 1.0 / N
        blk = np.array([[h / 3.0, h / 6.0], [h / 6.0, h / 3.0]])
        for e in range(N):
            np.testing.assert_allclose(M[2 * e : 2 * e + 2, 2 * e : 2 * e + 2], blk, atol=1e-16)
        off = M.copy()
        for e in range(N):
            off[2 * e : 2 * e + 2, 2 * e : 2 * e + 2] = 0.0
        assert np.max(np.abs(off)) == 0.0


class TestHermiteCubics:
    def _interpolant(self, N):
        """Hermite coefficients matching x^3 at the interior nodes."""
        nodes = Mesh1D.uniform(N).nodes
        c = np.zeros(2 * (N - 1))
        for k in range(1, N):
            c[2 * (k - 1)] = nodes[k] ** 3
            c[2 * (k - 1) + 1] = 3.0 * nodes[k] ** 2
        return c

    def test_cubic_reproduction_on_interior_elements(self):
        N = 8
        her = BasisSpec("hermite_clamped", Mesh1D.uniform(N))
        c = self._interpolant(N)
        nodes = her.mesh.nodes
        mids = 0.5 * (nodes[1:-2] + nodes[2:-1])  # midpoints of elements 1..N-2
        np.testing.assert_allclose(evaluate(her, c, mids), mids**3, atol=1e-14)
        np.testing.assert_allclose(evaluate(her, c, mids, deriv=1), 3.0 * mids**2, atol=1e-12)
        np.testing.assert_allclose(evaluate(her, c, mids, deriv=2), 6.0 * mids, atol=1e-10)

    def test_clamped_boundary_values(self):
        N = 8
        her = BasisSpec("hermite_clamped", Mesh1D.uniform(N))
        c = np.ones(her.dim)
        ends = np.array([0.0, 1.0])
        np.testing.assert_allclose(evaluate(her, c, ends), 0.0, atol=1e-15)
        np.testing.assert_allclose(evaluate(her, c, ends, deriv=1), 0.0, atol=1e-15)

    def test_bending_patch_rows_vanish(self):
        # d^2/dx^2 of the cubic interpolant is linear, so bending rows tested
        # against interior dofs integrate to zero by parts
        N = 8
        her = BasisSpec("hermite_clamped", Mesh1D.uniform(N))
        K = form_matrix(her, her, "dd_vs_dd")
        r = (K @ self._interpolant(N)).real
        scale = float(np.max(np.abs(K)))
        inner = r[2 : 2 * (N - 2)]  # dofs of nodes 2..N-2
        assert np.max(np.abs(inner)) <= 1e-12 * scale

    def test_clamped_beam_base_frequency(self):
        # reference: smallest root of cos(b) cosh(b) = 1 gives frequency b^4
        beta = brentq(lambda b: math.cos(b) * math.cosh(b) - 1.0, 4.0, 5.0)
        her = BasisSpec("hermite_clamped", Mesh1D.uniform(64))
        K = HermitianMatrix(form_matrix(her, her, "dd_vs_dd"))
        M = HermitianMatrix(form_matrix(her, her, "mass"))
        mu = float(eigh_gen(K, M)[0])
        assert mu == pytest.approx(beta**4, rel=1e-6)


class TestQuarticBuilder:
    def test_shapes_and_labels(self):
        P = build_example_quartic(8)
        assert (P.n1, P.n2) == (14, 16)
        assert P.labels["kappa"] == 0.0
        assert P.labels["tau"] == 1.0
        assert np.max(np.abs(P.a22.data)) == 0.0

    def test_label_shift_is_valid(self):
        P = build_example_quartic(8)
        d1_gram(P, P.labels["kappa"], P.labels["tau"])

    def test_coupling_reproduces_bending_form(self):
        # P1-discontinuous contains the Hermite second derivatives exactly,
        # so A12 G2^{-1} A12* equals the bending form with no projection loss
        P = build_example_quartic(8)
        her = BasisSpec("hermite_clamped", Mesh1D.uniform(8))
        K = form_matrix(her, her, "dd_vs_dd")
        got = P.a12 @ np.linalg.solve(P.g2.data, P.a12.conj().T)
        assert np.max(np.abs(got - K)) <= 1e-12 * np.max(np.abs(K))

    def test_transfer_matrix_identity(self):
        # S(lam) = K_grad - lam M + K_bend / lam for this block layout
        N, lam = 6, 2.0
        P = build_example_quartic(N)
        her = BasisSpec("hermite_clamped", Mesh1D.uniform(N))
        want = (
            form_matrix(her, her, "grad")
            - lam * form_matrix(her, her, "mass")
            + form_matrix(her, her, "dd_vs_dd") / lam
        )
        S = schur(P, lam).data
        assert np.max(np.abs(S - want)) <= 1e-12 * np.max(np.abs(want))

    def test_element_count_validation(self):
        with pytest.raises(ValueError):
            build_example_quartic(1)


class TestDiracBuilder:
    def test_shapes_and_labels(self):
        P = build_example_dirac(8)
        assert (P.n1, P.n2) == (8, 8)
        assert P.labels["kappa"] == -1.0
        assert P.labels["tau"] == 1.0

    def test_first_block_has_zero_diagonal(self):
        P = build_example_dirac(8)
        assert np.max(np.abs(np.diag(P.a11.data))) <= 1e-16

    def test_label_shift_is_valid(self):
        P = build_example_dirac(16)
        d1_gram(P, P.labels["kappa"], P.labels["tau"])

    def test_element_count_validation(self):
        with pytest.raises(ValueError):
            build_example_dirac(2)


class TestTransportBuilder:
    def test_second_block_is_empty(self):
        P = build_example_transport(8)
        assert (P.n1, P.n2) == (8, 0)

    def test_constants_are_in_the_kernel(self):
        P = build_example_transport(8)
        assert np.max(np.abs(P.a11.data @ np.ones(8))) <= 1e-15

    def test_sawtooth_is_a_spurious_kernel_vector(self):
        # for even N the alternating vector is killed by the centered
        # difference, doubling the discrete multiplicity at zero
        P = build_example_transport(8)
        saw = np.array([(-1.0) ** k for k in range(8)])
        assert np.max(np.abs(P.a11.data @ saw)) <= 1e-15

    def test_element_count_validation(self):
        with pytest.raises(ValueError):
            build_example_transport(2)


class TestEvaluate:
    def test_periodic_wraparound(self):
        N = 6
        b = BasisSpec("p1_periodic", Mesh1D.uniform(N))
        e0 = np.zeros(N)
        e0[0] = 1.0
        # the hat at node 0 rises back to 1 across the last element
        assert evaluate(b, e0, np.array([1.0]))[0] == pytest.approx(1.0, abs=1e-15)
        assert evaluate(b, e0, np.array([1.0 - 0.5 / N]))[0] == pytest.approx(0.5, abs=1e-15)

    def test_p1_derivative_is_slope(self):
        N = 4
        b = BasisSpec("p1_periodic", Mesh1D.uniform(N))
        e1 = np.zeros(N)
        e1[1] = 1.0
        assert evaluate(b, e1, np.array([0.1]), deriv=1)[0] == pytest.approx(4.0)
        assert evaluate(b, e1, np.array([0.3]), deriv=1)[0] == pytest.approx(-4.0)


class TestResolvent:
    def test_kernel_jump_is_imaginary_unit(self):
        t = 0.3
        above = resolvent_kernel_value(t, t)
        below = resolvent_kernel_value(t - 1e-15, t)
        assert above - below == pytest.approx(1j, abs=1e-12)

    def test_kernel_solves_homogeneous_equation(self):
        # K(x, t) is proportional to e^{ix} on either side of the diagonal
        x1, x2, t = 0.6, 0.8, 0.2
        ratio = resolvent_kernel_value(x2, t) / resolvent_kernel_value(x1, t)
        assert ratio == pytest.approx(np.exp(1j * (x2 - x1)), abs=1e-14)

    def test_constant_right_hand_side_is_exact(self):
        # (T - 1) u = 1 has the exact solution u = -1, reproduced discretely
        assert resolvent_check_transport(16, np.ones(16)) <= 1e-12

    def test_shape_validation(self):
        with pytest.raises(ValueError):
            resolvent_check_transport(8, np.ones(7))

    def test_error_decreases_under_refinement(self):
        def samples(N):
            x = Mesh1D.uniform(N).nodes[:-1]
            return np.exp(2j * np.pi * x)

        coarse = resolvent_check_transport(16, samples(16))
        fine = resolvent_check_transport(32, samples(32))
        assert fine < 0.5 * coarse
