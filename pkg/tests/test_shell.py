"""Surface frames, strain operators, and resultant laws."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import ALL_SURFACES
from klshell import (BasisConventionError, KnotVector, NurbsSurface,
                     ResultantTriple, ShellMaterial, StrainTriple,
                     basis_eval, bending_law, bending_strain_op,
                     effective_membrane, frame_at, make_uniform, membrane_law,
                     membrane_strain_op, to_local_cartesian)

KV2 = KnotVector([0, 0, 0, 1, 1, 1], 2)


def flat_patch(a=1.0, b=1.0):
    ctrl = np.zeros((3, 3, 3))
    for i, x in enumerate((0.0, a / 2, a)):
        for j, y in enumerate((0.0, b / 2, b)):
            ctrl[i, j] = [x, y, 0.0]
    return NurbsSurface(KV2, KV2, ctrl, np.ones((3, 3)))


def cylinder_patch(R=10.0):
    return ALL_SURFACES["strip"]()


def sphere_patch(R=10.0):
    return ALL_SURFACES["hemisphere"]()


def rows_apply(rows, U):
    """Contract per-dof strain rows with control displacements (n_cp, 3)."""
    return rows @ U.reshape(-1)


def local_cp_displacements(surface, eid_theta, field):
    """Control values of an affine field: exact for any NURBS weights."""
    return np.array([field(q) for q in surface.ctrl.reshape(-1, 3)])


class TestFrames:
    def test_flat_plate(self):
        f = frame_at(flat_patch(), 0.3, 0.6)
        assert np.allclose(f.a3, [0, 0, 1], atol=1e-14)
        assert np.allclose(f.b_ab, 0, atol=1e-14)
        assert abs(f.jac - 1.0) < 1e-14

    def test_cylinder_curvature_oracle(self):
        s = cylinder_patch()
        rng = np.random.default_rng(2)
        for t1, t2 in rng.random((20, 2)):
            f = frame_at(s, t1, t2)
            eig = np.sort(np.linalg.eigvals(f.b_mixed).real)
            assert min(abs(eig[0]), abs(eig[1])) < 1e-12
            assert abs(max(abs(eig[0]), abs(eig[1])) - 0.1) < 1e-12

    def test_sphere_curvature_oracle(self):
        s = sphere_patch()
        rng = np.random.default_rng(4)
        for t1, t2 in rng.random((20, 2)):
            f = frame_at(s, t1, t2)
            eig = np.linalg.eigvals(f.b_mixed).real
            assert np.allclose(np.abs(eig), 0.1, atol=1e-12)

    @pytest.mark.parametrize("name", sorted(ALL_SURFACES))
    def test_frame_invariants(self, name):
        s = make_uniform(ALL_SURFACES[name](), 3, 3)
        rng = np.random.default_rng(8)
        for t1, t2 in rng.random((30, 2)):
            f = frame_at(s, t1, t2)
            assert abs(np.linalg.norm(f.a3) - 1.0) < 1e-12
            assert abs(f.a3 @ f.a1) < 1e-12 * np.linalg.norm(f.a1)
            assert abs(f.a3 @ f.a2) < 1e-12 * np.linalg.norm(f.a2)
            assert np.allclose(f.a_inv @ f.a_ab, np.eye(2), atol=1e-12)
            assert abs(f.e1 @ f.e2) < 1e-12
            assert abs(np.linalg.norm(f.e1) - 1) < 1e-12
            assert abs(np.linalg.norm(f.e2) - 1) < 1e-12
            cross = np.cross(f.e1, f.a1)
            assert np.linalg.norm(cross) < 1e-12 * np.linalg.norm(f.a1)
            assert abs(f.b_ab[0, 1] - f.b_ab[1, 0]) < 1e-14 * (1 + abs(f.b_ab).max())

    def test_degenerate_geometry_raises(self):
        ctrl = np.zeros((3, 3, 3))  # all control points coincide
        s = NurbsSurface(KV2, KV2, ctrl, np.ones((3, 3)))
        from klshell import SingularGeometryError
        with pytest.raises(SingularGeometryError):
            frame_at(s, 0.5, 0.5)


class TestMembraneOperator:
    def test_rigid_translation_annihilated(self):
        s = cylinder_patch()
        f = frame_at(s, 0.4, 0.3)
        be = basis_eval(s, 0.4, 0.3)
        rows = membrane_strain_op(f, be)
        U = np.tile([0.3, -1.2, 0.7], (9, 1))
        assert np.allclose(rows_apply(rows, U), 0.0, atol=1e-14)

    def test_flat_uniaxial_stretch(self):
        s = flat_patch()
        alpha = 1e-3
        U = np.array([[alpha * q[0], 0, 0] for q in s.ctrl.reshape(-1, 3)])
        f = frame_at(s, 0.25, 0.75)
        be = basis_eval(s, 0.25, 0.75)
        eps = rows_apply(membrane_strain_op(f, be), U)
        assert np.allclose(eps, [alpha, 0, 0], atol=1e-15)

    @pytest.mark.parametrize("name", ["strip", "hemisphere"])
    def test_rigid_rotation_annihilated(self, name):
        # affine fields are reproduced exactly with U_A = field(Q_A)
        s = make_uniform(ALL_SURFACES[name](), 4, 4)
        omega = np.array([0.2, -0.5, 1.0]) * 1e-3
        U = np.cross(omega, s.ctrl.reshape(-1, 3))
        rng = np.random.default_rng(6)
        scale = np.linalg.norm(omega) * 10.0
        for t1, t2 in rng.random((20, 2)):
            f = frame_at(s, t1, t2)
            be = basis_eval(s, t1, t2)
            conn = np.arange(9)  # rows act on the element's own functions
            from klshell.elements import Patch
            patch = Patch(s)
            eid = patch.element_containing(t1, t2)
            Ue = U[patch.conn[eid]]
            eps = rows_apply(membrane_strain_op(f, be), Ue)
            assert np.all(np.abs(eps) < 1e-10 * scale)

    def test_linearity(self):
        s = cylinder_patch()
        f = frame_at(s, 0.2, 0.9)
        be = basis_eval(s, 0.2, 0.9)
        rows = membrane_strain_op(f, be)
        rng = np.random.default_rng(0)
        U = rng.random((9, 3))
        V = rng.random((9, 3))
        left = rows_apply(rows, 2.0 * U + 3.0 * V)
        right = 2.0 * rows_apply(rows, U) + 3.0 * rows_apply(rows, V)
        assert np.allclose(left, right, rtol=0, atol=1e-14 * np.abs(left).max())


class TestBendingOperator:
    def test_flat_plate_reduces_to_deflection_hessian(self):
        # w(theta) = theta1^2 on the unit flat patch: kappa = (-2, 0, 0)
        s = flat_patch()
        U = np.zeros((9, 3))
        U[:, 2] = np.outer([0.0, 0.0, 1.0], [1.0, 1.0, 1.0]).ravel()
        for t1, t2 in ((0.2, 0.3), (0.7, 0.9)):
            f = frame_at(s, t1, t2)
            be = basis_eval(s, t1, t2)
            kap = rows_apply(bending_strain_op(f, be), U)
            assert np.allclose(kap, [-2.0, 0.0, 0.0], atol=1e-13)

    def test_rigid_translation_annihilated(self):
        s = sphere_patch()
        f = frame_at(s, 0.6, 0.2)
        be = basis_eval(s, 0.6, 0.2)
        U = np.tile([0.1, 0.2, -0.3], (9, 1))
        kap = rows_apply(bending_strain_op(f, be), U)
        assert np.allclose(kap, 0.0, atol=1e-14)

    def test_rigid_rotation_annihilated_on_cylinder(self):
        s = make_uniform(cylinder_patch(), 4, 2)
        from klshell.elements import Patch
        patch = Patch(s)
        omega = np.array([0.3, 0.1, -0.7]) * 1e-3
        U = np.cross(omega, s.ctrl.reshape(-1, 3))
        scale = np.linalg.norm(omega) * 10.0
        rng = np.random.default_rng(9)
        for t1, t2 in rng.random((20, 2)):
            f = frame_at(s, t1, t2)
            be = basis_eval(s, t1, t2)
            eid = patch.element_containing(t1, t2)
            kap = rows_apply(bending_strain_op(f, be), U[patch.conn[eid]])
            assert np.all(np.abs(kap) < 1e-9 * scale)


class TestLaws:
    MAT = ShellMaterial(E=200.0, nu=0.0, t=0.05)

    def test_flat_uniaxial(self):
        f = frame_at(flat_patch(), 0.5, 0.5)
        n = membrane_law(StrainTriple(2e-3, 0, 0), f, self.MAT)
        Et = self.MAT.E * self.MAT.t
        assert abs(n.c11 - Et * 2e-3) < 1e-15 * Et
        assert abs(n.c22) < 1e-18 and abs(n.c12) < 1e-18

    def test_zero_strain(self):
        f = frame_at(flat_patch(), 0.5, 0.5)
        n = membrane_law(StrainTriple(0, 0, 0), f, self.MAT)
        assert n.c11 == n.c22 == n.c12 == 0.0

    def test_equibiaxial_hand_expansion(self):
        # identity metric, nu = 0.3: n11 = n22 = E t eps / (1 - nu)
        mat = ShellMaterial(E=200.0, nu=0.3, t=0.05)
        f = frame_at(flat_patch(), 0.25, 0.5)
        n = membrane_law(StrainTriple(1e-3, 1e-3, 0), f, mat)
        expect = mat.E * mat.t * 1e-3 / (1 - mat.nu)
        assert abs(n.c11 - expect) < 1e-12 * expect
        assert abs(n.c22 - expect) < 1e-12 * expect

    def test_bending_plate_rigidity(self):
        f = frame_at(flat_patch(), 0.5, 0.5)
        kap = StrainTriple(3e-2, 0, 0)
        m = bending_law(kap, f, self.MAT)
        expect = self.MAT.E * self.MAT.t ** 3 * 3e-2 / 12.0
        assert abs(m.c11 - expect) < 1e-14 * expect

    def test_moment_to_force_ratio(self):
        f = frame_at(flat_patch(), 0.4, 0.6)
        s = StrainTriple(1e-3, -2e-3, 5e-4)
        n = membrane_law(s, f, self.MAT)
        m = bending_law(s, f, self.MAT)
        ratio = self.MAT.t ** 2 / 12.0
        for a, b in ((m.c11, n.c11), (m.c22, n.c22), (m.c12, n.c12)):
            if b != 0:
                assert abs(a / b - ratio) < 1e-12 * ratio

    @given(st.floats(0.0, 0.49), st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1))
    @settings(max_examples=60, deadline=None)
    def test_energy_density_nonnegative(self, nu, e11, e22, e12):
        mat = ShellMaterial(E=10.0, nu=nu, t=0.1)
        s = sphere_patch()
        f = frame_at(s, 0.37, 0.61)
        eps = StrainTriple(e11, e22, e12)
        n = membrane_law(eps, f, mat)
        density = (eps.c11 * n.c11 + eps.c22 * n.c22 + 2 * eps.c12 * n.c12)
        assert density >= -1e-12 * mat.E * mat.t


class TestEffectiveMembrane:
    MAT = ShellMaterial(E=200.0, nu=0.0, t=0.05)

    def test_flat_is_identity(self):
        f = frame_at(flat_patch(), 0.5, 0.5)
        n = ResultantTriple(3.0, -1.0, 0.5)
        m = ResultantTriple(0.1, 0.2, -0.3)
        ne = effective_membrane(n, m, f)
        assert np.allclose([ne.c11, ne.c22, ne.c12], [3.0, -1.0, 0.5], atol=1e-14)

    def test_single_term_contraction_on_cylinder(self):
        f = frame_at(cylinder_patch(), 0.3, 0.5)
        m = ResultantTriple(2.0, 0.0, 0.0)
        ne = effective_membrane(ResultantTriple(0, 0, 0), m, f)
        assert abs(ne.c11 - (-m.c11 * f.b_mixed[0, 0])) < 1e-14 * abs(ne.c11)

    def test_rejects_cartesian_inputs(self):
        f = frame_at(flat_patch(), 0.5, 0.5)
        n_cart = ResultantTriple(1, 1, 0, basis="local-cartesian")
        with pytest.raises(BasisConventionError):
            effective_membrane(n_cart, ResultantTriple(0, 0, 0), f)


class TestLocalCartesian:
    def test_orthonormal_parameterization_is_identity(self):
        f = frame_at(flat_patch(), 0.5, 0.5)
        n = ResultantTriple(3.0, -1.0, 0.5)
        h = to_local_cartesian(n, f)
        assert np.allclose([h.c11, h.c22, h.c12], [3.0, -1.0, 0.5], atol=1e-14)
        assert h.basis == "local-cartesian"

    def test_arc_change_of_basis_oracle(self):
        # 1D change of basis: nhat11 = n11 * (ds/dtheta)^2 with ds/dtheta = |a1|
        f = frame_at(cylinder_patch(), 0.7, 0.4)
        n = ResultantTriple(1.0, 0.0, 0.0)
        h = to_local_cartesian(n, f)
        expect = f.a_ab[0, 0]
        assert abs(h.c11 - expect) < 1e-10 * abs(expect)

    def test_symmetry_preserved(self):
        f = frame_at(sphere_patch(), 0.3, 0.8)
        rng = np.random.default_rng(1)
        a, b, c = rng.random(3)
        h = to_local_cartesian(ResultantTriple(a, b, c), f)
        assert isinstance(h.c12, float)

    def test_double_transformation_raises(self):
        f = frame_at(flat_patch(), 0.5, 0.5)
        h = to_local_cartesian(ResultantTriple(1, 2, 3), f)
        with pytest.raises(BasisConventionError):
            to_local_cartesian(h, f)

    @pytest.mark.parametrize("name", sorted(ALL_SURFACES))
    def test_energy_density_invariant(self, name):
        # eps_ab n^ab == ehat_ab nhat^ab when strains transform covariantly
        s = ALL_SURFACES[name]()
        mat = ShellMaterial(E=100.0, nu=0.25, t=0.02)
        rng = np.random.default_rng(15)
        for t1, t2 in rng.random((10, 2)):
            f = frame_at(s, t1, t2)
            eps = StrainTriple(*rng.standard_normal(3))
            n = membrane_law(eps, f, mat)
            curv = (eps.c11 * n.c11 + eps.c22 * n.c22 + 2 * eps.c12 * n.c12)
            # covariant transform of the strain: ehat = (E . a^g) pairing
            a_up = np.stack([f.a_inv[0, 0] * f.a1 + f.a_inv[0, 1] * f.a2,
                             f.a_inv[1, 0] * f.a1 + f.a_inv[1, 1] * f.a2])
            T = np.array([[f.e1 @ a_up[0], f.e1 @ a_up[1]],
                          [f.e2 @ a_up[0], f.e2 @ a_up[1]]])
            eh = T @ eps.as_matrix() @ T.T
            nh = to_local_cartesian(n, f)
            cart = (eh[0, 0] * nh.c11 + eh[1, 1] * nh.c22 + 2 * eh[0, 1] * nh.c12)
            assert abs(cart - curv) < 1e-10 * max(1e-30, abs(curv))


class TestMaterialValidation:
    def test_invalid_material(self):
        with pytest.raises(ValueError):
            ShellMaterial(E=-1.0, nu=0.3, t=0.1)
        with pytest.raises(ValueError):
            ShellMaterial(E=1.0, nu=0.5, t=0.1)
        with pytest.raises(ValueError):
            ShellMaterial(E=1.0, nu=0.3, t=0.0)
