import os
import sys
import unittest

import numpy as np
from scipy import sparse

# Add the repository root to the path so we can import modules
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from csegeo.mesh import Mesh
from csegeo.mesh.primitives import grid, icosphere, radial_noise
from csegeo.spectral import build_operators, dirichlet_energy, face_gradient, face_gradients
from csegeo.spectral.operators import edge_matrices
from csegeo.utils.errors import ParameterError


def equilateral_triangle():
    return Mesh.from_arrays([[0, 0, 0], [1, 0, 0], [0.5, np.sqrt(3) / 2, 0]], [[0, 1, 2]])


def bumpy_sphere():
    return radial_noise(icosphere(2), 0.1, seed=3)


class TestStiffness(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.mesh = bumpy_sphere()
        cls.ops = build_operators(cls.mesh)

    def test_equilateral_entries(self):
        """Test the cotangent weights of a single equilateral triangle"""
        W = build_operators(equilateral_triangle()).W.toarray()

        # Assert off-diagonal -cot(60)/2 and diagonal cot(60)
        self.assertAlmostEqual(W[0, 1], -1.0 / (2.0 * np.sqrt(3)), places=12)
        self.assertAlmostEqual(W[1, 2], -1.0 / (2.0 * np.sqrt(3)), places=12)
        self.assertAlmostEqual(W[0, 0], 1.0 / np.sqrt(3), places=12)

    def test_rows_sum_to_zero(self):
        """Test that constants are in the kernel of W"""
        self.assertLess(np.max(np.abs(self.ops.W @ np.ones(self.mesh.num_vertices))), 1e-10)

    def test_symmetric(self):
        """Test W == W^T"""
        self.assertLess(abs(self.ops.W - self.ops.W.T).max(), 1e-12)

    def test_positive_semidefinite(self):
        """Test r^T W r >= 0 on random functions"""
        r = np.random.default_rng(0).standard_normal((self.mesh.num_vertices, 1000))
        energies = np.sum(r * (self.ops.W @ r), axis=0)
        self.assertGreaterEqual(np.min(energies), -1e-9)

    def test_stiffness_from_gradients(self):
        """Test W = G^T diag(A_f) G"""
        weights = sparse.diags(np.repeat(self.ops.face_areas, 3))
        assembled = (self.ops.G.T @ weights @ self.ops.G).toarray()
        self.assertLess(np.max(np.abs(assembled - self.ops.W.toarray())), 1e-10)

    def test_scale_invariance(self):
        """Test that W is unchanged and A scales quadratically under scaling"""
        scaled = build_operators(self.mesh.scaled(2.0))
        self.assertLess(abs(scaled.W - self.ops.W).max(), 1e-10)
        np.testing.assert_allclose(scaled.A, 4.0 * self.ops.A, rtol=1e-12)


class TestMass(unittest.TestCase):

    def test_lumped_mass_sums_to_area(self):
        """Test that the lumped mass covers the surface exactly"""
        mesh = bumpy_sphere()
        ops = build_operators(mesh)
        self.assertTrue(np.all(ops.A > 0))
        self.assertAlmostEqual(ops.total_area, mesh.total_area, places=10)


class TestGradient(unittest.TestCase):

    def test_unit_right_triangle(self):
        """Test the gradient of a linear function on a right triangle"""
        mesh = Mesh.from_arrays([[0, 0, 0], [1, 0, 0], [0, 1, 0]], [[0, 1, 2]])
        G = face_gradient(mesh, 0)
        np.testing.assert_allclose(G @ np.array([0.0, 1.0, 0.0]), [1.0, 0.0, 0.0], atol=1e-12)
        np.testing.assert_allclose(G @ np.array([0.0, 0.0, 1.0]), [0.0, 1.0, 0.0], atol=1e-12)

    def test_constant_has_no_gradient(self):
        """Test that constants map to the zero vector"""
        mesh = bumpy_sphere()
        gradients = face_gradients(mesh)
        self.assertLess(np.max(np.abs(gradients @ np.ones(3))), 1e-10)

    def test_edge_differences(self):
        """Test <b_i, G r> against corner differences"""
        mesh = bumpy_sphere()
        rng = np.random.default_rng(1)
        gradients = face_gradients(mesh)
        edges = edge_matrices(mesh)
        for f in rng.choice(mesh.num_faces, size=20, replace=False):
            r = rng.standard_normal(3)
            g = gradients[f] @ r
            # b1 = X3 - X2, b2 = X1 - X3, b3 = X2 - X1
            self.assertAlmostEqual(edges[f][:, 0] @ g, r[2] - r[1], places=10)
            self.assertAlmostEqual(edges[f][:, 1] @ g, r[0] - r[2], places=10)
            self.assertAlmostEqual(edges[f][:, 2] @ g, r[1] - r[0], places=10)

    def test_gradient_is_tangent(self):
        """Test that face gradients lie in the face plane"""
        mesh = bumpy_sphere()
        r = np.random.default_rng(2).standard_normal(mesh.num_vertices)
        g = build_operators(mesh).G @ r
        normals = mesh.face_normals.ravel()
        self.assertLess(np.max(np.abs(np.sum((g * normals).reshape(-1, 3), axis=1))), 1e-10)

    def test_face_index_range(self):
        """Test that an out-of-range face index is rejected"""
        with self.assertRaises(ParameterError):
            face_gradient(equilateral_triangle(), 1)


class TestDirichletEnergy(unittest.TestCase):

    def test_linear_function_on_unit_square(self):
        """Test that r = x has energy 1 on the unit square"""
        mesh = grid(16)
        ops = build_operators(mesh)
        self.assertAlmostEqual(dirichlet_energy(ops, mesh.vertices[:, 0]), 1.0, places=9)

    def test_constant_energy(self):
        """Test that constants have zero energy"""
        ops = build_operators(bumpy_sphere())
        self.assertAlmostEqual(dirichlet_energy(ops, np.full(ops.num_vertices, 3.0)), 0.0, places=9)


class TestDivergence(unittest.TestCase):

    def test_integration_by_parts(self):
        """Test r^T (-D) g == (G r)^T diag(A_f) g"""
        mesh = bumpy_sphere()
        ops = build_operators(mesh)
        rng = np.random.default_rng(4)
        r = rng.standard_normal(mesh.num_vertices)
        g = rng.standard_normal(3 * mesh.num_faces)

        lhs = -r @ (ops.D @ g)
        rhs = (ops.G @ r) @ (np.repeat(ops.face_areas, 3) * g)
        self.assertAlmostEqual(lhs, rhs, delta=1e-10 * max(1.0, abs(rhs)))

    def test_divergence_of_gradient(self):
        """Test that D G reproduces -W"""
        ops = build_operators(bumpy_sphere())
        self.assertLess(abs(ops.D @ ops.G + ops.W).max(), 1e-10)


if __name__ == '__main__':
    unittest.main()
