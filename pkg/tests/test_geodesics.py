import os
import sys
import unittest

import numpy as np

# Add the repository root to the path so we can import modules
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from csegeo.geodesics import (
    SoftLabelCache,
    all_pairs_diameter,
    dijkstra,
    distance_matrix,
    estimate_diameter,
    soft_label_fields,
    soft_labels,
    truncation_radius,
)
from csegeo.mesh import Mesh
from csegeo.mesh.primitives import icosphere, permute_vertices, random_permutation
from csegeo.utils.errors import ParameterError


def fan(n=6, apex_height=1000.0):
    """Unit-spaced vertices on the x axis joined to one distant apex."""
    vertices = [[float(i), 0.0, 0.0] for i in range(n)] + [[n / 2.0, apex_height, 0.0]]
    faces = [[i, i + 1, n] for i in range(n - 1)]
    return Mesh.from_arrays(vertices, faces)


def three_point_mesh():
    vertices = [[-1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 11.0, 0.0]]
    return Mesh.from_arrays(vertices, [[0, 1, 3], [1, 2, 3]])


class TestDijkstra(unittest.TestCase):

    def test_path_distances(self):
        """Test distances along a straight chain of unit edges"""
        field = dijkstra(fan(), 0)
        np.testing.assert_allclose(field.distances[:6], np.arange(6.0), atol=1e-12)
        self.assertEqual(field.distances[0], 0.0)

    def test_truncation(self):
        """Test that vertices past the radius are unreached"""
        field = dijkstra(fan(), 0, radius=2.5)
        np.testing.assert_array_equal(field.reached[:6], [True, True, True, False, False, False])
        self.assertTrue(np.all(np.isinf(field.distances[3:])))

    def test_large_radius_matches_full_search(self):
        """Test that a radius past the diameter changes nothing"""
        mesh = icosphere(2)
        np.testing.assert_array_equal(dijkstra(mesh, 5, radius=1e9).distances, dijkstra(mesh, 5).distances)

    def test_triangle_inequality_over_edges(self):
        """Test |d(i) - d(j)| <= |e_ij| on every edge"""
        mesh = icosphere(2)
        d = dijkstra(mesh, 0).distances
        edges = mesh.edges
        gaps = np.abs(d[edges[:, 0]] - d[edges[:, 1]])
        self.assertTrue(np.all(gaps <= mesh.edge_lengths + 1e-12))

    def test_sphere_antipode(self):
        """Test the edge-graph distance between antipodal sphere vertices"""
        mesh = icosphere(3)
        antipode = int(np.argmin(np.linalg.norm(mesh.vertices + mesh.vertices[0], axis=1)))
        d = dijkstra(mesh, 0).distances[antipode]
        # Edge paths overestimate the great-circle distance by a few percent
        self.assertGreaterEqual(d, 2.0)
        self.assertLess(abs(d / np.pi - 1.0), 0.08)

    def test_permutation_invariance(self):
        """Test that relabeling vertices relabels the distances"""
        mesh = icosphere(2)
        perm = random_permutation(mesh.num_vertices, seed=1)
        inverse = np.argsort(perm)
        copy = permute_vertices(mesh, perm)
        original = dijkstra(mesh, 7).distances
        relabeled = dijkstra(copy, int(inverse[7])).distances
        np.testing.assert_allclose(relabeled, original[perm], atol=1e-12)

    def test_batch_matches_single(self):
        """Test that batch rows equal individual searches"""
        mesh = icosphere(1)
        batch = distance_matrix(mesh, [3, 0, 9])
        for row, source in zip(batch, [3, 0, 9]):
            np.testing.assert_allclose(row, dijkstra(mesh, source).distances, atol=1e-12)

    def test_source_range(self):
        """Test that an invalid source is rejected"""
        with self.assertRaises(ParameterError):
            dijkstra(fan(), 99)
        with self.assertRaises(ParameterError):
            dijkstra(fan(), 0, radius=-1.0)

    def test_diameter_estimate(self):
        """Test farthest-point diameter against the exact all-pairs value"""
        mesh = icosphere(2)
        exact = all_pairs_diameter(mesh)
        estimate = estimate_diameter(mesh, samples=16)
        self.assertLessEqual(estimate, exact + 1e-12)
        self.assertGreaterEqual(estimate, 0.9 * exact)


class TestSoftLabels(unittest.TestCase):

    def test_three_point_example(self):
        """Test the weights around the middle of three collinear vertices"""
        field = soft_labels(three_point_mesh(), 1, np.sqrt(0.5))
        np.testing.assert_allclose(field.weights, [0.2119, 0.5761, 0.2119, 0.0], atol=1e-4)
        self.assertEqual(field.weights[0], field.weights[2])
        self.assertAlmostEqual(np.sum(field.weights), 1.0, places=12)

    def test_small_sigma_is_one_hot(self):
        """Test that a tiny bandwidth gives a one-hot label"""
        mesh = icosphere(2)
        field = soft_labels(mesh, 17, 1e-4)
        expected = np.zeros(mesh.num_vertices)
        expected[17] = 1.0
        np.testing.assert_allclose(field.weights, expected, atol=1e-9)

    def test_weights_decrease_with_distance(self):
        """Test that weights are maximal at the center and fall off with distance"""
        mesh = icosphere(2)
        field = soft_labels(mesh, 4, 0.3)
        distances = dijkstra(mesh, 4).distances
        order = np.argsort(distances, kind="stable")
        self.assertEqual(int(np.argmax(field.weights)), 4)
        self.assertTrue(np.all(np.diff(field.weights[order]) <= 1e-15))

    def test_squared_kernel(self):
        """Test the squared-distance kernel and its truncation radius"""
        self.assertAlmostEqual(truncation_radius(0.1, "squared"), 0.1 * np.sqrt(20.0), places=12)
        self.assertAlmostEqual(truncation_radius(0.1), 0.2, places=12)
        field = soft_labels(three_point_mesh(), 1, 1.0, kernel="squared")
        self.assertAlmostEqual(field.weights[0] / field.weights[1], np.exp(-0.5), places=12)

    def test_invalid_parameters(self):
        """Test sigma and kernel validation"""
        with self.assertRaises(ParameterError):
            soft_labels(fan(), 0, 0.0)
        with self.assertRaises(ParameterError):
            soft_labels(fan(), 0, 1.0, kernel="cubic")

    def test_batch_matches_single(self):
        """Test that batched fields equal single computations"""
        mesh = icosphere(2)
        fields = soft_label_fields(mesh, [8, 2], 0.4)
        self.assertEqual([f.center for f in fields], [8, 2])
        np.testing.assert_allclose(fields[1].weights, soft_labels(mesh, 2, 0.4).weights, atol=1e-14)


class TestSoftLabelCache(unittest.TestCase):

    def test_fields_for_deduplicates(self):
        """Test that repeated labels are computed once"""
        mesh = icosphere(1)
        cache = SoftLabelCache()
        fields = cache.fields_for(mesh, [3, 3, 1], 0.5)
        self.assertEqual(sorted(fields), [1, 3])
        self.assertEqual(len(cache), 2)

        # Assert a second request reuses the cached fields
        again = cache.fields_for(mesh, [1, 5], 0.5)
        self.assertIs(again[1], fields[1])
        self.assertEqual(len(cache), 3)
        self.assertEqual([f.center for f in cache.entries(mesh.mesh_id, 0.5)], [1, 3, 5])

    def test_keys_include_sigma(self):
        """Test that another bandwidth is a separate entry"""
        mesh = icosphere(1)
        cache = SoftLabelCache()
        first = cache.get(mesh, 0, 0.5)
        second = cache.get(mesh, 0, 0.7)
        self.assertIsNot(first, second)
        self.assertIs(cache.get(mesh, 0, 0.5), first)


if __name__ == '__main__':
    unittest.main()
