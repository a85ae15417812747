import json
import os
import struct
import sys
import tempfile
import unittest

import numpy as np

# Add the repository root to the path so we can import modules
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from csegeo.embeddings import EmbeddingSet
from csegeo.fmaps import FunctionalMap, PointMap
from csegeo.geodesics import soft_label_fields
from csegeo.mesh.primitives import icosphere
from csegeo.spectral import build_operators, eigenbasis
from csegeo.storage import (
    decode_container,
    encode_container,
    load_basis,
    load_embedding,
    load_functional_map,
    load_pointmap,
    load_soft_labels,
    load_vertex_list,
    read_manifest,
    save_basis,
    save_embedding,
    save_functional_map,
    save_pointmap,
    save_soft_labels,
)
from csegeo.utils.errors import ContainerError, MeshFormatError


class TestContainer(unittest.TestCase):

    def test_layout(self):
        """Test the byte layout of a one-tensor container"""
        data = encode_container([np.array([[1.0, 2.0, 3.0]])])
        self.assertEqual(data[:4], b"CSEB")
        self.assertEqual(struct.unpack_from("<I I", data, 4), (1, 1))
        self.assertEqual(data[12], 2)
        self.assertEqual(struct.unpack_from("<Q Q", data, 13), (1, 3))
        self.assertEqual(struct.unpack_from("<3d", data, 29), (1.0, 2.0, 3.0))
        self.assertEqual(len(data), 29 + 24)

    def test_mixed_ranks(self):
        """Test scalars, vectors and matrices in one container"""
        tensors = [np.array(2.5), np.arange(4.0), np.arange(6.0).reshape(2, 3)]
        decoded = decode_container(encode_container(tensors))
        self.assertEqual([t.shape for t in decoded], [(), (4,), (2, 3)])
        for original, restored in zip(tensors, decoded):
            np.testing.assert_array_equal(original, restored)

    def test_bad_magic(self):
        """Test that a foreign file is rejected"""
        data = b"XXXX" + encode_container([np.zeros(2)])[4:]
        with self.assertRaises(ContainerError):
            decode_container(data)

    def test_bad_version(self):
        """Test that another version is rejected"""
        data = bytearray(encode_container([np.zeros(2)]))
        data[4] = 2
        with self.assertRaises(ContainerError):
            decode_container(bytes(data))

    def test_truncated_payload(self):
        """Test that a short payload is rejected"""
        data = encode_container([np.zeros(4)])
        with self.assertRaises(ContainerError):
            decode_container(data[:-3])

    def test_trailing_bytes(self):
        """Test that bytes after the last tensor are rejected"""
        with self.assertRaises(ContainerError):
            decode_container(encode_container([np.zeros(2)]) + b"\x00")


class TestArtifacts(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.mesh = icosphere(1)
        cls.basis = eigenbasis(build_operators(cls.mesh), 8)

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmp.cleanup()

    def _path(self, name):
        return os.path.join(self.tmp.name, name)

    def test_basis_round_trip(self):
        """Test saving and loading a basis with its manifest"""
        path = self._path("basis.cseb")
        save_basis(path, self.basis)
        loaded = load_basis(path)
        np.testing.assert_array_equal(loaded.U, self.basis.U)
        np.testing.assert_array_equal(loaded.eigenvalues, self.basis.eigenvalues)
        self.assertEqual(loaded.mesh_id, self.mesh.mesh_id)

        with open(path + ".json") as f:
            manifest = json.load(f)
        self.assertEqual(manifest["kind"], "basis")
        self.assertEqual(manifest["mesh_hash"], self.mesh.mesh_id)
        self.assertEqual(manifest["num_eigen"], 8)
        self.assertNotIn("sigma", manifest)

    def test_saves_are_bit_identical(self):
        """Test that saving twice writes identical bytes"""
        first, second = self._path("a.cseb"), self._path("b.cseb")
        save_basis(first, self.basis)
        save_basis(second, self.basis)
        for suffix in ("", ".json"):
            with open(first + suffix, "rb") as f1, open(second + suffix, "rb") as f2:
                self.assertEqual(f1.read(), f2.read())

    def test_embedding_round_trip(self):
        """Test saving and loading an embedding"""
        path = self._path("emb.cseb")
        embedding = EmbeddingSet.random(8, 3, self.basis.basis_id, seed=0)
        save_embedding(path, embedding)
        loaded = load_embedding(path)
        np.testing.assert_array_equal(loaded.E_hat, embedding.E_hat)
        self.assertEqual(loaded.basis_id, self.basis.basis_id)
        self.assertEqual(read_manifest(path).dim, 3)

    def test_functional_map_round_trip(self):
        """Test saving and loading a functional map"""
        path = self._path("map.cseb")
        fmap = FunctionalMap(np.arange(12.0).reshape(3, 4), "src", "dst")
        save_functional_map(path, fmap)
        loaded = load_functional_map(path)
        np.testing.assert_array_equal(loaded.C, fmap.C)
        self.assertEqual((loaded.src_basis_id, loaded.dst_basis_id), ("src", "dst"))

    def test_soft_labels_round_trip(self):
        """Test saving and loading cached soft labels"""
        path = self._path("labels.cseb")
        fields = soft_label_fields(self.mesh, [5, 2], 0.4)
        save_soft_labels(path, fields)
        loaded = load_soft_labels(path)
        self.assertEqual([f.center for f in loaded], [2, 5])
        np.testing.assert_array_equal(loaded[0].weights, fields[1].weights)
        self.assertEqual(loaded[0].sigma, 0.4)

    def test_kind_mismatch(self):
        """Test that loading the wrong artifact kind fails"""
        path = self._path("basis.cseb")
        save_basis(path, self.basis)
        with self.assertRaises(ContainerError):
            load_embedding(path)

    def test_missing_manifest(self):
        """Test that a container without manifest is rejected"""
        with self.assertRaises(ContainerError):
            load_basis(self._path("absent.cseb"))

    def test_pointmap_round_trip(self):
        """Test point map JSON files"""
        path = self._path("map.json")
        pointmap = PointMap.from_assignment([2, 0, 1], "a", "b")
        save_pointmap(path, pointmap)
        loaded = load_pointmap(path)
        np.testing.assert_array_equal(loaded.assignment, [2, 0, 1])
        self.assertEqual(load_vertex_list(path), [2, 0, 1])

    def test_vertex_lists(self):
        """Test bare vertex lists and invalid payloads"""
        path = self._path("list.json")
        with open(path, "w") as f:
            json.dump([3, 1, 4], f)
        self.assertEqual(load_vertex_list(path), [3, 1, 4])

        with open(path, "w") as f:
            json.dump([1, True], f)
        with self.assertRaises(MeshFormatError):
            load_vertex_list(path)

        with open(path, "w") as f:
            f.write("[1, 2")
        with self.assertRaises(MeshFormatError):
            load_vertex_list(path)


if __name__ == '__main__':
    unittest.main()
