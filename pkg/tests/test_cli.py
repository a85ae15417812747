import io
import json
import os
import sys
import tempfile
import unittest
from unittest.mock import patch

import numpy as np

# Add the repository root to the path so we can import modules
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from csegeo.main import main
from csegeo.mesh import dump_correspondences, CorrespondenceSet, load_mesh, parse_ply_ascii, write_obj
from csegeo.mesh.primitives import icosphere, permute_vertices, radial_noise, random_permutation
from csegeo.storage import load_basis, load_embedding, load_functional_map, load_pointmap


class CliTestCase(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmp.cleanup()

    def path(self, name):
        return os.path.join(self.tmp.name, name)

    def write_mesh(self, name, mesh):
        path = self.path(name)
        with open(path, "wb") as f:
            f.write(write_obj(mesh))
        return path

    def write_json(self, name, payload):
        path = self.path(name)
        with open(path, "w") as f:
            f.write(payload if isinstance(payload, str) else json.dumps(payload))
        return path

    def run_cli(self, *argv):
        """Run the CLI and capture (exit code, stdout, stderr)."""
        with patch('sys.stdout', new_callable=io.StringIO) as out, \
                patch('sys.stderr', new_callable=io.StringIO) as err:
            code = main(list(argv))
        return code, out.getvalue(), err.getvalue()


class TestUsage(CliTestCase):

    def test_unknown_subcommand(self):
        """Test that an unknown subcommand exits with 1 and prints usage"""
        code, _, err = self.run_cli("bogus")
        self.assertEqual(code, 1)
        self.assertIn("usage: csegeo", err)

    def test_missing_subcommand(self):
        """Test that no subcommand is a usage error"""
        code, _, err = self.run_cli()
        self.assertEqual(code, 1)
        self.assertIn("subcommand is required", err)

    def test_missing_required_flag(self):
        """Test that a missing required flag is a usage error"""
        code, _, _ = self.run_cli("lbo", "--mesh", "x.obj")
        self.assertEqual(code, 1)

    def test_verify_without_bases(self):
        """Test that --verify without both bases is a usage error"""
        code, _, err = self.run_cli("transfer", "--emb", "e", "--map", "m", "--out", "o", "--verify")
        self.assertEqual(code, 1)
        self.assertIn("--src-basis", err)


class TestDataErrors(CliTestCase):

    def test_eval_length_mismatch(self):
        """Test that mismatched prediction and truth lengths exit with 2"""
        mesh = self.write_mesh("m.obj", icosphere(1))
        predicted = self.write_json("p.json", [0, 1, 2])
        truth = self.write_json("t.json", [0, 1])
        code, _, err = self.run_cli("eval", "--mesh", mesh, "--predicted", predicted, "--truth", truth)
        self.assertEqual(code, 2)
        self.assertIn("ground-truth", err)

    def test_malformed_mesh(self):
        """Test that a parse error exits with 2 and names the line"""
        path = self.write_json("bad.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 0\n")
        code, _, err = self.run_cli("lbo", "--mesh", path, "--out", self.path("b.cseb"))
        self.assertEqual(code, 2)
        self.assertIn("line 4", err)

    def test_too_many_eigenpairs(self):
        """Test that M > K exits with 2"""
        mesh = self.write_mesh("m.obj", icosphere(1))
        code, _, _ = self.run_cli("lbo", "--mesh", mesh, "--num-eigen", "500", "--out", self.path("b.cseb"))
        self.assertEqual(code, 2)


class TestCommands(CliTestCase):

    def test_lbo_is_deterministic(self):
        """Test that two runs write identical containers and manifests"""
        mesh = self.write_mesh("m.obj", icosphere(1))
        for name in ("a.cseb", "b.cseb"):
            code, _, _ = self.run_cli("lbo", "--mesh", mesh, "--num-eigen", "8", "--out", self.path(name))
            self.assertEqual(code, 0)
        for suffix in ("", ".json"):
            with open(self.path("a.cseb") + suffix, "rb") as f1, open(self.path("b.cseb") + suffix, "rb") as f2:
                self.assertEqual(f1.read(), f2.read())
        self.assertEqual(load_basis(self.path("a.cseb")).num_eigen, 8)

    def test_lbo_json_report(self):
        """Test that --json prints the report on stdout"""
        mesh = self.write_mesh("m.obj", icosphere(1))
        code, out, _ = self.run_cli("lbo", "--mesh", mesh, "--num-eigen", "4", "--out", self.path("b.cseb"), "--json")
        self.assertEqual(code, 0)
        report = json.loads(out)
        self.assertEqual(report["num_eigen"], 4)
        self.assertEqual(report["eigenvalues"][0], 0.0)

    def test_normalize(self):
        """Test mesh normalization writes a rescaled mesh"""
        mesh = self.write_mesh("m.obj", icosphere(1))
        out = self.path("n.ply")
        code, stdout, _ = self.run_cli("normalize", "--mesh", mesh, "--out", out, "--json")
        self.assertEqual(code, 0)
        report = json.loads(stdout)
        self.assertEqual(load_mesh(out).mesh_id, report["output_mesh"])
        self.assertLess(report["scale"], 1.0)

    def test_softlabels(self):
        """Test caching soft-label fields for chosen vertices"""
        mesh = self.write_mesh("m.obj", icosphere(1))
        out = self.path("labels.cseb")
        code, _, _ = self.run_cli("softlabels", "--mesh", mesh, "--sigma", "0.3", "--vertices", "4,1,4", "--out", out)
        self.assertEqual(code, 0)
        with open(out + ".json") as f:
            manifest = json.load(f)
        self.assertEqual(manifest["vertices"], [1, 4])
        self.assertEqual(manifest["sigma"], 0.3)

    def test_eval(self):
        """Test evaluation output with custom thresholds"""
        mesh = self.write_mesh("m.obj", icosphere(1))
        truth = self.write_json("t.json", [0, 1, 2])
        code, out, _ = self.run_cli("eval", "--mesh", mesh, "--predicted", truth, "--truth", truth,
                                    "--thresholds", "0.1,0.5", "--json")
        self.assertEqual(code, 0)
        report = json.loads(out)
        self.assertEqual(report["mean_geodesic_error"], 0.0)
        self.assertEqual(report["accuracy_at"], {"0.1": 1.0, "0.5": 1.0})

    def test_correspondence_workflow(self):
        """Test lbo, zoomout, fit, transfer and export-colors end to end"""
        src_mesh = radial_noise(icosphere(2), 0.1, seed=3)
        perm = random_permutation(src_mesh.num_vertices, seed=7)
        dst_mesh = permute_vertices(src_mesh, perm)
        src = self.write_mesh("src.obj", src_mesh)
        dst = self.write_mesh("dst.obj", dst_mesh)

        dst_vertices = np.random.default_rng(0).choice(dst_mesh.num_vertices, size=12, replace=False)
        seeds = CorrespondenceSet.from_pairs(
            np.column_stack([perm[dst_vertices], dst_vertices]), src_mesh.mesh_id, dst_mesh.mesh_id
        )
        seeds_path = self.write_json("seeds.json", dump_correspondences(seeds))
        truth_path = self.write_json("truth.json", [int(v) for v in perm])

        # Bases
        for mesh, name in ((src, "src.cseb"), (dst, "dst.cseb")):
            code, _, _ = self.run_cli("lbo", "--mesh", mesh, "--num-eigen", "16", "--out", self.path(name))
            self.assertEqual(code, 0)

        # Refinement
        report_path = self.path("zoomout.json")
        code, _, _ = self.run_cli(
            "zoomout", "--src", src, "--dst", dst, "--seeds", seeds_path, "--truth", truth_path,
            "--start", "8", "--stop", "16", "--step", "4", "--out", self.path("map.cseb"), "--report", report_path,
        )
        self.assertEqual(code, 0)
        with open(report_path) as f:
            report = json.load(f)
        self.assertEqual(report["schedule"], [8, 12, 16])
        self.assertGreaterEqual(report["final_recovery"], 0.9)
        self.assertEqual(load_functional_map(self.path("map.cseb")).C.shape, (16, 16))
        self.assertEqual(load_pointmap(self.path("map.pointmap.json")).size, dst_mesh.num_vertices)

        # Fitting on the source
        config = self.write_json("fit.json", {"teacher": {"dim": 4}, "fit": {"iterations": 5, "step_size": 0.1}})
        code, out, _ = self.run_cli("fit", "--mesh", src, "--basis", self.path("src.cseb"), "--config", config,
                                    "--out", self.path("emb.cseb"), "--json", "--seed", "2")
        self.assertEqual(code, 0)
        self.assertEqual(len(json.loads(out)["loss_history"]), 5)

        # Transfer with verification
        code, _, _ = self.run_cli(
            "transfer", "--emb", self.path("emb.cseb"), "--map", self.path("map.cseb"), "--out", self.path("moved.cseb"),
            "--verify", "--src-basis", self.path("src.cseb"), "--dst-basis", self.path("dst.cseb"),
        )
        self.assertEqual(code, 0)
        moved = load_embedding(self.path("moved.cseb"))
        self.assertEqual(moved.basis_id, dst_mesh.mesh_id)

        # Colors on the destination
        ply = self.path("colors.ply")
        code, _, _ = self.run_cli("export-colors", "--mesh", dst, "--basis", self.path("dst.cseb"),
                                  "--emb", self.path("moved.cseb"), "--out", ply)
        self.assertEqual(code, 0)
        with open(ply, "rb") as f:
            self.assertEqual(parse_ply_ascii(f.read()).mesh_id, dst_mesh.mesh_id)

    def test_fit_basis_for_other_mesh(self):
        """Test that a basis of another mesh exits with 2"""
        first = self.write_mesh("a.obj", icosphere(1))
        second = self.write_mesh("b.obj", icosphere(1, radius=2.0))
        code, _, _ = self.run_cli("lbo", "--mesh", first, "--num-eigen", "4", "--out", self.path("a.cseb"))
        self.assertEqual(code, 0)
        code, _, _ = self.run_cli("fit", "--mesh", second, "--basis", self.path("a.cseb"), "--out", self.path("e.cseb"))
        self.assertEqual(code, 2)


if __name__ == '__main__':
    unittest.main()
