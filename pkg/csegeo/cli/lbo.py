"""
`csegeo lbo`: operators and truncated eigenbasis of a mesh.
"""

import argparse

from csegeo.mesh.parser import load_mesh
from csegeo.spectral.basis import eigenbasis
from csegeo.spectral.operators import build_operators
from csegeo.storage.artifacts import save_basis
from csegeo.cli.common import emit


def register(subparsers, parent: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser("lbo", parents=[parent], help="Compute a Laplace-Beltrami eigenbasis")
    parser.add_argument("--mesh", required=True, help="Input .obj or .ply mesh")
    parser.add_argument("--num-eigen", type=int, default=256, help="Number of eigenpairs M")
    parser.add_argument("--method", choices=["auto", "dense", "lanczos"], default="auto", help="Eigensolver")
    parser.add_argument("--out", required=True, help="Output CSEB container")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    mesh = load_mesh(args.mesh)
    basis = eigenbasis(build_operators(mesh), args.num_eigen, args.method)
    save_basis(args.out, basis)
    report = {
        "mesh": mesh.mesh_id,
        "num_vertices": mesh.num_vertices,
        "num_eigen": basis.num_eigen,
        "total_area": basis.total_area,
        "eigenvalues": [float(v) for v in basis.eigenvalues],
    }
    emit(args, report, f"wrote {basis.num_eigen} eigenpairs of {mesh.num_vertices}-vertex mesh to {args.out}")
    return 0
