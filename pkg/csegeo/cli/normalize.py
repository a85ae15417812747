"""
`csegeo normalize`: rescale a mesh to a fixed geodesic diameter.
"""

import argparse

from csegeo.mesh.export import write_mesh
from csegeo.mesh.normalize import normalize_mesh
from csegeo.mesh.parser import load_mesh
from csegeo.utils.settings import TARGET_DIAMETER
from csegeo.cli.common import emit


def register(subparsers, parent: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser("normalize", parents=[parent], help="Normalize a mesh to a geodesic diameter")
    parser.add_argument("--mesh", required=True, help="Input .obj or .ply mesh")
    parser.add_argument("--diameter", type=float, default=TARGET_DIAMETER, help="Target geodesic diameter")
    parser.add_argument("--out", required=True, help="Output .obj or .ply mesh")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    mesh = load_mesh(args.mesh)
    normalized, scale = normalize_mesh(mesh, args.diameter)
    write_mesh(normalized, args.out)
    report = {
        "input_mesh": mesh.mesh_id,
        "output_mesh": normalized.mesh_id,
        "scale": scale,
        "target_diameter": args.diameter,
    }
    emit(args, report, f"scaled by {scale:.6g}; wrote {args.out}")
    return 0
