"""
`csegeo fit`: fit a spectral embedding to synthetic supervision.
"""

import argparse

from csegeo.mesh.normalize import normalize_mesh
from csegeo.mesh.parser import load_mesh
from csegeo.models.config import FitRunConfig
from csegeo.services.fitter import fit, fit_report, make_synthetic, make_teacher
from csegeo.storage.artifacts import load_basis, save_embedding
from csegeo.cli.common import check_bound, emit, read_model


def register(subparsers, parent: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser("fit", parents=[parent], help="Fit an embedding by gradient descent")
    parser.add_argument("--mesh", required=True, help="Mesh the basis was computed on")
    parser.add_argument("--basis", required=True, help="Basis CSEB")
    parser.add_argument("--config", default=None, help="Fit config JSON (teacher, synthetic, fit sections)")
    parser.add_argument("--out", required=True, help="Output embedding CSEB")
    parser.set_defaults(handler=run)


def _with_seed(config: FitRunConfig, seed: int) -> FitRunConfig:
    return config.model_copy(update={
        "teacher": config.teacher.model_copy(update={"seed": seed}),
        "synthetic": config.synthetic.model_copy(update={"seed": seed}),
        "fit": config.fit.model_copy(update={"seed": seed}),
    })


def run(args: argparse.Namespace) -> int:
    config = read_model(args.config, FitRunConfig) if args.config else FitRunConfig()
    if args.seed is not None:
        config = _with_seed(config, args.seed)
    mesh = load_mesh(args.mesh)
    basis = load_basis(args.basis)
    check_bound(basis.mesh_id, mesh, "basis")

    teacher = make_teacher(basis, config.teacher.dim, config.teacher.seed)
    batch = make_synthetic(config.synthetic, teacher, basis)
    embedding, history = fit(basis, batch, config.fit, mesh=mesh)
    save_embedding(args.out, embedding)

    summary = f"fitted {config.fit.iterations} iterations, final loss {history[-1]:.6g}; wrote {args.out}"
    if args.json or args.report:
        normalized, _ = normalize_mesh(mesh)
        report = fit_report(normalized, basis, teacher, embedding, batch, history)
        summary += f"; accuracy {report.accuracy:.4f}"
        emit(args, report, summary)
    else:
        emit(args, {"loss_history": history}, summary)
    return 0
