"""
Helpers shared by the csegeo subcommands.
"""

import argparse
import json
import sys
from typing import Any, List, Type, TypeVar

from pydantic import BaseModel, ValidationError

from csegeo.mesh.mesh import Mesh
from csegeo.utils.errors import ContainerError, MeshFormatError, MismatchError, ParameterError, UsageError

ModelT = TypeVar("ModelT", bound=BaseModel)


def common_options() -> argparse.ArgumentParser:
    """
    Parent parser carrying the flags every subcommand accepts.
    """
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--seed", type=int, default=None, help="Seed for every random choice")
    parent.add_argument("--json", action="store_true", help="Print the report as JSON on stdout")
    parent.add_argument("--report", default=None, help="Also write the JSON report to this path")
    return parent


def int_list(text: str) -> List[int]:
    try:
        return [int(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise UsageError(f"expected a comma-separated list of integers, got {text!r}")


def float_list(text: str) -> List[float]:
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise UsageError(f"expected a comma-separated list of numbers, got {text!r}")


def read_model(path: str, model: Type[ModelT]) -> ModelT:
    """
    Load and validate a JSON config file.

    Args:
        path: JSON file path
        model: Pydantic schema

    Returns:
        Validated model instance
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            return model.model_validate_json(f.read())
    except OSError as e:
        raise MeshFormatError(f"cannot read {path}: {e.strerror}")
    except ValidationError as e:
        error = e.errors()[0]
        location = ".".join(str(part) for part in error["loc"])
        raise ParameterError(f"invalid config {path}: {location}: {error['msg']}")


def check_bound(artifact_mesh: str, mesh: Mesh, what: str) -> None:
    if artifact_mesh != mesh.mesh_id:
        raise MismatchError(f"{what} was computed for mesh {artifact_mesh[:12]}, not {mesh.mesh_id[:12]}")


def emit(args: argparse.Namespace, report: Any, summary: str) -> None:
    """
    Publish a subcommand's report.

    Writes the JSON report to `--report` when given, prints it on stdout
    with `--json`, and otherwise prints the one-line summary.
    """
    if isinstance(report, BaseModel):
        text = report.model_dump_json(indent=2)
    else:
        text = json.dumps(report, indent=2, sort_keys=True)
    if args.report:
        try:
            with open(args.report, "w", encoding="utf-8") as f:
                f.write(text + "\n")
        except OSError as e:
            raise ContainerError(f"cannot write report {args.report}: {e.strerror}")
    if args.json:
        sys.stdout.write(text + "\n")
    else:
        sys.stdout.write(summary + "\n")
