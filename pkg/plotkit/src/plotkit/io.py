"""Readers for the qhdlab run-directory schema."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

DIAGNOSTIC_COLUMNS = ("t", "M", "E", "P", "I", "H", "H_alt", "moment_inertia",
                      "morawetz", "entropy_residual_norm", "boundary_rho")


class ArtifactError(FileNotFoundError):
    """A required artifact or column is missing."""


def _require(path: Path) -> Path:
    if not path.exists():
        raise ArtifactError(f"missing artifact: {path}")
    return path


def read_summary(run_dir: str | Path) -> dict:
    path = _require(Path(run_dir) / "summary.json")
    return json.loads(path.read_text())


def read_csv_columns(path: Path) -> dict[str, np.ndarray]:
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].lstrip().startswith("#")]
    header, body = rows[0], rows[1:]
    if not body:
        raise ArtifactError(f"{path} holds no data rows")
    data = np.array(body, dtype=float)
    return {name: data[:, i] for i, name in enumerate(header)}


def read_diagnostics(run_dir: str | Path) -> dict[str, np.ndarray]:
    cols = read_csv_columns(_require(Path(run_dir) / "diagnostics.csv"))
    for name in DIAGNOSTIC_COLUMNS:
        if name not in cols:
            raise ArtifactError(f"diagnostics.csv lacks column {name!r}")
    return cols


def read_fields(run_dir: str | Path, snapshot: int) -> dict[str, np.ndarray]:
    path = _require(Path(run_dir) / f"fields_{snapshot:04d}.csv")
    cols = read_csv_columns(path)
    for name in ("x", "lambda", "sqrt_rho"):
        if name not in cols:
            raise ArtifactError(f"{path.name} lacks column {name!r}")
    return cols
