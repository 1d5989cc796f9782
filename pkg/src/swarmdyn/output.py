"""Lossless CSV/JSON emission with atomic writes.

Numbers are printed with 17 significant digits so a round trip through
text reproduces the binary doubles exactly; files are written to a
temporary sibling and renamed into place so readers never observe a
partial file.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .engine import Trajectory

__all__ = [
    "format_value",
    "write_csv",
    "write_json",
    "trajectory_rows",
]


def format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def _atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    """Comma-separated, header row, UNIX line endings, atomic replace."""
    lines = [",".join(header)]
    lines.extend(",".join(format_value(v) for v in row) for row in rows)
    _atomic_write(Path(path), "\n".join(lines) + "\n")


def write_json(path, payload) -> None:
    """UTF-8 JSON with stable (sorted) key order, atomic replace."""
    _atomic_write(Path(path), json.dumps(payload, indent=2, sort_keys=True) + "\n")


def trajectory_rows(traj: Trajectory, labels: Sequence[str]):
    """Rows (t, *components[, u]) for a recorded trajectory."""
    if traj.states.shape[1] != len(labels):
        raise ValueError(
            f"expected {traj.states.shape[1]} component labels, got {len(labels)}"
        )
    header = ["t", *labels]
    if traj.controls is not None:
        header.append("u")
    rows = []
    for i, t in enumerate(traj.times):
        row = [t, *traj.states[i]]
        if traj.controls is not None:
            row.append(traj.controls[i])
        rows.append(row)
    return header, rows
