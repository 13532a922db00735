"""Report emission helpers: provenance headers and CSV writing.

Every report starts with comment lines recording the tool version, the
seed, and a short digest of each input file, so a report can be traced
back to the exact inputs that produced it. Headers carry no timestamps;
identical runs must produce identical bytes.
"""
from __future__ import annotations

import csv
import hashlib
import io
from pathlib import Path
from typing import Iterable, Sequence

from . import __version__

DIGEST_CHARS = 12


def file_digest(path) -> str:
    """First 12 hex chars of the file's sha256."""
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()[:DIGEST_CHARS]


def provenance_lines(seed: int | None,
                     inputs: Sequence[tuple[str, object]]) -> list[str]:
    """Header comments: version, seed, one digest line per named input."""
    lines = [f"# slanglex {__version__}"]
    if seed is not None:
        lines.append(f"# seed: {seed}")
    for name, path in inputs:
        lines.append(f"# input {name}: sha256:{file_digest(path)}")
    return lines


def write_csv(path, fieldnames: Sequence[str], rows: Iterable[dict],
              header_lines: Sequence[str] = ()) -> None:
    buf = io.StringIO()
    for line in header_lines:
        buf.write(line + "\n")
    writer = csv.DictWriter(buf, fieldnames=list(fieldnames), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def write_lines(path, lines: Iterable[str],
                header_lines: Sequence[str] = ()) -> None:
    out = list(header_lines) + list(lines)
    Path(path).write_text("\n".join(out) + "\n", encoding="utf-8")


def fnum(x: float) -> str:
    """Fixed-point float formatting shared by all reports."""
    return f"{x:.6f}"


def summary_line(command: str, **fields) -> str:
    """One machine-readable line per analysis: `summary <cmd> k=v ...`."""
    parts = [f"summary {command}"]
    for key, value in fields.items():
        if isinstance(value, float):
            value = fnum(value)
        parts.append(f"{key}={value}")
    return " ".join(parts)
