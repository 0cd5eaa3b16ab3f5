"""Deterministic CSV writing helpers shared by the export functions."""

from __future__ import annotations

import os
from typing import Iterable, Sequence


def fmt(value) -> str:
    """Render a cell deterministically.

    Floats use ``repr`` (shortest round-trip form), so identical inputs give
    byte-identical files; bools render as ``true``/``false``.
    """
    if isinstance(value, bool):
        return "true" if value else "false"
    if hasattr(value, "item"):  # numpy scalar (incl. float64, a float subclass)
        return fmt(value.item())
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    """Write rows with a header line, LF newlines, no trailing whitespace."""
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
