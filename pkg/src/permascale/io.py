"""Text formats: matrix files, GridFunction JSON, experiment CSV."""
import csv
import io
import re

import numpy as np

from .errors import DimensionError
from .funcspace import GridFunction

_SEP = re.compile(r"[,\s]+")


def parse_matrix(text):
    """Parse one row per line, entries split by commas and/or whitespace.

    Blank lines and lines starting with ``#`` are skipped.
    """
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            rows.append([float(tok) for tok in _SEP.split(stripped) if tok])
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    if not rows:
        raise ValueError("no matrix rows found")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise DimensionError("rows have different lengths")
    return np.array(rows, dtype=np.float64)


def read_matrix(path):
    with open(path, encoding="utf-8") as fh:
        return parse_matrix(fh.read())


def format_matrix(A):
    return "".join(",".join(repr(float(v)) for v in row) + "\n" for row in np.asarray(A))


def write_matrix(path, A):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_matrix(A))


def read_grid_function(path):
    with open(path, encoding="utf-8") as fh:
        return GridFunction.from_json(fh.read())


def format_csv(header, rows):
    """RFC 4180 CSV; floats use the shortest round-trip repr."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(v)) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def parse_csv(text):
    """Read CSV produced by :func:`format_csv` back into typed columns.

    Returns ``(header, rows)`` where numeric cells become ints or floats.
    """
    reader = csv.reader(io.StringIO(text, newline=""))
    header = next(reader)
    rows = []
    for raw in reader:
        if len(raw) != len(header):
            raise ValueError(f"row has {len(raw)} cells, header has {len(header)}")
        rows.append([_number(cell) for cell in raw])
    return header, rows


def _number(cell):
    try:
        return int(cell)
    except ValueError:
        pass
    try:
        return float(cell)
    except ValueError:
        return cell
