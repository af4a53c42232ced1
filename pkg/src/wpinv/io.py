"""Matrix files and run reports.

JSON is canonical::

    {"rows": n, "cols": m, "data": [[re, im], ...]}   # row-major

CSV is a convenience format with one matrix row per line and cells written
``a``, ``a+bi`` or ``a-bi`` (no whitespace inside a cell).
"""

import csv
import hashlib
import io
import json
import re
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np


class MatrixParseError(ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


_NUM = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_CELL = re.compile(rf"^({_NUM})(?:([+-])((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)i)?$")


def parse_cell(text):
    m = _CELL.match(text.strip())
    if not m:
        raise ValueError(f"bad complex literal {text!r}")
    re_part = float(m.group(1))
    im_part = 0.0
    if m.group(2):
        im_part = float(m.group(3))
        if m.group(2) == "-":
            im_part = -im_part
    return complex(re_part, im_part)


def format_cell(z):
    z = complex(z)
    im = z.imag
    sign = "-" if np.signbit(im) else "+"
    return f"{z.real!r}{sign}{abs(im)!r}i"


def matrix_to_dict(M):
    M = np.asarray(M, dtype=np.complex128)
    rows, cols = M.shape
    return {
        "rows": rows,
        "cols": cols,
        "data": [[float(z.real), float(z.imag)] for z in M.reshape(-1)],
    }


def matrix_from_dict(d):
    try:
        rows, cols, data = int(d["rows"]), int(d["cols"]), d["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise MatrixParseError(f"missing or malformed field: {exc}") from exc
    if len(data) != rows * cols:
        raise MatrixParseError(f"expected {rows * cols} entries, got {len(data)}")
    try:
        flat = np.array([complex(float(re_), float(im)) for re_, im in data])
    except (TypeError, ValueError) as exc:
        raise MatrixParseError(f"bad entry: {exc}") from exc
    if not np.all(np.isfinite(flat)):
        raise MatrixParseError("entries must be finite")
    return flat.reshape(rows, cols) if rows * cols else np.zeros((rows, cols), complex)


def read_csv_text(text):
    rows = []
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or all(not cell.strip() for cell in row):
            continue
        try:
            rows.append([parse_cell(cell) for cell in row])
        except ValueError as exc:
            raise MatrixParseError(str(exc), lineno) from None
        if len(rows[-1]) != len(rows[0]):
            raise MatrixParseError(
                f"row has {len(rows[-1])} cells, expected {len(rows[0])}", lineno
            )
    if not rows:
        raise MatrixParseError("empty CSV matrix")
    M = np.array(rows, dtype=np.complex128)
    if not np.all(np.isfinite(M)):
        raise MatrixParseError("entries must be finite")
    return M


def write_csv_text(M):
    M = np.asarray(M, dtype=np.complex128)
    return "".join(",".join(format_cell(z) for z in row) + "\n" for row in M)


def read_matrix(path):
    """Read a matrix file; the format follows the extension (``.csv`` or JSON)."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".csv":
        return read_csv_text(text)
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MatrixParseError(exc.msg, exc.lineno) from None
    return matrix_from_dict(d)


def write_matrix(path, M):
    path = Path(path)
    if path.suffix.lower() == ".csv":
        path.write_text(write_csv_text(M))
    else:
        path.write_text(json.dumps(matrix_to_dict(M)) + "\n")


def digest(paths):
    h = hashlib.sha256()
    for p in paths:
        h.update(Path(p).read_bytes())
    return h.hexdigest()


@dataclass
class RunReport:
    command: list
    inputs_digest: str = ""
    outputs: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    exit_status: int = 0
    notes: list = field(default_factory=list)

    def to_json(self):
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text):
        return cls(**json.loads(text))
