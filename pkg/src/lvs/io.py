"""Matrix Market and one-value-per-line vector files.

Only the ``matrix array|coordinate real general`` variants are accepted.
Parse errors carry the 1-based line number of the offending line.
"""
from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .errors import InputError, MatrixFormatError

CLASSICAL_ENTRY_LIMIT = 10 ** 7
QUANTUM_SIDE_LIMIT = 4096


def _number(tok, lineno):
    try:
        v = float(tok)
    except ValueError:
        raise MatrixFormatError(f"not a number: {tok!r}", lineno) from None
    if not math.isfinite(v):
        raise MatrixFormatError(f"non-finite value {tok!r}", lineno)
    return v


def _index(tok, bound, lineno):
    try:
        i = int(tok)
    except ValueError:
        raise MatrixFormatError(f"not an index: {tok!r}", lineno) from None
    if not 1 <= i <= bound:
        raise MatrixFormatError(f"index {i} outside 1..{bound}", lineno)
    return i - 1


def _content_lines(lines, start):
    for lineno, raw in enumerate(lines[start:], start=start + 1):
        s = raw.strip()
        if s and not s.startswith("%"):
            yield lineno, s.split()


def parse_matrix_market(text, max_entries=CLASSICAL_ENTRY_LIMIT):
    """Parse Matrix Market ``text`` into a dense float array."""
    lines = text.splitlines()
    if not lines:
        raise MatrixFormatError("empty file", 1)
    head = lines[0].split()
    if len(head) != 5 or head[0] != "%%MatrixMarket" or head[1].lower() != "matrix":
        raise MatrixFormatError(f"bad header {lines[0]!r}", 1)
    layout, field, symmetry = (h.lower() for h in head[2:])
    if layout not in ("array", "coordinate"):
        raise MatrixFormatError(f"unknown layout {layout!r}", 1)
    if field != "real" or symmetry != "general":
        raise MatrixFormatError(f"only 'real general' is supported, got '{field} {symmetry}'", 1)
    body = _content_lines(lines, 1)
    try:
        lineno, size = next(body)
    except StopIteration:
        raise MatrixFormatError("missing size line", len(lines)) from None
    want = 2 if layout == "array" else 3
    if len(size) != want:
        raise MatrixFormatError(f"size line needs {want} integers", lineno)
    try:
        dims = [int(t) for t in size]
    except ValueError:
        raise MatrixFormatError(f"size line is not integral: {' '.join(size)}", lineno) from None
    n, d = dims[:2]
    if n < 1 or d < 1:
        raise MatrixFormatError(f"dimensions must be positive, got {n}x{d}", lineno)
    if n * d > max_entries:
        raise InputError(f"{n}x{d} matrix exceeds the limit of {max_entries} entries")
    A = np.zeros((n, d))
    if layout == "array":
        vals = []
        for lineno, toks in body:
            if len(toks) != 1:
                raise MatrixFormatError("array entries need one value per line", lineno)
            vals.append(_number(toks[0], lineno))
        if len(vals) != n * d:
            raise MatrixFormatError(f"expected {n * d} values, found {len(vals)}", len(lines))
        # array format is column-major
        return np.array(vals).reshape(d, n).T.copy()
    nnz, seen = dims[2], 0
    for lineno, toks in body:
        if len(toks) != 3:
            raise MatrixFormatError("coordinate entries need 'row col value'", lineno)
        A[_index(toks[0], n, lineno), _index(toks[1], d, lineno)] = _number(toks[2], lineno)
        seen += 1
    if seen != nnz:
        raise MatrixFormatError(f"header declares {nnz} entries, found {seen}", len(lines))
    return A


def load_matrix(path, fmt=None, max_entries=CLASSICAL_ENTRY_LIMIT):
    """Read a matrix from a Matrix Market (``.mtx``) or comma-separated file."""
    path = Path(path)
    fmt = fmt or ("csv" if path.suffix.lower() == ".csv" else "matrix-market")
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    if fmt == "matrix-market":
        return parse_matrix_market(text, max_entries)
    if fmt != "csv":
        raise InputError(f"unknown matrix format {fmt!r}")
    rows = [(i, ln.split(",")) for i, ln in enumerate(text.splitlines(), 1) if ln.strip()]
    if not rows:
        raise MatrixFormatError("empty file", 1)
    width = len(rows[0][1])
    for i, toks in rows:
        if len(toks) != width:
            raise MatrixFormatError(f"expected {width} columns, found {len(toks)}", i)
    A = np.array([[_number(t.strip(), i) for t in toks] for i, toks in rows])
    if A.size > max_entries:
        raise InputError(f"{A.shape[0]}x{A.shape[1]} matrix exceeds {max_entries} entries")
    return A


def load_vector(path):
    """Read one finite value per line."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    vals = [_number(s.strip(), i) for i, s in enumerate(lines, 1) if s.strip()]
    if not vals:
        raise MatrixFormatError("no values", 1)
    return np.array(vals)


def format_matrix_market(A, layout="array"):
    A = np.asarray(A, dtype=float)
    n, d = A.shape
    out = [f"%%MatrixMarket matrix {layout} real general"]
    if layout == "array":
        out.append(f"{n} {d}")
        out.extend(f"{v:.17g}" for v in A.T.ravel())
    elif layout == "coordinate":
        rows, cols = np.nonzero(A)
        out.append(f"{n} {d} {rows.size}")
        out.extend(f"{i + 1} {j + 1} {A[i, j]:.17g}" for i, j in zip(rows, cols))
    else:
        raise InputError(f"unknown layout {layout!r}")
    return "\n".join(out) + "\n"


def save_matrix(path, A, layout="array"):
    """Write ``A`` in Matrix Market format; values use 17 significant digits."""
    Path(path).write_text(format_matrix_market(A, layout), encoding="utf-8")


def save_vector(path, b):
    Path(path).write_text("".join(f"{v:.17g}\n" for v in np.ravel(b)), encoding="utf-8")


def check_quantum_size(A):
    """Reject matrices whose simulated dilation would exceed the side limit."""
    if max(A.shape) > QUANTUM_SIDE_LIMIT:
        raise InputError(f"{A.shape[0]}x{A.shape[1]} exceeds the quantum simulation limit "
                         f"N <= {QUANTUM_SIDE_LIMIT}")
