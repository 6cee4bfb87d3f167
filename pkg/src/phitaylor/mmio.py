"""Matrix Market reading and writing.

Coordinate files become :class:`SparseMatrix`, array files dense ndarrays.
Errors carry the 1-based line number of the offending line.
"""
from pathlib import Path

import numpy as np

from .exceptions import MatrixMarketError
from .matrix import SparseMatrix

FORMATS = ("coordinate", "array")
FIELDS = ("real", "double", "integer", "complex", "pattern")
SYMMETRIES = ("general", "symmetric", "skew-symmetric", "hermitian")


def _parse_header(line, lineno):
    tokens = line.split()
    if len(tokens) != 5 or tokens[0] != "%%MatrixMarket" or tokens[1].lower() != "matrix":
        raise MatrixMarketError("expected '%%MatrixMarket matrix <format> <field> <symmetry>'",
                                lineno)
    fmt, field, symmetry = (t.lower() for t in tokens[2:])
    if fmt not in FORMATS:
        raise MatrixMarketError(f"unknown format {fmt!r}", lineno)
    if field not in FIELDS:
        raise MatrixMarketError(f"unknown field {field!r}", lineno)
    if symmetry not in SYMMETRIES:
        raise MatrixMarketError(f"unknown symmetry {symmetry!r}", lineno)
    if fmt == "array" and field == "pattern":
        raise MatrixMarketError("array format cannot have a pattern field", lineno)
    if symmetry == "hermitian" and field != "complex":
        raise MatrixMarketError("hermitian symmetry requires a complex field", lineno)
    return fmt, field, symmetry


def _content_lines(lines, start):
    for lineno, raw in enumerate(lines[start:], start=start + 1):
        stripped = raw.strip()
        if stripped and not stripped.startswith("%"):
            yield lineno, stripped


def _value(tokens, field, lineno):
    try:
        if field == "complex":
            if len(tokens) != 2:
                raise ValueError
            return complex(float(tokens[0]), float(tokens[1]))
        if field == "integer":
            (tok,) = tokens
            return float(int(tok))
        (tok,) = tokens
        return float(tok)
    except ValueError:
        raise MatrixMarketError(f"bad {field} value {' '.join(tokens)!r}", lineno) from None


def _size(tokens, count, lineno):
    try:
        dims = [int(t) for t in tokens]
    except ValueError:
        raise MatrixMarketError(f"bad size line {' '.join(tokens)!r}", lineno) from None
    if len(dims) != count or any(d < 0 for d in dims):
        raise MatrixMarketError(f"size line needs {count} nonnegative integers", lineno)
    return dims


def read_matrix_market(path):
    """Parse a Matrix Market file.

    Symmetric, skew-symmetric and hermitian storage is expanded to the full
    matrix; duplicate coordinates are summed. Integer data is returned as
    float64 and pattern entries as ones.
    """
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines:
        raise MatrixMarketError("empty file", 1)
    fmt, field, symmetry = _parse_header(lines[0], 1)
    body = _content_lines(lines, 1)
    try:
        size_lineno, size_line = next(body)
    except StopIteration:
        raise MatrixMarketError("missing size line", len(lines)) from None
    dtype = np.complex128 if field == "complex" else np.float64
    if fmt == "coordinate":
        return _read_coordinate(body, size_lineno, size_line, field, symmetry, dtype,
                                len(lines))
    return _read_array(body, size_lineno, size_line, field, symmetry, dtype, len(lines))


def _mirror(value, symmetry):
    if symmetry == "skew-symmetric":
        return -value
    if symmetry == "hermitian":
        return np.conj(value)
    return value


def _read_coordinate(body, size_lineno, size_line, field, symmetry, dtype, n_lines):
    n_rows, n_cols, nnz = _size(size_line.split(), 3, size_lineno)
    if symmetry != "general" and n_rows != n_cols:
        raise MatrixMarketError(f"{symmetry} matrix must be square", size_lineno)
    rows, cols, vals = [], [], []
    n_value_tokens = {"pattern": 0, "complex": 2}.get(field, 1)
    count = 0
    for lineno, line in body:
        if count == nnz:
            raise MatrixMarketError(f"more than the declared {nnz} entries", lineno)
        tokens = line.split()
        if len(tokens) != 2 + n_value_tokens:
            raise MatrixMarketError(
                f"expected {2 + n_value_tokens} fields, got {len(tokens)}", lineno)
        try:
            i, j = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise MatrixMarketError(f"bad index pair {tokens[0]!r} {tokens[1]!r}",
                                    lineno) from None
        if not (1 <= i <= n_rows and 1 <= j <= n_cols):
            raise MatrixMarketError(
                f"index ({i}, {j}) out of range for {n_rows}x{n_cols}", lineno)
        if symmetry != "general" and i < j:
            raise MatrixMarketError(
                f"entry ({i}, {j}) above the diagonal in {symmetry} storage", lineno)
        value = 1.0 if field == "pattern" else _value(tokens[2:], field, lineno)
        if symmetry == "skew-symmetric" and i == j:
            raise MatrixMarketError("skew-symmetric storage cannot hold diagonal entries",
                                    lineno)
        rows.append(i - 1)
        cols.append(j - 1)
        vals.append(value)
        if symmetry != "general" and i != j:
            rows.append(j - 1)
            cols.append(i - 1)
            vals.append(_mirror(value, symmetry))
        count += 1
    if count < nnz:
        raise MatrixMarketError(f"truncated body: {count} of {nnz} entries", n_lines)
    return SparseMatrix.from_coo(np.array(rows, dtype=np.int64),
                                 np.array(cols, dtype=np.int64),
                                 np.array(vals, dtype=dtype), (n_rows, n_cols))


def _read_array(body, size_lineno, size_line, field, symmetry, dtype, n_lines):
    n_rows, n_cols = _size(size_line.split(), 2, size_lineno)
    if symmetry != "general" and n_rows != n_cols:
        raise MatrixMarketError(f"{symmetry} matrix must be square", size_lineno)
    # column-major; symmetric kinds store the lower triangle only
    if symmetry == "general":
        positions = [(i, j) for j in range(n_cols) for i in range(n_rows)]
    elif symmetry == "skew-symmetric":
        positions = [(i, j) for j in range(n_cols) for i in range(j + 1, n_rows)]
    else:
        positions = [(i, j) for j in range(n_cols) for i in range(j, n_rows)]
    out = np.zeros((n_rows, n_cols), dtype=dtype)
    k = 0
    for lineno, line in body:
        if k == len(positions):
            raise MatrixMarketError(f"more than the declared {len(positions)} values", lineno)
        i, j = positions[k]
        value = _value(line.split(), field, lineno)
        out[i, j] = value
        if symmetry != "general" and i != j:
            out[j, i] = _mirror(value, symmetry)
        k += 1
    if k < len(positions):
        raise MatrixMarketError(f"truncated body: {k} of {len(positions)} values", n_lines)
    return out


def _fmt(value, field):
    if field == "complex":
        return f"{float(value.real)!r} {float(value.imag)!r}"
    return repr(float(value))


def write_matrix_market(path, matrix, comment=None):
    """Write ``matrix`` in general storage.

    Sparse input is written in coordinate format in row-major order of the
    CSR structure; dense input in array format. Values use ``repr`` so the
    file reads back bit-identically.
    """
    lines = []
    if isinstance(matrix, SparseMatrix):
        field = "complex" if np.iscomplexobj(matrix.data) else "real"
        lines.append(f"%%MatrixMarket matrix coordinate {field} general")
        if comment:
            lines += [f"% {c}" for c in comment.splitlines()]
        n_rows, n_cols = matrix.shape
        lines.append(f"{n_rows} {n_cols} {matrix.nnz}")
        indptr, indices, data = matrix.indptr, matrix.indices, matrix.data
        for i in range(n_rows):
            for k in range(indptr[i], indptr[i + 1]):
                lines.append(f"{i + 1} {indices[k] + 1} {_fmt(data[k], field)}")
    else:
        matrix = np.asarray(matrix)
        if matrix.ndim != 2:
            raise ValueError(f"expected a 2-D array, got shape {matrix.shape}")
        field = "complex" if np.iscomplexobj(matrix) else "real"
        lines.append(f"%%MatrixMarket matrix array {field} general")
        if comment:
            lines += [f"% {c}" for c in comment.splitlines()]
        lines.append(f"{matrix.shape[0]} {matrix.shape[1]}")
        lines += [_fmt(v, field) for v in matrix.T.ravel()]
    Path(path).write_text("\n".join(lines) + "\n")
