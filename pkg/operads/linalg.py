"""
Exact rational linear algebra.

Matrices and tensors are numpy arrays of dtype object holding Fraction
entries; rank, nullspace and determinant go through sympy. Nothing here
ever touches a float.
"""
from fractions import Fraction
from numbers import Integral, Rational

import numpy as np
import sympy

from operads.errors import SchemaError

ZERO = Fraction(0)
ONE = Fraction(1)


def parse_rational(value, path: str = "") -> Fraction:
    if isinstance(value, bool):
        raise SchemaError(path, "expected a rational, got a boolean")
    if isinstance(value, (Integral, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise SchemaError(path, f"not a rational: {value!r}") from None
    # floats are refused: every check here is an exact equality
    raise SchemaError(path, f"expected an integer or a 'p/q' string, got {type(value).__name__}")


def format_rational(value: Fraction) -> str:
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def array(data, shape=None) -> np.ndarray:
    out = np.empty(np.shape(data) if shape is None else shape, dtype=object)
    flat = np.asarray(data, dtype=object).reshape(out.shape)
    for index, entry in np.ndenumerate(flat):
        out[index] = Fraction(entry)
    return out


def zeros(shape) -> np.ndarray:
    out = np.empty(shape, dtype=object)
    out.fill(ZERO)
    return out


def identity(n: int) -> np.ndarray:
    out = zeros((n, n))
    for i in range(n):
        out[i, i] = ONE
    return out


def basis_vector(n: int, i: int) -> np.ndarray:
    out = zeros((n,))
    out[i] = ONE
    return out


def matrix_from_json(data, path: str = "", rows: int | None = None, cols: int | None = None) -> np.ndarray:
    if not isinstance(data, list) or any(not isinstance(row, list) for row in data):
        raise SchemaError(path, "expected a row-major array of arrays")
    width = len(data[0]) if data else (cols or 0)
    if rows is not None and len(data) != rows:
        raise SchemaError(path, f"expected {rows} rows, got {len(data)}")
    out = zeros((len(data), width))
    for i, row in enumerate(data):
        if len(row) != width or (cols is not None and len(row) != cols):
            raise SchemaError(f"{path}/{i}", "ragged or mis-sized row")
        for j, entry in enumerate(row):
            out[i, j] = parse_rational(entry, f"{path}/{i}/{j}")
    return out


def tensor_from_json(data, shape: tuple, path: str = "") -> np.ndarray:
    out = zeros(shape)

    def walk(node, prefix, depth):
        if depth == len(shape):
            out[prefix] = parse_rational(node, path + "".join(f"/{i}" for i in prefix))
            return
        if not isinstance(node, list) or len(node) != shape[depth]:
            raise SchemaError(path + "".join(f"/{i}" for i in prefix),
                              f"expected an array of length {shape[depth]}")
        for i, child in enumerate(node):
            walk(child, prefix + (i,), depth + 1)

    walk(data, (), 0)
    return out


def to_json(tensor):
    """Nested lists of "p/q" strings; indexing a 1-d object array yields bare Fractions."""
    if not isinstance(tensor, np.ndarray):
        return format_rational(tensor)
    if tensor.ndim == 0:
        return format_rational(tensor[()])
    return [to_json(tensor[i]) for i in range(tensor.shape[0])]


def equal(a: np.ndarray, b: np.ndarray) -> bool:
    return a.shape == b.shape and all(x == y for x, y in zip(a.flat, b.flat))


def is_zero(a: np.ndarray) -> bool:
    return all(x == 0 for x in a.flat)


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.kron(a, b)


# ── sympy bridge ────────────────────────────────────────────────────────────

def to_sympy(matrix: np.ndarray) -> sympy.Matrix:
    rows, cols = matrix.shape
    return sympy.Matrix(rows, cols, lambda i, j: sympy.Rational(
        matrix[i, j].numerator, matrix[i, j].denominator))


def from_sympy(matrix: sympy.Matrix) -> np.ndarray:
    out = zeros(matrix.shape)
    for i in range(matrix.rows):
        for j in range(matrix.cols):
            entry = sympy.Rational(matrix[i, j])
            out[i, j] = Fraction(int(entry.p), int(entry.q))
    return out


def rank(matrix: np.ndarray) -> int:
    if 0 in matrix.shape:
        return 0
    return to_sympy(matrix).rank()


def determinant(matrix: np.ndarray) -> Fraction:
    if matrix.shape == (0, 0):
        return ONE
    entry = sympy.Rational(to_sympy(matrix).det())
    return Fraction(int(entry.p), int(entry.q))


def is_invertible(matrix: np.ndarray) -> bool:
    return matrix.shape[0] == matrix.shape[1] and determinant(matrix) != 0


def annihilator(relations: np.ndarray, width: int) -> np.ndarray:
    """
    Rows spanning the functionals that vanish on every row of `relations`.
    Used as the projection onto the quotient ℚ^width / span(relations).
    """
    if relations.shape[0] == 0:
        return identity(width)
    kernel = to_sympy(relations).nullspace()
    if not kernel:
        return zeros((0, width))
    return from_sympy(sympy.Matrix.hstack(*kernel).T)


def solve_factor(target: np.ndarray, projection: np.ndarray) -> np.ndarray | None:
    """
    Finds G with G · projection == target, or None when `target` does not
    vanish on the kernel of `projection`.
    """
    if projection.shape[0] == 0:
        return zeros((target.shape[0], 0)) if is_zero(target) else None
    p = to_sympy(projection)
    t = to_sympy(target)
    try:
        solution, params = p.T.gauss_jordan_solve(t.T)
    except ValueError:
        return None
    if params.shape[0]:
        solution = solution.subs({s: 0 for s in params})
    return from_sympy(solution.T)
