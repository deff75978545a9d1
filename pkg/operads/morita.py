"""
One-dimensional modular operads and dioperads as algebra.

A one-dimensional modular operad is a non-unital associative algebra with a
trace; a one-dimensional modular dioperad is a Morita context (A, B, Q, R,
alpha, beta) with traces trA, trB into a common space M. Everything is given
by structure constants and checked exhaustively over basis elements.

Conventions (all tensors are Fraction object arrays):
    algebra     mult[i, j, k]   e_i · e_j = Σ_k mult[i, j, k] e_k
    bimodule    left[a, x, y]   a · x     = Σ_y left[a, x, y] e_y
                right[x, b, y]  x · b     = Σ_y right[x, b, y] e_y
    pairing     alpha[q, r, a]  alpha(q, r) ∈ A,   beta[r, q, b] ∈ B
    trace       trA[m, a]       an M-valued linear map on A
"""
import logging
from dataclasses import dataclass

import numpy as np

from operads import linalg
from operads.errors import SchemaError
from operads.report import CheckReport

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class FinAlgebra:
    dim: int
    mult: np.ndarray
    unit: np.ndarray | None = None

    def product(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return np.tensordot(b, np.tensordot(a, self.mult, axes=(0, 0)), axes=(0, 0))


@dataclass(frozen=True, eq=False)
class Bimodule:
    dim: int
    left: np.ndarray
    right: np.ndarray


@dataclass(frozen=True, eq=False)
class MoritaData:
    A: FinAlgebra
    B: FinAlgebra
    Q: Bimodule   # (A, B)-bimodule
    R: Bimodule   # (B, A)-bimodule
    alpha: np.ndarray
    beta: np.ndarray
    m_dim: int
    trA: np.ndarray
    trB: np.ndarray


@dataclass(frozen=True, eq=False)
class BalancedTensor:
    dim: int
    projection: np.ndarray  # dim × (dim X · dim Y)


def _mismatch(lhs: np.ndarray, rhs: np.ndarray):
    """First index (over all but the last axis) where the two tensors differ."""
    for index in np.ndindex(*lhs.shape[:-1]):
        if not linalg.equal(lhs[index], rhs[index]):
            return [int(i) for i in index]
    return None


def _compare(report: CheckReport, rule: str, message: str, lhs, rhs) -> None:
    report.checked += 1
    witness = _mismatch(lhs, rhs)
    if witness is not None:
        report.fail(rule, message, witness)


# ── constituent axioms ──────────────────────────────────────────────────────

def check_associative(algebra: FinAlgebra, rule: str = "associativity", report: CheckReport | None = None,
                      name: str = "A") -> CheckReport:
    report = report or CheckReport(f"algebra {name}")
    c = algebra.mult
    # (e_i e_j) e_k against e_i (e_j e_k), witness is the basis triple
    outer = np.tensordot(c, c, axes=([2], [0]))
    inner = np.transpose(np.tensordot(c, c, axes=([2], [1])), (2, 0, 1, 3))
    _compare(report, rule, f"{name} is not associative", outer, inner)
    if algebra.unit is not None:
        eye = linalg.identity(algebra.dim)
        _compare(report, rule, f"{name}: unit fails on the left",
                 np.tensordot(algebra.unit, c, axes=(0, 0)), eye)
        _compare(report, rule, f"{name}: unit fails on the right",
                 np.tensordot(c, algebra.unit, axes=([1], [0])), eye)
    return report


def check_bimodule(module: Bimodule, left_alg: FinAlgebra, right_alg: FinAlgebra, name: str = "Q",
                   report: CheckReport | None = None) -> CheckReport:
    report = report or CheckReport(f"bimodule {name}")
    L, R = module.left, module.right
    rule = "bimodule"
    _compare(report, rule, f"{name}: (aa')x != a(a'x)",
             np.tensordot(left_alg.mult, L, axes=([2], [0])),
             np.transpose(np.tensordot(L, L, axes=([2], [1])), (2, 0, 1, 3)))
    _compare(report, rule, f"{name}: (xb)b' != x(bb')",
             np.tensordot(R, R, axes=([2], [0])),
             np.transpose(np.tensordot(R, right_alg.mult, axes=([1], [2])), (0, 2, 3, 1)))
    _compare(report, rule, f"{name}: (ax)b != a(xb)",
             np.tensordot(L, R, axes=([2], [0])),
             np.transpose(np.tensordot(R, L, axes=([2], [1])), (2, 0, 1, 3)))
    eye = linalg.identity(module.dim)
    if left_alg.unit is not None:
        _compare(report, rule, f"{name}: unit of the left algebra acts non-trivially",
                 np.tensordot(left_alg.unit, L, axes=(0, 0)), eye)
    if right_alg.unit is not None:
        _compare(report, rule, f"{name}: unit of the right algebra acts non-trivially",
                 np.tensordot(R, right_alg.unit, axes=([1], [0])), eye)
    return report


def check_trace(algebra: FinAlgebra, trace: np.ndarray, rule: str = "trace", report: CheckReport | None = None,
                name: str = "A") -> CheckReport:
    report = report or CheckReport(f"trace on {name}")
    values = np.tensordot(algebra.mult, trace, axes=([2], [1]))
    _compare(report, rule, f"tr({name}) is not a trace: tr(ab) != tr(ba)", values, np.transpose(values, (1, 0, 2)))
    return report


# ── balanced tensor products ────────────────────────────────────────────────

def _balance_relations(X: Bimodule, Y: Bimodule, middle_dim: int) -> list:
    """Rows (x·b)⊗y − x⊗(b·y) in X⊗Y coordinates."""
    rows = []
    for i in range(X.dim):
        for k in range(middle_dim):
            for j in range(Y.dim):
                rows.append(linalg.kron(X.right[i, k], linalg.basis_vector(Y.dim, j))
                            - linalg.kron(linalg.basis_vector(X.dim, i), Y.left[k, j]))
    return rows


def _cyclic_relations(X: Bimodule, Y: Bimodule, outer_dim: int) -> list:
    """Rows (a·x)⊗y − x⊗(y·a): the coinvariants under the outer algebra."""
    rows = []
    for i in range(X.dim):
        for a in range(outer_dim):
            for j in range(Y.dim):
                rows.append(linalg.kron(X.left[a, i], linalg.basis_vector(Y.dim, j))
                            - linalg.kron(linalg.basis_vector(X.dim, i), Y.right[j, a]))
    return rows


def _stack(rows: list, width: int) -> np.ndarray:
    return np.array(rows, dtype=object).reshape((len(rows), width)) if rows else linalg.zeros((0, width))


def balanced_tensor(X: Bimodule, Y: Bimodule) -> BalancedTensor:
    """X ⊗_B Y for X a right B-module and Y a left B-module."""
    middle = X.right.shape[1]
    if Y.left.shape[0] != middle:
        raise ValueError(f"middle algebras differ: {middle} vs {Y.left.shape[0]}")
    width = X.dim * Y.dim
    projection = linalg.annihilator(_stack(_balance_relations(X, Y, middle), width), width)
    return BalancedTensor(projection.shape[0], projection)


# ── the checkers ────────────────────────────────────────────────────────────

def _pairing_checks(report: CheckReport, name: str, pairing: np.ndarray, X: Bimodule, Y: Bimodule,
                    target: FinAlgebra) -> None:
    """pairing: X × Y → T is a (T, T)-bimodule map balanced over the middle algebra."""
    _compare(report, "i", f"{name}(a·x, y) != a·{name}(x, y)",
             np.tensordot(X.left, pairing, axes=([2], [0])),
             np.transpose(np.tensordot(pairing, target.mult, axes=([2], [1])), (2, 0, 1, 3)))
    _compare(report, "i", f"{name}(x, y·a) != {name}(x, y)·a",
             np.transpose(np.tensordot(pairing, Y.right, axes=([1], [2])), (0, 2, 3, 1)),
             np.tensordot(pairing, target.mult, axes=([2], [0])))
    _compare(report, "i", f"{name}(x·b, y) != {name}(x, b·y)",
             np.tensordot(X.right, pairing, axes=([2], [0])),
             np.transpose(np.tensordot(Y.left, pairing, axes=([2], [1])), (2, 0, 1, 3)))


def _triple_check(report: CheckReport, first: str, pair_xy: np.ndarray, pair_yx: np.ndarray, Z: Bimodule) -> None:
    """pair_xy(z, y)·z' = z·pair_yx(y, z') on Z ⊗ Y ⊗ Z."""
    second = "beta" if first == "alpha" else "alpha"
    _compare(report, "iii", f"{first}(z, y)·z' != z·{second}(y, z')",
             np.tensordot(pair_xy, Z.left, axes=([2], [0])),
             np.transpose(np.tensordot(pair_yx, Z.right, axes=([2], [1])), (2, 0, 1, 3)))


def check_morita(data: MoritaData) -> CheckReport:
    """
    Bullets: (i) alpha, beta are bimodule maps; (ii) trA, trB are traces;
    (iii) the two associativity compatibilities; (iv) trA∘alpha = trB∘beta on
    the coinvariant quotient of Q ⊗_B R. The quotient projection and the two
    factored maps are kept in the report details.
    """
    report = CheckReport("morita context")
    A, B, Q, R = data.A, data.B, data.Q, data.R
    if A.unit is None or B.unit is None:
        logger.warning("⚠️ Morita data without units: bimodule balance is checked as given")

    check_associative(A, "algebra", report, "A")
    check_associative(B, "algebra", report, "B")
    check_bimodule(Q, A, B, "Q", report)
    check_bimodule(R, B, A, "R", report)

    _pairing_checks(report, "alpha", data.alpha, Q, R, A)
    _pairing_checks(report, "beta", data.beta, R, Q, B)

    check_trace(A, data.trA, "ii", report, "A")
    check_trace(B, data.trB, "ii", report, "B")

    _triple_check(report, "alpha", data.alpha, data.beta, Q)
    _triple_check(report, "beta", data.beta, data.alpha, R)

    width = Q.dim * R.dim
    via_a = np.tensordot(data.alpha, data.trA, axes=([2], [1])).reshape((width, data.m_dim)).T
    via_b = np.transpose(np.tensordot(data.beta, data.trB, axes=([2], [1])), (1, 0, 2)).reshape(
        (width, data.m_dim)).T
    relations = _balance_relations(Q, R, B.dim) + _cyclic_relations(Q, R, A.dim)
    projection = linalg.annihilator(_stack(relations, width), width)
    factor_a = linalg.solve_factor(via_a, projection)
    factor_b = linalg.solve_factor(via_b, projection)
    report.checked += 1
    report.details.update({"quotient_dim": int(projection.shape[0]), "projection": linalg.to_json(projection)})
    if factor_a is None or factor_b is None:
        report.fail("iv", "a trace composite does not descend to the coinvariant quotient",
                    {"trA∘alpha": factor_a is not None, "trB∘beta": factor_b is not None})
    else:
        report.details.update({"trA_alpha": linalg.to_json(factor_a), "trB_beta": linalg.to_json(factor_b)})
        if not linalg.equal(factor_a, factor_b):
            report.fail("iv", "trA∘alpha and trB∘beta differ on the quotient",
                        _mismatch(factor_a.T, factor_b.T))

    logger.info("%s", report.summary())
    return report


def check_1d_operad(algebra: FinAlgebra, m_dim: int, trace: np.ndarray) -> CheckReport:
    """A non-unital associative algebra with an M-valued trace."""
    report = CheckReport("1-dimensional modular operad")
    if trace.shape != (m_dim, algebra.dim):
        report.fail("shape", f"trace must be {m_dim}×{algebra.dim}, got {trace.shape}")
        return report
    check_associative(FinAlgebra(algebra.dim, algebra.mult), "associativity", report)
    check_trace(algebra, trace, "trace", report)
    logger.info("%s", report.summary())
    return report


# ── builders ────────────────────────────────────────────────────────────────

def matrix_algebra(n: int) -> FinAlgebra:
    """n×n matrices with E_ij at index n*i + j."""
    mult = linalg.zeros((n * n,) * 3)
    for i in range(n):
        for j in range(n):
            for l in range(n):
                mult[n * i + j, n * j + l, n * i + l] = linalg.ONE
    unit = linalg.zeros((n * n,))
    for i in range(n):
        unit[n * i + i] = linalg.ONE
    return FinAlgebra(n * n, mult, unit)


def matrix_trace(n: int) -> np.ndarray:
    out = linalg.zeros((1, n * n))
    for i in range(n):
        out[0, n * i + i] = linalg.ONE
    return out


def ground_field() -> FinAlgebra:
    return FinAlgebra(1, linalg.array([[[1]]]), linalg.array([1]))


def matrix_algebra_example(n: int = 2) -> MoritaData:
    """A = n×n matrices, B = ℚ, Q = columns, R = rows, alpha = outer product, beta = dot product."""
    A, B = matrix_algebra(n), ground_field()
    q_left = linalg.zeros((n * n, n, n))
    r_right = linalg.zeros((n, n * n, n))
    alpha = linalg.zeros((n, n, n * n))
    beta = linalg.zeros((n, n, 1))
    for i in range(n):
        for j in range(n):
            q_left[n * i + j, j, i] = linalg.ONE   # E_ij e_j = e_i
            r_right[i, n * i + j, j] = linalg.ONE  # f_i E_ij = f_j
            alpha[i, j, n * i + j] = linalg.ONE
        beta[i, i, 0] = linalg.ONE
    scalar_side = linalg.zeros((n, 1, n))
    scalar_left = linalg.zeros((1, n, n))
    for i in range(n):
        scalar_side[i, 0, i] = linalg.ONE
        scalar_left[0, i, i] = linalg.ONE
    Q = Bimodule(n, q_left, scalar_side)
    R = Bimodule(n, scalar_left, r_right)
    return MoritaData(A, B, Q, R, alpha, beta, 1, matrix_trace(n), linalg.identity(1))


def identity_context(algebra: FinAlgebra, trace: np.ndarray) -> MoritaData:
    """A = B = Q = R with every action and pairing given by the product."""
    c = algebra.mult
    regular = Bimodule(algebra.dim, c, c)
    return MoritaData(algebra, algebra, regular, regular, c, c, trace.shape[0], trace, trace)


# ── JSON ────────────────────────────────────────────────────────────────────

def _natural(data: dict, name: str, path: str) -> int:
    value = data.get(name)
    if not isinstance(value, int) or isinstance(value, bool) or value < 0:
        raise SchemaError(f"{path}/{name}", "expected a non-negative integer")
    return value


def _only(data, allowed: set, path: str) -> None:
    if not isinstance(data, dict):
        raise SchemaError(path, "expected an object")
    unknown = set(data) - allowed
    if unknown:
        raise SchemaError(f"{path}/{sorted(unknown)[0]}", "unknown key")


def algebra_from_json(data, path: str = "") -> FinAlgebra:
    _only(data, {"dim", "mult", "unit"}, path)
    d = _natural(data, "dim", path)
    mult = linalg.tensor_from_json(data.get("mult"), (d, d, d), f"{path}/mult")
    unit = data.get("unit")
    return FinAlgebra(d, mult, None if unit is None else linalg.tensor_from_json(unit, (d,), f"{path}/unit"))


def bimodule_from_json(data, left_dim: int, right_dim: int, path: str = "") -> Bimodule:
    _only(data, {"dim", "left", "right"}, path)
    d = _natural(data, "dim", path)
    return Bimodule(d, linalg.tensor_from_json(data.get("left"), (left_dim, d, d), f"{path}/left"),
                    linalg.tensor_from_json(data.get("right"), (d, right_dim, d), f"{path}/right"))


def morita_from_json(data, path: str = "") -> MoritaData:
    _only(data, {"A", "B", "Q", "R", "alpha", "beta", "M", "trA", "trB"}, path)
    A = algebra_from_json(data.get("A"), f"{path}/A")
    B = algebra_from_json(data.get("B"), f"{path}/B")
    Q = bimodule_from_json(data.get("Q"), A.dim, B.dim, f"{path}/Q")
    R = bimodule_from_json(data.get("R"), B.dim, A.dim, f"{path}/R")
    m = _natural(data, "M", path)
    return MoritaData(
        A, B, Q, R,
        linalg.tensor_from_json(data.get("alpha"), (Q.dim, R.dim, A.dim), f"{path}/alpha"),
        linalg.tensor_from_json(data.get("beta"), (R.dim, Q.dim, B.dim), f"{path}/beta"),
        m,
        linalg.matrix_from_json(data.get("trA"), f"{path}/trA", m, A.dim),
        linalg.matrix_from_json(data.get("trB"), f"{path}/trB", m, B.dim),
    )


def operad_from_json(data, path: str = "") -> tuple[FinAlgebra, int, np.ndarray]:
    _only(data, {"A", "M", "tr"}, path)
    A = algebra_from_json(data.get("A"), f"{path}/A")
    m = _natural(data, "M", path)
    return A, m, linalg.matrix_from_json(data.get("tr"), f"{path}/tr", m, A.dim)


def algebra_to_json(algebra: FinAlgebra) -> dict:
    out = {"dim": algebra.dim, "mult": linalg.to_json(algebra.mult)}
    if algebra.unit is not None:
        out["unit"] = linalg.to_json(algebra.unit)
    return out


def morita_to_json(data: MoritaData) -> dict:
    def bimodule(x: Bimodule) -> dict:
        return {"dim": x.dim, "left": linalg.to_json(x.left), "right": linalg.to_json(x.right)}

    return {
        "A": algebra_to_json(data.A), "B": algebra_to_json(data.B),
        "Q": bimodule(data.Q), "R": bimodule(data.R),
        "alpha": linalg.to_json(data.alpha), "beta": linalg.to_json(data.beta),
        "M": data.m_dim, "trA": linalg.to_json(data.trA), "trB": linalg.to_json(data.trB),
    }
