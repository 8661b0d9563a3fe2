"""Harish-Chandra matrix balls.

A bounded symmetric domain in its Harish-Chandra realization is the unit
ball of the operator norm on a linear space of ``n x m`` complex matrices.
Three such spaces are supported: the full matrix ball, the polydisk
(diagonal ``n x n`` matrices) and the complex ball (``n x 1`` columns).

All distances use the curvature -4 normalization, d(0, V) = artanh ||V||.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import BoundaryProximityError, InvalidInputError, NumericalDegeneracyError

#: points with operator norm at or above ``1 - BOUNDARY_MARGIN`` are rejected
BOUNDARY_MARGIN = 1e-12


class BallKind(str, enum.Enum):
    FULL = "FullMatrixBall"
    POLYDISK = "Polydisk"
    COMPLEX_BALL = "ComplexBall"


@dataclass(frozen=True)
class MatrixBallShape:
    rows: int
    cols: int
    kind: BallKind = BallKind.FULL

    def __post_init__(self):
        object.__setattr__(self, "kind", BallKind(self.kind))
        if self.rows < 1 or self.cols < 1:
            raise InvalidInputError(f"shape must be positive, got {self.rows}x{self.cols}")
        if self.kind is BallKind.POLYDISK and self.rows != self.cols:
            raise InvalidInputError("Polydisk requires rows == cols")
        if self.kind is BallKind.COMPLEX_BALL and self.cols != 1:
            raise InvalidInputError("ComplexBall requires cols == 1")

    @classmethod
    def polydisk(cls, n: int) -> "MatrixBallShape":
        return cls(n, n, BallKind.POLYDISK)

    @classmethod
    def complex_ball(cls, n: int) -> "MatrixBallShape":
        return cls(n, 1, BallKind.COMPLEX_BALL)

    def conform(self, V) -> np.ndarray:
        """Return ``V`` as a complex array after checking it lies in this space."""
        if isinstance(V, MatrixBallPoint):
            V = V.entries
        A = np.asarray(V, dtype=complex)
        if self.kind is BallKind.COMPLEX_BALL and A.ndim == 1:
            A = A.reshape(-1, 1)
        if self.kind is BallKind.POLYDISK and A.ndim == 1:
            A = np.diag(A)
        if A.shape != (self.rows, self.cols):
            raise InvalidInputError(f"expected a {self.rows}x{self.cols} matrix, got shape {A.shape}")
        if not np.all(np.isfinite(A)):
            raise InvalidInputError("matrix has non-finite entries")
        if self.kind is BallKind.POLYDISK and np.any(A[~np.eye(self.rows, dtype=bool)] != 0):
            raise InvalidInputError("Polydisk matrices must be diagonal")
        return A

    def to_json(self) -> dict:
        return {"rows": self.rows, "cols": self.cols, "kind": self.kind.value}

    @classmethod
    def from_json(cls, doc: dict) -> "MatrixBallShape":
        return cls(int(doc["rows"]), int(doc["cols"]), BallKind(doc.get("kind", BallKind.FULL.value)))


@dataclass(frozen=True)
class MatrixBallPoint:
    """A point of the ball (or, with ``tangent=True``, a tangent vector at 0)."""

    shape: MatrixBallShape
    entries: np.ndarray
    tangent: bool = False

    def __post_init__(self):
        A = self.shape.conform(self.entries)
        A.setflags(write=False)
        object.__setattr__(self, "entries", A)
        if not self.tangent:
            _check_interior(operator_norm(A))

    @property
    def norm(self) -> float:
        return operator_norm(self.entries)


def _check_interior(norm: float) -> None:
    if norm >= 1.0 - BOUNDARY_MARGIN:
        raise BoundaryProximityError(f"operator norm {norm!r} is not safely below 1")


def operator_norm(V) -> float:
    """Largest singular value of ``V``: sup of ||V xi||_2 over unit vectors xi."""
    A = np.atleast_2d(np.asarray(V, dtype=complex))
    if not np.all(np.isfinite(A)):
        raise InvalidInputError("matrix has non-finite entries")
    if A.size == 0:
        return 0.0
    return float(np.linalg.svd(A, compute_uv=False)[0])


def kobayashi_norm(shape: MatrixBallShape, V) -> float:
    """Kobayashi norm of a tangent vector at the origin (= operator norm)."""
    return operator_norm(shape.conform(V))


def distance_from_origin(shape: MatrixBallShape, V) -> float:
    norm = operator_norm(shape.conform(V))
    _check_interior(norm)
    return float(np.arctanh(norm))


def _hermitian_power(H: np.ndarray, power: float) -> np.ndarray:
    H = 0.5 * (H + H.conj().T)
    w, U = np.linalg.eigh(H)
    if np.min(w) <= 0:
        raise NumericalDegeneracyError("normalization factor is not positive definite")
    return (U * w**power) @ U.conj().T


@dataclass(frozen=True)
class Transvection:
    """The automorphism V -> (I-pp*)^(-1/2) (V-p) (I-p*V)^(-1) (I-p*p)^(1/2).

    It sends ``p`` to the origin and preserves the ball.
    """

    shape: MatrixBallShape
    p: np.ndarray
    left: np.ndarray
    right: np.ndarray

    def __call__(self, V) -> np.ndarray:
        V = self.shape.conform(V)
        inner = np.eye(self.shape.cols) - self.p.conj().T @ V
        try:
            # (V - p) @ inv(inner), via a transposed solve
            solved = np.linalg.solve(inner.T, (V - self.p).T).T
        except np.linalg.LinAlgError as exc:
            raise NumericalDegeneracyError("I - p*V is singular") from exc
        out = self.left @ solved @ self.right
        if self.shape.kind is BallKind.POLYDISK:
            out = np.diag(np.diag(out))
        return out


def transvection_to_origin(shape: MatrixBallShape, p) -> Transvection:
    P = shape.conform(p)
    _check_interior(operator_norm(P))
    left = _hermitian_power(np.eye(shape.rows) - P @ P.conj().T, -0.5)
    right = _hermitian_power(np.eye(shape.cols) - P.conj().T @ P, 0.5)
    return Transvection(shape, P, left, right)


def kobayashi_distance(shape: MatrixBallShape, p, q) -> float:
    P = shape.conform(p)
    Q = shape.conform(q)
    _check_interior(operator_norm(Q))
    if np.array_equal(P, Q):
        _check_interior(operator_norm(P))
        return 0.0
    return distance_from_origin(shape, transvection_to_origin(shape, P)(Q))


def matrix_to_json(V) -> dict:
    A = np.atleast_2d(np.asarray(V, dtype=complex))
    return {
        "rows": int(A.shape[0]),
        "cols": int(A.shape[1]),
        "re": A.real.tolist(),
        "im": A.imag.tolist(),
    }


def matrix_from_json(doc: dict) -> np.ndarray:
    try:
        re = np.asarray(doc["re"], dtype=float)
        im = np.asarray(doc.get("im", np.zeros_like(re)), dtype=float)
        rows, cols = int(doc["rows"]), int(doc["cols"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInputError(f"malformed matrix document: {exc}") from exc
    if re.shape != (rows, cols) or im.shape != (rows, cols):
        raise InvalidInputError(f"matrix document does not match declared shape {rows}x{cols}")
    return re + 1j * im
