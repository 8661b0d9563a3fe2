"""Kobayashi distance along real-analytic paths in a matrix ball.

A path V(t) = sum_k C_k t^k is a truncated power series. The distance from
the origin along it is artanh of the square root of the top eigenvalue of
V(t)* V(t); these eigenvalues are roots of a polynomial with analytic
coefficients, hence Puiseux series in t. ``fit_puiseux`` finds the smallest
branch index K for which the data is a series in t^(1/K).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bsd_core import MatrixBallShape, _check_interior, matrix_from_json, matrix_to_json
from .errors import InsufficientDataError, InvalidInputError, NumericalDegeneracyError

DEFAULT_RATIO = 0.8
DEFAULT_POINTS = 40
DEFAULT_K_MAX = 6
DEFAULT_M = 6
DEFAULT_RTOL = 1e-8


@dataclass(frozen=True)
class AnalyticMatrixPath:
    shape: MatrixBallShape
    coeffs: tuple
    domain_halfwidth: float = 1.0

    def __post_init__(self):
        cs = tuple(self.shape.conform(C) for C in self.coeffs)
        if not cs:
            raise InvalidInputError("a path needs at least one coefficient")
        for C in cs:
            C.setflags(write=False)
        object.__setattr__(self, "coeffs", cs)
        if not self.domain_halfwidth > 0:
            raise InvalidInputError("domain_halfwidth must be positive")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, t: float) -> np.ndarray:
        out = np.zeros((self.shape.rows, self.shape.cols), dtype=complex)
        for C in reversed(self.coeffs):
            out = out * t + C
        return out

    def starts_off_basepoint(self) -> bool:
        return bool(np.any(self.coeffs[0] != 0))

    def check_interior(self, ts) -> None:
        for t in np.asarray(ts, dtype=float):
            if abs(t) > self.domain_halfwidth:
                raise InvalidInputError(f"t = {t!r} outside the certified domain")

    def to_json(self) -> dict:
        return {
            "shape": self.shape.to_json(),
            "coeffs": [matrix_to_json(C) for C in self.coeffs],
            "domain_halfwidth": self.domain_halfwidth,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "AnalyticMatrixPath":
        shape = MatrixBallShape.from_json(doc["shape"])
        coeffs = [matrix_from_json(c) for c in doc["coeffs"]]
        return cls(shape, coeffs, float(doc.get("domain_halfwidth", 1.0)))


@dataclass(frozen=True)
class EigenPathSample:
    ts: np.ndarray
    lambdas: np.ndarray  # shape (len(ts), cols), each row descending

    @property
    def top(self) -> np.ndarray:
        return self.lambdas[:, 0]


@dataclass(frozen=True)
class PuiseuxFit:
    branch_index: int
    coefficients: np.ndarray
    residual: float
    epsilon: float
    converged: bool = True
    tolerance: float = 0.0
    residuals_by_k: dict = field(default_factory=dict)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        powers = np.arange(len(self.coefficients)) / self.branch_index
        return np.power.outer(t, powers) @ self.coefficients

    def to_json(self) -> dict:
        return {
            "branch_index": self.branch_index,
            "coefficients": [float(a) for a in self.coefficients],
            "residual": self.residual,
            "epsilon": self.epsilon,
            "converged": self.converged,
            "tolerance": self.tolerance,
            "residuals_by_k": {str(k): v for k, v in self.residuals_by_k.items()},
        }


def geometric_grid(epsilon: float, n: int = DEFAULT_POINTS, ratio: float = DEFAULT_RATIO, include_zero: bool = False):
    """Increasing grid epsilon * ratio^i, i = n-1..0 (strictly below epsilon is not enforced)."""
    if not (epsilon > 0 and 0 < ratio < 1 and n >= 1):
        raise InvalidInputError("bad geometric grid parameters")
    ts = epsilon * ratio ** np.arange(n - 1, -1, -1, dtype=float)
    if include_zero:
        ts = np.concatenate([[0.0], ts])
    return ts


def eigenvalue_path(path: AnalyticMatrixPath, ts) -> EigenPathSample:
    ts = np.asarray(ts, dtype=float)
    path.check_interior(ts)
    rows = []
    for t in ts:
        V = path(t)
        H = V.conj().T @ V
        H = 0.5 * (H + H.conj().T)
        try:
            lam = np.linalg.eigvalsh(H)
        except np.linalg.LinAlgError as exc:
            raise NumericalDegeneracyError(f"eigensolve failed at t = {t!r}") from exc
        # roundoff can push zero eigenvalues of a PSD matrix slightly negative
        lam = np.maximum(lam, 0.0)
        rows.append(lam[::-1])
    return EigenPathSample(ts, np.array(rows).reshape(len(ts), path.shape.cols))


def distance_along_path(path: AnalyticMatrixPath, ts) -> np.ndarray:
    sample = eigenvalue_path(path, ts)
    norms = np.sqrt(sample.top)
    for n in norms:
        _check_interior(float(n))
    return np.arctanh(norms)


def _fit_fixed_k(ts: np.ndarray, values: np.ndarray, K: int, M: int):
    eps = ts[-1]
    # basis in s = (t/eps)^(1/K) keeps the Vandermonde matrix well scaled
    s = (ts / eps) ** (1.0 / K)
    A = np.vander(s, M + 1, increasing=True)
    b, *_ = np.linalg.lstsq(A, values, rcond=None)
    resid = float(np.max(np.abs(A @ b - values)))
    coeffs = b / eps ** (np.arange(M + 1) / K)
    return coeffs, resid


def fit_puiseux(ts, values, K_max: int = DEFAULT_K_MAX, M: int = DEFAULT_M, rtol: float = DEFAULT_RTOL) -> PuiseuxFit:
    """Smallest K whose least-squares fit sum_{j<=M} a_j t^(j/K) meets tolerance.

    The tolerance is ``rtol`` times the data scale max(1, max|values|).
    Failure is reported through ``converged=False`` with the best K found.
    """
    ts = np.asarray(ts, dtype=float)
    values = np.asarray(values, dtype=float)
    if ts.ndim != 1 or ts.shape != values.shape:
        raise InvalidInputError("ts and values must be 1-d arrays of equal length")
    if len(ts) < M + 2:
        raise InsufficientDataError(f"need more than {M + 1} samples for M = {M}")
    if np.any(np.diff(ts) <= 0) or ts[0] < 0:
        raise InvalidInputError("ts must be nonnegative and strictly increasing")
    if not np.all(np.isfinite(values)):
        raise InvalidInputError("values must be finite")
    tol = rtol * max(1.0, float(np.max(np.abs(values))))
    best = None
    residuals = {}
    for K in range(1, K_max + 1):
        coeffs, resid = _fit_fixed_k(ts, values, K, M)
        residuals[K] = resid
        if best is None or resid < best[2]:
            best = (K, coeffs, resid)
        if resid <= tol:
            return PuiseuxFit(K, coeffs, resid, float(ts[-1]), True, tol, residuals)
    K, coeffs, resid = best
    return PuiseuxFit(K, coeffs, resid, float(ts[-1]), False, tol, residuals)


@dataclass(frozen=True)
class SmoothnessReport:
    second_difference: np.ndarray
    c2_defect_estimate: float
    kink_order: float | None
    gauge_comparison: dict

    def to_json(self) -> dict:
        return {
            "second_difference": [float(x) for x in self.second_difference],
            "c2_defect_estimate": self.c2_defect_estimate,
            "kink_order": self.kink_order,
            "gauge_comparison": self.gauge_comparison,
        }


def _kink(fit_plus: PuiseuxFit, fit_minus: PuiseuxFit, rtol: float):
    """Smallest exponent where the two one-sided expansions of f stop matching.

    Non-integer exponents with a nonzero coefficient count on their own;
    an integer exponent j counts when the j-th one-sided derivatives differ.
    """
    K = math.lcm(fit_plus.branch_index, fit_minus.branch_index)

    def expand(fit):
        step = K // fit.branch_index
        out = np.zeros(step * (len(fit.coefficients) - 1) + 1)
        out[::step] = fit.coefficients
        return out

    cp, cm = expand(fit_plus), expand(fit_minus)
    n = max(len(cp), len(cm))
    cp, cm = np.pad(cp, (0, n - len(cp))), np.pad(cm, (0, n - len(cm)))
    exps = np.arange(n) / K
    eps = min(fit_plus.epsilon, fit_minus.epsilon)
    sp, sm = cp * eps**exps, cm * eps**exps
    scale = max(1.0, float(np.max(np.abs(sp))), float(np.max(np.abs(sm))))
    for j in range(1, n):
        if j % K == 0:
            jump = abs(sp[j] - (-1) ** (j // K) * sm[j])
        else:
            jump = max(abs(sp[j]), abs(sm[j]))
        if jump > rtol * scale:
            return (j // K if j % K == 0 else j / K), cp, cm, K
    return None, cp, cm, K


def classify_smoothness(ts, f_plus, f_minus, f_zero: float, K_max: int = DEFAULT_K_MAX, M: int = DEFAULT_M, jump_rtol: float = 1e-6) -> SmoothnessReport:
    """Advisory regularity report at t = 0 from two-sided samples.

    ``f_plus[i] = f(ts[i])``, ``f_minus[i] = f(-ts[i])``, ``ts > 0``.

    * ``second_difference``: omega(t) = |f(t) - 2 f(0) + f(-t)| / t^2.
    * ``kink_order``: smallest exponent where the one-sided Puiseux
      expansions disagree (1 for a corner, 3 for a jump in the third
      derivative), None if they agree.
    * ``c2_defect_estimate``: max |omega(t) - omega_0| over the inner half of
      the grid, omega_0 the limit of omega.
    * ``gauge_comparison``: class label ("analytic", "C2-holder",
      "C2-log-gauge", "not-C2", "unclassified"), the Holder exponent of
      omega - omega_0, and its ratio to the gauge 1/log(1/t) at the
      innermost sample.

    Nothing here proves (non-)smoothness; it reports fitted behavior.
    """
    ts = np.asarray(ts, dtype=float)
    fp = np.asarray(f_plus, dtype=float)
    fm = np.asarray(f_minus, dtype=float)
    if ts.ndim != 1 or ts.shape != fp.shape or ts.shape != fm.shape:
        raise InvalidInputError("ts, f_plus, f_minus must be 1-d arrays of equal length")
    if len(ts) < 8:
        raise InsufficientDataError("classify_smoothness needs at least 8 sample pairs")
    if np.any(ts <= 0) or np.any(np.diff(ts) <= 0):
        raise InvalidInputError("ts must be positive and strictly increasing")
    M = min(M, len(ts) - 1)

    omega = np.abs(fp - 2.0 * f_zero + fm) / ts**2
    inner = slice(0, max(3, len(ts) // 2))
    t_all = np.concatenate([[0.0], ts])
    fit_p = fit_puiseux(t_all, np.concatenate([[f_zero], fp]), K_max=K_max, M=M)
    fit_m = fit_puiseux(t_all, np.concatenate([[f_zero], fm]), K_max=K_max, M=M)
    converged = fit_p.converged and fit_m.converged

    kink = None
    exponent = None
    if converged:
        kink, cp, cm, K = _kink(fit_p, fit_m, jump_rtol)
        omega_0 = abs(cp[2 * K] + cm[2 * K]) if len(cp) > 2 * K else 0.0
        if kink is None:
            cls = "analytic"
        elif kink <= 2:
            cls = "not-C2"
        else:
            cls = "C2-holder"
            exponent = float(kink - 2)
    else:
        # not a Puiseux series: test omega ~ C + D / log(1/t)
        g = 1.0 / np.log(1.0 / ts[inner])
        A = np.column_stack([np.ones_like(g), g])
        (c, d), *_ = np.linalg.lstsq(A, omega[inner], rcond=None)
        fit_err = float(np.max(np.abs(A @ np.array([c, d]) - omega[inner])))
        omega_0 = float(c)
        if fit_err <= 1e-6 * max(1.0, float(np.max(omega[inner]))) and abs(d) > 1e-9:
            cls = "C2-log-gauge"
            exponent = 0.0
        else:
            cls = "unclassified"

    dev = np.abs(omega - omega_0)
    c2_defect = float(np.max(dev[inner]))
    gauge_ratio = float(dev[0] * math.log(1.0 / ts[0])) if ts[0] < 1 else float("nan")
    gauge = {
        "class": cls,
        "holder_exponent": exponent,
        "log_gauge_ratio": gauge_ratio,
        "omega_limit": float(omega_0),
        "puiseux_converged": converged,
        "branch_index": math.lcm(fit_p.branch_index, fit_m.branch_index) if converged else None,
    }
    return SmoothnessReport(omega, c2_defect, kink, gauge)
