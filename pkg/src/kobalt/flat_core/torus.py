"""Flat tori as the Teichmuller space T_{1,1}.

A marked torus is C / (Z + tau Z). The marking identifies the curve class
(p, q) with the lattice vector p + q tau. A quadratic differential is
q = c dz^2; its natural coordinate is zeta = sqrt(c) z, in which the
lattice is spanned by sqrt(c) and sqrt(c) tau.

Measured foliations on the torus are linear: they are determined by the
signed transverse measures (m1, m2) of the two basis curves, up to a global
sign. ``TorusFoliation`` keeps both the covector v on its defining torus and
these periods, so it can be evaluated on any other marked torus.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidInputError

DET_TOL = 1e-12


@dataclass(frozen=True)
class FlatTorus:
    tau: complex

    def __post_init__(self):
        tau = complex(self.tau)
        if not (math.isfinite(tau.real) and math.isfinite(tau.imag)) or tau.imag <= 0:
            raise InvalidInputError(f"torus modulus must lie in the upper half-plane, got {tau!r}")
        object.__setattr__(self, "tau", tau)

    @classmethod
    def of(cls, x) -> "FlatTorus":
        return x if isinstance(x, FlatTorus) else cls(x)

    @property
    def area(self) -> float:
        return self.tau.imag

    def holonomy(self, curve: "CurveClass") -> complex:
        return curve.p + curve.q * self.tau


@dataclass(frozen=True)
class TorusQuadDiff:
    """q = c dz^2 on ``torus``; its mass is |c| Im(tau)."""

    torus: FlatTorus
    c: complex

    def __post_init__(self):
        object.__setattr__(self, "torus", FlatTorus.of(self.torus))
        c = complex(self.c)
        if c == 0 or not (math.isfinite(c.real) and math.isfinite(c.imag)):
            raise InvalidInputError("quadratic differential coefficient must be finite and nonzero")
        object.__setattr__(self, "c", c)

    @classmethod
    def unit_mass(cls, torus, phase: complex = 1.0) -> "TorusQuadDiff":
        """The unit-mass differential c dz^2 with c along ``phase``."""
        torus = FlatTorus.of(torus)
        phase = complex(phase)
        return cls(torus, phase / abs(phase) / torus.tau.imag)

    @property
    def mass(self) -> float:
        return abs(self.c) * self.torus.tau.imag

    def rotated(self, theta: float) -> "TorusQuadDiff":
        """exp(i theta) q."""
        return TorusQuadDiff(self.torus, cmath.exp(1j * theta) * self.c)

    def periods(self) -> tuple[complex, complex]:
        """Natural-coordinate holonomies of the basis curves (up to a common sign)."""
        r = cmath.sqrt(self.c)
        return r, r * self.torus.tau


@dataclass(frozen=True)
class CurveClass:
    """Primitive homology class p a + q b, canonical sign (p > 0, or p = 0 and q = 1)."""

    p: int
    q: int

    def __post_init__(self):
        p, q = int(self.p), int(self.q)
        if p == 0 and q == 0:
            raise InvalidInputError("curve class (0, 0) is not a curve")
        if math.gcd(p, q) != 1:
            raise InvalidInputError(f"curve class ({p}, {q}) is not primitive")
        if p < 0 or (p == 0 and q < 0):
            p, q = -p, -q
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @classmethod
    def reduced(cls, p: int, q: int) -> "CurveClass":
        g = math.gcd(int(p), int(q))
        if g == 0:
            raise InvalidInputError("curve class (0, 0) is not a curve")
        return cls(p // g, q // g)


def _canonical_covector(v: complex) -> complex:
    if v.real < 0 or (v.real == 0 and v.imag < 0):
        return -v
    return v


@dataclass(frozen=True)
class TorusFoliation:
    """Linear measured foliation with transverse measure |Re(v dz)| on ``torus``.

    Equality is up to v ~ -v, which the canonical sign (Re v > 0, or
    Re v = 0 and Im v > 0) quotients out.
    """

    holonomy_covector: complex
    torus: FlatTorus

    def __post_init__(self):
        v = complex(self.holonomy_covector)
        if v == 0:
            raise InvalidInputError("foliation covector must be nonzero")
        object.__setattr__(self, "holonomy_covector", _canonical_covector(v))
        object.__setattr__(self, "torus", FlatTorus.of(self.torus))

    @classmethod
    def from_periods(cls, m1: float, m2: float, torus) -> "TorusFoliation":
        """The foliation whose basis curves have signed measures (m1, m2)."""
        torus = FlatTorus.of(torus)
        if m1 == 0 and m2 == 0:
            raise InvalidInputError("foliation periods must not both vanish")
        tau = torus.tau
        return cls(complex(m1, (m1 * tau.real - m2) / tau.imag), torus)

    @property
    def periods(self) -> np.ndarray:
        v, tau = self.holonomy_covector, self.torus.tau
        m = np.array([v.real, (v * tau).real])
        # the canonical sign on the covector is not marking-invariant
        if m[0] < 0 or (m[0] == 0 and m[1] < 0):
            m = -m
        return m

    def on(self, torus) -> "TorusFoliation":
        """The same measured foliation expressed on another marked torus."""
        return TorusFoliation.from_periods(*self.periods, torus)

    def scaled(self, factor: float) -> "TorusFoliation":
        return TorusFoliation(factor * self.holonomy_covector, self.torus)

    def same_class(self, other: "TorusFoliation", tol: float = 1e-12) -> bool:
        return bool(np.allclose(self.periods, other.periods, rtol=0, atol=tol))


def vertical_foliation(qd: TorusQuadDiff, theta: float = 0.0) -> TorusFoliation:
    """F(exp(i theta) q): covector exp(i theta/2) sqrt(c), principal branch."""
    return TorusFoliation(cmath.exp(0.5j * theta) * cmath.sqrt(qd.c), qd.torus)


def intersection_foliation_curve(F: TorusFoliation, curve: CurveClass, torus=None) -> float:
    """|Re(v (p + q tau))|: transverse measure of the straight representative."""
    if torus is not None:
        F = F.on(torus)
    return abs((F.holonomy_covector * F.torus.holonomy(curve)).real)


def intersection_foliations(F: TorusFoliation, G: TorusFoliation) -> float:
    """Bilinear extension of |ps - qr| to linear foliations: |det(periods)|."""
    a, b = F.periods, G.periods
    return abs(a[0] * b[1] - a[1] * b[0])


def intersection_curves(a: CurveClass, b: CurveClass) -> int:
    return abs(a.p * b.q - a.q * b.p)


def extremal_length(curve: CurveClass, torus) -> float:
    """|p + q tau|^2 / Im(tau)."""
    torus = FlatTorus.of(torus)
    return abs(torus.holonomy(curve)) ** 2 / torus.tau.imag


def extremal_length_foliation(F: TorusFoliation, torus) -> float:
    """lambda(F, X) = ||q_F||_1 where q_F = v'^2 dz^2 realizes F on X."""
    v = F.on(torus).holonomy_covector
    return abs(v) ** 2 * FlatTorus.of(torus).tau.imag


extremal_length_horocycle_level = extremal_length_foliation


def torus_teich_distance(tau1, tau2) -> float:
    """1/2 arccosh(1 + |tau1 - tau2|^2 / (2 Im tau1 Im tau2))."""
    t1, t2 = FlatTorus.of(tau1).tau, FlatTorus.of(tau2).tau
    x = abs(t1 - t2) ** 2 / (2.0 * t1.imag * t2.imag)
    # arccosh(1 + x) = log1p(x + sqrt(x (x + 2)))
    return 0.5 * math.log1p(x + math.sqrt(x * (x + 2.0)))


def primitive_classes(bound: int) -> np.ndarray:
    """All canonical primitive (p, q) with |p|, |q| <= bound, as an (N, 2) array."""
    out = []
    for p in range(0, bound + 1):
        for q in range(-bound, bound + 1):
            if (p == 0 and q != 1) or math.gcd(p, q) != 1:
                continue
            out.append((p, q))
    return np.array(out, dtype=float)


def sup_ratio_distance(tau1, tau2, bound: int = 60) -> float:
    """1/2 log sup_gamma lambda(gamma, tau2) / lambda(gamma, tau1) over |p|, |q| <= bound.

    Kerckhoff's formula restricted to finitely many curves; an oracle for
    ``torus_teich_distance``, never exact.
    """
    t1, t2 = FlatTorus.of(tau1).tau, FlatTorus.of(tau2).tau
    pq = primitive_classes(bound)
    h1 = pq[:, 0] + pq[:, 1] * t1
    h2 = pq[:, 0] + pq[:, 1] * t2
    ratio = (np.abs(h2) ** 2 / t2.imag) / (np.abs(h1) ** 2 / t1.imag)
    return 0.5 * math.log(float(np.max(ratio)))


def _check_sl2(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.shape != (2, 2) or not np.all(np.isfinite(A)):
        raise InvalidInputError("SL2(R) element must be a finite real 2x2 matrix")
    if abs(np.linalg.det(A) - 1.0) > DET_TOL:
        raise InvalidInputError(f"det A = {np.linalg.det(A)!r}, expected 1")
    return A


def act_on_vector(A, z: complex) -> complex:
    """A acting R-linearly on z = x + iy as the column (x, y)."""
    x = A[0, 0] * z.real + A[0, 1] * z.imag
    y = A[1, 0] * z.real + A[1, 1] * z.imag
    return complex(x, y)


def sl2_action_torus(A, qd: TorusQuadDiff) -> TorusQuadDiff:
    """A . (X, q): act on the natural-coordinate lattice, then renormalize.

    The new torus has tau' = w2/w1 and q' = w1^2 dz^2 where (w1, w2) are the
    images of the period vectors; the marking is carried along.
    """
    A = _check_sl2(A)
    w1, w2 = (act_on_vector(A, w) for w in qd.periods())
    return TorusQuadDiff(FlatTorus(w2 / w1), w1 * w1)


def diagonal_flow(t: float) -> np.ndarray:
    return np.array([[math.exp(t), 0.0], [0.0, math.exp(-t)]])


def rotation(phi: float) -> np.ndarray:
    c, s = math.cos(phi), math.sin(phi)
    return np.array([[c, -s], [s, c]])


@dataclass(frozen=True)
class TeichGeodesicLift:
    """The lift (X_t, q_t) = diag(e^t, e^-t) . (X_0, q_0) as a foliation pair."""

    F_plus: TorusFoliation
    F_minus: TorusFoliation
    t: float
    qd: TorusQuadDiff

    @property
    def torus(self) -> FlatTorus:
        return self.qd.torus


def geodesic_lift(qd: TorusQuadDiff, t: float) -> TeichGeodesicLift:
    """(e^t F(q), e^-t F(-q)), realized as the vertical/horizontal foliations of q_t."""
    if abs(qd.mass - 1.0) > 1e-12:
        raise InvalidInputError(f"geodesic_lift expects a unit-mass differential, mass = {qd.mass!r}")
    qt = sl2_action_torus(diagonal_flow(t), qd)
    return TeichGeodesicLift(vertical_foliation(qt), vertical_foliation(qt, math.pi), float(t), qt)


def disk_parametrization(qd: TorusQuadDiff, z: complex) -> FlatTorus:
    """The Teichmuller disk of (X_0, q_0): exp(-i theta) tanh t -> flow exp(i theta) q_0 for time t."""
    z = complex(z)
    r = abs(z)
    if r >= 1.0:
        raise InvalidInputError("disk parameter must satisfy |z| < 1")
    if r == 0.0:
        return qd.torus
    theta = -cmath.phase(z)
    return sl2_action_torus(diagonal_flow(math.atanh(r)), qd.rotated(theta)).torus


def cayley_to_disk(tau: complex) -> complex:
    """Upper half-plane -> unit disk, tau -> (tau - i) / (tau + i)."""
    tau = complex(tau)
    return (tau - 1j) / (tau + 1j)
