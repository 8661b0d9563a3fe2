"""The complex hyperbolic plane as the unit ball of C^2 (curvature -4).

Distances satisfy d(0, p) = artanh |p|. Real geodesics in the totally real
slice R^2 n B are straight chords (the Klein model); geodesics inside a
complex affine slice are Poincare-disk geodesics of that slice.

Busemann parameters follow the convention t_{gamma(t0)} = t0 for a ray
gamma, so that the horocycle H(gamma, s) is the level set exp(t_p) = s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BoundaryProximityError,
    ConvergenceError,
    InvalidInputError,
    NoIntersectionError,
)
from .reflections import disk_geodesic

BOUNDARY_MARGIN = 1e-12
LIMIT_TIMES = (8.0, 16.0, 24.0, 32.0)


def _herm(p: np.ndarray, q: np.ndarray) -> complex:
    """<p, q> = sum p_i conj(q_i)."""
    return complex(np.vdot(q, p))


@dataclass(frozen=True)
class Ch2Point:
    z: complex
    w: complex

    def __post_init__(self):
        z, w = complex(self.z), complex(self.w)
        if not all(math.isfinite(x) for x in (z.real, z.imag, w.real, w.imag)):
            raise InvalidInputError("non-finite CH^2 coordinates")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "w", w)
        if self.norm_sq >= 1.0 - BOUNDARY_MARGIN:
            raise BoundaryProximityError(f"|p|^2 = {self.norm_sq!r} is not safely below 1")

    @classmethod
    def of(cls, p) -> "Ch2Point":
        if isinstance(p, Ch2Point):
            return p
        z, w = p
        return cls(z, w)

    @property
    def vec(self) -> np.ndarray:
        return np.array([self.z, self.w])

    @property
    def norm_sq(self) -> float:
        return abs(self.z) ** 2 + abs(self.w) ** 2


def _sphere_point(xi) -> np.ndarray:
    v = np.asarray(xi, dtype=complex).reshape(2)
    n = np.linalg.norm(v)
    if abs(n - 1.0) > 1e-9:
        raise InvalidInputError(f"ideal point must lie on the unit sphere, |xi| = {n!r}")
    return v / n


def ball_involution(a: np.ndarray, z: np.ndarray) -> np.ndarray:
    """The involutive automorphism phi_a exchanging a and 0.

    phi_a(z) = (a - P_a z - s_a Q_a z) / (1 - <z, a>), s_a = sqrt(1 - |a|^2).
    It extends continuously to the boundary sphere.
    """
    a = np.asarray(a, dtype=complex)
    z = np.asarray(z, dtype=complex)
    aa = float(np.vdot(a, a).real)
    if aa == 0.0:
        return -z
    proj = _herm(z, a) / aa * a
    s = math.sqrt(1.0 - aa)
    return (a - proj - s * (z - proj)) / (1.0 - _herm(z, a))


def _log_one_minus_x_sq(p: np.ndarray, q: np.ndarray) -> float:
    """log(1 - tanh^2 d(p, q)) computed without cancellation."""
    return (
        math.log1p(-float(np.vdot(p, p).real))
        + math.log1p(-float(np.vdot(q, q).real))
        - 2.0 * math.log(abs(1.0 - _herm(p, q)))
    )


def ch2_distance(p, q) -> float:
    """artanh sqrt(1 - (1-|p|^2)(1-|q|^2) / |1 - <p,q>|^2)."""
    p, q = Ch2Point.of(p).vec, Ch2Point.of(q).vec
    log_c = min(0.0, _log_one_minus_x_sq(p, q))
    c = math.exp(log_c)
    x = math.sqrt(-math.expm1(log_c))
    # artanh x = 1/2 log((1+x)^2 / (1-x^2))
    return 0.5 * (2.0 * math.log1p(x) - log_c) if c < 0.5 else float(np.arctanh(x))


@dataclass(frozen=True)
class Ch2GeodesicRay:
    """Unit-speed ray from ``base`` towards the ideal point ``boundary_point``."""

    base: Ch2Point
    boundary_point: tuple[complex, complex]
    _direction: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "base", Ch2Point.of(self.base))
        xi = _sphere_point(self.boundary_point)
        object.__setattr__(self, "boundary_point", (complex(xi[0]), complex(xi[1])))
        eta = ball_involution(self.base.vec, xi)
        object.__setattr__(self, "_direction", eta / np.linalg.norm(eta))

    @property
    def xi(self) -> np.ndarray:
        return np.array(self.boundary_point)

    def __call__(self, t: float) -> Ch2Point:
        v = ball_involution(self.base.vec, math.tanh(t) * self._direction)
        return Ch2Point(v[0], v[1])

    def limit_offset(self, p, t: float) -> float:
        """t - d(p, gamma(t)), evaluated stably for large t."""
        pp = ball_involution(self.base.vec, Ch2Point.of(p).vec)
        w = _herm(pp, self._direction)
        log_sech = -t + math.log(2.0) - math.log1p(math.exp(-2.0 * t))
        log_c = (
            math.log1p(-float(np.vdot(pp, pp).real))
            + 2.0 * log_sech
            - 2.0 * math.log(abs(1.0 - math.tanh(t) * w))
        )
        x = math.sqrt(-math.expm1(log_c))
        return t - math.log1p(x) + 0.5 * log_c


def standard_rays() -> tuple[Ch2GeodesicRay, Ch2GeodesicRay]:
    """gamma_1(t) = (tanh t, 0) and gamma_2(t) = (0, tanh t)."""
    origin = Ch2Point(0, 0)
    return Ch2GeodesicRay(origin, (1, 0)), Ch2GeodesicRay(origin, (0, 1))


def _busemann_at_origin_ray(xi: np.ndarray, p: np.ndarray) -> float:
    # B_xi(p) = 1/2 log(|1 - <p, xi>|^2 / (1 - |p|^2)), zero at the origin
    return 0.5 * (2.0 * math.log(abs(1.0 - _herm(p, xi))) - math.log1p(-float(np.vdot(p, p).real)))


def busemann_parameter(ray: Ch2GeodesicRay, p) -> float:
    """Closed-form t_p = B(base) - B(p)."""
    pv = Ch2Point.of(p).vec
    return _busemann_at_origin_ray(ray.xi, ray.base.vec) - _busemann_at_origin_ray(ray.xi, pv)


def busemann_parameter_limit(ray: Ch2GeodesicRay, p, times=LIMIT_TIMES, tol: float = 1e-9) -> float:
    """t_p as the limit of t - d(p, gamma(t)), extrapolated linearly in exp(-2t).

    Independent of the closed form; kept as its oracle.
    """
    times = tuple(float(t) for t in times)
    if len(times) < 3:
        raise InvalidInputError("need at least three extrapolation times")
    vals = [ray.limit_offset(p, t) for t in times]
    xs = [math.exp(-2.0 * t) for t in times]
    estimates = []
    for i in range(len(times) - 1):
        x0, x1, y0, y1 = xs[i], xs[i + 1], vals[i], vals[i + 1]
        estimates.append(y1 - x1 * (y1 - y0) / (x1 - x0))
    if abs(estimates[-1] - estimates[-2]) > tol * max(1.0, abs(estimates[-1])):
        raise ConvergenceError(
            f"Busemann limit did not settle: successive estimates {estimates[-2]!r}, {estimates[-1]!r}"
        )
    return estimates[-1]


def horocycle_level(ray: Ch2GeodesicRay, p, method: str = "closed") -> float:
    """exp(t_p): the s with p in H(ray, s)."""
    if method == "closed":
        return math.exp(busemann_parameter(ray, p))
    if method == "limit":
        return math.exp(busemann_parameter_limit(ray, p))
    raise InvalidInputError(f"unknown Busemann method {method!r}")


@dataclass(frozen=True)
class Horocycle:
    ray: Ch2GeodesicRay
    level: float

    def __post_init__(self):
        if not (self.level > 0 and math.isfinite(self.level)):
            raise InvalidInputError("horocycle level must be a positive real")

    def contains(self, p, tol: float = 1e-10) -> bool:
        return abs(busemann_parameter(self.ray, p) - math.log(self.level)) < tol


@dataclass(frozen=True)
class CompleteGeodesic:
    """Unit-speed complete real geodesic between two ideal points.

    It lives in the complex affine line through its endpoints; that slice is
    parametrized isometrically by ``center + radius * lam * direction`` with
    lam in the Poincare disk. u = 0 is the point nearest the origin.
    """

    start: tuple[complex, complex]
    end: tuple[complex, complex]
    center: np.ndarray = field(init=False, repr=False, compare=False)
    radius: float = field(init=False, repr=False, compare=False)
    direction: np.ndarray = field(init=False, repr=False, compare=False)
    _disk: object = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        a, b = _sphere_point(self.start), _sphere_point(self.end)
        if np.linalg.norm(a - b) < 1e-12:
            raise InvalidInputError("geodesic endpoints coincide")
        e = (b - a) / np.linalg.norm(b - a)
        c = a - _herm(a, e) * e
        r = math.sqrt(max(0.0, 1.0 - float(np.vdot(c, c).real)))
        lam_a = _herm(a - c, e) / r
        lam_b = _herm(b - c, e) / r
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", r)
        object.__setattr__(self, "direction", e)
        object.__setattr__(self, "_disk", disk_geodesic(lam_a, lam_b))

    def __call__(self, u: float) -> Ch2Point:
        v = self.center + self.radius * self._disk(u) * self.direction
        return Ch2Point(v[0], v[1])


def delta_geodesic() -> CompleteGeodesic:
    """The geodesic from (0, 1) (u -> -inf) to (1, 0) (u -> +inf).

    Positively asymptotic to gamma_1 and negatively to gamma_2; it is the
    chord x + y = 1 of the real slice.
    """
    return CompleteGeodesic((0, 1), (1, 0))


def _bisect(f, lo: float, hi: float, tol: float = 1e-12, max_iter: int = 200) -> float:
    flo = f(lo)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol:
            break
        fm = f(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def horocycle_hit(curve, horocycle: Horocycle, method: str = "closed", bracket=(-1.0, 1.0), max_expand: int = 6):
    """Find u with exp(t_{curve(u)}) = s along a unit-speed curve.

    The level is monotone along geodesics asymptotic to the horocycle's ray,
    so bisection after bracketing is enough. Returns (point, u).
    """
    target = math.log(horocycle.level)
    if method == "closed":
        def g(u):
            return busemann_parameter(horocycle.ray, curve(u)) - target
    elif method == "limit":
        def g(u):
            return busemann_parameter_limit(horocycle.ray, curve(u)) - target
    else:
        raise InvalidInputError(f"unknown Busemann method {method!r}")

    lo, hi = bracket
    for _ in range(max_expand):
        try:
            glo, ghi = g(lo), g(hi)
        except BoundaryProximityError:
            break
        if glo == 0.0:
            return curve(lo), lo
        if ghi == 0.0:
            return curve(hi), hi
        if (glo > 0) != (ghi > 0):
            u = _bisect(g, lo, hi)
            return curve(u), u
        width = hi - lo
        lo, hi = lo - width, hi + width
    raise NoIntersectionError("level function has no sign change on the search bracket")


def rotate_automorphism(theta: float, p) -> Ch2Point:
    """phi(z, w) = (exp(-i theta) z, w)."""
    p = Ch2Point.of(p)
    return Ch2Point(np.exp(-1j * theta) * p.z, p.w)


@dataclass(frozen=True)
class HorocycleGap:
    p1: Ch2Point
    p2: Ch2Point
    u1: float
    u2: float

    @property
    def gap(self) -> float:
        """t2 - t1, the signed arclength from P1 to P2 along delta."""
        return self.u2 - self.u1

    @property
    def exp_gap(self) -> float:
        return math.exp(self.u1 - self.u2)


def horocycle_gap(method: str = "closed") -> HorocycleGap:
    """Where delta crosses H(gamma_1, 1) and H(gamma_2, 1)."""
    g1, g2 = standard_rays()
    delta = delta_geodesic()
    p1, u1 = horocycle_hit(delta, Horocycle(g1, 1.0), method=method)
    p2, u2 = horocycle_hit(delta, Horocycle(g2, 1.0), method=method)
    return HorocycleGap(p1, p2, u1, u2)
