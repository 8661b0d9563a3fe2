"""CH^1 (Poincare disk, curvature -4): reflections, their graphs, Klein model.

A hyperbolic reflection r is stored by the two ideal endpoints of its fixed
geodesic. Its graph Gamma_r = {(z, r(z))} is a holomorphic leaf in
CH^1 x conj(CH^1); the leaves are singular exactly along the diagonal.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import BoundaryProximityError, DegenerateInputError, InvalidInputError

BOUNDARY_MARGIN = 1e-12
ENDPOINT_TOL = 1e-12
#: hyperbolic distance below which two points count as equal
LEAF_TOL = 1e-10


def _check_disk(z: complex) -> complex:
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise InvalidInputError("non-finite disk point")
    if abs(z) >= 1.0 - BOUNDARY_MARGIN:
        raise BoundaryProximityError(f"|z| = {abs(z)!r} is not safely inside the disk")
    return z


@dataclass(frozen=True)
class DiskPoint:
    z: complex

    def __post_init__(self):
        object.__setattr__(self, "z", _check_disk(self.z))

    def __complex__(self):
        return self.z


def disk_distance(z, w) -> float:
    """artanh |(z - w) / (1 - conj(z) w)|."""
    z, w = _check_disk(complex(z)), _check_disk(complex(w))
    return float(np.arctanh(abs((z - w) / (1 - z.conjugate() * w))))


def mobius_to_origin(a: complex):
    """Disk automorphism sending ``a`` to 0 and its inverse."""
    a = complex(a)

    def forward(z):
        return (z - a) / (1 - a.conjugate() * z)

    def inverse(z):
        return (z + a) / (1 + a.conjugate() * z)

    return forward, inverse


def _canonical_angle(e: complex) -> float:
    return cmath.phase(e) % (2 * math.pi)


def disk_geodesic(a: complex, b: complex):
    """Unit-speed complete geodesic from ideal point ``a`` (u -> -inf) to ``b`` (u -> +inf).

    u = 0 is the point of the geodesic closest to the origin.
    """
    a, b = complex(a) / abs(a), complex(b) / abs(b)
    if abs(a - b) < ENDPOINT_TOL:
        raise DegenerateInputError("geodesic endpoints coincide")
    # half the angular gap; the geodesic is a circle arc orthogonal to |z|=1
    gap = cmath.phase(b / a)
    half = abs(gap) / 2.0
    mid = a * cmath.exp(1j * gap / 2.0)
    rho = math.tan(math.pi / 4.0 - half / 2.0)
    sign = 1.0 if gap > 0 else -1.0

    def point(u: float) -> complex:
        x = 1j * sign * math.tanh(u)
        return mid * (x + rho) / (1.0 + rho * x)

    return point


@dataclass(frozen=True)
class DiskReflection:
    """Reflection across the geodesic with ideal endpoints ``endpoints``."""

    endpoints: tuple[complex, complex]

    def __post_init__(self):
        e1, e2 = (complex(e) for e in self.endpoints)
        for e in (e1, e2):
            if abs(abs(e) - 1.0) > 1e-9:
                raise InvalidInputError(f"endpoint {e!r} is not on the unit circle")
        e1, e2 = e1 / abs(e1), e2 / abs(e2)
        if abs(e1 - e2) < ENDPOINT_TOL:
            raise InvalidInputError("reflection endpoints must be distinct")
        pair = tuple(sorted((e1, e2), key=_canonical_angle))
        object.__setattr__(self, "endpoints", pair)

    @classmethod
    def from_angles(cls, alpha: float, beta: float) -> "DiskReflection":
        return cls((cmath.exp(1j * alpha), cmath.exp(1j * beta)))

    def __call__(self, z) -> complex:
        return reflect(self, z)

    def same_as(self, other: "DiskReflection", tol: float = 1e-9) -> bool:
        return all(abs(x - y) < tol for x, y in zip(self.endpoints, other.endpoints))

    def fixed_point(self, u: float) -> complex:
        """Point of Fix(r) at signed arclength ``u`` from its point nearest 0."""
        return disk_geodesic(*self.endpoints)(u)


def reflect(r: DiskReflection, z) -> complex:
    z = _check_disk(complex(z))
    a, b = r.endpoints
    s, p = a + b, a * b
    # anti-Mobius involution fixing the circle through a, b orthogonal to |z|=1
    return (s - 2 * p * z.conjugate()) / (2 - s * z.conjugate())


def perpendicular_bisector(z, w) -> DiskReflection:
    """The unique reflection exchanging ``z`` and ``w``."""
    z, w = _check_disk(complex(z)), _check_disk(complex(w))
    if disk_distance(z, w) <= LEAF_TOL:
        raise DegenerateInputError("z = w: the leaf through a diagonal point is not unique")
    to0, back = mobius_to_origin(z)
    w0 = to0(w)
    u = w0 / abs(w0)
    # Euclidean radius of the hyperbolic midpoint of [0, w0]
    rho = abs(w0) / (1.0 + math.sqrt(1.0 - abs(w0) ** 2))
    e = u * (1j + rho) / (1 + 1j * rho)
    e_bar = u * (-1j + rho) / (1 - 1j * rho)
    return DiskReflection((back(e), back(e_bar)))


def leaf_residual(r: DiskReflection, z, w) -> float:
    """d(r(z), w), evaluated symmetrically in (z, w).

    tanh d(r(z), w) = |N| / |D| with N = s - 2p conj(z) - 2w + s w conj(z)
    and D = 2 - conj(s)(z + w) + 2 conj(p) z w, where s = a + b, p = ab for
    the endpoints a, b. Both |N| and D are symmetric under z <-> w; the
    arguments are ordered first so swapping them gives the identical float.
    """
    z, w = _check_disk(complex(z)), _check_disk(complex(w))
    if (w.real, w.imag) < (z.real, z.imag):
        z, w = w, z
    a, b = r.endpoints
    s, p = a + b, a * b
    num = s - 2 * p * z.conjugate() - 2 * w + s * w * z.conjugate()
    den = 2 - s.conjugate() * (z + w) + 2 * p.conjugate() * z * w
    return float(np.arctanh(min(1.0, abs(num) / abs(den))))


def leaf_contains(r: DiskReflection, z, w) -> bool:
    """Is (z, w) on the graph Gamma_r, i.e. d(r(z), w) < LEAF_TOL?"""
    return leaf_residual(r, z, w) < LEAF_TOL


def _klein_line(r: DiskReflection):
    a, b = r.endpoints
    return np.array([a.real, a.imag]), np.array([b.real, b.imag])


def _endpoints_interleave(r: DiskReflection, s: DiskReflection) -> bool:
    a1, a2 = (_canonical_angle(e) for e in r.endpoints)
    b1, b2 = (_canonical_angle(e) for e in s.endpoints)
    inside = [(a1 < b < a2) for b in (b1, b2)]
    on_end = any(min(abs(b - a), 2 * math.pi - abs(b - a)) < 1e-12 for a in (a1, a2) for b in (b1, b2))
    return inside[0] != inside[1] and not on_end


def leaf_intersection(r: DiskReflection, s: DiskReflection) -> complex | None:
    """The point z0 of Fix(r) n Fix(s), or None if the geodesics do not cross.

    When it exists, Gamma_r n Gamma_s is the single diagonal point (z0, z0).
    """
    if r.same_as(s):
        raise InvalidInputError("leaf_intersection needs two distinct reflections")
    if not _endpoints_interleave(r, s):
        return None
    # geodesics are chords in the Klein model
    p1, p2 = _klein_line(r)
    q1, q2 = _klein_line(s)
    M = np.column_stack([p2 - p1, q1 - q2])
    lam, _ = np.linalg.solve(M, q1 - p1)
    k = p1 + lam * (p2 - p1)
    return from_klein(k)


def to_klein(z) -> tuple[float, float]:
    z = _check_disk(complex(z))
    k = 2 * z / (1 + abs(z) ** 2)
    return (k.real, k.imag)


def from_klein(k) -> complex:
    if isinstance(k, complex):
        kc = k
    else:
        x, y = k
        kc = complex(x, y)
    if abs(kc) >= 1.0:
        raise BoundaryProximityError("Klein point outside the unit disk")
    return kc / (1 + math.sqrt(max(0.0, 1 - abs(kc) ** 2)))


def _random_disk_point(rng, rmax: float = 0.9) -> complex:
    r = rmax * math.sqrt(rng.uniform())
    return r * cmath.exp(2j * math.pi * rng.uniform())


def _random_reflection(rng, rmax: float = 0.9) -> DiskReflection:
    """Reflection across a geodesic through a random point of |c| <= rmax.

    Keeping the family compact keeps images r(z) away from the boundary,
    where disk coordinates cannot resolve 1e-10 in hyperbolic distance.
    """
    c = _random_disk_point(rng, rmax)
    e = cmath.exp(1j * math.pi * rng.uniform())
    _, back = mobius_to_origin(c)
    return DiskReflection((back(e), back(-e)))


def reflection_battery(n: int = 10_000, seed: int = 0) -> dict:
    """Seeded invariant checks for reflections, leaves and the Klein model.

    Returns worst residuals (floats) and violation counts (ints) per check.
    """
    rng = np.random.default_rng(seed)
    out = {}

    worst = 0.0
    for _ in range(n):
        r, z = _random_reflection(rng), _random_disk_point(rng)
        worst = max(worst, abs(reflect(r, reflect(r, z)) - z))
    out["involution_residual"] = float(worst)

    mismatches, worst = 0, 0.0
    for k in range(n):
        r, z = _random_reflection(rng), _random_disk_point(rng)
        w = reflect(r, z) if k % 2 == 0 else _random_disk_point(rng)
        if leaf_contains(r, z, w) != leaf_contains(r, w, z):
            mismatches += 1
        if k % 2 == 0:
            worst = max(worst, leaf_residual(r, w, z), disk_distance(reflect(r, w), z))
    out["flip_mismatches"] = mismatches
    out["flip_residual"] = worst

    violations = 0
    for _ in range(n):
        r, s, z = _random_reflection(rng), _random_reflection(rng), _random_disk_point(rng)
        if r.same_as(s) or disk_distance(reflect(r, z), reflect(s, z)) <= 10 * LEAF_TOL:
            continue
        if leaf_contains(s, z, reflect(r, z)):
            violations += 1
    out["leaf_disjointness_violations"] = violations

    worst = 0.0
    per = 50
    for _ in range(max(1, n // per)):
        r = _random_reflection(rng)
        a, b = (np.array([e.real, e.imag]) for e in r.endpoints)
        d = (b - a) / np.linalg.norm(b - a)
        for u in rng.uniform(-4, 4, size=per):
            k = np.array(to_klein(r.fixed_point(u)))
            off = k - a
            worst = max(worst, abs(off[0] * d[1] - off[1] * d[0]))
    out["klein_collinearity_residual"] = float(worst)

    worst, bad = 0.0, 0
    for _ in range(n):
        z, w = _random_disk_point(rng), _random_disk_point(rng)
        if disk_distance(z, w) < 1e-6:
            continue
        r = perpendicular_bisector(z, w)
        worst = max(worst, disk_distance(reflect(r, z), w))
        if not r.same_as(perpendicular_bisector(w, z)):
            bad += 1
    out["bisector_residual"] = worst
    out["bisector_flip_mismatches"] = bad
    return out
