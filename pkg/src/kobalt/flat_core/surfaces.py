"""Polygonal (half-)translation surfaces and saddle connections.

Polygons are counterclockwise vertex loops in C; edge ``e`` of a polygon
runs from vertex ``e`` to vertex ``e + 1``. A gluing ``(P, e, Q, f, sign)``
identifies edge ``(P, e)`` with edge ``(Q, f)``:

* ``sign = +1``: translation; the edge vectors are opposite (as they must be
  for two counterclockwise polygons on either side of a common edge).
* ``sign = -1``: half-translation (rotation by pi); the edge vectors agree.

Every polygon vertex is treated as a cone point (angle-2pi vertices are
marked points), so saddle connections join vertices.
"""

from __future__ import annotations

import cmath
import math
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from ..errors import BudgetExceededError, InvalidInputError
from .torus import _check_sl2, act_on_vector

EDGE_TOL = 1e-9
WEDGE_TOL = 1e-12
DEDUP_TOL = 1e-9
DEFAULT_BUDGET = 2_000_000


def _cross(a: complex, b: complex) -> float:
    return a.real * b.imag - a.imag * b.real


def _signed_area(poly) -> float:
    return 0.5 * sum(_cross(poly[i], poly[(i + 1) % len(poly)]) for i in range(len(poly)))


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


@dataclass(frozen=True)
class ConePoint:
    index: int
    angle: float
    corners: tuple  # ((polygon, vertex), ...)


@dataclass(frozen=True)
class PolygonSurface:
    polygons: tuple
    gluings: tuple
    cone_points: tuple = field(init=False, compare=False)
    _vertex_class: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        polys = tuple(tuple(complex(z) for z in poly) for poly in self.polygons)
        if not polys:
            raise InvalidInputError("surface needs at least one polygon")
        for i, poly in enumerate(polys):
            if len(poly) < 3:
                raise InvalidInputError(f"polygon {i} has fewer than 3 vertices")
            if _signed_area(poly) <= 0:
                raise InvalidInputError(f"polygon {i} is not counterclockwise")
        glue = tuple(tuple(int(x) for x in g) for g in self.gluings)
        object.__setattr__(self, "polygons", polys)
        object.__setattr__(self, "gluings", glue)

        partner = {}
        for g in glue:
            if len(g) != 5:
                raise InvalidInputError(f"gluing {g} must be (poly, edge, poly, edge, sign)")
            P, e, Q, f, sign = g
            if sign not in (1, -1):
                raise InvalidInputError(f"gluing sign must be +1 or -1, got {sign}")
            for poly, edge in ((P, e), (Q, f)):
                if not (0 <= poly < len(polys) and 0 <= edge < len(polys[poly])):
                    raise InvalidInputError(f"gluing {g} refers to a missing edge")
            if (P, e) == (Q, f):
                raise InvalidInputError(f"edge {(P, e)} glued to itself")
            for side in ((P, e), (Q, f)):
                if side in partner:
                    raise InvalidInputError(f"edge {side} glued more than once")
            partner[(P, e)] = (Q, f, sign)
            partner[(Q, f)] = (P, e, sign)
            u, w = self.edge_vector(P, e), self.edge_vector(Q, f)
            expected = -u if sign == 1 else u
            if abs(w - expected) > EDGE_TOL * max(1.0, abs(u)):
                raise InvalidInputError(f"gluing {g}: edge vectors {u!r} and {w!r} do not match")
        for i, poly in enumerate(polys):
            for e in range(len(poly)):
                if (i, e) not in partner:
                    raise InvalidInputError(f"edge {(i, e)} is not glued")
        object.__setattr__(self, "_partner", partner)

        uf = _UnionFind()
        for i, poly in enumerate(polys):
            for v in range(len(poly)):
                uf.find((i, v))
        for P, e, Q, f, _ in glue:
            nP, nQ = len(polys[P]), len(polys[Q])
            uf.union((P, e), (Q, (f + 1) % nQ))
            uf.union((P, (e + 1) % nP), (Q, f))
        groups = defaultdict(list)
        for i, poly in enumerate(polys):
            for v in range(len(poly)):
                groups[uf.find((i, v))].append((i, v))
        cones = []
        vclass = {}
        for k, root in enumerate(sorted(groups)):
            corners = tuple(groups[root])
            angle = sum(self.interior_angle(i, v) for i, v in corners)
            if abs(angle / math.pi - round(angle / math.pi)) > 1e-7:
                raise InvalidInputError(f"cone angle {angle!r} at {corners} is not a multiple of pi")
            cones.append(ConePoint(k, angle, corners))
            for c in corners:
                vclass[c] = k
        object.__setattr__(self, "cone_points", tuple(cones))
        object.__setattr__(self, "_vertex_class", vclass)

    def edge_vector(self, poly: int, edge: int) -> complex:
        P = self.polygons[poly]
        return P[(edge + 1) % len(P)] - P[edge]

    def interior_angle(self, poly: int, v: int) -> float:
        P = self.polygons[poly]
        a = P[(v + 1) % len(P)] - P[v]
        b = P[v - 1] - P[v]
        ang = cmath.phase(b / a)
        return ang if ang > 0 else ang + 2 * math.pi

    def cone_of(self, poly: int, v: int) -> int:
        return self._vertex_class[(poly, v)]

    @property
    def is_translation(self) -> bool:
        return all(g[4] == 1 for g in self.gluings)

    @property
    def area(self) -> float:
        return sum(_signed_area(p) for p in self.polygons)

    def mapped(self, fn) -> "PolygonSurface":
        return PolygonSurface([[fn(z) for z in poly] for poly in self.polygons], self.gluings)

    def to_json(self) -> dict:
        return {
            "polygons": [[[z.real, z.imag] for z in poly] for poly in self.polygons],
            "gluings": [list(g) for g in self.gluings],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "PolygonSurface":
        try:
            polys = [[complex(x, y) for x, y in poly] for poly in doc["polygons"]]
            gluings = [tuple(g) for g in doc["gluings"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInputError(f"malformed surface document: {exc}") from exc
        return cls(polys, gluings)


def sl2_action_surface(A, surface: PolygonSurface) -> PolygonSurface:
    A = _check_sl2(A)
    return surface.mapped(lambda z: act_on_vector(A, z))


def square_torus() -> PolygonSurface:
    """Unit square with opposite sides glued; its single vertex is a marked point."""
    return PolygonSurface([[0, 1, 1 + 1j, 1j]], [(0, 0, 0, 2, 1), (0, 1, 0, 3, 1)])


def l_shaped_surface() -> PolygonSurface:
    """Three unit squares in an L (genus 2, one cone point of angle 6 pi)."""
    poly = [0, 1, 2, 2 + 1j, 1 + 1j, 1 + 2j, 2j, 1j]
    return PolygonSurface([poly], [(0, 1, 0, 3, 1), (0, 0, 0, 5, 1), (0, 2, 0, 7, 1), (0, 4, 0, 6, 1)])


def pillowcase() -> PolygonSurface:
    """Two unit squares glued along their boundary: a sphere with four cone points of angle pi."""
    front = [0, 1, 1 + 1j, 1j]
    back = [0, 1j, -1 + 1j, -1]
    return PolygonSurface(
        [front, back],
        [(0, 0, 1, 3, -1), (0, 1, 1, 2, 1), (0, 2, 1, 1, -1), (0, 3, 1, 0, 1)],
    )


# --- triangulation -------------------------------------------------------


def _point_in_triangle(p, a, b, c) -> bool:
    d1, d2, d3 = _cross(b - a, p - a), _cross(c - b, p - b), _cross(a - c, p - c)
    tol = -1e-14
    return d1 >= tol and d2 >= tol and d3 >= tol


def ear_clip(poly) -> list[tuple[int, int, int]]:
    """Triangulate a simple counterclockwise polygon; returns vertex-index triples (CCW)."""
    idx = list(range(len(poly)))
    tris = []
    guard = 0
    while len(idx) > 3:
        guard += 1
        if guard > 10 * len(poly) ** 2:
            raise InvalidInputError("polygon is not simple: ear clipping stalled")
        n = len(idx)
        for k in range(n):
            i0, i1, i2 = idx[k - 1], idx[k], idx[(k + 1) % n]
            a, b, c = poly[i0], poly[i1], poly[i2]
            if _cross(b - a, c - b) <= 1e-14:
                continue
            if any(_point_in_triangle(poly[j], a, b, c) for j in idx if j not in (i0, i1, i2)):
                continue
            tris.append((i0, i1, i2))
            del idx[k]
            break
        else:
            raise InvalidInputError("polygon is not simple: no ear found")
    tris.append(tuple(idx))
    return tris


@dataclass(frozen=True)
class _Triangle:
    poly: int
    verts: tuple  # polygon vertex indices, CCW
    pts: tuple  # complex coordinates in the polygon frame


def _triangulate(surface: PolygonSurface):
    tris = []
    for P, poly in enumerate(surface.polygons):
        for t in ear_clip(poly):
            tris.append(_Triangle(P, t, tuple(poly[v] for v in t)))
    # neighbor[(tri, k)] = (tri', k') across triangle edge k (verts[k] -> verts[k+1])
    by_poly_edge = {}
    by_diagonal = {}
    for ti, T in enumerate(tris):
        n = len(surface.polygons[T.poly])
        for k in range(3):
            a, b = T.verts[k], T.verts[(k + 1) % 3]
            if b == (a + 1) % n:
                by_poly_edge[(T.poly, a)] = (ti, k)
            else:
                by_diagonal[(T.poly, a, b)] = (ti, k)
    neighbor = {}
    for (P, a, b), (ti, k) in by_diagonal.items():
        neighbor[(ti, k)] = by_diagonal[(P, b, a)]
    for (P, e), (ti, k) in by_poly_edge.items():
        Q, f, _ = surface._partner[(P, e)]
        neighbor[(ti, k)] = by_poly_edge[(Q, f)]
    return tris, neighbor


# --- saddle connections -------------------------------------------------


@dataclass(frozen=True)
class SaddleConnectionSet:
    holonomies: tuple
    starts: tuple = ()
    ends: tuple = ()
    complete: bool = True

    def __post_init__(self):
        hol = tuple(complex(v) for v in self.holonomies)
        if any(v == 0 for v in hol):
            raise InvalidInputError("saddle connection holonomies must be nonzero")
        object.__setattr__(self, "holonomies", hol)
        if not self.starts:
            object.__setattr__(self, "starts", (0,) * len(hol))
            object.__setattr__(self, "ends", (0,) * len(hol))

    def __len__(self):
        return len(self.holonomies)

    def __iter__(self):
        return iter(self.holonomies)


def _seg_distance(a: complex, b: complex) -> float:
    d = b - a
    t = -(a.real * d.real + a.imag * d.imag) / (abs(d) ** 2)
    t = min(1.0, max(0.0, t))
    return abs(a + t * d)


def _canon_sign(v: complex) -> complex:
    return -v if (v.real < -DEDUP_TOL or (abs(v.real) <= DEDUP_TOL and v.imag < 0)) else v


def _sort_key(v: complex):
    return (round(abs(v), 12), cmath.phase(v) % (2 * math.pi))


def saddle_connections(surface: PolygonSurface, L_max: float, budget: int = DEFAULT_BUDGET) -> SaddleConnectionSet:
    """All saddle connections of length <= L_max, by unfolding triangles.

    For each corner of each triangle a visibility wedge is pushed across
    glued edges; a vertex strictly inside the wedge is visible (no cone
    point in between) and closes a saddle connection. Translation surfaces
    report both orientations (v and -v); half-translation surfaces report
    one canonical sign per unordered pair of cone points. Holonomies are
    deduplicated by (vector, start cone, end cone) and sorted by
    (length, angle).
    """
    if not L_max > 0:
        raise InvalidInputError("L_max must be positive")
    tris, neighbor = _triangulate(surface)
    half = not surface.is_translation
    found = {}
    lim = L_max * (1 + 1e-12)

    def record(v: complex, start: int, end: int):
        if abs(v) > lim:
            return
        if half:
            v = _canon_sign(v)
            start, end = min(start, end), max(start, end)
        key = (start, end, round(v.real * 1e6), round(v.imag * 1e6))
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                other = found.get((start, end, key[2] + dx, key[3] + dy))
                if other is not None and abs(other - v) < DEDUP_TOL:
                    return
        found[key] = v

    visits = 0
    for ti, T in enumerate(tris):
        for i in range(3):
            apex = T.pts[i]
            start = surface.cone_of(T.poly, T.verts[i])
            A, B = T.pts[(i + 1) % 3] - apex, T.pts[(i + 2) % 3] - apex
            record(A, start, surface.cone_of(T.poly, T.verts[(i + 1) % 3]))
            record(B, start, surface.cone_of(T.poly, T.verts[(i + 2) % 3]))
            # (placed-triangle points, triangle index, entry edge, wedge cw, wedge ccw)
            stack = [(ti, (i + 1) % 3, 1.0 + 0j, -apex, A, B)]
            while stack:
                cur, k, s, t, l, r = stack.pop()
                a, b = s * tris[cur].pts[k] + t, s * tris[cur].pts[(k + 1) % 3] + t
                if _seg_distance(a, b) > lim:
                    continue
                visits += 1
                if visits > budget:
                    partial = _assemble(found, complete=False)
                    raise BudgetExceededError(f"saddle connection search exceeded {budget} steps", partial)
                nt, nk = neighbor[(cur, k)]
                N = tris[nt]
                # a, b = cw, ccw endpoints of the crossed edge; N.pts[nk] sits on b
                y0, y1 = N.pts[nk], N.pts[(nk + 1) % 3]
                s2 = (a - b) / (y1 - y0)
                s2 = complex(round(s2.real), round(s2.imag))
                t2 = b - s2 * y0
                c = s2 * N.pts[(nk + 2) % 3] + t2
                tol_l = WEDGE_TOL * abs(l) * abs(c)
                tol_r = WEDGE_TOL * abs(r) * abs(c)
                left_ok = _cross(l, c) > tol_l
                right_ok = _cross(c, r) > tol_r
                e_cw, e_ccw = (nk + 1) % 3, (nk + 2) % 3
                if left_ok and right_ok:
                    record(c, start, surface.cone_of(N.poly, N.verts[(nk + 2) % 3]))
                    stack.append((nt, e_cw, s2, t2, l, c))
                    stack.append((nt, e_ccw, s2, t2, c, r))
                elif not left_ok:
                    stack.append((nt, e_ccw, s2, t2, l, r))
                else:
                    stack.append((nt, e_cw, s2, t2, l, r))
    return _assemble(found, complete=True)


def _assemble(found: dict, complete: bool) -> SaddleConnectionSet:
    items = sorted(((v, k[0], k[1]) for k, v in found.items()), key=lambda x: (_sort_key(x[0]), x[1], x[2]))
    return SaddleConnectionSet(
        tuple(v for v, _, _ in items),
        tuple(a for _, a, _ in items),
        tuple(b for _, _, b in items),
        complete,
    )


def intersection_sum(chain, theta: float) -> float:
    """sum_i |Re(exp(i theta/2) v_i)| over the holonomies of a saddle-connection chain."""
    vs = list(chain.holonomies if isinstance(chain, SaddleConnectionSet) else chain)
    if not vs:
        raise InvalidInputError("intersection_sum needs a nonempty chain")
    rot = cmath.exp(0.5j * theta)
    return float(sum(abs((rot * complex(v)).real) for v in vs))
