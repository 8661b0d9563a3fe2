import cmath
import math

import numpy as np
import pytest

from kobalt.errors import BudgetExceededError, InvalidInputError
from kobalt.flat_core import (
    PolygonSurface,
    intersection_sum,
    l_shaped_surface,
    pillowcase,
    rotation,
    saddle_connections,
    sl2_action,
    square_torus,
)


def lattice_saddles(L, a=1.0, b=1.0):
    """Primitive vectors of the lattice aZ + i bZ with length <= L."""
    n = int(L / min(a, b)) + 1
    pts = [complex(a * m, b * k) for m in range(-n, n + 1) for k in range(-n, n + 1) if math.gcd(m, k) == 1]
    return [v for v in pts if abs(v) <= L + 1e-12]


def as_sorted(vs):
    return sorted((complex(round(v.real, 9), round(v.imag, 9)) for v in vs), key=lambda v: (v.real, v.imag))


class TestPolygonSurface:
    def test_square_torus_cone(self):
        s = square_torus()
        assert len(s.cone_points) == 1
        assert s.cone_points[0].angle == pytest.approx(2 * math.pi)
        assert s.is_translation and s.area == pytest.approx(1)

    def test_l_shape_cone(self):
        s = l_shaped_surface()
        angles = sorted(c.angle for c in s.cone_points)
        assert angles[-1] == pytest.approx(6 * math.pi)
        assert s.area == pytest.approx(3)

    def test_pillowcase_cones(self):
        s = pillowcase()
        assert not s.is_translation
        assert sorted(round(c.angle / math.pi, 9) for c in s.cone_points) == [1, 1, 1, 1]

    def test_rejects_bad_gluing(self):
        with pytest.raises(InvalidInputError):
            PolygonSurface([[0, 1, 1 + 1j, 1j]], [(0, 0, 0, 1, 1), (0, 2, 0, 3, 1)])
        with pytest.raises(InvalidInputError):
            PolygonSurface([[0, 1, 1 + 1j, 1j]], [(0, 0, 0, 2, 1)])
        with pytest.raises(InvalidInputError):
            PolygonSurface([[0, 1j, 1 + 1j, 1]], [(0, 0, 0, 2, 1), (0, 1, 0, 3, 1)])

    def test_json_round_trip(self):
        s = l_shaped_surface()
        assert PolygonSurface.from_json(s.to_json()) == s
        with pytest.raises(InvalidInputError):
            PolygonSurface.from_json({"polygons": [[1, 2]]})


class TestSaddleConnections:
    def test_square_torus_matches_lattice(self):
        sc = saddle_connections(square_torus(), 2.5)
        assert as_sorted(sc) == as_sorted(lattice_saddles(2.5))
        assert len(sc) == 16 and sc.complete

    def test_square_torus_large(self):
        sc = saddle_connections(square_torus(), 12.0)
        assert as_sorted(sc) == as_sorted(lattice_saddles(12.0))

    def test_rectangle_torus(self):
        s = PolygonSurface([[0, 2, 2 + 1j, 1j]], [(0, 0, 0, 2, 1), (0, 1, 0, 3, 1)])
        sc = saddle_connections(s, 6.0)
        assert as_sorted(sc) == as_sorted(lattice_saddles(6.0, 2.0, 1.0))

    def test_sorted_by_length(self):
        lengths = [abs(v) for v in saddle_connections(l_shaped_surface(), 5.0)]
        assert lengths == sorted(lengths) or np.all(np.diff(lengths) > -1e-12)

    def test_l_shape_unit_edges(self):
        sc = saddle_connections(l_shaped_surface(), 1.0)
        assert as_sorted(sc) == as_sorted([1, 1j, -1, -1j])

    def test_empty_below_shortest_edge(self):
        for s in (square_torus(), l_shaped_surface(), pillowcase()):
            assert len(saddle_connections(s, 0.5)) == 0

    def test_pillowcase(self):
        sc = saddle_connections(pillowcase(), 1.0)
        assert as_sorted(sc) == as_sorted([1, 1j, 1, 1j])

    def test_rotation_equivariance(self):
        for s in (square_torus(), l_shaped_surface()):
            phi = 0.7
            base = saddle_connections(s, 4.0)
            rot = saddle_connections(sl2_action(rotation(phi), s), 4.0)
            turned = [cmath.exp(1j * phi) * v for v in base]
            assert len(rot) == len(turned)
            for v in turned:
                assert min(abs(v - w) for w in rot) < 1e-10
            np.testing.assert_allclose(sorted(abs(v) for v in rot), sorted(abs(v) for v in base), atol=1e-10)

    def test_shear_equivariance(self):
        A = np.array([[1.0, 1.0], [0.0, 1.0]])
        sheared = saddle_connections(sl2_action(A, square_torus()), 3.0)
        for v in sheared:
            pre = complex(v.real - v.imag, v.imag)
            assert math.gcd(round(pre.real), round(pre.imag)) == 1

    def test_budget(self):
        with pytest.raises(BudgetExceededError) as info:
            saddle_connections(square_torus(), 30.0, budget=50)
        assert info.value.partial is not None and not info.value.partial.complete

    def test_rejects_nonpositive_length(self):
        with pytest.raises(InvalidInputError):
            saddle_connections(square_torus(), 0.0)


def line_integral(chain, theta, n=2000):
    """Midpoint-rule integral of |Re(exp(i theta/2) dz)| along each straight segment."""
    rot = cmath.exp(0.5j * theta)
    total = 0.0
    for v in chain:
        s = (np.arange(n) + 0.5) / n
        dz = np.full_like(s, v / n, dtype=complex)
        total += float(np.sum(np.abs((rot * dz).real)))
    return total


class TestIntersectionSum:
    def test_single(self):
        assert intersection_sum([1], 0.0) == pytest.approx(1)
        assert intersection_sum([1], math.pi) == pytest.approx(0, abs=1e-15)

    def test_chain_sweep(self):
        chain = [1 + 1j, 1 - 1j]
        for th in np.linspace(0, 2 * math.pi, 17):
            expected = math.sqrt(2) * (abs(math.cos(th / 2 + math.pi / 4)) + abs(math.cos(th / 2 - math.pi / 4)))
            assert intersection_sum(chain, th) == pytest.approx(expected, abs=1e-12)
            assert intersection_sum(chain, th) == pytest.approx(line_integral(chain, th), abs=1e-10)

    def test_accepts_saddle_set(self):
        sc = saddle_connections(square_torus(), 1.0)
        assert intersection_sum(sc, 0.0) == pytest.approx(2.0)

    def test_empty(self):
        with pytest.raises(InvalidInputError):
            intersection_sum([], 0.0)
