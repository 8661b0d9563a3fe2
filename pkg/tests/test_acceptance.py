"""The nine acceptance criteria, each at its stated tolerance.

Every test prints one ``ACCEPTANCE <n> PASS|FAIL`` line (run with ``-s`` to
see them) before asserting.
"""

import cmath
import math
import time

import numpy as np
import pytest

from kobalt.bsd_core import MatrixBallShape, distance_from_origin, kobayashi_distance, operator_norm
from kobalt.ch2_geometry import ch2_distance, horocycle_gap
from kobalt.flat_core import (
    CurveClass,
    TorusQuadDiff,
    extremal_length_foliation,
    geodesic_lift,
    intersection_foliation_curve,
    rotation,
    saddle_connections,
    sl2_action,
    square_torus,
    sup_ratio_distance,
    torus_teich_distance,
    vertical_foliation,
)
from kobalt.reflections import reflection_battery
from kobalt.spectral_paths import AnalyticMatrixPath, distance_along_path, fit_puiseux, geometric_grid


def verdict(n, ok, detail):
    print(f"\nACCEPTANCE {n} {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, detail


def test_1_horocycle_gap_is_log_two():
    tic = time.perf_counter()
    closed = horocycle_gap("closed")
    elapsed = time.perf_counter() - tic
    limit = horocycle_gap("limit")
    d_closed = ch2_distance(closed.p1, closed.p2)
    err_c = abs(d_closed - math.log(2))
    err_l = abs(ch2_distance(limit.p1, limit.p2) - math.log(2))
    ok = err_c < 1e-8 and err_l < 1e-4 and elapsed < 1.0
    verdict(1, ok, f"closed err={err_c:.3g}, limit err={err_l:.3g}, runtime={elapsed:.3g}s")


def test_2_intersection_constant_is_half():
    res = horocycle_gap("closed")
    val = math.exp(res.u1 - res.u2)
    verdict(2, abs(val - 0.5) < 1e-8, f"exp(t1 - t2)={val!r}")


def test_3_extremal_length_horocycle_law():
    qd = TorusQuadDiff.unit_mass(1j)
    grid = np.linspace(-1.0, 1.0, 5)
    ratios = []
    for t in grid:
        Ft = geodesic_lift(qd, t).F_plus
        for s in grid:
            ratios.append(extremal_length_foliation(Ft, geodesic_lift(qd, s).torus) / math.exp(2 * (t - s)))
    ratios = np.array(ratios)
    ok = bool(np.all(ratios >= 1 - 1e-10) and np.all(ratios <= 1 + 1e-10))
    verdict(3, ok, f"ratio range [{float(ratios.min())!r}, {float(ratios.max())!r}] over 5x5 grid")


def test_4_theta_sweep_is_nonconstant():
    qd = TorusQuadDiff.unit_mass(1j)
    thetas = 2 * math.pi * np.arange(64) / 64
    vals = np.array([intersection_foliation_curve(vertical_foliation(qd, th), CurveClass(1, 1)) for th in thetas])
    closed = math.sqrt(2) * np.abs(np.cos(thetas / 2 + math.pi / 4))
    err = float(np.max(np.abs(vals - closed)))
    spread = float(vals.max() - vals.min())
    verdict(4, spread >= 0.1 and err < 1e-10, f"spread={spread:.6g}, closed-form err={err:.3g}")


def test_5_distance_formula(rng):
    worst = 0.0
    shapes = [MatrixBallShape(2, 2), MatrixBallShape(3, 2), MatrixBallShape.complex_ball(3), MatrixBallShape(1, 4)]
    for k in range(1000):
        shape = shapes[k % len(shapes)]
        V = rng.normal(size=(shape.rows, shape.cols)) + 1j * rng.normal(size=(shape.rows, shape.cols))
        V *= rng.uniform(0, 0.999) / operator_norm(V)
        worst = max(worst, abs(distance_from_origin(shape, V) - np.arctanh(np.linalg.svd(V, compute_uv=False)[0])))
    poly_worst = 0.0
    pd = MatrixBallShape.polydisk(3)
    for _ in range(200):
        a = 0.95 * rng.uniform(size=3) * np.exp(2j * np.pi * rng.uniform(size=3))
        b = 0.95 * rng.uniform(size=3) * np.exp(2j * np.pi * rng.uniform(size=3))
        factors = np.arctanh(np.abs((b - a) / (1 - np.conj(a) * b)))
        poly_worst = max(poly_worst, abs(kobayashi_distance(pd, np.diag(a), np.diag(b)) - factors.max()))
    verdict(5, worst < 1e-12 and poly_worst < 1e-12, f"artanh err={worst:.3g}, polydisk sup err={poly_worst:.3g}")


def test_6_puiseux_regularity_probe():
    path = AnalyticMatrixPath(MatrixBallShape(2, 2), [0.5 * np.eye(2), np.array([[0, 1], [1, 0]])])
    ts = geometric_grid(0.1)
    fit = fit_puiseux(ts, distance_along_path(path, ts))
    err = float(np.max(np.abs(fit(ts) - np.arctanh(0.5 + ts))))
    fit2 = fit_puiseux(ts, 0.2 + 1.5 * np.sqrt(ts) - 0.7 * ts + 0.3 * ts**1.5)
    ok = fit.branch_index == 1 and err < 1e-8 and fit2.branch_index == 2
    verdict(6, ok, f"K={fit.branch_index}, residual vs artanh={err:.3g}, sqrt branch K={fit2.branch_index}")


def test_7_torus_distance_oracle(rng):
    tic = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        a = complex(rng.uniform(-0.5, 0.5), rng.uniform(0.8, 2.0))
        b = complex(rng.uniform(-0.5, 0.5), rng.uniform(0.8, 2.0))
        worst = max(worst, abs(torus_teich_distance(a, b) - sup_ratio_distance(a, b, bound=60)))
    elapsed = time.perf_counter() - tic
    verdict(7, worst < 1e-3 and elapsed < 10, f"worst gap={worst:.3g}, runtime={elapsed:.3g}s")


def test_8_reflection_battery():
    out = reflection_battery(10_000, seed=0)
    worst = max(v for v in out.values() if isinstance(v, float))
    violations = sum(v for v in out.values() if isinstance(v, int))
    verdict(8, worst < 1e-9 and violations == 0, f"worst residual={worst:.3g}, violations={violations}")


def test_9_square_torus_saddle_connections():
    L = 2.5
    sc = saddle_connections(square_torus(), L)
    oracle = {(m, n) for m in range(-3, 4) for n in range(-3, 4)
              if (m, n) != (0, 0) and math.gcd(m, n) == 1 and m * m + n * n <= L * L}
    found = {(round(v.real), round(v.imag)) for v in sc}
    exact = found == oracle and len(sc) == len(oracle)
    exact = exact and all(abs(v.real - round(v.real)) < 1e-12 and abs(v.imag - round(v.imag)) < 1e-12 for v in sc)
    phi = 0.61
    rot = list(saddle_connections(sl2_action(rotation(phi), square_torus()), L))
    turned = [cmath.exp(1j * phi) * v for v in sc]
    eq_err = max(min(abs(v - w) for w in rot) for v in turned)
    ok = exact and len(rot) == len(turned) and eq_err < 1e-10
    verdict(9, ok, f"{len(sc)} holonomies vs {len(oracle)} lattice points, rotation err={eq_err:.3g}")
