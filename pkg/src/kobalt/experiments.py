"""Experiment runners: one per CLI subcommand, each returning a ReportDocument.

Payloads are plain JSON documents. Every runner has defaults that reproduce
the canonical setups (standard rays and delta in CH^2, the square torus
tau = i with unit-mass dz^2), so an empty payload is always valid.
"""

from __future__ import annotations

import cmath
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import bsd_core as bsd
from . import ch2_geometry as ch2
from . import spectral_paths as sp
from .errors import InvalidInputError
from .flat_core import surfaces as fs
from .flat_core import torus as ft
from .reflections import reflection_battery
from .report import ReportDocument, parallel_map


class UsageError(InvalidInputError):
    """Payload does not match the subcommand's schema."""


@dataclass
class ExperimentConfig:
    subcommand: str
    payload: dict = field(default_factory=dict)
    grid: int | None = None
    seed: int = 0
    out: str | None = None

    def __post_init__(self):
        if self.subcommand not in RUNNERS:
            raise UsageError(f"unknown subcommand {self.subcommand!r}")
        if not isinstance(self.payload, dict):
            raise UsageError("input payload must be a JSON object")
        unknown = sorted(set(self.payload) - PAYLOAD_KEYS[self.subcommand])
        if unknown:
            raise UsageError(f"unknown payload keys for {self.subcommand}: {unknown}")
        if self.grid is not None and int(self.grid) < 1:
            raise UsageError("grids must be nonempty")
        if int(self.seed) < 0 or int(self.seed) >= 2**64:
            raise UsageError("seed must be an unsigned 64-bit integer")


def _complex(x, name: str) -> complex:
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, (list, tuple)) and len(x) == 2 and all(isinstance(v, (int, float)) for v in x):
        return complex(x[0], x[1])
    raise UsageError(f"{name} must be a real number or a [re, im] pair")


def _get(payload: dict, key: str, default, kind=None):
    if key not in payload:
        return default
    val = payload[key]
    if kind is not None and not isinstance(val, kind):
        raise UsageError(f"{key!r} has the wrong type")
    return val


def _curve(payload: dict, default=(1, 1)) -> ft.CurveClass:
    pq = _get(payload, "curve", list(default), list)
    if len(pq) != 2 or not all(isinstance(v, int) for v in pq):
        raise UsageError("curve must be an integer pair [p, q]")
    return ft.CurveClass(*pq)


def _cx(z: complex) -> list:
    return [z.real, z.imag]


# --- bsd ----------------------------------------------------------------


def run_bsd_distance(cfg: ExperimentConfig) -> ReportDocument:
    pl = cfg.payload
    try:
        shape = bsd.MatrixBallShape.from_json(pl["shape"]) if "shape" in pl else bsd.MatrixBallShape.polydisk(2)
        p = bsd.matrix_from_json(pl["p"]) if "p" in pl else np.zeros((2, 2))
        q = bsd.matrix_from_json(pl["q"]) if "q" in pl else np.diag([0.5, 0.2])
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"bad bsd-distance payload: {exc}") from exc
    doc = ReportDocument("bsd-distance", {"shape": shape.to_json(), "p": bsd.matrix_to_json(p), "q": bsd.matrix_to_json(q)})
    d = bsd.kobayashi_distance(shape, p, q)
    d_rev = bsd.kobayashi_distance(shape, q, p)
    doc.results.update(distance=d, norm_p=bsd.operator_norm(p), norm_q=bsd.operator_norm(q))
    doc.residuals["symmetry"] = abs(d - d_rev)
    doc.check("symmetry d(p,q) = d(q,p)", 0.0, abs(d - d_rev), 1e-9, "DERIVED")
    if not np.any(p):
        doc.check("d(0,q) = artanh ||q||", float(np.arctanh(bsd.operator_norm(q))), d, 1e-12, "PAPER")
    if shape.kind is bsd.BallKind.POLYDISK:
        dp, dq = np.diag(shape.conform(p)), np.diag(shape.conform(q))
        factors = [float(np.arctanh(abs((b - a) / (1 - np.conj(a) * b)))) for a, b in zip(dp, dq)]
        doc.results["factor_distances"] = factors
        doc.check("polydisk distance = max factor distance", max(factors), d, 1e-12, "PAPER")
    return doc


def _default_path() -> sp.AnalyticMatrixPath:
    shape = bsd.MatrixBallShape(2, 2)
    return sp.AnalyticMatrixPath(shape, [0.5 * np.eye(2), np.array([[0, 1], [1, 0]])])


def run_bsd_roughness(cfg: ExperimentConfig) -> ReportDocument:
    pl = cfg.payload
    default = "coeffs" not in pl
    try:
        path = _default_path() if default else sp.AnalyticMatrixPath.from_json(
            {"shape": pl["shape"], "coeffs": pl["coeffs"], "domain_halfwidth": pl.get("domain_halfwidth", 1.0)}
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"bad bsd-roughness payload: {exc}") from exc
    eps = float(_get(pl, "epsilon", 0.1, (int, float)))
    n = cfg.grid or int(_get(pl, "grid", sp.DEFAULT_POINTS, int))
    if n < 8:
        raise UsageError("bsd-roughness needs a grid of at least 8 points")
    ts = sp.geometric_grid(eps, n)
    sample = sp.eigenvalue_path(path, ts)
    dist = sp.distance_along_path(path, ts)
    fit = sp.fit_puiseux(ts, dist)
    d0 = float(sp.distance_along_path(path, [0.0])[0])
    d_minus = sp.distance_along_path(path, -ts)
    smooth = sp.classify_smoothness(ts, dist, d_minus, d0)

    doc = ReportDocument("bsd-roughness", {"path": path.to_json(), "epsilon": eps, "grid": n})
    doc.results.update(
        puiseux_fit=fit.to_json(),
        smoothness=smooth.to_json(),
        k_gt_1_observed=fit.branch_index > 1,
        start_off_basepoint=path.starts_off_basepoint(),
    )
    doc.residuals["puiseux"] = fit.residual
    doc.check("Puiseux fit converged", True, fit.converged, 0.0, "DERIVED")
    if default:
        oracle = np.arctanh(0.5 + ts)
        err = float(np.max(np.abs(fit(ts) - oracle)))
        doc.residuals["fit_vs_artanh"] = err
        doc.check("branch index K", 1, fit.branch_index, 0.0, "PAPER")
        doc.check("fit vs artanh(1/2 + t)", 0.0, err, 1e-8, "DERIVED")
    cols = path.shape.cols
    rows = [[t, *sample.lambdas[i], dist[i]] for i, t in enumerate(ts)]
    doc.table("path", ["t", *[f"lambda_{j + 1}" for j in range(cols)], "distance"], rows)
    return doc


# --- ch2 ----------------------------------------------------------------


def run_ch2_horocycle(cfg: ExperimentConfig, metric_scale: float = 1.0) -> ReportDocument:
    pl = cfg.payload
    method = _get(pl, "method", "closed", str)
    if method not in ("closed", "limit"):
        raise UsageError("method must be 'closed' or 'limit'")
    n = cfg.grid or int(_get(pl, "samples", 65, int))
    span = float(_get(pl, "span", 3.0, (int, float)))
    res = ch2.horocycle_gap(method)
    gap = metric_scale * res.gap
    tol = 1e-8 if method == "closed" else 1e-4
    doc = ReportDocument("ch2-horocycle", {"method": method, "samples": n, "span": span})
    doc.results.update(t1=res.u1, t2=res.u2, gap=gap, exp_gap=math.exp(-gap), P1=list(res.p1.vec), P2=list(res.p2.vec))
    d12 = metric_scale * ch2.ch2_distance(res.p1, res.p2)
    doc.residuals["gap"] = abs(gap - math.log(2.0))
    doc.check("t2 - t1 = log 2", math.log(2.0), gap, tol, "PAPER")
    doc.check("d(P1, P2) = log 2", math.log(2.0), d12, tol, "PAPER")
    doc.check("exp(t1 - t2) = 1/2", 0.5, math.exp(-gap), tol, "PAPER")

    g1, g2 = ch2.standard_rays()
    delta = ch2.delta_geodesic()
    us = np.linspace(-span, span, n) if n > 1 else np.array([0.0])
    rows = []
    for u in us:
        p = delta(float(u))
        rows.append([float(u), ch2.busemann_parameter(g1, p), ch2.busemann_parameter(g2, p)])
    doc.table("levels", ["u", "t_gamma1", "t_gamma2"], rows)
    return doc


# --- torus ----------------------------------------------------------------


def _torus_setup(pl: dict):
    tau = _complex(_get(pl, "tau", [0.0, 1.0]), "tau")
    torus = ft.FlatTorus(tau)
    if "c" in pl:
        qd = ft.TorusQuadDiff(torus, _complex(pl["c"], "c"))
    else:
        qd = ft.TorusQuadDiff.unit_mass(torus)
    return torus, qd


def run_torus_intersection(cfg: ExperimentConfig) -> ReportDocument:
    pl = cfg.payload
    torus, qd = _torus_setup(pl)
    curve = _curve(pl)
    n = cfg.grid or int(_get(pl, "theta_grid", 64, int))
    thetas = 2 * math.pi * np.arange(n) / n
    vals = np.array([ft.intersection_foliation_curve(ft.vertical_foliation(qd, th), curve) for th in thetas])
    # closed form |sqrt(c)| |p + q tau| |cos(theta/2 + arg sqrt(c) + arg(p + q tau))|
    r, h = cmath.sqrt(qd.c), torus.holonomy(curve)
    closed = abs(r) * abs(h) * np.abs(np.cos(thetas / 2 + cmath.phase(r) + cmath.phase(h)))
    err = float(np.max(np.abs(vals - closed)))
    doc = ReportDocument(
        "torus-intersection",
        {"tau": _cx(torus.tau), "c": _cx(qd.c), "curve": [curve.p, curve.q], "theta_grid": n},
    )
    doc.results.update(min=float(vals.min()), max=float(vals.max()), spread=float(vals.max() - vals.min()))
    doc.residuals["closed_form"] = err
    doc.check("sweep matches closed form", 0.0, err, 1e-10, "DERIVED")
    doc.check("sweep is nonconstant (spread >= 0.1)", True, bool(vals.max() - vals.min() >= 0.1), 0.0, "DERIVED")
    doc.table("sweep", ["theta", "intersection", "closed_form"], [[t, v, c] for t, v, c in zip(thetas, vals, closed)])
    return doc


def run_torus_extremal_length(cfg: ExperimentConfig) -> ReportDocument:
    pl = cfg.payload
    torus, qd = _torus_setup(pl)
    curve = _curve(pl)
    lam = ft.extremal_length(curve, torus)
    # the curve as a measured foliation: i(F, a) = |q|, i(F, b) = |p|
    F = ft.TorusFoliation.from_periods(-curve.q, curve.p, torus)
    lam_hm = ft.extremal_length_foliation(F, torus)
    doc = ReportDocument("torus-extremal-length", {"tau": _cx(torus.tau), "curve": [curve.p, curve.q]})
    doc.results.update(extremal_length=lam, quadratic_differential_mass=lam_hm)
    doc.residuals["hubbard_masur"] = abs(lam - lam_hm)
    doc.check("lambda(curve) = ||q_F||_1", lam_hm, lam, 1e-12 * max(1.0, lam), "DERIVED")

    if abs(qd.mass - 1.0) <= 1e-12:
        n = cfg.grid or int(_get(pl, "lift_grid", 5, int))
        ts = np.linspace(-1.0, 1.0, n)
        rows, worst = [], 0.0
        for t in ts:
            Ft = ft.geodesic_lift(qd, t).F_plus
            for s in ts:
                Xs = ft.geodesic_lift(qd, s).torus
                ratio = ft.extremal_length_foliation(Ft, Xs) / math.exp(2 * (t - s))
                worst = max(worst, abs(ratio - 1.0))
                rows.append([t, s, ratio])
        doc.residuals["horocycle_law"] = worst
        doc.check("lambda(F(q_t), X_s) = exp(2(t - s))", 0.0, worst, 1e-10, "PAPER")
        doc.table("horocycle_law", ["t", "s", "ratio"], rows)
    return doc


def run_teich_distance(cfg: ExperimentConfig) -> ReportDocument:
    pl = cfg.payload
    t1 = ft.FlatTorus(_complex(_get(pl, "tau1", [0.0, 1.0]), "tau1"))
    t2 = ft.FlatTorus(_complex(_get(pl, "tau2", [0.0, 2.0]), "tau2"))
    bound = int(_get(pl, "bound", 60, int))
    d = ft.torus_teich_distance(t1, t2)
    d_sup = ft.sup_ratio_distance(t1, t2, bound)
    doc = ReportDocument("teich-distance", {"tau1": _cx(t1.tau), "tau2": _cx(t2.tau), "bound": bound})
    doc.results.update(closed_form=d, sup_ratio=d_sup)
    doc.residuals["oracle"] = abs(d - d_sup)
    doc.check("closed form vs extremal-length sup ratio", d, d_sup, 1e-3, "DERIVED")
    return doc


# --- saddle connections ---------------------------------------------------

NAMED_SURFACES = {
    "square-torus": fs.square_torus,
    "l-shape": fs.l_shaped_surface,
    "pillowcase": fs.pillowcase,
}


def lattice_oracle(L: float) -> list[complex]:
    """Primitive vectors of Z[i] with length <= L: the square torus's saddle connections."""
    n = int(math.floor(L))
    return sorted(
        (complex(a, b) for a in range(-n, n + 1) for b in range(-n, n + 1)
         if (a, b) != (0, 0) and math.gcd(a, b) == 1 and a * a + b * b <= L * L * (1 + 1e-12)),
        key=fs._sort_key,
    )


def _same_vectors(xs, ys, tol: float) -> bool:
    if len(xs) != len(ys):
        return False
    used = [False] * len(ys)
    for x in xs:
        for j, y in enumerate(ys):
            if not used[j] and abs(x - y) <= tol:
                used[j] = True
                break
        else:
            return False
    return True


def run_saddle_connections(cfg: ExperimentConfig) -> ReportDocument:
    pl = cfg.payload
    surf_arg = _get(pl, "surface", "square-torus", (str, dict))
    if isinstance(surf_arg, str):
        if surf_arg not in NAMED_SURFACES:
            raise UsageError(f"unknown surface {surf_arg!r}; choose from {sorted(NAMED_SURFACES)}")
        surface = NAMED_SURFACES[surf_arg]()
    else:
        surface = fs.PolygonSurface.from_json(surf_arg)
    L = float(_get(pl, "L_max", 2.5, (int, float)))
    phi = float(_get(pl, "rotation", 0.3, (int, float)))
    sc = fs.saddle_connections(surface, L)
    doc = ReportDocument(
        "saddle-connections",
        {"surface": surf_arg if isinstance(surf_arg, str) else surface.to_json(), "L_max": L, "rotation": phi},
    )
    doc.results.update(count=len(sc), translation=surface.is_translation, complete=sc.complete)
    if surf_arg == "square-torus":
        oracle = lattice_oracle(L)
        doc.check("matches lattice-point oracle", True, _same_vectors(list(sc), oracle, 1e-12), 0.0, "DERIVED")
    rot = fs.saddle_connections(fs.sl2_action_surface(ft.rotation(phi), surface), L)
    turned = [cmath.exp(1j * phi) * v for v in sc]
    if not surface.is_translation:
        turned = [fs._canon_sign(v) for v in turned]
    doc.check("rotation equivariance", True, _same_vectors(list(rot), turned, 1e-10), 0.0, "TRIVIAL")
    doc.table(
        "holonomies",
        ["re", "im", "length", "start_cone", "end_cone"],
        [[v.real, v.imag, abs(v), s, e] for v, s, e in zip(sc.holonomies, sc.starts, sc.ends)],
    )
    return doc


# --- reflections ------------------------------------------------------------


def run_reflections_check(cfg: ExperimentConfig) -> ReportDocument:
    n = cfg.grid or int(_get(cfg.payload, "samples", 10_000, int))
    out = reflection_battery(n, cfg.seed)
    doc = ReportDocument("reflections-check", {"samples": n, "seed": cfg.seed})
    for key, val in out.items():
        if isinstance(val, int):
            doc.results[key] = val
            doc.check(key, 0, val, 0.0, "TRIVIAL")
        else:
            doc.residuals[key] = val
            doc.check(key, 0.0, val, 1e-9, "DERIVED")
    return doc


# --- aggregate --------------------------------------------------------------


def paper_suite(seed: int = 0, metric_scale: float = 1.0) -> ReportDocument:
    """Every flagship regression in one report.

    ``metric_scale`` rescales the CH^2 metric and exists only so a test can
    confirm that a wrong normalization breaks the log 2 check.
    """
    doc = ReportDocument("paper-suite", {"seed": seed})
    rng = np.random.default_rng(seed)

    tic = time.perf_counter()
    closed = ch2.horocycle_gap("closed")
    elapsed = time.perf_counter() - tic
    limit = ch2.horocycle_gap("limit")
    doc.results.update(gap_closed=metric_scale * closed.gap, gap_limit=metric_scale * limit.gap, gap_seconds=elapsed)
    doc.check("horocycle gap log 2 (closed Busemann)", math.log(2), metric_scale * closed.gap, 1e-8, "PAPER")
    doc.check("horocycle gap log 2 (limit Busemann)", math.log(2), metric_scale * limit.gap, 1e-4, "PAPER")
    doc.check("intersection constant exp(t1 - t2) = 1/2", 0.5, math.exp(-metric_scale * closed.gap), 1e-8, "PAPER")

    qd = ft.TorusQuadDiff.unit_mass(1j)
    worst = 0.0
    for t in np.linspace(-1, 1, 5):
        Ft = ft.geodesic_lift(qd, t).F_plus
        for s in np.linspace(-1, 1, 5):
            Xs = ft.geodesic_lift(qd, s).torus
            worst = max(worst, abs(ft.extremal_length_foliation(Ft, Xs) / math.exp(2 * (t - s)) - 1))
    doc.check("extremal-length horocycle law exp(2(t - s))", 0.0, worst, 1e-10, "PAPER")

    thetas = 2 * math.pi * np.arange(64) / 64
    sweep = np.array([ft.intersection_foliation_curve(ft.vertical_foliation(qd, th), ft.CurveClass(1, 1)) for th in thetas])
    closed_sweep = math.sqrt(2) * np.abs(np.cos(thetas / 2 + math.pi / 4))
    doc.check("theta sweep = sqrt(2)|cos(theta/2 + pi/4)|", 0.0, float(np.max(np.abs(sweep - closed_sweep))), 1e-10, "PAPER")
    doc.check("theta sweep spread >= 0.1", True, bool(sweep.max() - sweep.min() >= 0.1), 0.0, "PAPER")
    doc.check(
        "i(F(q), F(-q)) = 1 for unit mass",
        1.0,
        ft.intersection_foliations(ft.vertical_foliation(qd), ft.vertical_foliation(qd, math.pi)),
        1e-12,
        "DERIVED",
    )

    worst = 0.0
    shape = bsd.MatrixBallShape(2, 3)
    for _ in range(1000):
        V = rng.normal(size=(2, 3)) + 1j * rng.normal(size=(2, 3))
        V *= rng.uniform(0, 0.99) / bsd.operator_norm(V)
        worst = max(worst, abs(bsd.distance_from_origin(shape, V) - math.atanh(bsd.operator_norm(V))))
    doc.check("d(0, V) = artanh ||V||", 0.0, worst, 1e-12, "PAPER")
    pd = bsd.MatrixBallShape.polydisk(2)
    dpoly = bsd.kobayashi_distance(pd, np.zeros((2, 2)), np.diag([0.5, 0.2]))
    doc.check("polydisk sup-metric: d = 1/2 log 3", 0.5 * math.log(3), dpoly, 1e-12, "PAPER")

    path = _default_path()
    ts = sp.geometric_grid(0.1)
    fit = sp.fit_puiseux(ts, sp.distance_along_path(path, ts))
    doc.check("Puiseux branch index K = 1", 1, fit.branch_index, 0.0, "PAPER")
    doc.check("Puiseux fit vs artanh(1/2 + t)", 0.0, float(np.max(np.abs(fit(ts) - np.arctanh(0.5 + ts)))), 1e-8, "DERIVED")
    fit2 = sp.fit_puiseux(ts, 1.0 + np.sqrt(ts) + ts)
    doc.check("Puiseux branch index K = 2 for a sqrt branch", 2, fit2.branch_index, 0.0, "PAPER")

    pairs = [
        (complex(rng.uniform(-0.5, 0.5), rng.uniform(0.8, 2.0)), complex(rng.uniform(-0.5, 0.5), rng.uniform(0.8, 2.0)))
        for _ in range(100)
    ]
    tic = time.perf_counter()
    diffs = parallel_map(lambda ab: abs(ft.torus_teich_distance(*ab) - ft.sup_ratio_distance(*ab)), pairs)
    doc.results["torus_oracle_seconds"] = time.perf_counter() - tic
    doc.check("torus distance vs sup-ratio oracle", 0.0, max(diffs), 1e-3, "DERIVED")

    battery = reflection_battery(10_000, seed)
    worst = max(v for v in battery.values() if isinstance(v, float))
    bad = sum(v for v in battery.values() if isinstance(v, int))
    doc.check("reflection battery worst residual", 0.0, worst, 1e-9, "DERIVED")
    doc.check("reflection battery violations", 0, bad, 0.0, "DERIVED")

    sc = fs.saddle_connections(fs.square_torus(), 2.5)
    doc.check("square-torus saddle connections = lattice oracle", True, _same_vectors(list(sc), lattice_oracle(2.5), 1e-12), 0.0, "DERIVED")
    return doc


def run_paper_suite(cfg: ExperimentConfig) -> ReportDocument:
    return paper_suite(cfg.seed)


PAYLOAD_KEYS = {
    "bsd-distance": {"shape", "p", "q"},
    "bsd-roughness": {"shape", "coeffs", "domain_halfwidth", "epsilon", "grid"},
    "ch2-horocycle": {"method", "samples", "span"},
    "torus-intersection": {"tau", "c", "curve", "theta_grid"},
    "torus-extremal-length": {"tau", "c", "curve", "lift_grid"},
    "teich-distance": {"tau1", "tau2", "bound"},
    "saddle-connections": {"surface", "L_max", "rotation"},
    "reflections-check": {"samples"},
    "paper-suite": set(),
}

RUNNERS = {
    "bsd-distance": run_bsd_distance,
    "bsd-roughness": run_bsd_roughness,
    "ch2-horocycle": run_ch2_horocycle,
    "torus-intersection": run_torus_intersection,
    "torus-extremal-length": run_torus_extremal_length,
    "teich-distance": run_teich_distance,
    "saddle-connections": run_saddle_connections,
    "reflections-check": run_reflections_check,
    "paper-suite": run_paper_suite,
}


def run(config: ExperimentConfig) -> ReportDocument:
    return RUNNERS[config.subcommand](config)
