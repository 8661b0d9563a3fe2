"""Flat geometry: tori as T_{1,1} and polygonal translation surfaces."""

from .surfaces import (
    ConePoint,
    PolygonSurface,
    SaddleConnectionSet,
    intersection_sum,
    l_shaped_surface,
    pillowcase,
    saddle_connections,
    sl2_action_surface,
    square_torus,
)
from .torus import (
    CurveClass,
    FlatTorus,
    TeichGeodesicLift,
    TorusFoliation,
    TorusQuadDiff,
    cayley_to_disk,
    diagonal_flow,
    disk_parametrization,
    extremal_length,
    extremal_length_foliation,
    extremal_length_horocycle_level,
    geodesic_lift,
    intersection_curves,
    intersection_foliation_curve,
    intersection_foliations,
    rotation,
    sl2_action_torus,
    sup_ratio_distance,
    torus_teich_distance,
    vertical_foliation,
)


def sl2_action(A, obj):
    """Act by A in SL2(R) on a torus quadratic differential or a polygon surface."""
    if isinstance(obj, PolygonSurface):
        return sl2_action_surface(A, obj)
    return sl2_action_torus(A, obj)
