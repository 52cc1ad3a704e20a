"""Vectorized planar geometry kernels.

All routines accept ``(n, 2)`` float arrays and broadcast elementwise;
they are the single implementation used both by the fast builders and by
the brute-force audit oracles, so that boundary classifications agree.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "norms",
    "dist_point_segment",
    "segments_cross",
    "segment_arc_crossings",
]

#: Classification margin for tangential / endpoint-grazing arc intersections.
ARC_MARGIN = 1e-12


def norms(points: np.ndarray) -> np.ndarray:
    """Euclidean norms of an ``(n, 2)`` array (or a single point)."""
    points = np.asarray(points, dtype=float)
    return np.hypot(points[..., 0], points[..., 1])


def dist_point_segment(points: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distance from each point to the closed segment [a; b].

    ``points`` is ``(n, 2)``; ``a`` and ``b`` are either single points or
    ``(n, 2)`` arrays aligned with ``points``.
    """
    points = np.asarray(points, dtype=float)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    ab = b - a
    ap = points - a
    denom = ab[..., 0] ** 2 + ab[..., 1] ** 2
    with np.errstate(invalid="ignore", divide="ignore"):
        t = (ap[..., 0] * ab[..., 0] + ap[..., 1] * ab[..., 1]) / denom
    t = np.where(denom > 0.0, t, 0.0)
    t = np.clip(t, 0.0, 1.0)
    dx = ap[..., 0] - t * ab[..., 0]
    dy = ap[..., 1] - t * ab[..., 1]
    return np.hypot(dx, dy)


def _cross(ox, oy, ax, ay, bx, by):
    return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox)


def segments_cross(p: np.ndarray, q: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Whether the *open* segments (p; q) and (u; v) intersect, elementwise.

    Touching at a shared endpoint does not count.  Collinear overlap of
    positive length does.  Inputs broadcast; returns a boolean array.
    """
    p = np.asarray(p, float)
    q = np.asarray(q, float)
    u = np.asarray(u, float)
    v = np.asarray(v, float)
    d1 = _cross(u[..., 0], u[..., 1], v[..., 0], v[..., 1], p[..., 0], p[..., 1])
    d2 = _cross(u[..., 0], u[..., 1], v[..., 0], v[..., 1], q[..., 0], q[..., 1])
    d3 = _cross(p[..., 0], p[..., 1], q[..., 0], q[..., 1], u[..., 0], u[..., 1])
    d4 = _cross(p[..., 0], p[..., 1], q[..., 0], q[..., 1], v[..., 0], v[..., 1])

    proper = ((d1 > 0) != (d2 > 0)) & ((d3 > 0) != (d4 > 0)) \
        & (d1 != 0) & (d2 != 0) & (d3 != 0) & (d4 != 0)

    # Collinear configurations: all four orientations vanish.  The open
    # segments overlap iff their projections on the dominant axis overlap
    # on an interval of positive length.
    collinear = (d1 == 0) & (d2 == 0) & (d3 == 0) & (d4 == 0)
    if np.any(collinear):
        ax = np.abs(q[..., 0] - p[..., 0]) >= np.abs(q[..., 1] - p[..., 1])
        pc = np.where(ax, p[..., 0], p[..., 1])
        qc = np.where(ax, q[..., 0], q[..., 1])
        uc = np.where(ax, u[..., 0], u[..., 1])
        vc = np.where(ax, v[..., 0], v[..., 1])
        lo = np.maximum(np.minimum(pc, qc), np.minimum(uc, vc))
        hi = np.minimum(np.maximum(pc, qc), np.maximum(uc, vc))
        overlap = hi - lo > 0
        proper = proper | (collinear & overlap)

    # One endpoint of one segment strictly inside the other segment
    # (T-shaped contact) also violates open-segment disjointness.
    for d, end, seg_a, seg_b in ((d1, p, u, v), (d2, q, u, v), (d3, u, p, q), (d4, v, p, q)):
        on_line = (d == 0) & ~collinear
        if np.any(on_line):
            lox = np.minimum(seg_a[..., 0], seg_b[..., 0])
            hix = np.maximum(seg_a[..., 0], seg_b[..., 0])
            loy = np.minimum(seg_a[..., 1], seg_b[..., 1])
            hiy = np.maximum(seg_a[..., 1], seg_b[..., 1])
            strict_inside = (
                (end[..., 0] > lox) & (end[..., 0] < hix) & (end[..., 1] >= loy) & (end[..., 1] <= hiy)
            ) | (
                (end[..., 1] > loy) & (end[..., 1] < hiy) & (end[..., 0] >= lox) & (end[..., 0] <= hix)
            )
            proper = proper | (on_line & strict_inside)
    return proper


def segment_arc_crossings(
    a: np.ndarray,
    b: np.ndarray,
    radius: float,
    theta: float,
    arc_length: float,
    margin: float = ARC_MARGIN,
) -> tuple[np.ndarray, np.ndarray]:
    """Classify segments [a; b] against the arc of S(O, radius) at angle theta.

    The arc is centered at ``radius * e^(i theta)`` and has length
    ``arc_length`` (clamped to the full circle).  Returns ``(crossing,
    ambiguous)`` boolean arrays: ``crossing`` uses closed containment (an
    intersection point may sit on the segment's or the arc's boundary);
    ``ambiguous`` marks tangential or boundary-grazing cases that fall
    within ``margin`` and deserve visibility rather than silent
    resolution.
    """
    a = np.atleast_2d(np.asarray(a, float))
    b = np.atleast_2d(np.asarray(b, float))
    r = float(radius)
    half_angle = min(float(arc_length) / (2.0 * r), np.pi)

    d = b - a
    # |a + t d|^2 = r^2  ->  (d.d) t^2 + 2 (a.d) t + (a.a - r^2) = 0
    ca = d[:, 0] ** 2 + d[:, 1] ** 2
    cb = a[:, 0] * d[:, 0] + a[:, 1] * d[:, 1]
    cc = a[:, 0] ** 2 + a[:, 1] ** 2 - r * r
    disc = cb * cb - ca * cc

    crossing = np.zeros(len(a), dtype=bool)
    ambiguous = np.zeros(len(a), dtype=bool)

    # Degenerate zero-length segments never cross; tangency threshold is
    # relative to the segment scale.
    ok = ca > 0.0
    scale = np.where(ok, ca * r * r, 1.0)
    near_tangent = ok & (np.abs(disc) <= margin * scale)
    ambiguous |= near_tangent

    solvable = ok & (disc > 0.0)
    if not np.any(solvable):
        return crossing, ambiguous

    sq = np.sqrt(np.where(solvable, disc, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        t1 = np.where(solvable, (-cb - sq) / ca, np.nan)
        t2 = np.where(solvable, (-cb + sq) / ca, np.nan)

    for t in (t1, t2):
        in_seg = solvable & (t >= -margin) & (t <= 1.0 + margin)
        if not np.any(in_seg):
            continue
        px = a[:, 0] + t * d[:, 0]
        py = a[:, 1] + t * d[:, 1]
        dphi = np.arctan2(py, px) - theta
        dphi = (dphi + np.pi) % (2.0 * np.pi) - np.pi
        in_arc = in_seg & (np.abs(dphi) <= half_angle + margin)
        crossing |= in_arc
        boundary = in_arc & (
            (np.abs(t) <= margin)
            | (np.abs(t - 1.0) <= margin)
            | (np.abs(np.abs(dphi) - half_angle) <= margin)
        )
        ambiguous |= boundary
    return crossing, ambiguous
