"""Radial Poisson tree: each point links to the max-norm point of its cylinder.

The cylinder of X is the rho-neighborhood of the segment [O; X]
intersected with the open ball B(O, |X|); the ancestor is the sample
point of largest norm inside it, or the origin when the cylinder is
empty.  Two engines implement the same rule:

* :func:`ancestor_rpt` answers one query through the grid index, scanning
  annulus bands from |X| inward (the argmax lives in the first nonempty
  band);
* :func:`build_rpt` resolves the whole sample at once with a
  sector-bucketed sweep in descending norm order, used at campaign scale.

Tests hold both engines to exact agreement and to a linear-scan oracle.
"""

from __future__ import annotations

import numpy as np

from .errors import BoundaryExhaustedError, InvalidInputError, InvariantViolationError
from .geometry import dist_point_segment, norms, segments_cross
from .point_process import Cylinder, GridIndex, PointSample, Window
from .trees import NO_ANCESTOR, AncestorTree, RadialBranch

__all__ = [
    "ROOT_ID",
    "ancestor_rpt",
    "build_rpt",
    "check_noncrossing",
    "children_histogram",
    "branch_from",
]

ROOT_ID = -1

_ORIGIN = np.zeros(2)


def _window_covers_cylinder(window: Window, region: Cylinder, rho: float) -> bool:
    """Whether emptiness of a cylinder band inside this window can be trusted.

    Any cylinder is contained in B(O, |tip|), so a disk window centered at
    the origin covers it whenever its radius reaches the tip; the same
    holds for an origin-centered annulus whose hole lies in the thinned
    ball (genuinely point-free).  Other windows fall back to a
    conservative bbox-corner containment test (convex shapes only).
    """
    tip_norm = float(np.hypot(*region.tip))
    if window.center == (0.0, 0.0):
        if window.shape == "disk":
            return window.params[0] >= tip_norm
        if window.shape == "annulus" and window.params[0] <= rho:
            return window.params[1] >= tip_norm
    if window.shape == "annulus":
        return False
    x_lo, x_hi, y_lo, y_hi = region.bbox()
    corners = np.array([(x_lo, y_lo), (x_lo, y_hi), (x_hi, y_lo), (x_hi, y_hi)])
    return bool(np.all(window.contains(corners)))


def _pick_argmax(points: np.ndarray, ids: np.ndarray) -> int:
    """Id of the point with max (norm, x, y); deterministic under ties."""
    n = norms(points)
    best = np.lexsort((points[:, 1], points[:, 0], n))[-1]
    return int(ids[best])


def ancestor_rpt(
    X,
    sample: PointSample,
    rho: float,
    index: GridIndex | None = None,
) -> tuple[int, np.ndarray]:
    """Ancestor of X (any point of the plane) in the radial Poisson tree.

    Returns ``(point_id, coordinates)``; the id is ``ROOT_ID`` and the
    coordinates are the origin when the cylinder holds no sample point.
    Raises :class:`BoundaryExhaustedError` if the needed part of the
    cylinder is not covered by the sampled window.
    """
    X = np.asarray(X, dtype=float)
    x = float(np.hypot(X[0], X[1]))
    if rho <= 0.0:
        raise InvalidInputError("rho must be positive")
    if x <= rho:
        raise InvalidInputError("ancestor undefined inside the thinned ball (|X| <= rho)")
    if index is None:
        index = GridIndex(sample)
    delta = max(1.0 / (rho * sample.intensity), rho)
    while True:
        lo = max(0.0, x - delta)
        region = Cylinder((X[0], X[1]), rho, min_norm=lo)
        if not _window_covers_cylinder(sample.window, region, rho):
            raise BoundaryExhaustedError(
                f"cylinder band of point ({X[0]:.3f}, {X[1]:.3f}) exceeds the sampled window"
            )
        ids = index.query(region)
        if len(ids):
            winner = _pick_argmax(sample.points[ids], ids)
            return winner, sample.points[winner]
        if lo == 0.0:
            return ROOT_ID, _ORIGIN.copy()
        delta *= 2.0


# ---------------------------------------------------------------------------
# Bulk builder.
#
# Points are sorted by descending (norm, x, y); the ancestor of the point of
# rank k is the smallest rank j > k lying within rho of the segment [O; X_k].
# Candidates are bucketed by polar sector and scanned in annulus bands from
# |X_k| inward; a hit in the first nonempty band is the argmax.  Near the
# origin (or for deep bands) the angular pruning degenerates and a rank-range
# scan takes over.
# ---------------------------------------------------------------------------

_SECTOR_WIDTH = 0.06  # radians; ~arcsin(rho/lo) spans 1-3 sectors at lo >~ 20 rho
_BIG = np.iinfo(np.int64).max


def _segment_min(values: np.ndarray, lens: np.ndarray) -> np.ndarray:
    """Minimum of consecutive segments of ``values`` with lengths ``lens``."""
    out = np.full(len(lens), _BIG, dtype=values.dtype)
    nonempty = lens > 0
    if not np.any(nonempty):
        return out
    starts = np.cumsum(lens) - lens
    out[nonempty] = np.minimum.reduceat(values, starts[nonempty])
    return out


def _flat_ranges(starts: np.ndarray, stops: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Concatenate integer ranges [starts, stops); returns (flat, lens)."""
    lens = np.maximum(stops - starts, 0)
    tot = int(lens.sum())
    if tot == 0:
        return np.empty(0, dtype=np.int64), lens
    rep_starts = np.repeat(starts, lens)
    offs = np.arange(tot, dtype=np.int64) - np.repeat(np.cumsum(lens) - lens, lens)
    return rep_starts + offs, lens


def build_rpt(sample: PointSample, rho: float, chunk: int = 40000) -> AncestorTree:
    """Radial Poisson tree over the whole sample, rooted at the origin.

    The window must be a disk centered at the origin, or an annulus
    centered at the origin with inner radius <= rho (the pre-thinned
    process); the sample must contain no point of B(O, rho).
    """
    if rho <= 0.0:
        raise InvalidInputError("rho must be positive")
    win = sample.window
    origin_disk = win.shape == "disk" and win.center == (0.0, 0.0)
    origin_annulus = (
        win.shape == "annulus" and win.center == (0.0, 0.0) and win.params[0] <= rho
    )
    if not (origin_disk or origin_annulus):
        raise InvalidInputError("build_rpt needs a disk or pre-thinned annulus window centered at O")
    pts = sample.points
    n = len(pts)
    verts = np.vstack((_ORIGIN, pts)) if n else _ORIGIN.reshape(1, 2)
    if n == 0:
        return AncestorTree(verts, [NO_ANCESTOR], "rpt", {"rho": float(rho)}, sample.seed, root=0)
    r = norms(pts)
    if np.any(r < rho):
        raise InvalidInputError("sample must be thinned by B(O, rho) before building the RPT")

    order = np.lexsort((-pts[:, 1], -pts[:, 0], -r))  # descending (norm, x, y)
    P = pts[order]
    R = r[order]
    neg_R = -R  # ascending; for global rank-range searches

    # Sector-bucketed view, fused key = sector * K + norm (ascending).
    phi = np.arctan2(P[:, 1], P[:, 0])
    n_sec = max(8, int(np.ceil(2.0 * np.pi / _SECTOR_WIDTH)))
    w_sec = 2.0 * np.pi / n_sec
    sec = np.floor((phi + np.pi) / w_sec).astype(np.int64) % n_sec
    K = float(np.ceil(R[0])) + 2.0
    fused = sec.astype(np.float64) * K + R
    sec_order = np.argsort(fused, kind="stable")
    fused_sorted = fused[sec_order]
    grank_sec = sec_order.copy()  # value at position = global rank of that point
    R_sec = R[sec_order]

    arank = np.full(n, -2, dtype=np.int64)  # -2 unresolved, -1 ROOT, else ancestor rank
    delta0 = max(1.0 / (rho * sample.intensity), rho)
    deltas = np.full(n, delta0)
    active = np.arange(n, dtype=np.int64)

    while len(active):
        next_active = []
        for c0 in range(0, len(active), chunk):
            q = active[c0 : c0 + chunk]
            x = R[q]
            lo = np.maximum(0.0, x - deltas[q])
            gap = (x - lo) + 2.0 * rho
            with np.errstate(invalid="ignore"):
                dphi = 2.0 * np.arcsin(np.minimum(1.0, gap / (2.0 * np.maximum(lo, 1e-300))))
            dphi = np.where(lo <= 0.0, np.pi, dphi) * (1.0 + 1e-9)
            best = np.full(len(q), _BIG, dtype=np.int64)

            sectored = dphi < (np.pi / 8.0)
            if np.any(sectored):
                rows = np.nonzero(sectored)[0]
                qs = q[rows]
                ph = np.arctan2(P[qs, 1], P[qs, 0])
                s_lo = np.floor((ph - dphi[rows] + np.pi) / w_sec).astype(np.int64)
                s_hi = np.floor((ph + dphi[rows] + np.pi) / w_sec).astype(np.int64)
                width = s_hi - s_lo + 1
                for off in range(int(width.max())):
                    sel = width > off
                    if not np.any(sel):
                        break
                    rr = rows[sel]
                    ss = (s_lo[sel] + off) % n_sec
                    key_lo = ss * K + lo[rr]
                    key_hi = ss * K + (x[rr] + 1e-6)
                    starts = np.searchsorted(fused_sorted, key_lo, side="left")
                    stops = np.searchsorted(fused_sorted, key_hi, side="left")
                    flat, lens = _flat_ranges(starts, stops)
                    if len(flat) == 0:
                        continue
                    pos = flat
                    qrep = np.repeat(rr, lens)
                    cand_rank = grank_sec[pos]
                    cand_pts = P[cand_rank]
                    tips = P[q[qrep]]
                    hit = (
                        (R_sec[pos] < x[qrep])
                        & (R_sec[pos] >= lo[qrep])
                        & (dist_point_segment(cand_pts, _ORIGIN, tips) < rho)
                    )
                    vals = np.where(hit, cand_rank, _BIG)
                    seg = _segment_min(vals, lens)
                    best[rr] = np.minimum(best[rr], seg)

            broad = ~sectored
            if np.any(broad):
                rows = np.nonzero(broad)[0]
                qb = q[rows]
                starts = qb + 1
                stops = np.searchsorted(neg_R, -lo[rows], side="left")
                flat, lens = _flat_ranges(starts, stops)
                if len(flat):
                    qrep = np.repeat(rows, lens)
                    cand_pts = P[flat]
                    tips = P[q[qrep]]
                    hit = (
                        (R[flat] < x[qrep])
                        & (dist_point_segment(cand_pts, _ORIGIN, tips) < rho)
                    )
                    vals = np.where(hit, flat, _BIG)
                    seg = _segment_min(vals, lens)
                    best[rows] = np.minimum(best[rows], seg)

            found = best < _BIG
            arank[q[found]] = best[found]
            exhausted = ~found & (lo <= 0.0)
            arank[q[exhausted]] = -1
            still = ~found & ~exhausted
            if np.any(still):
                deltas[q[still]] *= 2.0
                next_active.append(q[still])
        active = np.concatenate(next_active) if next_active else np.empty(0, dtype=np.int64)

    ancestor = np.empty(n + 1, dtype=np.int64)
    ancestor[0] = NO_ANCESTOR
    anc_sorted = np.where(arank >= 0, order[np.maximum(arank, 0)] + 1, 0)
    ancestor[order + 1] = anc_sorted
    return AncestorTree(verts, ancestor, "rpt", {"rho": float(rho)}, sample.seed, root=0)


def check_noncrossing(tree: AncestorTree, block: int = 512) -> list[tuple[int, int]]:
    """All pairs of open edge segments that intersect (expected empty)."""
    child, anc = tree.edges()
    a = tree.vertices[child]
    b = tree.vertices[anc]
    m = len(child)
    violations: list[tuple[int, int]] = []
    for i0 in range(0, m, block):
        i1 = min(i0 + block, m)
        pi = a[i0:i1, None, :]
        qi = b[i0:i1, None, :]
        cross = segments_cross(pi, qi, a[None, :, :], b[None, :, :])
        ii, jj = np.nonzero(cross)
        for bi, j in zip(ii, jj):
            i = i0 + int(bi)
            if i < j:
                violations.append((int(child[i]), int(child[j])))
    return violations


def children_histogram(tree: AncestorTree) -> dict[int, int]:
    """In-degree (number of children) distribution over all vertices."""
    counts = tree.children_counts()
    hist = np.bincount(counts)
    return {int(d): int(c) for d, c in enumerate(hist) if c > 0}


def branch_from(
    start,
    sample: PointSample,
    rho: float,
    index: GridIndex | None = None,
) -> RadialBranch:
    """Ancestor chain from ``start`` down to the origin, with its deviation.

    The deviation is measured orthogonally to the axis (O, start): the
    frame is rotated so that ``start`` lies on the positive horizontal
    axis and the max |ordinate| along the chain is reported.
    """
    start = np.asarray(start, dtype=float)
    if index is None:
        index = GridIndex(sample)
    chain = [start]
    X = start
    for _ in range(len(sample) + 1):
        aid, apt = ancestor_rpt(X, sample, rho, index)
        chain.append(apt)
        if aid == ROOT_ID:
            break
        X = apt
    else:
        raise InvariantViolationError("branch longer than the sample size")
    verts = np.asarray(chain)
    ang = np.arctan2(start[1], start[0])
    ordinates = -np.sin(ang) * verts[:, 0] + np.cos(ang) * verts[:, 1]
    return RadialBranch(verts, float(np.max(np.abs(ordinates))))
