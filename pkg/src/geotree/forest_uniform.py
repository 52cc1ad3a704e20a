"""Directed forest with direction -(1,0): largest-abscissa ancestor in a half-strip.

Each vertex X links to the point of the sample lying in
``X + (-inf; 0] x [-rho; rho]`` (other than X itself) with the largest
abscissa.  Branches are coalescing one-dimensional random walks; the
module also measures how many distinct ancestral lines survive a given
horizontal run, which is the finite window onto the one-topological-end
property.
"""

from __future__ import annotations

import numpy as np

from .errors import BoundaryExhaustedError, InvalidInputError
from .point_process import GridIndex, HalfStrip, PointSample, Window
from .trees import NO_ANCESTOR, AncestorTree

__all__ = [
    "default_left_margin",
    "ancestor_forest_rho",
    "build_forest_rho",
    "survivor_count",
    "survivor_curve",
]


def default_left_margin(rho: float, intensity: float, distance: float = 0.0) -> float:
    """Margin policy: ``distance + 20 * max(1, 1/(2 rho intensity))``.

    The strip gap beyond ``l`` has probability <= exp(-2 rho intensity l),
    so twenty mean jumps make silent truncation essentially impossible;
    exhausting the margin raises instead of truncating.
    """
    return float(distance) + 20.0 * max(1.0, 1.0 / (2.0 * rho * intensity))


def _require_rect(window: Window) -> tuple[float, float, float, float]:
    if window.shape != "rectangle":
        raise InvalidInputError("directed-forest constructions need a rectangle window")
    return window.bbox()


def ancestor_forest_rho(
    X,
    sample: PointSample,
    rho: float,
    index: GridIndex | None = None,
) -> tuple[int, np.ndarray]:
    """Ancestor of X in the direction -(1,0) forest; returns (id, point).

    Raises :class:`BoundaryExhaustedError` when the answer would depend on
    points outside the sampled window: either the strip's vertical extent
    is not covered, or no sample point exists in the covered part of the
    half-strip.
    """
    if rho <= 0.0:
        raise InvalidInputError("rho must be positive")
    X = np.asarray(X, dtype=float)
    x_lo, _, y_lo, y_hi = _require_rect(sample.window)
    if X[1] - rho < y_lo or X[1] + rho > y_hi:
        raise BoundaryExhaustedError(
            f"strip of ({X[0]:.3f}, {X[1]:.3f}) leaves the window vertically"
        )
    if index is None:
        index = GridIndex(sample)
    reach = max(2.0 / (2.0 * rho * sample.intensity), 4.0 * index.cell_size)
    while True:
        ids = index.query(HalfStrip((X[0], X[1]), rho, reach))
        if len(ids):
            pts = sample.points[ids]
            # drop X itself if it is a sample point
            keep = ~((pts[:, 0] == X[0]) & (pts[:, 1] == X[1]))
            ids, pts = ids[keep], pts[keep]
            if len(ids):
                best = np.lexsort((pts[:, 1], pts[:, 0]))[-1]  # max abscissa, then max ordinate
                return int(ids[best]), sample.points[int(ids[best])]
        if X[0] - reach < x_lo:
            raise BoundaryExhaustedError(
                f"half-strip of ({X[0]:.3f}, {X[1]:.3f}) exhausted the window; enlarge it"
            )
        reach *= 2.0


def build_forest_rho(sample: PointSample, rho: float, build_region: Window) -> AncestorTree:
    """Ancestor map for every sample point inside ``build_region``.

    Points outside the region keep ``NO_ANCESTOR``.  The sampled window
    must extend past the region by the left margin and by rho vertically;
    exhaustion raises rather than truncating.
    """
    _require_rect(sample.window)
    if build_region.shape != "rectangle":
        raise InvalidInputError("build_region must be a rectangle")
    pts = sample.points
    ancestor = np.full(len(pts), NO_ANCESTOR, dtype=np.int64)
    index = GridIndex(sample)
    inside = np.nonzero(build_region.contains(pts))[0] if len(pts) else []
    for i in inside:
        aid, _ = ancestor_forest_rho(pts[i], sample, rho, index)
        ancestor[i] = aid
    return AncestorTree(
        pts, ancestor, "forest_rho", {"rho": float(rho)}, sample.seed, root=None
    )


class _ChainWalker:
    """Memoized ancestor chains through the half-strip rule."""

    def __init__(self, sample: PointSample, rho: float):
        self.sample = sample
        self.rho = rho
        self.index = GridIndex(sample)
        self._anc: dict[int, int] = {}
        self._pts: dict[int, np.ndarray] = {}

    def start(self, X) -> int:
        """Resolve an arbitrary start point to its first chain vertex id."""
        aid, apt = ancestor_forest_rho(X, self.sample, self.rho, self.index)
        return aid

    def ancestor(self, vid: int) -> int:
        cached = self._anc.get(vid)
        if cached is not None:
            return cached
        aid, _ = ancestor_forest_rho(self.sample.points[vid], self.sample, self.rho, self.index)
        self._anc[vid] = aid
        return aid


def survivor_count(
    sample: PointSample,
    rho: float,
    starts: np.ndarray,
    distance: float,
) -> int:
    """Distinct ancestral lines after a horizontal run of ``distance``.

    Every start's chain is followed to the first vertex whose abscissa is
    at most ``min(start abscissas) - distance``; the count of distinct
    such vertices is returned.  A common threshold makes the count
    nonincreasing in ``distance`` realization by realization (chains that
    have coalesced share all later vertices).
    """
    return survivor_curve(sample, rho, starts, [distance])[0]


def survivor_curve(
    sample: PointSample,
    rho: float,
    starts: np.ndarray,
    distances,
) -> list[int]:
    """Survivor counts at several distances on one realization (one walk)."""
    starts = np.atleast_2d(np.asarray(starts, dtype=float))
    distances = [float(d) for d in distances]
    if any(d < 0 for d in distances):
        raise InvalidInputError("distances must be nonnegative")
    if len(starts) == 0:
        return [0 for _ in distances]
    walker = _ChainWalker(sample, rho)
    base = float(np.min(starts[:, 0]))
    order = np.argsort(distances, kind="stable")
    thresholds = [base - distances[k] for k in order]
    reps: list[set] = [set() for _ in distances]
    for si, s in enumerate(starts):
        vid = None
        X = s
        for rank, k in enumerate(order):
            if distances[k] == 0.0:
                reps[k].add(("start", si))
                continue
            thr = thresholds[rank]
            while X[0] > thr:
                vid = walker.start(X) if vid is None else walker.ancestor(vid)
                X = walker.sample.points[vid]
            reps[k].add(vid)
    return [len(r) for r in reps]
