"""Homogeneous Poisson point processes in simple planar windows.

A :class:`PointSample` is immutable after construction and carries its
seed, so every downstream builder is a pure function of the sample.  The
:class:`GridIndex` provides the region queries the tree builders need;
every region object doubles as its own brute-force predicate, which the
tests exercise against linear scans.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InvalidInputError
from .geometry import dist_point_segment, norms
from .rng import generator

__all__ = [
    "Window",
    "PointSample",
    "GridIndex",
    "Ball",
    "HalfStrip",
    "Cylinder",
    "AnnulusSector",
    "sample_ppp",
    "thin_ball",
    "query_region",
]


@dataclass(frozen=True)
class Window:
    """Sampling window: a disk, an annulus, or an axis-aligned rectangle.

    ``params`` holds (radius,) for disks, (r_in, r_out) for annuli and the
    half-extents (hx, hy) for rectangles.
    """

    shape: str
    center: tuple[float, float]
    params: tuple[float, ...]

    def __post_init__(self):
        if self.shape not in ("disk", "annulus", "rectangle"):
            raise InvalidInputError(f"unknown window shape {self.shape!r}")
        if self.area() <= 0.0:
            raise InvalidInputError("window has zero area")
        if self.shape == "annulus" and not 0.0 <= self.params[0] < self.params[1]:
            raise InvalidInputError("annulus needs 0 <= r_in < r_out")

    @staticmethod
    def disk(radius: float, center=(0.0, 0.0)) -> "Window":
        return Window("disk", (float(center[0]), float(center[1])), (float(radius),))

    @staticmethod
    def annulus(r_in: float, r_out: float, center=(0.0, 0.0)) -> "Window":
        return Window("annulus", (float(center[0]), float(center[1])), (float(r_in), float(r_out)))

    @staticmethod
    def rect(hx: float, hy: float, center=(0.0, 0.0)) -> "Window":
        return Window("rectangle", (float(center[0]), float(center[1])), (float(hx), float(hy)))

    @staticmethod
    def rect_bounds(xmin: float, xmax: float, ymin: float, ymax: float) -> "Window":
        cx, cy = (xmin + xmax) / 2.0, (ymin + ymax) / 2.0
        return Window.rect((xmax - xmin) / 2.0, (ymax - ymin) / 2.0, (cx, cy))

    def area(self) -> float:
        if self.shape == "disk":
            return np.pi * self.params[0] ** 2
        if self.shape == "annulus":
            return np.pi * (self.params[1] ** 2 - self.params[0] ** 2)
        return 4.0 * self.params[0] * self.params[1]

    def bbox(self) -> tuple[float, float, float, float]:
        cx, cy = self.center
        if self.shape == "rectangle":
            hx, hy = self.params
        else:
            hx = hy = self.params[-1]
        return cx - hx, cx + hx, cy - hy, cy + hy

    def contains(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, float))
        rel = points - np.asarray(self.center)
        if self.shape == "disk":
            return norms(rel) <= self.params[0]
        if self.shape == "annulus":
            d = norms(rel)
            return (d >= self.params[0]) & (d <= self.params[1])
        hx, hy = self.params
        return (np.abs(rel[:, 0]) <= hx) & (np.abs(rel[:, 1]) <= hy)

    def sample_uniform(self, n: int, rng: np.random.Generator) -> np.ndarray:
        cx, cy = self.center
        if self.shape == "rectangle":
            hx, hy = self.params
            u = rng.random((n, 2))
            return np.column_stack((cx + (2 * u[:, 0] - 1) * hx, cy + (2 * u[:, 1] - 1) * hy))
        r_in = 0.0 if self.shape == "disk" else self.params[0]
        r_out = self.params[-1]
        u = rng.random(n)
        r = np.sqrt(r_in**2 + u * (r_out**2 - r_in**2))
        phi = rng.random(n) * 2.0 * np.pi
        return np.column_stack((cx + r * np.cos(phi), cy + r * np.sin(phi)))


@dataclass(frozen=True)
class PointSample:
    """A realization of a homogeneous PPP restricted to ``window``."""

    points: np.ndarray
    intensity: float
    window: Window
    seed: int

    def __post_init__(self):
        pts = np.ascontiguousarray(np.asarray(self.points, dtype=float).reshape(-1, 2))
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return len(self.points)

    @staticmethod
    def from_points(points, window: Window, intensity: float = 1.0, seed: int = 0) -> "PointSample":
        """Wrap an explicit point set (used by hand-built test fixtures)."""
        sample = PointSample(np.asarray(points, float).reshape(-1, 2), intensity, window, seed)
        if len(sample) and not np.all(window.contains(sample.points)):
            raise InvalidInputError("explicit points must lie inside the window")
        return sample


def sample_ppp(window: Window, intensity: float, seed: int, *path: int) -> PointSample:
    """Sample a homogeneous PPP of the given intensity in ``window``.

    Deterministic for fixed ``(seed, *path)``.  Exact coordinate
    duplicates (probability zero, but possible in floating point) are
    re-sampled so points are pairwise distinct.
    """
    if intensity <= 0.0:
        raise InvalidInputError("intensity must be positive")
    area = window.area()
    if area <= 0.0:
        raise InvalidInputError("window has zero area")
    rng = generator(seed, *path)
    n = int(rng.poisson(intensity * area))
    pts = window.sample_uniform(n, rng)
    # Reject exact duplicates: a.s.-distinctness of the PPP.
    while n > 1:
        order = np.lexsort((pts[:, 1], pts[:, 0]))
        same = np.all(pts[order[1:]] == pts[order[:-1]], axis=1)
        if not np.any(same):
            break
        dup_rows = order[1:][same]
        pts[dup_rows] = window.sample_uniform(len(dup_rows), rng)
    return PointSample(pts, float(intensity), window, int(seed))


def thin_ball(sample: PointSample, center, radius: float) -> PointSample:
    """Remove all points strictly inside the open ball B(center, radius)."""
    if radius < 0.0:
        raise InvalidInputError("radius must be nonnegative")
    if len(sample) == 0 or radius == 0.0:
        return sample
    keep = norms(sample.points - np.asarray(center, float)) >= radius
    return PointSample(sample.points[keep], sample.intensity, sample.window, sample.seed)


# ---------------------------------------------------------------------------
# Region descriptors.  Each region knows its bounding box (for the grid) and
# its exact membership predicate (reused verbatim by the linear-scan oracle).
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Ball:
    center: tuple[float, float]
    radius: float
    open_ball: bool = False

    def bbox(self):
        cx, cy = self.center
        r = self.radius
        return cx - r, cx + r, cy - r, cy + r

    def contains(self, points: np.ndarray) -> np.ndarray:
        d = norms(np.atleast_2d(points) - np.asarray(self.center, float))
        return d < self.radius if self.open_ball else d <= self.radius


@dataclass(frozen=True)
class HalfStrip:
    """``anchor + (-reach; 0] x [-rho; rho]`` — the directed-forest search set.

    ``reach`` is the finite truncation of the paper's half-infinite strip;
    callers grow it until a point is found or the window is exhausted.
    """

    anchor: tuple[float, float]
    rho: float
    reach: float

    def bbox(self):
        ax, ay = self.anchor
        return ax - self.reach, ax, ay - self.rho, ay + self.rho

    def contains(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(points)
        ax, ay = self.anchor
        return (
            (pts[:, 0] <= ax)
            & (pts[:, 0] > ax - self.reach)
            & (np.abs(pts[:, 1] - ay) <= self.rho)
        )


@dataclass(frozen=True)
class Cylinder:
    """RPT search region: points within ``rho`` of [O; tip] and closer to O than tip.

    ``min_norm`` restricts to the annulus band ``norm in [min_norm, |tip|)``;
    builders scan bands from the tip inward, so the band is usually thin.
    """

    tip: tuple[float, float]
    rho: float
    min_norm: float = 0.0

    def bbox(self):
        tx, ty = self.tip
        tip_norm = float(np.hypot(tx, ty))
        # segment neighborhood box ∩ ball B(O, |tip|) box ∩ near-band box
        x_lo = max(min(0.0, tx) - self.rho, -tip_norm)
        x_hi = min(max(0.0, tx) + self.rho, tip_norm)
        y_lo = max(min(0.0, ty) - self.rho, -tip_norm)
        y_hi = min(max(0.0, ty) + self.rho, tip_norm)
        if self.min_norm > 0.0:
            # points of the band lie within (gap + 2 rho) of the tip
            reach = (tip_norm - self.min_norm) + 2.0 * self.rho
            x_lo = max(x_lo, tx - reach)
            x_hi = min(x_hi, tx + reach)
            y_lo = max(y_lo, ty - reach)
            y_hi = min(y_hi, ty + reach)
        return x_lo, x_hi, y_lo, y_hi

    def contains(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(points)
        tip = np.asarray(self.tip, float)
        tip_norm = float(np.hypot(*tip))
        d = dist_point_segment(pts, np.zeros(2), tip)
        n = norms(pts)
        mask = (d < self.rho) & (n < tip_norm)
        if self.min_norm > 0.0:
            mask &= n >= self.min_norm
        return mask


@dataclass(frozen=True)
class AnnulusSector:
    """Points with norm in [r_in, r_out] and angle within half_angle of theta."""

    r_in: float
    r_out: float
    theta: float
    half_angle: float

    def bbox(self):
        # conservative: full annulus box
        r = self.r_out
        return -r, r, -r, r

    def contains(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(points)
        n = norms(pts)
        dphi = np.arctan2(pts[:, 1], pts[:, 0]) - self.theta
        dphi = (dphi + np.pi) % (2.0 * np.pi) - np.pi
        return (n >= self.r_in) & (n <= self.r_out) & (np.abs(dphi) <= self.half_angle)


class GridIndex:
    """Uniform-cell spatial hash over a point sample.

    Cell size defaults to ``1/sqrt(intensity)`` (about one point per
    cell).  Buckets partition the ids: every point is in exactly one
    bucket.
    """

    def __init__(self, sample: PointSample, cell_size: Optional[float] = None):
        if cell_size is None:
            cell_size = 1.0 / np.sqrt(sample.intensity)
        if cell_size <= 0.0:
            raise InvalidInputError("cell size must be positive")
        self.cell_size = float(cell_size)
        self.sample = sample
        pts = sample.points
        if len(pts) == 0:
            self._keys = np.empty(0, dtype=np.int64)
            self._order = np.empty(0, dtype=np.int64)
            self._starts = {}
            return
        ij = np.floor(pts / self.cell_size).astype(np.int64)
        self._ij = ij
        keys = self._fuse(ij[:, 0], ij[:, 1])
        order = np.argsort(keys, kind="stable")
        self._keys = keys[order]
        self._order = order
        uk, starts = np.unique(self._keys, return_index=True)
        counts = np.diff(np.append(starts, len(self._keys)))
        self._starts = {int(k): (int(s), int(c)) for k, s, c in zip(uk, starts, counts)}

    @staticmethod
    def _fuse(i: np.ndarray, j: np.ndarray) -> np.ndarray:
        return (i.astype(np.int64) << 32) ^ (j.astype(np.int64) & 0xFFFFFFFF)

    def cell_ids(self, i: int, j: int) -> np.ndarray:
        """Point ids in cell (i, j)."""
        entry = self._starts.get(int(self._fuse(np.int64(i), np.int64(j))))
        if entry is None:
            return np.empty(0, dtype=np.int64)
        s, c = entry
        return self._order[s : s + c]

    def candidates_in_bbox(self, x_lo, x_hi, y_lo, y_hi) -> np.ndarray:
        """Ids of all points whose cells intersect the closed box."""
        if len(self.sample) == 0 or x_hi < x_lo or y_hi < y_lo:
            return np.empty(0, dtype=np.int64)
        s = self.cell_size
        i_lo, i_hi = int(np.floor(x_lo / s)), int(np.floor(x_hi / s))
        j_lo, j_hi = int(np.floor(y_lo / s)), int(np.floor(y_hi / s))
        chunks = []
        for i in range(i_lo, i_hi + 1):
            for j in range(j_lo, j_hi + 1):
                entry = self._starts.get(int(self._fuse(np.int64(i), np.int64(j))))
                if entry is not None:
                    s0, c = entry
                    chunks.append(self._order[s0 : s0 + c])
        if not chunks:
            return np.empty(0, dtype=np.int64)
        return np.concatenate(chunks)

    def query(self, region) -> np.ndarray:
        """Sorted ids of points satisfying the region predicate exactly."""
        cand = self.candidates_in_bbox(*region.bbox())
        if len(cand) == 0:
            return cand
        mask = region.contains(self.sample.points[cand])
        return np.sort(cand[mask])


def query_region(index: GridIndex, region) -> np.ndarray:
    """Exact region query through the grid (ids sorted ascending)."""
    return index.query(region)
