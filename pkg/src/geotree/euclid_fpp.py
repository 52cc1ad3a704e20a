"""Euclidean first-passage percolation: exact geodesics and trees.

Edge weights are |u - v|^alpha on the complete graph over the sample.
Two engines compute the same single-source shortest paths:

* a dense O(n^2) Dijkstra with distances formed on the fly (any alpha > 1);
* a sparse Dijkstra on the Gabriel graph for alpha >= 2, where every
  geodesic edge has an empty open ball on its diameter and the Gabriel
  graph therefore carries all geodesics exactly.

The engines are held to exact agreement in tests, and both to an
exhaustive path-enumeration oracle on small samples.
"""

from __future__ import annotations

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import dijkstra as _csgraph_dijkstra
from scipy.spatial import Delaunay, cKDTree

from .errors import BoundaryExhaustedError, InvalidInputError
from .geometry import norms
from .point_process import PointSample
from .trees import NO_ANCESTOR, AncestorTree, GeodesicPath

__all__ = [
    "path_weight",
    "geodesic",
    "build_fpp_tree",
    "check_empty_diameter_balls",
    "directed_geodesic",
    "build_forest_alpha",
]

#: Above this size (and for alpha >= 2) the Gabriel engine takes over.
GABRIEL_THRESHOLD = 600


def path_weight(path, alpha: float) -> float:
    """Sum of |X_i - X_{i+1}|^alpha along an explicit vertex sequence."""
    if alpha <= 0.0:
        raise InvalidInputError("alpha must be positive")
    pts = np.asarray(path, dtype=float).reshape(-1, 2)
    if len(pts) < 2:
        raise InvalidInputError("a path needs at least two vertices")
    steps = norms(np.diff(pts, axis=0))
    return float(np.sum(steps**alpha))


def _find_vertex(sample: PointSample, X) -> int:
    X = np.asarray(X, dtype=float)
    hit = np.nonzero((sample.points[:, 0] == X[0]) & (sample.points[:, 1] == X[1]))[0]
    if len(hit) == 0:
        raise InvalidInputError(f"({X[0]}, {X[1]}) is not a sample point")
    return int(hit[0])


def _pair_weights(d2: np.ndarray, alpha: float) -> np.ndarray:
    """|u - v|^alpha from squared distances (single shared formula)."""
    if alpha == 2.0:
        return d2
    return d2 ** (alpha * 0.5)


def _dijkstra_dense(pts: np.ndarray, alpha: float, source: int):
    n = len(pts)
    dist = np.full(n, np.inf)
    pred = np.full(n, NO_ANCESTOR, dtype=np.int64)
    done = np.zeros(n, dtype=bool)
    dist[source] = 0.0
    for _ in range(n):
        u = int(np.argmin(np.where(done, np.inf, dist)))
        if not np.isfinite(dist[u]) or done[u]:
            break
        done[u] = True
        dx = pts[:, 0] - pts[u, 0]
        dy = pts[:, 1] - pts[u, 1]
        nd = dist[u] + _pair_weights(dx * dx + dy * dy, alpha)
        upd = ~done & (nd < dist)
        dist[upd] = nd[upd]
        pred[upd] = u
    return dist, pred


def gabriel_edges(pts: np.ndarray) -> np.ndarray:
    """Edge list (m, 2) of the Gabriel graph of the point set."""
    tri = Delaunay(pts)
    simp = tri.simplices
    pairs = np.vstack((simp[:, [0, 1]], simp[:, [1, 2]], simp[:, [0, 2]]))
    pairs = np.unique(np.sort(pairs, axis=1), axis=0)
    mids = (pts[pairs[:, 0]] + pts[pairs[:, 1]]) / 2.0
    half = norms(pts[pairs[:, 0]] - pts[pairs[:, 1]]) / 2.0
    dmin, _ = cKDTree(pts).query(mids, k=1)
    keep = dmin >= half * (1.0 - 1e-12)
    return pairs[keep]


def _dijkstra_gabriel(pts: np.ndarray, alpha: float, source: int):
    edges = gabriel_edges(pts)
    diff = pts[edges[:, 0]] - pts[edges[:, 1]]
    w = _pair_weights(diff[:, 0] ** 2 + diff[:, 1] ** 2, alpha)
    n = len(pts)
    graph = sparse.csr_matrix(
        (np.concatenate((w, w)), (np.concatenate((edges[:, 0], edges[:, 1])),
                                  np.concatenate((edges[:, 1], edges[:, 0])))),
        shape=(n, n),
    )
    dist, pred = _csgraph_dijkstra(graph, directed=False, indices=source, return_predecessors=True)
    pred = pred.astype(np.int64)
    pred[pred < 0] = NO_ANCESTOR
    return dist, pred


def _sssp(pts: np.ndarray, alpha: float, source: int):
    if alpha <= 1.0:
        raise InvalidInputError("geodesics need alpha > 1")
    if alpha >= 2.0 and len(pts) >= GABRIEL_THRESHOLD:
        return _dijkstra_gabriel(pts, alpha, source)
    return _dijkstra_dense(pts, alpha, source)


def _extract_path(pred: np.ndarray, source: int, target: int) -> list[int]:
    path = [target]
    v = target
    while v != source:
        v = int(pred[v])
        if v == NO_ANCESTOR:
            raise InvalidInputError("target not reachable from source")
        path.append(v)
    path.reverse()
    return path


def geodesic(X, Y, sample: PointSample, alpha: float) -> GeodesicPath:
    """The minimal-weight path between two sample points (exact)."""
    i = _find_vertex(sample, X)
    j = _find_vertex(sample, Y)
    dist, pred = _sssp(sample.points, alpha, i)
    ids = _extract_path(pred, i, j)
    return GeodesicPath(sample.points[ids], float(dist[j]))


def build_fpp_tree(sample: PointSample, alpha: float) -> AncestorTree:
    """Shortest-path tree from the sample point closest to the origin."""
    if len(sample) == 0:
        raise InvalidInputError("cannot root a tree on an empty sample")
    pts = sample.points
    n = norms(pts)
    root = int(np.lexsort((pts[:, 1], pts[:, 0], n))[0])
    _, pred = _sssp(pts, alpha, root)
    return AncestorTree(
        pts, pred, "fpp", {"alpha": float(alpha)}, sample.seed, root=root
    )


def check_empty_diameter_balls(tree: AncestorTree, sample: PointSample) -> list[tuple[int, int]]:
    """Violations of the empty-open-ball property on tree edges (alpha >= 2).

    For each edge {X, A(X)} the open ball with diameter [X; A(X)] must
    contain no sample point; returns (edge child id, blocking point id)
    pairs, expected empty.
    """
    child, anc = tree.edges()
    pts = tree.vertices
    kd = cKDTree(sample.points)
    bad: list[tuple[int, int]] = []
    mids = (pts[child] + pts[anc]) / 2.0
    halves = norms(pts[child] - pts[anc]) / 2.0
    for c, a, mid, half in zip(child, anc, mids, halves):
        ids = kd.query_ball_point(mid, half * (1.0 - 1e-12))
        for pid in ids:
            p = sample.points[pid]
            if np.array_equal(p, pts[c]) or np.array_equal(p, pts[a]):
                continue
            bad.append((int(c), int(pid)))
    return bad


def _nearest_id(sample: PointSample, target: np.ndarray) -> int:
    d = norms(sample.points - target)
    return int(np.argmin(d))


def directed_geodesic(
    X,
    theta: float,
    sample: PointSample,
    alpha: float,
    horizon: float,
) -> tuple[GeodesicPath, int]:
    """Finite proxy for the semi-infinite geodesic of direction theta + pi.

    Returns the geodesic from X to the sample point nearest to
    ``X + horizon * e^{i(theta+pi)}`` together with a stabilization
    certificate: the number of leading edges shared with the run at half
    horizon.  Raises when no sample point lies within horizon/4 of the
    target (window too small).
    """
    X = np.asarray(X, dtype=float)
    i = _find_vertex(sample, X)
    u = np.array([np.cos(theta + np.pi), np.sin(theta + np.pi)])
    dist, pred = _sssp(sample.points, alpha, i)
    ids = {}
    for h in (horizon, horizon / 2.0):
        target = X + h * u
        j = _nearest_id(sample, target)
        if float(norms(sample.points[j] - target)) > horizon / 4.0:
            raise BoundaryExhaustedError(
                f"no sample point within horizon/4 of the direction-{theta + np.pi:.3f} target"
            )
        ids[h] = _extract_path(pred, i, j)
    full, half = ids[horizon], ids[horizon / 2.0]
    prefix = 0
    for a, b in zip(full[1:], half[1:]):
        if a != b:
            break
        prefix += 1
    return GeodesicPath(sample.points[full], float(dist[full[-1]])), prefix


def build_forest_alpha(
    sample: PointSample,
    alpha: float,
    theta: float,
    horizon: float,
    region=None,
) -> tuple[AncestorTree, np.ndarray]:
    """Directed forest of direction-(theta+pi) geodesics, with certificates.

    All geodesics are routed toward a single far target (geodesics between
    points coincide with their reverses, so one shortest-path run from the
    target yields every vertex's first step).  Returns the forest and a
    boolean array marking vertices whose first step is identical at half
    horizon (stabilized ancestors).
    """
    pts = sample.points
    if len(pts) < 2:
        raise InvalidInputError("forest needs at least two points")
    if region is not None:
        sel = region.contains(pts)
    else:
        sel = np.ones(len(pts), dtype=bool)
    center = pts[sel].mean(axis=0) if np.any(sel) else pts.mean(axis=0)
    u = np.array([np.cos(theta + np.pi), np.sin(theta + np.pi)])
    preds = {}
    for h in (horizon, horizon / 2.0):
        target = center + h * u
        j = _nearest_id(sample, target)
        if float(norms(pts[j] - target)) > horizon / 4.0:
            raise BoundaryExhaustedError("no sample point near the forest target")
        _, pred = _sssp(pts, alpha, j)
        preds[h] = pred
    ancestor = preds[horizon].copy()
    ancestor[~sel] = NO_ANCESTOR
    certified = (preds[horizon] == preds[horizon / 2.0]) & sel & (ancestor != NO_ANCESTOR)
    forest = AncestorTree(
        pts,
        ancestor,
        "forest_alpha",
        {"alpha": float(alpha), "theta": float(theta), "horizon": float(horizon)},
        sample.seed,
        root=None,
    )
    return forest, certified
