"""Shared graph representations: ancestor maps, geodesic paths, radial branches.

All five graph families (radial Poisson tree, Euclidean FPP tree, directed
LPP tree and the three directed forests) are stored as an ancestor map
over an indexed vertex array.  ``ancestor[i] == NO_ANCESTOR`` marks the
root of a tree, or a forest vertex whose chain leaves the build region.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InvalidInputError, InvariantViolationError
from .geometry import norms

__all__ = ["NO_ANCESTOR", "AncestorTree", "GeodesicPath", "RadialBranch"]

NO_ANCESTOR = -1


@dataclass(frozen=True)
class AncestorTree:
    """Rooted tree or directed forest as an out-degree-1 ancestor map."""

    vertices: np.ndarray
    ancestor: np.ndarray
    model: str
    params: dict
    seed: int = 0
    root: Optional[int] = None

    def __post_init__(self):
        verts = np.ascontiguousarray(np.asarray(self.vertices, float).reshape(-1, 2))
        anc = np.ascontiguousarray(np.asarray(self.ancestor, dtype=np.int64))
        if len(anc) != len(verts):
            raise InvalidInputError("ancestor map must cover every vertex")
        verts.setflags(write=False)
        anc.setflags(write=False)
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "ancestor", anc)

    def __len__(self) -> int:
        return len(self.vertices)

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """(child ids, ancestor ids) for every vertex that has an ancestor."""
        has = self.ancestor != NO_ANCESTOR
        ids = np.nonzero(has)[0]
        return ids, self.ancestor[ids]

    def children_counts(self) -> np.ndarray:
        """Number of children of each vertex."""
        counts = np.zeros(len(self), dtype=np.int64)
        _, anc = self.edges()
        np.add.at(counts, anc, 1)
        return counts

    def depths(self) -> np.ndarray:
        """Hop count from each vertex to the end of its ancestor chain.

        Also serves as the acyclicity check: raises if a chain revisits a
        vertex.
        """
        n = len(self)
        depth = np.full(n, -1, dtype=np.int64)
        anc = self.ancestor
        for start in range(n):
            if depth[start] >= 0:
                continue
            chain = []
            v = start
            while v != NO_ANCESTOR and depth[v] < 0:
                chain.append(v)
                depth[v] = -2  # on the current chain
                v = int(anc[v])
                if v != NO_ANCESTOR and depth[v] == -2:
                    raise InvariantViolationError(f"ancestor cycle through vertex {v}")
            base = 0 if v == NO_ANCESTOR else int(depth[v]) + 1
            for k, u in enumerate(reversed(chain)):
                depth[u] = base + k
        return depth

    def subtree_max_norm(self) -> np.ndarray:
        """Max euclidean vertex norm over each vertex's forward subtree."""
        depth = self.depths()
        order = np.argsort(depth, kind="stable")[::-1]  # deepest first
        best = norms(self.vertices).copy()
        anc = self.ancestor
        for v in order:
            a = anc[v]
            if a != NO_ANCESTOR and best[v] > best[a]:
                best[a] = best[v]
        return best

    def validate_tree(self) -> None:
        """Check the single-root, all-connected contract for tree models."""
        roots = np.nonzero(self.ancestor == NO_ANCESTOR)[0]
        if len(roots) != 1:
            raise InvariantViolationError(f"expected one root, found {len(roots)}")
        if self.root is not None and int(roots[0]) != int(self.root):
            raise InvariantViolationError("declared root differs from ancestor map root")
        self.depths()  # raises on cycles; all chains terminate at the root

    def to_json_dict(self) -> dict:
        return {
            "model": self.model,
            "params": self.params,
            "seed": int(self.seed),
            "root": None if self.root is None else int(self.root),
            "vertices": [[float(x), float(y)] for x, y in self.vertices],
            "ancestor": [int(a) for a in self.ancestor],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), separators=(",", ":"), sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "AncestorTree":
        d = json.loads(text)
        return AncestorTree(
            np.asarray(d["vertices"], float),
            np.asarray(d["ancestor"], np.int64),
            d["model"],
            d.get("params", {}),
            d.get("seed", 0),
            d.get("root"),
        )


@dataclass(frozen=True)
class GeodesicPath:
    """Ordered vertex sequence with its total weight (FPP) or passage time (LPP)."""

    vertices: np.ndarray
    weight: float

    def __post_init__(self):
        verts = np.ascontiguousarray(np.asarray(self.vertices, float).reshape(-1, 2))
        verts.setflags(write=False)
        object.__setattr__(self, "vertices", verts)

    def __len__(self) -> int:
        return len(self.vertices)

    def reversed(self) -> "GeodesicPath":
        return GeodesicPath(self.vertices[::-1].copy(), self.weight)

    def to_json_dict(self) -> dict:
        return {
            "vertices": [[float(x), float(y)] for x, y in self.vertices],
            "weight": float(self.weight),
        }


@dataclass(frozen=True)
class RadialBranch:
    """Ancestor chain of the radial Poisson tree down to the origin."""

    vertices: np.ndarray
    deviation: float

    def __post_init__(self):
        verts = np.ascontiguousarray(np.asarray(self.vertices, float).reshape(-1, 2))
        verts.setflags(write=False)
        object.__setattr__(self, "vertices", verts)

    @property
    def hops(self) -> int:
        return len(self.vertices) - 1
