"""Spot grids and neighborhood graphs for spatial lattice data.

Spots live at real-valued coordinates; two spots are neighbors when their
Euclidean distance is at most delta. The graph is stored CSR-style
(indptr/indices) with neighbor lists sorted, so identical inputs always
produce identical structures.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, InputError

# above this many spots the exact pairwise scan gets replaced by a KD-tree
_KDTREE_CUTOFF = 10_000

__all__ = ["SpotGrid", "NeighborGraph", "square_grid", "build_neighbor_graph", "interior_spots"]


@dataclass(frozen=True)
class SpotGrid:
    """Collection of spot positions; spot_id i is row i of positions."""

    positions: np.ndarray  # (n, 2) float

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        if pos.ndim != 2 or pos.shape[1] != 2 or pos.shape[0] < 1:
            raise InputError("positions must be an (n, 2) array with n >= 1")
        if not np.all(np.isfinite(pos)):
            raise InputError("spot coordinates must be finite")
        object.__setattr__(self, "positions", pos)

    @property
    def n(self) -> int:
        return self.positions.shape[0]


@dataclass(frozen=True)
class NeighborGraph:
    """Symmetric adjacency without self-loops, CSR layout."""

    n: int
    indptr: np.ndarray  # (n+1,) int64
    indices: np.ndarray  # (n_edges*2,) int64, sorted within each row

    degrees: np.ndarray = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "degrees", np.diff(self.indptr).astype(np.int64))

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i] : self.indptr[i + 1]]

    @property
    def n_edges(self) -> int:
        return int(self.indices.shape[0] // 2)


def square_grid(m: int) -> SpotGrid:
    """m x m unit-spacing grid, row-major spot ordering (spot i at row i//m, col i%m)."""
    if m < 1:
        raise ConfigError("grid side must be >= 1")
    rows, cols = np.divmod(np.arange(m * m), m)
    return SpotGrid(np.column_stack([rows, cols]).astype(float))


def _pairs_exact(pos: np.ndarray, delta: float) -> tuple[np.ndarray, np.ndarray]:
    d2 = np.sum((pos[:, None, :] - pos[None, :, :]) ** 2, axis=-1)
    ii, jj = np.nonzero(d2 <= delta * delta)
    keep = ii != jj
    return ii[keep], jj[keep]


def _pairs_kdtree(pos: np.ndarray, delta: float) -> tuple[np.ndarray, np.ndarray]:
    from scipy.spatial import cKDTree

    pairs = cKDTree(pos).query_pairs(delta, output_type="ndarray")
    if pairs.size == 0:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    ii = np.concatenate([pairs[:, 0], pairs[:, 1]])
    jj = np.concatenate([pairs[:, 1], pairs[:, 0]])
    return ii, jj


def build_neighbor_graph(grid: SpotGrid, delta: float) -> NeighborGraph:
    """Connect every pair of spots within Euclidean distance delta.

    delta=1 on a unit grid gives rook adjacency (4 interior neighbors),
    delta=1.5 gives queen adjacency (8 interior neighbors). Isolated spots
    are legal; downstream autocovariate terms treat them as contributing 0.
    """
    if not np.isfinite(delta) or delta <= 0:
        raise ConfigError(f"neighbor radius must be positive, got {delta!r}")
    pos = grid.positions
    n = grid.n
    if n <= _KDTREE_CUTOFF:
        ii, jj = _pairs_exact(pos, delta)
    else:
        ii, jj = _pairs_kdtree(pos, delta)
    order = np.lexsort((jj, ii))
    ii, jj = ii[order], jj[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, ii + 1, 1)
    np.cumsum(indptr, out=indptr)
    return NeighborGraph(n=n, indptr=indptr, indices=jj.astype(np.int64))


def interior_spots(graph: NeighborGraph) -> np.ndarray:
    """Spots whose degree equals the maximum degree in the graph.

    On a regular lattice this picks the interior (non-boundary) spots; the
    max-degree rule is the convention used for masking studies.
    """
    if graph.n == 0:
        return np.empty(0, dtype=np.int64)
    max_deg = int(graph.degrees.max())
    return np.nonzero(graph.degrees == max_deg)[0].astype(np.int64)
