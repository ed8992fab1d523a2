"""Slice- and study-level data containers.

A slice is one lattice of spots: covariates, binary outcomes with an
observation mask, and the neighbor graph. A study groups slices by donor
and fixes the within-donor correlation structure.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .lattice import NeighborGraph

EXCHANGEABLE = "exchangeable"
AUTOREGRESSIVE = "autoregressive"
STRUCTURES = (EXCHANGEABLE, AUTOREGRESSIVE)

__all__ = ["SliceData", "StudyData", "EXCHANGEABLE", "AUTOREGRESSIVE", "STRUCTURES"]


@dataclass
class SliceData:
    """One tissue slice: n spots with d covariates each.

    y holds the outcome where observed (r=1); entries with r=0 are masked
    and their stored value carries no meaning (kept as 0).
    """

    x: np.ndarray  # (n, d) float
    y: np.ndarray  # (n,) float in {0, 1}
    r: np.ndarray  # (n,) float in {0, 1}; 1 = observed
    graph: NeighborGraph
    donor_id: int = 0
    slice_id: int = 0
    positions: np.ndarray | None = None  # (n, 2), for file output

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.y = np.asarray(self.y, dtype=float).copy()
        self.r = np.asarray(self.r, dtype=float)
        n = self.graph.n
        if self.x.ndim != 2 or self.x.shape[0] != n:
            raise InputError(f"x must be (n, d) with n={n}, got {self.x.shape}")
        if self.y.shape != (n,) or self.r.shape != (n,):
            raise InputError("y and r must be length-n vectors")
        if not np.all(np.isfinite(self.x)):
            raise InputError("covariates contain NaN or infinite values")
        if not np.all((self.r == 0) | (self.r == 1)):
            raise InputError("observation indicators must be 0 or 1")
        obs = self.r == 1
        if not np.all((self.y[obs] == 0) | (self.y[obs] == 1)):
            raise InputError("observed outcomes must be 0 or 1")
        self.y[~obs] = 0.0
        if self.positions is not None:
            self.positions = np.asarray(self.positions, dtype=float)
            if self.positions.shape != (n, 2):
                raise InputError("positions must be (n, 2)")

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def d(self) -> int:
        return self.x.shape[1]

    @property
    def missing_idx(self) -> np.ndarray:
        return np.nonzero(self.r == 0)[0]

    @property
    def n_missing(self) -> int:
        return int(np.sum(self.r == 0))


@dataclass
class StudyData:
    """Slices grouped by donor, plus the within-donor correlation structure."""

    slices: list[SliceData]
    structure: str = EXCHANGEABLE
    gene_names: list[str] | None = None

    donor_ids: list[int] = field(init=False)
    n_donors: int = field(init=False)
    slices_per_donor: int = field(init=False)

    def __post_init__(self):
        if not self.slices:
            raise InputError("study needs at least one slice")
        if self.structure not in STRUCTURES:
            raise InputError(f"unknown correlation structure {self.structure!r}")
        d = self.slices[0].d
        if any(s.d != d for s in self.slices):
            raise InputError("all slices must share the covariate dimension")
        if self.gene_names is not None and len(self.gene_names) != d:
            raise InputError("gene_names length must match covariate dimension")
        self.donor_ids = sorted({s.donor_id for s in self.slices})
        counts = {c: 0 for c in self.donor_ids}
        for s in self.slices:
            counts[s.donor_id] += 1
        sizes = sorted(set(counts.values()))
        if len(sizes) != 1:
            raise InputError(
                f"donors have unequal slice counts {counts}; the correlation "
                "model assumes a common number of slices per donor"
            )
        self.n_donors = len(self.donor_ids)
        self.slices_per_donor = sizes[0]

    @property
    def d(self) -> int:
        return self.slices[0].d

    @property
    def n_total(self) -> int:
        return sum(s.n for s in self.slices)

    @property
    def n_missing(self) -> int:
        return sum(s.n_missing for s in self.slices)

    def donor_slice_index(self, s: SliceData) -> tuple[int, int]:
        """(c, g) position of a slice: donor rank, then slice rank within donor."""
        c = self.donor_ids.index(s.donor_id)
        siblings = sorted(
            [t.slice_id for t in self.slices if t.donor_id == s.donor_id]
        )
        return c, siblings.index(s.slice_id)


def as_study(data) -> StudyData:
    """Accept either a StudyData or a bare SliceData."""
    if isinstance(data, StudyData):
        return data
    if isinstance(data, SliceData):
        return StudyData(slices=[data])
    raise InputError(f"expected SliceData or StudyData, got {type(data).__name__}")
