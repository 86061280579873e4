"""Closed point clouds and their partition into overlapping stencils.

A stencil is a contiguous cyclic run of cloud indices: a core of points
it owns exclusively plus half the boundary width of shared neighbors on
each side.  Cores are disjoint and jointly cover the cloud, so every
point has exactly one owning stencil.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DegenerateInputError


def _readonly(a, dtype=float):
    a = np.ascontiguousarray(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PointCloud:
    """Ordered sample points of a closed planar curve.

    ``kappa`` (signed curvature) and ``normals`` (outward units) are
    optional per-point annotations filled in by the geometry stage.
    """

    points: np.ndarray
    closed: bool = True
    kappa: np.ndarray | None = None
    normals: np.ndarray | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ConfigurationError("points must have shape (N, 2)")
        if pts.shape[0] < 4:
            raise ConfigurationError("a point cloud needs at least 4 points")
        if not np.all(np.isfinite(pts)):
            raise ConfigurationError("points must be finite")
        gaps = np.linalg.norm(np.roll(pts, -1, axis=0) - pts, axis=1)
        if not self.closed:
            gaps = gaps[:-1]
        if np.any(gaps == 0.0):
            raise DegenerateInputError("consecutive points must be distinct")
        object.__setattr__(self, "points", _readonly(pts))

    def __len__(self):
        return self.points.shape[0]

    def spacings(self):
        """Consecutive gap lengths; cyclic, so gap[i] joins point i to i+1."""
        d = np.roll(self.points, -1, axis=0) - self.points
        return np.linalg.norm(d, axis=1)

    def signed_area(self):
        x, y = self.points[:, 0], self.points[:, 1]
        return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))

    def orientation(self):
        """+1 for counterclockwise ordering, -1 for clockwise."""
        return 1.0 if self.signed_area() >= 0 else -1.0

    def diameter(self):
        pts = self.points
        return float(
            max(pts[:, 0].max() - pts[:, 0].min(), pts[:, 1].max() - pts[:, 1].min())
        )


def ensure_counterclockwise(pc):
    """Reverse the point order if the cloud is clockwise."""
    if pc.orientation() > 0:
        return pc
    return PointCloud(pc.points[::-1].copy(), closed=pc.closed)


@dataclass(frozen=True, eq=False)
class Stencil:
    """One partition cell: owned core indices plus shared boundary.

    ``indices`` lists the full contiguous cyclic run (left boundary,
    core, right boundary).  ``params``, ``curve``, and ``basis`` are
    attached by the fitting stage; ``basis`` caches the collocation
    matrix of the stencil parameters against the fitted knot vector.
    """

    label: int
    indices: np.ndarray
    core_offset: int
    core_size: int
    curve: object = None
    params: np.ndarray | None = None
    basis: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "indices", _readonly(self.indices, dtype=int))

    @property
    def size(self):
        return self.indices.size

    @property
    def core_indices(self):
        return self.indices[self.core_offset : self.core_offset + self.core_size]

    @property
    def boundary_indices(self):
        mask = np.ones(self.size, dtype=bool)
        mask[self.core_offset : self.core_offset + self.core_size] = False
        return self.indices[mask]

    @property
    def core_params(self):
        if self.params is None:
            return None
        return self.params[self.core_offset : self.core_offset + self.core_size]


class Cover(tuple):
    """Partition of a cloud: a tuple of stencils plus the owner map."""

    def __new__(cls, stencils, labels):
        self = super().__new__(cls, stencils)
        self.labels = _readonly(labels, dtype=int)
        return self

    def stencil_of(self, index):
        """Label of the stencil whose core owns the given point index."""
        return int(self.labels[int(index)])

    def replace_stencils(self, stencils):
        return Cover(stencils, self.labels)


def partition(cloud, core_size, boundary_size):
    """Split a cloud into cyclic stencils of core plus shared boundary.

    Cores tile the index circle in order; the final core absorbs the
    remainder, and a remainder of one is merged into the previous core
    so no core degenerates to a single point.  ``boundary_size`` must be
    even: half on each side.
    """
    n = len(cloud)
    core_size = int(core_size)
    boundary_size = int(boundary_size)
    if core_size < 1:
        raise ConfigurationError("core_size must be at least 1")
    if boundary_size < 0 or boundary_size % 2 != 0:
        raise ConfigurationError("boundary_size must be even and nonnegative")
    if core_size + boundary_size > n:
        raise ConfigurationError(
            f"stencil size {core_size + boundary_size} exceeds cloud size {n}"
        )
    starts = list(range(0, n, core_size))
    sizes = [core_size] * len(starts)
    sizes[-1] = n - starts[-1]
    if sizes[-1] == 1 and len(sizes) > 1:
        starts.pop()
        sizes.pop()
        sizes[-1] += 1
    half = boundary_size // 2
    stencils = []
    labels = np.empty(n, dtype=int)
    for k, (start, size) in enumerate(zip(starts, sizes)):
        run = (np.arange(start - half, start + size + half)) % n
        stencils.append(Stencil(label=k, indices=run, core_offset=half, core_size=size))
        labels[(np.arange(start, start + size)) % n] = k
    return Cover(stencils, labels)
