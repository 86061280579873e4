"""Point-cloud resampling along fitted stencil curves.

Removal drops the later point of any gap tighter than the lower
threshold in one cyclic sweep.  Insertion places new points on the
owning stencil curve at the parameter midpoint of oversized gaps.
Redistribution re-places all points at equal arc-length increments
along the composite of stencil core segments.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cover import PointCloud
from .errors import ConfigurationError

_PIECE_SAMPLES_PER_NODE = 16


def owner_params(cover, n):
    """Per-point stencil label and fit parameter within the owning stencil."""
    labels = np.asarray(cover.labels)
    params = np.empty(n)
    for st in cover:
        if st.params is None:
            raise ConfigurationError("cover must be fitted before resampling")
        params[st.core_indices] = st.core_params
    return labels, params


class CompositeCurve:
    """Closed chain of stencil core segments with a cumulative arc table.

    Piece k runs from the first core node of stencil k to the first core
    node of stencil k+1, evaluated on stencil k's curve.  Requires a
    boundary of at least one point on each side so the seam parameter is
    known.
    """

    def __init__(self, cover):
        if len(cover) < 2:
            raise ConfigurationError("a composite curve needs at least two stencils")
        self.pieces = []
        offsets = [0.0]
        for k, st in enumerate(cover):
            nxt = cover[(k + 1) % len(cover)]
            target = int(nxt.core_indices[0])
            where = np.nonzero(st.indices == target)[0]
            if where.size == 0:
                raise ConfigurationError(
                    "composite curve needs boundary_size >= 2 so stencil seams overlap"
                )
            u_start = st.params[st.core_offset]
            u_end = st.params[int(where[0])]
            ns = max(33, _PIECE_SAMPLES_PER_NODE * st.core_size + 1)
            us = np.linspace(u_start, u_end, ns)
            pts = st.curve.evaluate(us)
            seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
            cum = np.concatenate([[0.0], np.cumsum(seg)])
            self.pieces.append((st, us, cum))
            offsets.append(offsets[-1] + cum[-1])
        self.offsets = np.asarray(offsets)
        self.total_length = float(self.offsets[-1])

    def param_of_arc(self, s):
        """(stencil labels, params) at composite arc positions."""
        s = np.atleast_1d(np.asarray(s, dtype=float)) % self.total_length
        piece_idx = np.clip(
            np.searchsorted(self.offsets, s, side="right") - 1, 0, len(self.pieces) - 1
        )
        labels = np.empty(s.size, dtype=int)
        params = np.empty(s.size)
        for k in np.unique(piece_idx):
            st, us, cum = self.pieces[k]
            sel = piece_idx == k
            params[sel] = np.interp(s[sel] - self.offsets[k], cum, us)
            labels[sel] = st.label
        return labels, params

    def points_at_arc(self, s):
        labels, params = self.param_of_arc(s)
        pts = np.empty((params.size, 2))
        for k in np.unique(labels):
            st, _, _ = self.pieces[k]
            sel = labels == k
            pts[sel] = st.curve.evaluate(params[sel])
        return pts

    def arc_of(self, label, param):
        """Composite arc position of a parameter on one stencil's piece."""
        st, us, cum = self.pieces[int(label)]
        return float(self.offsets[int(label)] + np.interp(param, us, cum))


@dataclass(frozen=True, eq=False)
class ResampleResult:
    cloud: PointCloud
    removed: int
    inserted: int
    redistributed: bool


def remove_close(cloud, d_tol_min, min_points=4):
    """Drop the later point of every gap below d_tol_min, cyclically.

    Returns (cloud, kept) where ``kept`` maps surviving positions to
    their original indices.  Never shrinks below ``min_points``.
    """
    pts = cloud.points
    kept = list(range(len(cloud)))
    pos = 0
    while pos < len(kept) and len(kept) > min_points:
        nxt = (pos + 1) % len(kept)
        if nxt == pos:
            break
        gap = float(np.linalg.norm(pts[kept[nxt]] - pts[kept[pos]]))
        if gap < d_tol_min:
            kept.pop(nxt)
            if nxt < pos:
                break
        else:
            pos += 1
    kept = np.asarray(kept, dtype=int)
    return PointCloud(pts[kept]), kept


def insert_far(cover, cloud, d_tol_max, original_indices=None):
    """Fill gaps wider than d_tol_max with curve points at midpoint params.

    ``original_indices`` maps the cloud's points back to the indices the
    cover was built on (identity when the cloud is the fitted one).  A
    gap is owned by the stencil whose core contains its left point; the
    new point is evaluated on that stencil's curve.  When the right
    point has left the stencil entirely the chord midpoint is used.
    """
    pts = cloud.points
    n = len(cloud)
    if original_indices is None:
        original_indices = np.arange(n)
    labels, params = owner_params(cover, int(cover.labels.size))
    gaps = np.linalg.norm(np.roll(pts, -1, axis=0) - pts, axis=1)
    out = []
    inserted = 0
    for i in range(n):
        out.append(pts[i])
        if gaps[i] <= d_tol_max:
            continue
        oi = int(original_indices[i])
        oj = int(original_indices[(i + 1) % n])
        st = cover[labels[oi]]
        u_i = params[oi]
        where = np.nonzero(st.indices == oj)[0]
        if where.size:
            u_new = 0.5 * (u_i + st.params[int(where[0])])
            out.append(st.curve.evaluate(float(u_new)))
        else:
            out.append(0.5 * (pts[i] + pts[(i + 1) % n]))
        inserted += 1
    if inserted == 0:
        return cloud, 0
    return PointCloud(np.asarray(out)), inserted


def redistribute(cover, cloud, eps_d, anchor_arc=None):
    """Re-place points at equal arc increments along the composite curve.

    The first point stays pinned at ``anchor_arc`` (composite arc
    coordinate) or at the start of the first piece.  Consecutive chord
    gaps land within ``eps_d`` of the mean polygon spacing for any
    reasonably resolved curve.
    """
    n = len(cloud)
    comp = CompositeCurve(cover)
    s0 = 0.0 if anchor_arc is None else float(anchor_arc)
    s = s0 + comp.total_length * np.arange(n) / n
    return PointCloud(comp.points_at_arc(s))


def resample_pass(cover, cloud, d_tol_min, d_tol_max, eps_d, min_points=4):
    """Full remove, insert, redistribute sweep against a fitted cover."""
    if d_tol_min >= d_tol_max:
        raise ConfigurationError("d_tol_min must be below d_tol_max")
    out, kept = remove_close(cloud, d_tol_min, min_points)
    removed = len(cloud) - kept.size
    out, inserted = insert_far(cover, out, d_tol_max, original_indices=kept)
    comp = CompositeCurve(cover)
    anchor = None
    if kept.size:
        labels, params = owner_params(cover, int(cover.labels.size))
        first = int(kept[0])
        anchor = comp.arc_of(labels[first], params[first])
    out = redistribute(cover, out, eps_d, anchor_arc=anchor)
    return ResampleResult(cloud=out, removed=removed, inserted=inserted, redistributed=True)
