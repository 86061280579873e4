"""Differential geometry extracted from fitted stencil curves.

Normals point outward and curvature is signed: positive where the curve
bulges outward (every convex region of a counterclockwise cloud), so
the inward curvature vector is ``-kappa_s * n``.  The ``orientation``
argument is +1 for counterclockwise clouds and -1 for clockwise ones;
it keeps both quantities geometric rather than parameterization
artifacts.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigurationError, DegenerateInputError

_TANGENT_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class GeometrySample:
    """Geometry of one curve point."""

    point_index: int
    tangent: np.ndarray
    normal: np.ndarray
    curvature: float
    signed_curvature: float


def _normals_from_tangents(d1, orientation):
    speed = np.linalg.norm(d1, axis=1)
    if np.any(speed <= _TANGENT_FLOOR):
        raise DegenerateInputError("vanishing tangent: curve is not regular there")
    n = np.column_stack([d1[:, 1], -d1[:, 0]]) / speed[:, None]
    return orientation * n, speed


def unit_normal(curve, u, orientation=1.0):
    """Outward unit normal(s) at parameter(s) u."""
    u_arr = np.atleast_1d(np.asarray(u, dtype=float))
    d1 = curve.derivative().evaluate(u_arr)
    n, _ = _normals_from_tangents(d1, orientation)
    return n[0] if np.isscalar(u) or np.asarray(u).ndim == 0 else n


def curvature(curve, u, orientation=1.0):
    """(kappa, kappa_signed) at parameter(s) u; needs degree >= 2."""
    if curve.degree < 2:
        raise ConfigurationError("curvature needs a curve of degree >= 2")
    u_arr = np.atleast_1d(np.asarray(u, dtype=float))
    d1c = curve.derivative()
    d1 = d1c.evaluate(u_arr)
    d2 = d1c.derivative().evaluate(u_arr)
    speed = np.linalg.norm(d1, axis=1)
    if np.any(speed <= _TANGENT_FLOOR):
        raise DegenerateInputError("vanishing tangent: curvature undefined")
    raw = (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]) / speed**3
    signed = orientation * raw
    if np.isscalar(u) or np.asarray(u).ndim == 0:
        return float(np.abs(signed[0])), float(signed[0])
    return np.abs(signed), signed


def geometry_at(curve, u, orientation=1.0, point_index=-1):
    """Full geometry sample at a single parameter."""
    u_arr = np.array([float(u)])
    d1c = curve.derivative()
    d1 = d1c.evaluate(u_arr)
    d2 = d1c.derivative().evaluate(u_arr)
    n, speed = _normals_from_tangents(d1, orientation)
    raw = (d1[0, 0] * d2[0, 1] - d1[0, 1] * d2[0, 0]) / speed[0] ** 3
    signed = orientation * raw
    return GeometrySample(
        point_index=int(point_index),
        tangent=d1[0],
        normal=n[0],
        curvature=abs(float(signed)),
        signed_curvature=float(signed),
    )


def arc_length(points, closed=True):
    """Chordal length of a polyline; the closing segment is included
    when closed."""
    pts = np.asarray(getattr(points, "points", points), dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 2:
        raise ConfigurationError("need at least two points for a length")
    chords = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    total = float(chords.sum())
    if closed:
        total += float(np.linalg.norm(pts[0] - pts[-1]))
    return total


def tangential_divergence(kappa_signed, normal_speed):
    """Surface divergence of a normal velocity field on a curve."""
    return np.asarray(kappa_signed, dtype=float) * np.asarray(normal_speed, dtype=float)


def annotate_geometry(cloud, cover):
    """Cloud with signed curvature and outward normals at every point.

    Each stencil evaluates its fitted curve at the parameters of its own
    core points; cores tile the cloud, so every point is covered once.
    """
    orientation = cloud.orientation()
    n = len(cloud)
    kappa = np.empty(n)
    normals = np.empty((n, 2))
    for st in cover:
        if st.curve is None or st.params is None:
            raise ConfigurationError("cover must be fitted before annotation")
        if st.curve.degree < 2:
            raise ConfigurationError(
                "stencil curves need degree >= 2 for curvature annotation"
            )
        us = st.core_params
        d1c = st.curve.derivative()
        d1 = d1c.evaluate(us)
        d2 = d1c.derivative().evaluate(us)
        nrm, speed = _normals_from_tangents(d1, orientation)
        raw = (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]) / speed**3
        idx = st.core_indices
        kappa[idx] = orientation * raw
        normals[idx] = nrm
    return replace(cloud, kappa=kappa, normals=normals)
