"""Curve fitting: chord-length parameterization, stencil interpolation,
control-polygon deviation, and knot-insertion refinement.

Each coordinate is interpolated against the same collocation matrix, so
one factorization serves both.  Refinement inserts knots where the
curve strays farthest from its control polygon until every control
point sits within tolerance of the curve.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .bspline import BSplineCurve, clamped_knots, control_polygon
from .errors import ConfigurationError, DegenerateInputError, FitError

_SNAP_TOL = 1e-9
_SAMPLES_PER_SPAN = 64
_POLISH_SAMPLES = 256


@dataclass(frozen=True, eq=False)
class ParamAssignment:
    """Chord-length parameters for an ordered open run of points."""

    values: np.ndarray
    chord_lengths: np.ndarray
    total: float


@dataclass(frozen=True, eq=False)
class FitReport:
    residual: float
    deviation: float
    refinement_steps: int
    tol_reached: bool


def chord_parameterize(points):
    """Normalized cumulative chord-length parameters in [0, 1]."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 2:
        raise ConfigurationError("need at least two points to parameterize")
    chords = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    if np.any(chords == 0.0):
        raise DegenerateInputError("duplicate consecutive points")
    total = float(chords.sum())
    values = np.concatenate([[0.0], np.cumsum(chords) / total])
    values[-1] = 1.0
    return ParamAssignment(values=values, chord_lengths=chords, total=total)


def interpolate_stencil(points, degree, params=None):
    """Clamped B-spline through the points at chord-length parameters.

    The collocation system is square: one control point per data point.
    Raises FitError when the system is singular or the back-substituted
    residual exceeds 1e-10 of the data diameter.
    """
    pts = np.asarray(points, dtype=float)
    m = pts.shape[0]
    degree = int(degree)
    if degree < 1 or degree > m - 1:
        raise ConfigurationError(
            f"degree {degree} invalid for {m} points (need 1 <= p <= m-1)"
        )
    if params is None:
        params = chord_parameterize(pts).values
    kv = clamped_knots(m, degree)
    B = kv.basis_matrix(params)
    center = pts.mean(axis=0)
    local = pts - center
    try:
        ctrl = np.linalg.solve(B, local)
    except np.linalg.LinAlgError as exc:
        raise FitError(f"singular collocation matrix: {exc}") from exc
    diam = max(
        pts[:, 0].max() - pts[:, 0].min(), pts[:, 1].max() - pts[:, 1].min(), 1e-300
    )
    residual = np.linalg.norm(B @ ctrl - local, axis=1).max()
    if not np.isfinite(residual) or residual > 1e-10 * diam:
        raise FitError(
            f"collocation residual {residual:.3e} exceeds 1e-10 of diameter {diam:.3e}"
        )
    return BSplineCurve(kv, ctrl + center)


def _span_samples(curve, per_span):
    """Sample parameters covering every nonempty knot span."""
    breaks = np.unique(curve.knots.knots)
    us = [
        np.linspace(a, b, per_span, endpoint=False)
        for a, b in zip(breaks[:-1], breaks[1:])
    ]
    us.append(np.array([1.0]))
    return np.concatenate(us)


def control_point_distances(curve, indices=None):
    """Nearest distance from each control point to the curve trace.

    Candidates are the endpoints plus stationary points of the squared
    distance, located by sign changes of (P - f(u)) . f'(u) on a per-span
    sample grid and polished by bisection.
    """
    P = curve.control_points
    if indices is None:
        indices = np.arange(P.shape[0])
    indices = np.atleast_1d(indices).astype(int)
    us = _span_samples(curve, _SAMPLES_PER_SPAN)
    f = curve.evaluate(us)
    dcurve = curve.derivative()
    df = dcurve.evaluate(us)
    Pj = P[indices]
    g = np.einsum("jkd,kd->jk", Pj[:, None, :] - f[None, :, :], df)
    out = np.minimum(
        np.linalg.norm(Pj - f[0], axis=1), np.linalg.norm(Pj - f[-1], axis=1)
    )
    zj, zk = np.nonzero(g == 0.0)
    if zj.size:
        np.minimum.at(out, zj, np.linalg.norm(Pj[zj] - f[zk], axis=1))
    jj, kk = np.nonzero(g[:, :-1] * g[:, 1:] < 0)
    if jj.size:
        lo = us[kk].copy()
        hi = us[kk + 1].copy()
        glo = g[jj, kk].copy()
        anchors = Pj[jj]
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            gm = np.einsum(
                "kd,kd->k", anchors - curve.evaluate(mid), dcurve.evaluate(mid)
            )
            take_left = glo * gm <= 0
            hi = np.where(take_left, mid, hi)
            lo = np.where(take_left, lo, mid)
            glo = np.where(take_left, glo, gm)
            if np.all(hi - lo < 1e-12):
                break
        root_pts = curve.evaluate(0.5 * (lo + hi))
        np.minimum.at(out, jj, np.linalg.norm(anchors - root_pts, axis=1))
    return out


def control_point_distance(curve, index):
    return float(control_point_distances(curve, [index])[0])


def deviation_metric(curve):
    """Largest control-point distance to the curve trace."""
    return float(control_point_distances(curve).max())


def _farthest_from_polygon(curve):
    """Parameter where the curve strays farthest from its control polygon."""
    poly = control_polygon(curve)
    us = _span_samples(curve, _POLISH_SAMPLES)
    gap = np.linalg.norm(curve.evaluate(us) - poly.evaluate(us), axis=1)
    k = int(np.argmax(gap))
    lo = us[max(k - 1, 0)]
    hi = us[min(k + 1, us.size - 1)]
    inv_phi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)

    def h(u):
        pt = curve.evaluate(np.array([u]))
        return float(np.linalg.norm(pt - poly.evaluate(np.array([u]))))

    hc, hd = h(c), h(d)
    for _ in range(48):
        if hc > hd:
            b, d, hd = d, c, hc
            c = b - inv_phi * (b - a)
            hc = h(c)
        else:
            a, c, hc = c, d, hd
            d = a + inv_phi * (b - a)
            hd = h(d)
        if b - a < 1e-12:
            break
    return 0.5 * (a + b)


def refine_control_polygon(curve, eps_tol, max_insertions=32):
    """Insert knots until every control point is within eps_tol of the curve.

    Insertion sites are snapped to an existing knot when closer than
    1e-9, in which case refinement stops (the site cannot be inserted
    again without raising the multiplicity).  Returns the refined curve
    and a report; ``residual`` is unknown here and reported as NaN.
    """
    eps_tol = float(eps_tol)
    if eps_tol <= 0:
        raise ConfigurationError("eps_tol must be positive")
    steps = 0
    dev = deviation_metric(curve)
    reached = dev <= eps_tol
    while not reached and steps < max_insertions:
        u_new = _farthest_from_polygon(curve)
        if np.min(np.abs(curve.knots.knots - u_new)) < _SNAP_TOL:
            break
        curve = curve.insert_knot(u_new)
        steps += 1
        dev = deviation_metric(curve)
        reached = dev <= eps_tol
    return curve, FitReport(
        residual=float("nan"), deviation=dev, refinement_steps=steps, tol_reached=reached
    )


def fit_stencil(points, degree, eps_tol=None, max_insertions=32):
    """Interpolate a stencil and optionally refine its control polygon.

    Returns (curve, params, report).  The report residual is the actual
    interpolation residual at the stencil parameters.
    """
    pts = np.asarray(points, dtype=float)
    assignment = chord_parameterize(pts)
    curve = interpolate_stencil(pts, degree, params=assignment.values)
    if eps_tol is None:
        report = FitReport(
            residual=float(
                np.linalg.norm(curve.evaluate(assignment.values) - pts, axis=1).max()
            ),
            deviation=deviation_metric(curve),
            refinement_steps=0,
            tol_reached=True,
        )
        return curve, assignment.values, report
    curve, report = refine_control_polygon(curve, eps_tol, max_insertions)
    residual = float(
        np.linalg.norm(curve.evaluate(assignment.values) - pts, axis=1).max()
    )
    return curve, assignment.values, replace(report, residual=residual)
