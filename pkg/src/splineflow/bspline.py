"""Clamped B-spline primitives.

Knot vectors, basis evaluation, curve points and derivatives, Greville
abscissae, control polygons, and single knot insertion.  Everything is
0-indexed; a curve of degree ``p`` with ``m`` control points carries
``m + p + 1`` knots whose first and last ``p + 1`` entries coincide, so
the curve interpolates its end control points.

Basis values are computed with the local triangular scheme on the knot
span containing the query, which touches only the ``p + 1`` basis
functions that are nonzero there.  Evaluation accepts scalars or 1-d
arrays of parameters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, KnotMultiplicityError, OutOfDomainError


def _readonly(a):
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class KnotVector:
    """Nondecreasing clamped knot sequence with a polynomial degree.

    Knots are rescaled to [0, 1] on construction.  The vector supports
    ``len(knots) - degree - 1`` control points and is evaluable on the
    full interval [0, 1].
    """

    knots: np.ndarray
    degree: int

    def __post_init__(self):
        p = int(self.degree)
        if p < 0:
            raise ConfigurationError("degree must be nonnegative")
        knots = np.asarray(self.knots, dtype=float).ravel()
        if knots.size < 2 * (p + 1):
            raise ConfigurationError(
                f"need at least {2 * (p + 1)} knots for degree {p}, got {knots.size}"
            )
        if np.any(np.diff(knots) < 0):
            raise ConfigurationError("knots must be nondecreasing")
        width = knots[-1] - knots[0]
        if width <= 0:
            raise ConfigurationError("knot range must have positive width")
        knots = (knots - knots[0]) / width
        knots[knots <= 0.0] = 0.0
        knots[knots >= 1.0] = 1.0
        if knots[p] != 0.0 or knots[-p - 1] != 1.0:
            raise ConfigurationError(
                "knot vector must be clamped: first and last knots repeated degree+1 times"
            )
        _, counts = np.unique(knots, return_counts=True)
        if np.any(counts > p + 1):
            raise ConfigurationError("knot multiplicity exceeds degree + 1")
        object.__setattr__(self, "degree", p)
        object.__setattr__(self, "knots", _readonly(knots))

    @property
    def control_count(self):
        return self.knots.size - self.degree - 1

    def span_of(self, u):
        """Index i of the nonempty span with knots[i] <= u < knots[i+1].

        The right endpoint u = 1 maps to the last nonempty span.
        """
        u = np.asarray(u, dtype=float)
        idx = np.searchsorted(self.knots, u, side="right") - 1
        return np.clip(idx, self.degree, self.control_count - 1)

    def nonzero_basis(self, u):
        """Spans and the degree+1 nonzero basis values at each parameter.

        Returns ``(spans, table)`` where ``table[k, r]`` is the value of
        basis function ``spans[k] - degree + r`` at ``u[k]``.  Results
        are memoized by parameter content; the returned arrays are
        read-only.
        """
        u = np.atleast_1d(np.asarray(u, dtype=float))
        cache = getattr(self, "_basis_cache", None)
        if cache is None:
            cache = {}
            object.__setattr__(self, "_basis_cache", cache)
        key = u.tobytes()
        hit = cache.get(key)
        if hit is not None:
            return hit
        t = self.knots
        p = self.degree
        spans = self.span_of(u)
        n = u.size
        table = np.ones((n, p + 1))
        left = np.empty((n, p + 1))
        right = np.empty((n, p + 1))
        for j in range(1, p + 1):
            left[:, j] = u - t[spans + 1 - j]
            right[:, j] = t[spans + j] - u
            saved = np.zeros(n)
            for r in range(j):
                den = right[:, r + 1] + left[:, j - r]
                frac = table[:, r] / np.where(den > 0, den, 1.0)
                table[:, r] = saved + right[:, r + 1] * frac
                saved = left[:, j - r] * frac
            table[:, j] = saved
        spans.setflags(write=False)
        table.setflags(write=False)
        if len(cache) >= 128:
            cache.clear()
        cache[key] = (spans, table)
        return spans, table

    def basis_matrix(self, u):
        """Dense collocation matrix B with B[k, j] = basis_j(u[k])."""
        u = np.atleast_1d(np.asarray(u, dtype=float))
        spans, table = self.nonzero_basis(u)
        p = self.degree
        B = np.zeros((u.size, self.control_count))
        cols = spans[:, None] - p + np.arange(p + 1)[None, :]
        B[np.arange(u.size)[:, None], cols] = table
        return B

    def greville(self):
        """Greville abscissae: means of degree consecutive interior knots."""
        t = self.knots
        p = self.degree
        m = self.control_count
        if p == 0:
            return 0.5 * (t[:-1] + t[1:])
        idx = np.arange(m)[:, None] + np.arange(1, p + 1)[None, :]
        return t[idx].mean(axis=1)

    def multiplicity(self, value):
        return int(np.count_nonzero(self.knots == value))

    def derivative_knots(self):
        """Knot vector of the hodograph (degree lowered by one)."""
        cached = getattr(self, "_derivative_knots", None)
        if cached is None:
            cached = KnotVector(self.knots[1:-1], self.degree - 1)
            object.__setattr__(self, "_derivative_knots", cached)
        return cached


def clamped_knots(control_count, degree):
    """Open-uniform knot vector for the given control count and degree.

    Interior knots are spaced uniformly; the ends are repeated
    ``degree + 1`` times so the curve passes through its end control
    points.
    """
    m = int(control_count)
    p = int(degree)
    if p < 1:
        raise ConfigurationError("degree must be at least 1")
    if m < p + 1:
        raise ConfigurationError(
            f"degree {p} needs at least {p + 1} control points, got {m}"
        )
    interior = np.linspace(0.0, 1.0, m - p + 1)[1:-1]
    knots = np.concatenate([np.zeros(p + 1), interior, np.ones(p + 1)])
    return KnotVector(knots, p)


def basis_value(kv, index, u):
    """Value of a single basis function, zero outside its support.

    Unlike curve evaluation this never raises for parameters beyond the
    knot range; the basis simply vanishes there.
    """
    index = int(index)
    if index < 0 or index >= kv.control_count:
        raise ConfigurationError(f"basis index {index} out of range")
    u = float(u)
    if u < kv.knots[0] or u > kv.knots[-1]:
        return 0.0
    spans, table = kv.nonzero_basis(u)
    offset = index - (int(spans[0]) - kv.degree)
    if offset < 0 or offset > kv.degree:
        return 0.0
    return float(table[0, offset])


def _check_domain(u):
    u = np.asarray(u, dtype=float)
    if u.ndim > 1:
        raise ConfigurationError("parameters must be scalar or 1-d")
    if np.any(u < 0.0) or np.any(u > 1.0):
        bad = np.atleast_1d(u)[(np.atleast_1d(u) < 0) | (np.atleast_1d(u) > 1)]
        raise OutOfDomainError(f"parameter {bad[0]!r} outside [0, 1]")
    return u


@dataclass(frozen=True, eq=False)
class BSplineCurve:
    """Planar B-spline curve: a knot vector plus (m, 2) control points."""

    knots: KnotVector
    control_points: np.ndarray

    def __post_init__(self):
        P = np.asarray(self.control_points, dtype=float)
        if P.ndim != 2 or P.shape[1] != 2:
            raise ConfigurationError("control points must have shape (m, 2)")
        if P.shape[0] != self.knots.control_count:
            raise ConfigurationError(
                f"knot vector supports {self.knots.control_count} control points, "
                f"got {P.shape[0]}"
            )
        if not np.all(np.isfinite(P)):
            raise ConfigurationError("control points must be finite")
        object.__setattr__(self, "control_points", _readonly(P))

    @property
    def degree(self):
        return self.knots.degree

    def evaluate(self, u):
        """Curve point(s) at parameter(s) in [0, 1]."""
        u = _check_domain(u)
        scalar = u.ndim == 0
        spans, table = self.knots.nonzero_basis(u)
        p = self.degree
        idx = spans[:, None] - p + np.arange(p + 1)[None, :]
        pts = np.einsum("kr,krd->kd", table, self.control_points[idx])
        return pts[0] if scalar else pts

    def derivative(self):
        """Hodograph: the degree p-1 curve tracing f'."""
        cached = getattr(self, "_hodograph", None)
        if cached is not None:
            return cached
        p = self.degree
        if p < 1:
            raise ConfigurationError("cannot differentiate a degree-0 curve")
        t = self.knots.knots
        P = self.control_points
        m = P.shape[0]
        den = t[p + 1 : p + m] - t[1:m]
        with np.errstate(divide="ignore", invalid="ignore"):
            Q = p * (P[1:] - P[:-1]) / den[:, None]
        Q[den == 0] = 0.0
        result = BSplineCurve(self.knots.derivative_knots(), Q)
        object.__setattr__(self, "_hodograph", result)
        return result

    def derivatives(self, u, order=1):
        """First derivative, or (first, second) when order is 2.

        The order may not exceed the curve degree.
        """
        if order not in (1, 2):
            raise ConfigurationError("derivative order must be 1 or 2")
        if order > self.degree:
            raise ConfigurationError(
                f"derivative order {order} exceeds curve degree {self.degree}"
            )
        d1 = self.derivative()
        if order == 1:
            return d1.evaluate(u)
        return d1.evaluate(u), d1.derivative().evaluate(u)

    def greville(self):
        return self.knots.greville()

    def insert_knot(self, value):
        """New curve with ``value`` inserted once into the knot vector.

        The traced curve is unchanged; the control polygon gains one
        vertex computed by convex combination of its neighbors.
        """
        value = float(value)
        if not 0.0 < value < 1.0:
            raise OutOfDomainError(f"insertion site {value!r} must lie strictly inside (0, 1)")
        kv = self.knots
        p = kv.degree
        if p < 1:
            raise ConfigurationError("cannot insert into a degree-0 curve")
        if kv.multiplicity(value) >= p:
            raise KnotMultiplicityError(
                f"knot {value!r} already has multiplicity {kv.multiplicity(value)}"
            )
        t = kv.knots
        k = int(kv.span_of(value))
        P = self.control_points
        m = P.shape[0]
        Q = np.empty((m + 1, 2))
        Q[: k - p + 1] = P[: k - p + 1]
        for j in range(k - p + 1, k + 1):
            a = (value - t[j]) / (t[j + p] - t[j])
            Q[j] = (1.0 - a) * P[j - 1] + a * P[j]
        Q[k + 1 :] = P[k:]
        new_knots = np.insert(t, k + 1, value)
        return BSplineCurve(KnotVector(new_knots, p), Q)


@dataclass(frozen=True, eq=False)
class ControlPolygon:
    """Piecewise-linear curve through control points over Greville nodes."""

    vertices: np.ndarray
    nodes: np.ndarray

    def evaluate(self, u):
        u = np.atleast_1d(np.asarray(u, dtype=float))
        x = np.interp(u, self.nodes, self.vertices[:, 0])
        y = np.interp(u, self.nodes, self.vertices[:, 1])
        return np.column_stack([x, y])


def control_polygon(curve):
    """Control polygon of a curve, parameterized over Greville abscissae."""
    return ControlPolygon(curve.control_points, curve.greville())
