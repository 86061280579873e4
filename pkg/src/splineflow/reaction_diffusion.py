"""Activator-depleted substrate kinetics on a moving closed curve.

Fields live on the curve's sample points.  Each step treats diffusion
implicitly and reaction plus dilution explicitly:

    (I - dt * D_w * L) w_new = w + dt * (g_w(u, v) - w * kappa_s * v_n)

where L is a periodic three-point Laplacian on the current arc-length
mesh and ``kappa_s * v_n`` is the tangential divergence of the normal
velocity.  The implicit matrix is cyclic tridiagonal and strictly
diagonally dominant, solved in O(N) by elimination plus a rank-one
correction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DegenerateInputError, TimeStepError


@dataclass(frozen=True)
class RDParams:
    """Kinetic and coupling constants.

    ``rate_c`` and ``rate_d`` feed the source terms; ``gamma`` scales
    the reaction strength.  ``coupling_c1``/``coupling_c2`` weight the
    curvature and activator contributions of the coupled velocity.
    ``theta0`` centers the initial bump; when None it is drawn from the
    run's seeded generator.
    """

    diff_u: float = 0.1
    diff_v: float = 1.5
    gamma: float = 100.0
    rate_c: float = 0.1
    rate_d: float = 0.9
    sigma: float = 0.3
    theta0: float | None = None
    coupling_c1: float = 0.02
    coupling_c2: float = 1.0

    def __post_init__(self):
        if self.diff_u < 0 or self.diff_v < 0:
            raise ConfigurationError("diffusion coefficients must be nonnegative")
        if self.sigma <= 0:
            raise ConfigurationError("sigma must be positive")


@dataclass(frozen=True, eq=False)
class FieldState:
    """Field values and the arc-length mesh they live on."""

    u: np.ndarray
    v: np.ndarray
    node_arc_positions: np.ndarray
    length: float

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        v = np.asarray(self.v, dtype=float)
        s = np.asarray(self.node_arc_positions, dtype=float)
        if u.shape != v.shape or u.shape != s.shape:
            raise ConfigurationError("field arrays must share one shape")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "node_arc_positions", s)


def steady_state(params):
    """Spatially homogeneous fixed point (u0, v0) of the kinetics."""
    total = params.rate_c + params.rate_d
    if total == 0:
        raise DegenerateInputError("rate_c + rate_d must be nonzero")
    return total, params.rate_d / total**2


def reaction_terms(u, v, params):
    """Source terms (g_u, g_v) of the kinetics."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    uuv = u * u * v
    g_u = params.gamma * (params.rate_c - u + uuv)
    g_v = params.gamma * (params.rate_d - uuv)
    return g_u, g_v


def arc_positions(points):
    """Cumulative chord positions of closed polygon vertices, plus length."""
    pts = np.asarray(points, dtype=float)
    chords = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    closing = np.linalg.norm(pts[0] - pts[-1])
    s = np.concatenate([[0.0], np.cumsum(chords)])
    return s, float(s[-1] + closing)


def _mesh_widths(s, length):
    h_plus = np.diff(np.concatenate([s, [length + s[0]]]))
    if np.any(h_plus <= 0):
        raise DegenerateInputError("arc positions must be strictly increasing")
    h_minus = np.roll(h_plus, 1)
    return h_minus, h_plus


def laplace_beltrami(values, s, length):
    """Periodic three-point second derivative on a nonuniform arc mesh."""
    w = np.asarray(values, dtype=float)
    s = np.asarray(s, dtype=float)
    if w.size != s.size or w.size < 3:
        raise ConfigurationError("need matching arrays of at least 3 nodes")
    h_minus, h_plus = _mesh_widths(s, float(length))
    wm = np.roll(w, 1)
    wp = np.roll(w, -1)
    return 2.0 * (
        wm / (h_minus * (h_minus + h_plus))
        - w / (h_minus * h_plus)
        + wp / (h_plus * (h_minus + h_plus))
    )


def cyclic_tridiagonal_solve(lower, diag, upper, rhs):
    """Solve a cyclic tridiagonal system.

    ``lower[i]`` multiplies x[i-1] (lower[0] is the top-right corner),
    ``upper[i]`` multiplies x[i+1] (upper[-1] is the bottom-left).
    Standard elimination on the interior plus a rank-one correction for
    the corners.
    """
    a = np.asarray(lower, dtype=float)
    b = np.asarray(diag, dtype=float)
    c = np.asarray(upper, dtype=float)
    d = np.asarray(rhs, dtype=float)
    n = b.size
    if n < 3:
        raise ConfigurationError("cyclic solve needs at least 3 unknowns")

    def thomas(bb, dd):
        cp = np.empty(n)
        dp = np.empty(n)
        cp[0] = c[0] / bb[0]
        dp[0] = dd[0] / bb[0]
        for i in range(1, n):
            denom = bb[i] - a[i] * cp[i - 1]
            cp[i] = c[i] / denom if i < n - 1 else 0.0
            dp[i] = (dd[i] - a[i] * dp[i - 1]) / denom
        x = np.empty(n)
        x[-1] = dp[-1]
        for i in range(n - 2, -1, -1):
            x[i] = dp[i] - cp[i] * x[i + 1]
        return x

    gamma = -b[0]
    bb = b.copy()
    bb[0] = b[0] - gamma
    bb[-1] = b[-1] - a[0] * c[-1] / gamma
    u_vec = np.zeros(n)
    u_vec[0] = gamma
    u_vec[-1] = c[-1]
    x = thomas(bb, d)
    z = thomas(bb, u_vec)
    factor = (x[0] + a[0] * x[-1] / gamma) / (1.0 + z[0] + a[0] * z[-1] / gamma)
    return x - factor * z


def gaussian_initial_state(params, points, rng=None):
    """Steady state plus a 50 percent Gaussian bump in angle.

    The bump is centered at ``params.theta0`` or at an angle drawn
    uniformly from the given generator.  Angles are the normalized arc
    positions scaled to one turn; offsets wrap to (-pi, pi].
    """
    s, length = arc_positions(points)
    u0, v0 = steady_state(params)
    theta0 = params.theta0
    if theta0 is None:
        if rng is None:
            raise ConfigurationError("theta0 unset: provide a seeded generator")
        theta0 = float(rng.uniform(0.0, 2.0 * np.pi))
    theta = 2.0 * np.pi * s / length
    offset = theta - theta0
    offset = np.mod(offset + np.pi, 2.0 * np.pi) - np.pi
    bump = np.exp(-(offset**2) / (2.0 * params.sigma**2))
    return (
        FieldState(
            u=u0 * (1.0 + 0.5 * bump),
            v=v0 * (1.0 + 0.5 * bump),
            node_arc_positions=s,
            length=length,
        ),
        float(theta0),
    )


def with_mesh(state, points):
    """Same field values re-attached to a fresh arc mesh."""
    s, length = arc_positions(points)
    if s.size != state.u.size:
        raise ConfigurationError("mesh size does not match field size")
    return FieldState(u=state.u, v=state.v, node_arc_positions=s, length=length)


def imex_step(state, kappa_signed, normal_speed, params, dt):
    """One implicit-diffusion, explicit-reaction step with dilution."""
    s = state.node_arc_positions
    n = s.size
    kappa_signed = np.broadcast_to(np.asarray(kappa_signed, dtype=float), (n,))
    normal_speed = np.broadcast_to(np.asarray(normal_speed, dtype=float), (n,))
    dilution = kappa_signed * normal_speed
    g_u, g_v = reaction_terms(state.u, state.v, params)
    h_minus, h_plus = _mesh_widths(s, state.length)
    lower_w = 2.0 / (h_minus * (h_minus + h_plus))
    upper_w = 2.0 / (h_plus * (h_minus + h_plus))
    center_w = 2.0 / (h_minus * h_plus)
    new = {}
    for name, w, diff, g in (
        ("u", state.u, params.diff_u, g_u),
        ("v", state.v, params.diff_v, g_v),
    ):
        rhs = w + dt * (g - w * dilution)
        if diff == 0.0:
            new[name] = rhs
            continue
        sol = cyclic_tridiagonal_solve(
            -dt * diff * lower_w,
            1.0 + dt * diff * center_w,
            -dt * diff * upper_w,
            rhs,
        )
        if not np.all(np.isfinite(sol)):
            raise TimeStepError(f"implicit solve for {name} produced non-finite values")
        new[name] = sol
    return FieldState(
        u=new["u"], v=new["v"], node_arc_positions=s, length=state.length
    )


def transfer_fields(old_points, state, new_points):
    """Re-sample fields onto new nodes by arc-length interpolation.

    New nodes are projected onto the old polygon to get their arc
    coordinate, then values are interpolated periodically.
    """
    old = np.asarray(old_points, dtype=float)
    new = np.asarray(new_points, dtype=float)
    s_old, length = arc_positions(old)
    seg_start = old
    seg_vec = np.roll(old, -1, axis=0) - old
    seg_len2 = np.einsum("id,id->i", seg_vec, seg_vec)
    rel = new[:, None, :] - seg_start[None, :, :]
    t = np.einsum("nid,id->ni", rel, seg_vec) / seg_len2[None, :]
    t = np.clip(t, 0.0, 1.0)
    foot = seg_start[None, :, :] + t[:, :, None] * seg_vec[None, :, :]
    dist2 = np.einsum("nid,nid->ni", new[:, None, :] - foot, new[:, None, :] - foot)
    best = np.argmin(dist2, axis=1)
    rows = np.arange(new.shape[0])
    s_new = s_old[best] + t[rows, best] * np.sqrt(seg_len2[best])
    u_new = _periodic_interp(s_new, s_old, state.u, length)
    v_new = _periodic_interp(s_new, s_old, state.v, length)
    s_out, length_out = arc_positions(new)
    return FieldState(u=u_new, v=v_new, node_arc_positions=s_out, length=length_out)


def _periodic_interp(s_query, s_nodes, values, length):
    s_ext = np.concatenate([s_nodes, [s_nodes[0] + length]])
    v_ext = np.concatenate([values, [values[0]]])
    return np.interp(np.mod(s_query, length), s_ext, v_ext)
