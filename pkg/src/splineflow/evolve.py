"""Lagrangian evolution of a closed point cloud with co-moving stencils.

Each step: velocities are read from the current annotations, points move
by forward Euler, and every stencil's control points move by the same
rule evaluated at the curve points of their Greville abscissae.  That
warm start keeps the fitted curves attached to the moved points; when
the interpolation error of a stencil exceeds tolerance its control
points are polished by sequential gradient sweeps instead of a fresh
solve.  Stencils are only re-partitioned and re-fitted after resampling
changes the cloud.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .cover import PointCloud, ensure_counterclockwise, partition
from .errors import (
    BlowupError,
    ConfigurationError,
    DegenerateInputError,
    FitError,
    OptimizationError,
    TimeStepError,
)
from .fit import fit_stencil
from .geometry import annotate_geometry
from .reaction_diffusion import imex_step, transfer_fields, with_mesh
from .resample import resample_pass

_ALPHA_FLOOR = 1e-8
_DEGREE_CAP = 8


@dataclass(frozen=True)
class VelocityField:
    """Pointwise velocity law.

    kinds: ``curvature_flow`` moves with -kappa_s * n (shrinking for
    convex regions), ``coupled_rd`` with sign*(c1*kappa_s + c2*u)*n, and
    ``constant`` with a fixed vector (mainly for tests).
    """

    kind: str = "curvature_flow"
    c1: float = 0.02
    c2: float = 1.0
    sign: float = -1.0
    vector: tuple = (0.0, 0.0)

    def __post_init__(self):
        if self.kind not in ("curvature_flow", "coupled_rd", "constant"):
            raise ConfigurationError(f"unknown velocity kind {self.kind!r}")


def velocities(field_def, kappa_signed, normals, u_values=None):
    """Velocity vectors for arrays of geometry samples."""
    kappa_signed = np.asarray(kappa_signed, dtype=float)
    normals = np.asarray(normals, dtype=float)
    if field_def.kind == "curvature_flow":
        return -kappa_signed[:, None] * normals
    if field_def.kind == "coupled_rd":
        if u_values is None:
            raise ConfigurationError("coupled_rd velocity needs activator values")
        u_values = np.asarray(u_values, dtype=float)
        speed = field_def.sign * (field_def.c1 * kappa_signed + field_def.c2 * u_values)
        return speed[:, None] * normals
    return np.broadcast_to(
        np.asarray(field_def.vector, dtype=float), normals.shape
    ).copy()


def velocity_at(field_def, sample, u_value=None):
    """Velocity vector for a single geometry sample."""
    u_arr = None if u_value is None else np.array([float(u_value)])
    return velocities(
        field_def, np.array([sample.signed_curvature]), sample.normal[None, :], u_arr
    )[0]


@dataclass
class EvolutionConfig:
    """Run parameters; None tolerances are derived from the initial cloud.

    tau: interpolation-error tolerance, defaults to 1e-6 x diameter.
    eps_tol: control-polygon deviation tolerance, defaults to 1e-2 x
        mean spacing.
    d_tol_min/max: resampling gap thresholds, defaults 0.9 x and 2 x
        the initial mean spacing.
    eps_d: redistribution tolerance, defaults to 0.25 x target spacing.
    degree: per-stencil fit degree; None picks stencil size - 2, capped
        at 8.
    """

    dt: float = 1e-3
    t_end: float = 0.1
    core_size: int = 5
    boundary_size: int = 4
    degree: int | None = None
    tau: float | None = None
    eps_tol: float | None = None
    alpha: float = 0.5
    max_opt_iters: int = 50
    max_refinement: int = 32
    velocity: VelocityField = field(default_factory=VelocityField)
    resample: bool = True
    d_tol_min: float | None = None
    d_tol_max: float | None = None
    eps_d: float | None = None
    pde: object = None

    def __post_init__(self):
        if self.dt <= 0:
            raise ConfigurationError("dt must be positive")
        if self.t_end < 0:
            raise ConfigurationError("t_end must be nonnegative")
        if self.alpha <= 0:
            raise ConfigurationError("alpha must be positive")
        if self.max_opt_iters < 1:
            raise ConfigurationError("max_opt_iters must be at least 1")


@dataclass(frozen=True, eq=False)
class FrameRecord:
    """Immutable snapshot of one recorded step."""

    step: int
    time: float
    points: np.ndarray
    kappa: np.ndarray
    normals: np.ndarray
    u: np.ndarray | None = None
    v: np.ndarray | None = None
    flags: dict = field(default_factory=dict)


@dataclass
class RunResult:
    frames: list
    stopped_early: bool
    resolved: dict


def effective_degree(stencil_size, requested):
    if requested is not None:
        p = min(int(requested), stencil_size - 1)
    else:
        p = min(stencil_size - 2, _DEGREE_CAP)
    return max(p, 1)


def fit_cover(cloud, cfg, eps_tol):
    """Partition the cloud and fit+refine every stencil."""
    cover = partition(cloud, cfg.core_size, cfg.boundary_size)
    fitted = []
    insertions = 0
    for st in cover:
        pts = cloud.points[st.indices]
        p = effective_degree(st.size, cfg.degree)
        curve, params, report = fit_stencil(
            pts, p, eps_tol=eps_tol, max_insertions=cfg.max_refinement
        )
        insertions += report.refinement_steps
        basis = curve.knots.basis_matrix(params)
        fitted.append(replace(st, curve=curve, params=params, basis=basis))
    return cover.replace_stencils(fitted), insertions


def step_points(cloud, vel, dt):
    """Forward Euler update of the sample points."""
    vel = np.asarray(vel, dtype=float)
    if not np.all(np.isfinite(vel)):
        raise BlowupError("non-finite velocity")
    return PointCloud(cloud.points + dt * vel)


def step_control_points(stencil, field_def, dt, orientation, stencil_u=None):
    """Move control points by the velocity at their Greville curve points."""
    curve = stencil.curve
    g = curve.greville()
    d1c = curve.derivative()
    d1 = d1c.evaluate(g)
    d2 = d1c.derivative().evaluate(g)
    speed = np.linalg.norm(d1, axis=1)
    normals = orientation * np.column_stack([d1[:, 1], -d1[:, 0]]) / speed[:, None]
    kappa_signed = (
        orientation * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]) / speed**3
    )
    u_at_g = None
    if field_def.kind == "coupled_rd":
        if stencil_u is None:
            raise ConfigurationError("coupled_rd velocity needs activator values")
        u_at_g = np.interp(g, stencil.params, stencil_u)
    vel = velocities(field_def, kappa_signed, normals, u_at_g)
    if not np.all(np.isfinite(vel)):
        raise BlowupError("non-finite control-point velocity")
    moved = replace(curve, control_points=curve.control_points + dt * vel)
    return replace(stencil, curve=moved)


def interpolation_error(stencil, cloud):
    """Largest distance between stencil points and their curve images."""
    pts = cloud.points[stencil.indices]
    approx = stencil.basis @ stencil.curve.control_points
    return float(np.linalg.norm(approx - pts, axis=1).max())


def optimize_control_points(stencil, cloud, tau, alpha, max_iters):
    """Gauss-Seidel sweeps of the squared interpolation residual.

    Each sweep updates control points one at a time against the current
    residual, stepping along the gradient scaled by the coordinate's
    basis-column norm (at alpha = 0.5 each update is the exact
    coordinate minimizer).  Three consecutive objective increases halve
    the step; an underflowing step raises OptimizationError.  Returns
    the updated stencil and the number of sweeps used.
    """
    pts = cloud.points[stencil.indices]
    B = stencil.basis
    col_sq = np.einsum("ij,ij->j", B, B)
    scale = np.where(col_sq > 0.0, 1.0 / np.maximum(col_sq, 1e-300), 0.0)
    P = stencil.curve.control_points.copy()
    r = pts - B @ P
    err = np.linalg.norm(r, axis=1).max()
    if err <= tau:
        return stencil, 0
    a = float(alpha)
    objective = float(np.sum(r * r))
    worse = 0
    sweeps = 0
    for sweeps in range(1, max_iters + 1):
        for j in range(P.shape[0]):
            bj = B[:, j]
            grad = -2.0 * (bj @ r)
            delta = -a * scale[j] * grad
            P[j] += delta
            r -= np.outer(bj, delta)
        err = np.linalg.norm(r, axis=1).max()
        if err <= tau:
            break
        new_objective = float(np.sum(r * r))
        if new_objective > objective:
            worse += 1
            if worse >= 3:
                a *= 0.5
                worse = 0
                if a < _ALPHA_FLOOR:
                    raise OptimizationError(
                        f"step size underflowed at residual {err:.3e}"
                    )
        else:
            worse = 0
        objective = new_objective
    moved = replace(stencil.curve, control_points=P)
    return replace(stencil, curve=moved), sweeps


def _resolve(cloud, cfg):
    """Concrete tolerance values derived from the initial cloud."""
    diameter = cloud.diameter()
    spacing = float(cloud.spacings().mean())
    return {
        "tau": cfg.tau if cfg.tau is not None else 1e-6 * diameter,
        "eps_tol": cfg.eps_tol if cfg.eps_tol is not None else 1e-2 * spacing,
        "d_tol_min": cfg.d_tol_min if cfg.d_tol_min is not None else 0.9 * spacing,
        "d_tol_max": cfg.d_tol_max if cfg.d_tol_max is not None else 2.0 * spacing,
        "initial_diameter": diameter,
        "initial_spacing": spacing,
        "initial_count": len(cloud),
    }


def _min_viable(cfg, cover):
    degrees = [effective_degree(st.size, cfg.degree) for st in cover]
    return 4 * max(degrees)


def _make_frame(step, t, cloud, fields, flags):
    return FrameRecord(
        step=step,
        time=t,
        points=cloud.points.copy(),
        kappa=None if cloud.kappa is None else cloud.kappa.copy(),
        normals=None if cloud.normals is None else cloud.normals.copy(),
        u=None if fields is None else fields.u.copy(),
        v=None if fields is None else fields.v.copy(),
        flags=dict(flags),
    )


def run(cloud, cfg, fields=None):
    """Evolve a cloud until t_end or the cloud becomes too small.

    Returns a RunResult whose frames include the initial state.  Raises
    BlowupError (carrying the frames so far) if velocities or fields
    stop being finite.
    """
    if cfg.velocity.kind == "coupled_rd" and fields is None:
        raise ConfigurationError("coupled_rd velocity requires field state")
    cloud = ensure_counterclockwise(cloud)
    resolved = _resolve(cloud, cfg)
    tau = resolved["tau"]
    cover, _ = fit_cover(cloud, cfg, resolved["eps_tol"])
    cloud = annotate_geometry(cloud, cover)
    if fields is not None:
        fields = with_mesh(fields, cloud.points)
    frames = [_make_frame(0, 0.0, cloud, fields, {})]
    n_steps = int(math.floor(cfg.t_end / cfg.dt + 1e-9))
    stopped_early = False
    resample_events = 0
    try:
        for step in range(1, n_steps + 1):
            flags = {
                "resampled": False,
                "removed": 0,
                "inserted": 0,
                "opt_sweeps": 0,
                "refine_insertions": 0,
            }
            orientation = cloud.orientation()
            u_vals = fields.u if fields is not None else None
            vel = velocities(cfg.velocity, cloud.kappa, cloud.normals, u_vals)
            if not np.all(np.isfinite(vel)):
                raise BlowupError("non-finite velocity")
            normal_speed = np.einsum("nd,nd->n", vel, cloud.normals)
            kappa_old = cloud.kappa
            moved = step_points(cloud, vel, cfg.dt)
            new_stencils = []
            for st in cover:
                stencil_u = None
                if cfg.velocity.kind == "coupled_rd":
                    stencil_u = fields.u[st.indices]
                new_stencils.append(
                    step_control_points(
                        st, cfg.velocity, cfg.dt, orientation, stencil_u
                    )
                )
            cover = cover.replace_stencils(new_stencils)
            cloud = moved
            polished = []
            for st in cover:
                if interpolation_error(st, cloud) > tau:
                    st, sweeps = optimize_control_points(
                        st, cloud, tau, cfg.alpha, cfg.max_opt_iters
                    )
                    flags["opt_sweeps"] = max(flags["opt_sweeps"], sweeps)
                polished.append(st)
            cover = cover.replace_stencils(polished)
            if fields is not None:
                fields = with_mesh(fields, cloud.points)
                fields = imex_step(fields, kappa_old, normal_speed, cfg.pde, cfg.dt)
                if not (
                    np.all(np.isfinite(fields.u)) and np.all(np.isfinite(fields.v))
                ):
                    raise BlowupError("non-finite field values")
            if cfg.resample:
                gaps = cloud.spacings()
                floor = _min_viable(cfg, cover)
                if gaps.min() < resolved["d_tol_min"] or gaps.max() > resolved["d_tol_max"]:
                    d_target = gaps.sum() / gaps.size
                    eps_d = cfg.eps_d if cfg.eps_d is not None else 0.25 * d_target
                    result = resample_pass(
                        cover,
                        cloud,
                        resolved["d_tol_min"],
                        resolved["d_tol_max"],
                        eps_d,
                        min_points=floor,
                    )
                    old_points = cloud.points
                    cloud = result.cloud
                    flags["resampled"] = True
                    flags["removed"] = result.removed
                    flags["inserted"] = result.inserted
                    resample_events += 1
                    if fields is not None:
                        fields = transfer_fields(old_points, fields, cloud.points)
                    cover, ins = fit_cover(cloud, cfg, resolved["eps_tol"])
                    flags["refine_insertions"] = ins
            cloud = annotate_geometry(cloud, cover)
            frames.append(_make_frame(step, step * cfg.dt, cloud, fields, flags))
            if len(cloud) < _min_viable(cfg, cover):
                stopped_early = True
                break
    except BlowupError as exc:
        exc.frames = frames
        raise
    except (DegenerateInputError, FitError, OptimizationError,
            TimeStepError) as exc:
        # collapsed geometry or a failed fit mid-run is a numerical death,
        # not a caller bug; surface it on the blowup path with history
        raise BlowupError(str(exc), frames=frames) from exc
    resolved["resample_events"] = resample_events
    return RunResult(frames=frames, stopped_early=stopped_early, resolved=resolved)
