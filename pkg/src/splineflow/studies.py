"""Benchmark harnesses: radius convergence and stencil parameter study.

The convergence study shrinks a circle by curvature flow with
resampling disabled and reports the RMS radius error against the exact
solution r(t) = sqrt(r0^2 - 2t).  The parameter study fits a static
circle and compares estimated normals and curvature with the analytic
values over a grid of stencil sizes and degrees.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigurationError
from .evolve import EvolutionConfig, VelocityField, fit_cover, run
from .geometry import annotate_geometry
from .shapes import circle_points


def exact_shrinking_radius(r0, t):
    """Radius of a circle under curvature flow (unit speed coefficient)."""
    value = r0 * r0 - 2.0 * t
    if value <= 0:
        raise ConfigurationError(f"circle vanishes before t={t}")
    return float(np.sqrt(value))


def converge_study(
    n_list=(30, 60, 120, 240),
    radius=1.0,
    dt=1e-3,
    t_end=0.18,
    core_size=5,
    boundary_size=4,
    degree=None,
):
    """Rows of (n, spacing, rms_radius_error) for the shrinking circle."""
    rows = []
    r_exact = exact_shrinking_radius(radius, t_end)
    for n in n_list:
        cloud = circle_points(radius, n)
        cfg = EvolutionConfig(
            dt=dt,
            t_end=t_end,
            core_size=core_size,
            boundary_size=boundary_size,
            degree=degree,
            velocity=VelocityField(kind="curvature_flow"),
            resample=False,
        )
        result = run(cloud, cfg)
        pts = result.frames[-1].points
        radii = np.linalg.norm(pts, axis=1)
        err = float(np.sqrt(np.mean((radii - r_exact) ** 2)))
        rows.append({"n": int(n), "spacing": 2.0 * np.pi * radius / n, "l2_error": err})
    return rows


def _study_cover(n, stencil_size, boundary_size=4):
    """Partition sized so stencils hit the requested total size."""
    core = stencil_size - boundary_size
    if core < 1:
        boundary_size = 0
        core = stencil_size
    return core, boundary_size


def parameter_study(n=40, radius=1.0, stencil_sizes=(5, 9, 20), degrees=range(2, 9)):
    """Max normal and curvature errors on a static circle per (m, p).

    Degrees above a stencil's point count minus one are skipped.  The
    comparison uses the analytic outward normal and curvature 1/r at
    every cloud point.
    """
    cloud = circle_points(radius, n)
    exact_normals = cloud.points / radius
    rows = []
    for m in stencil_sizes:
        core, boundary = _study_cover(n, m)
        for p in degrees:
            if p > m - 1 or p < 2:
                continue
            cfg = EvolutionConfig(
                core_size=core, boundary_size=boundary, degree=int(p)
            )
            cover, _ = fit_cover(cloud, cfg, eps_tol=None)
            annotated = annotate_geometry(cloud, cover)
            normal_err = float(
                np.linalg.norm(annotated.normals - exact_normals, axis=1).max()
            )
            kappa_err = float(np.abs(annotated.kappa - 1.0 / radius).max())
            rows.append(
                {
                    "stencil_size": int(m),
                    "degree": int(p),
                    "normal_error": normal_err,
                    "curvature_error": kappa_err,
                }
            )
    return rows
