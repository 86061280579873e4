import numpy as np
import pytest

from splineflow import (
    BlowupError,
    ConfigurationError,
    EvolutionConfig,
    PointCloud,
    Stencil,
    VelocityField,
    circle_points,
    fit_cover,
    fit_stencil,
    interpolation_error,
    optimize_control_points,
    step_control_points,
    step_points,
    velocities,
    velocity_at,
)
from splineflow.evolve import effective_degree, run
from splineflow.geometry import annotate_geometry


def fitted_circle(n=60, radius=1.0, degree=7):
    cloud = circle_points(radius=radius, n=n)
    cfg = EvolutionConfig(core_size=5, boundary_size=4, degree=degree)
    cover, _ = fit_cover(cloud, cfg, eps_tol=None)
    return annotate_geometry(cloud, cover), cover, cfg


def test_velocity_kinds():
    kappa = np.array([1.0, -2.0])
    normals = np.array([[1.0, 0.0], [0.0, 1.0]])
    v = velocities(VelocityField(kind="curvature_flow"), kappa, normals)
    np.testing.assert_allclose(v, [[-1.0, 0.0], [0.0, 2.0]])
    v = velocities(
        VelocityField(kind="coupled_rd", c1=0.5, c2=2.0, sign=-1.0),
        kappa,
        normals,
        u_values=np.array([1.0, 0.25]),
    )
    np.testing.assert_allclose(v, [[-2.5, 0.0], [0.0, 0.5]])
    v = velocities(VelocityField(kind="constant", vector=(0.3, -0.1)), kappa, normals)
    np.testing.assert_allclose(v, [[0.3, -0.1], [0.3, -0.1]])


def test_velocity_validation():
    with pytest.raises(ConfigurationError):
        VelocityField(kind="warp")
    with pytest.raises(ConfigurationError):
        velocities(
            VelocityField(kind="coupled_rd"), np.ones(2), np.zeros((2, 2))
        )


def test_velocity_at_single_sample():
    from splineflow import geometry_at

    pts = np.column_stack([np.cos(np.linspace(0, 0.9, 9)), np.sin(np.linspace(0, 0.9, 9))])
    curve, params, _ = fit_stencil(pts, 5)
    sample = geometry_at(curve, params[4], orientation=1.0)
    v = velocity_at(VelocityField(kind="curvature_flow"), sample)
    np.testing.assert_allclose(v, -sample.signed_curvature * sample.normal)


def test_effective_degree_rules():
    assert effective_degree(9, None) == 7
    assert effective_degree(20, None) == 8  # capped
    assert effective_degree(9, 3) == 3
    assert effective_degree(5, 9) == 4  # clipped to size - 1
    assert effective_degree(3, None) == 1


def test_step_points_forward_euler():
    cloud = circle_points(n=10)
    vel = np.tile([0.0, 0.5], (10, 1))
    moved = step_points(cloud, vel, 0.1)
    np.testing.assert_allclose(moved.points, cloud.points + [0.0, 0.05])
    with pytest.raises(BlowupError):
        step_points(cloud, np.full((10, 2), np.inf), 0.1)


def test_config_validation():
    with pytest.raises(ConfigurationError):
        EvolutionConfig(dt=0.0)
    with pytest.raises(ConfigurationError):
        EvolutionConfig(t_end=-1.0)
    with pytest.raises(ConfigurationError):
        EvolutionConfig(alpha=0.0)
    with pytest.raises(ConfigurationError):
        EvolutionConfig(max_opt_iters=0)


def test_interpolation_error_definition():
    cloud, cover, _ = fitted_circle()
    st = cover[0]
    direct = np.linalg.norm(
        st.basis @ st.curve.control_points - cloud.points[st.indices], axis=1
    ).max()
    assert interpolation_error(st, cloud) == direct
    assert direct <= 1e-12


def test_optimizer_skips_converged_stencils():
    cloud, cover, _ = fitted_circle()
    st, sweeps = optimize_control_points(cover[0], cloud, tau=1e-9, alpha=0.5, max_iters=50)
    assert sweeps == 0
    assert st is cover[0]


def test_optimizer_reaches_direct_least_squares():
    rng = np.random.default_rng(9)
    x = np.linspace(0.0, 1.0, 9)
    y = 0.15 * np.sin(2.0 * np.pi * x + 0.7)
    curve, params, _ = fit_stencil(np.column_stack([x, y]), 2)
    B = curve.knots.basis_matrix(params)
    target = np.column_stack([x, y]) + 0.03 * rng.standard_normal((9, 2))
    st = Stencil(label=0, indices=np.arange(9), core_offset=0, core_size=9,
                 curve=curve, params=params, basis=B)
    best, *_ = np.linalg.lstsq(B, target, rcond=None)
    out, sweeps = optimize_control_points(
        st, PointCloud(target), tau=0.0, alpha=0.5, max_iters=300
    )
    assert sweeps == 300
    np.testing.assert_allclose(out.curve.control_points, best, atol=1e-9)


def test_warm_start_keeps_residual_small():
    # moving points and control points by the same velocity law leaves
    # the stencils nearly interpolating: no fresh solve is needed
    cloud, cover, cfg = fitted_circle(n=120)
    dt = 1e-3
    vel = velocities(cfg.velocity, cloud.kappa, cloud.normals)
    moved = step_points(cloud, vel, dt)
    worst = 0.0
    for st in cover:
        st = step_control_points(st, cfg.velocity, dt, cloud.orientation())
        worst = max(worst, interpolation_error(st, moved))
    assert worst <= 1e-5


def test_zero_velocity_run_is_static():
    cloud = circle_points(n=40)
    cfg = EvolutionConfig(
        dt=1e-2,
        t_end=0.5,
        velocity=VelocityField(kind="constant", vector=(0.0, 0.0)),
        resample=False,
    )
    result = run(cloud, cfg)
    assert len(result.frames) == 51
    drift = np.abs(result.frames[-1].points - result.frames[0].points).max()
    assert drift <= 1e-12
    assert all(fr.flags.get("opt_sweeps", 0) == 0 for fr in result.frames[1:])


def test_single_step_shrinks_circle_radius():
    cloud = circle_points(n=120, radius=1.0)
    cfg = EvolutionConfig(dt=1e-3, t_end=1e-3, resample=False)
    result = run(cloud, cfg)
    radii = np.linalg.norm(result.frames[-1].points, axis=1)
    np.testing.assert_allclose(radii.mean(), 1.0 - 1e-3, atol=1e-7)


def test_translation_invariance_of_curvature_flow():
    shift = np.array([5.0, -2.0])
    cfg = EvolutionConfig(dt=1e-3, t_end=0.01, resample=False)
    base = run(circle_points(n=60), cfg).frames[-1].points
    moved_cloud = PointCloud(circle_points(n=60).points + shift)
    shifted = run(moved_cloud, cfg).frames[-1].points
    np.testing.assert_allclose(shifted - shift, base, atol=1e-9)


def test_run_records_resample_flags():
    cloud = circle_points(n=80)
    cfg = EvolutionConfig(dt=1e-4, t_end=0.02, resample=True)
    result = run(cloud, cfg)
    assert result.resolved["resample_events"] == sum(
        1 for fr in result.frames if fr.flags.get("resampled")
    )
    assert "tau" in result.resolved and result.resolved["tau"] > 0


def test_run_stops_when_cloud_gets_too_small():
    # the viability floor is 4 x degree; a 20-point degree-7 cloud is
    # already below it, so the run stops after the first step
    cloud = circle_points(n=20)
    cfg = EvolutionConfig(dt=1e-4, t_end=0.01, degree=7, resample=False)
    result = run(cloud, cfg)
    assert result.stopped_early
    assert len(result.frames) == 2


def test_blowup_carries_frames():
    cloud = circle_points(n=40)
    cfg = EvolutionConfig(
        dt=1e-3,
        t_end=0.01,
        velocity=VelocityField(kind="constant", vector=(float("nan"), 0.0)),
        resample=False,
    )
    with pytest.raises(BlowupError) as excinfo:
        run(cloud, cfg)
    assert len(excinfo.value.frames) == 1
    assert excinfo.value.frames[0].step == 0


def test_collapsed_geometry_surfaces_as_blowup():
    # a velocity large enough that positions round to one shared point
    cloud = circle_points(n=40)
    cfg = EvolutionConfig(
        dt=1e-3,
        t_end=0.01,
        velocity=VelocityField(kind="constant", vector=(1e300, 1e300)),
        resample=False,
    )
    with pytest.raises(BlowupError) as excinfo:
        run(cloud, cfg)
    assert len(excinfo.value.frames) == 1
    assert excinfo.value.__cause__ is not None


def test_coupled_rd_requires_fields():
    cloud = circle_points(n=40)
    cfg = EvolutionConfig(velocity=VelocityField(kind="coupled_rd"))
    with pytest.raises(ConfigurationError):
        run(cloud, cfg)
