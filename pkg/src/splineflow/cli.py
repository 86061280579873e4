"""Command-line entry point.

Subcommands:
  simulate <config>     evolve a cloud, writing frame CSVs, a summary,
                        and report figures into --out
  converge <config>     shrinking-circle convergence table (resampling
                        disabled) with a log-log figure
  param-study <config>  static-circle normal/curvature error grid

Exit codes: 0 on success, 2 for configuration problems (with a line
diagnostic when the file is at fault), 3 when the evolution blew up
(the frames up to the last good step are still written).
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .config import ConfigError, load_scenario
from .errors import BlowupError, ConfigurationError
from .output import write_frame_csv, write_rows_csv, write_summary
from .reaction_diffusion import gaussian_initial_state
from .evolve import run
from .studies import converge_study, parameter_study


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="splineflow",
        description="Evolve closed planar curves with adaptive B-spline stencils.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("simulate", "run one evolution scenario"),
        ("converge", "shrinking-circle convergence study"),
        ("param-study", "stencil size and degree error grid"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("config", help="path to a key=value scenario file")
        cmd.add_argument("--out", default="output", help="output directory")
        cmd.add_argument("--seed", type=int, default=None, help="override the seed")
        cmd.add_argument(
            "--export-every",
            type=int,
            default=None,
            metavar="K",
            help="write every K-th frame (simulate only)",
        )
        cmd.add_argument(
            "--no-figures", action="store_true", help="skip figure rendering"
        )
    return parser


def _mean_radius(points):
    center = points.mean(axis=0)
    return float(np.linalg.norm(points - center, axis=1).mean())


def _spacings(points):
    return np.linalg.norm(np.roll(points, -1, axis=0) - points, axis=1)


def _write_run_outputs(out_dir, frames, every, summary, figures, fields_present):
    written = 0
    for frame in frames:
        if frame.step % every == 0 or frame is frames[-1]:
            write_frame_csv(out_dir, frame)
            written += 1
    final = frames[-1]
    summary.update(
        {
            "final_step": final.step,
            "final_time": float(final.time),
            "final_count": int(final.points.shape[0]),
            "final_mean_radius": _mean_radius(final.points),
            "final_min_spacing": float(_spacings(final.points).min()),
            "final_max_spacing": float(_spacings(final.points).max()),
            "frames_written": written,
        }
    )
    write_summary(os.path.join(out_dir, "summary.txt"), summary)
    if figures:
        from . import plots

        plots.plot_evolution(frames, out_dir)
        plots.plot_series(frames, out_dir)
        if fields_present:
            plots.plot_fields(final, out_dir)


def _cmd_simulate(args):
    scenario = load_scenario(args.config)
    seed = scenario.seed if args.seed is None else args.seed
    every = scenario.export_every if args.export_every is None else args.export_every
    if every < 1:
        raise ConfigError("export interval must be at least 1")
    figures = scenario.figures and not args.no_figures
    os.makedirs(args.out, exist_ok=True)
    cloud = scenario.initial_cloud()
    rng = np.random.default_rng(seed)
    fields = None
    theta0 = None
    if scenario.pde_enabled:
        fields, theta0 = gaussian_initial_state(scenario.pde, cloud.points, rng)
    summary = {
        "command": "simulate",
        "status": "ok",
        "shape": scenario.shape,
        "seed": seed,
        "initial_count": len(cloud),
        "resampling": "enabled" if scenario.evolve.resample else "disabled",
    }
    if theta0 is not None:
        summary["theta0"] = float(theta0)
    try:
        result = run(cloud, scenario.evolve, fields)
    except BlowupError as exc:
        summary["status"] = "blowup"
        summary["last_good_step"] = exc.frames[-1].step if exc.frames else -1
        if exc.frames:
            _write_run_outputs(
                args.out, exc.frames, every, summary, figures, fields is not None
            )
        print(
            f"numerical blowup after step {summary['last_good_step']}; "
            f"partial output in {args.out}",
            file=sys.stderr,
        )
        return 3
    if result.stopped_early:
        summary["status"] = "stopped_early"
    for key in ("tau", "eps_tol", "d_tol_min", "d_tol_max"):
        summary[key] = float(result.resolved[key])
    summary["resample_events"] = int(result.resolved["resample_events"])
    _write_run_outputs(
        args.out, result.frames, every, summary, figures, fields is not None
    )
    return 0


def _cmd_converge(args):
    scenario = load_scenario(args.config)
    seed = scenario.seed if args.seed is None else args.seed
    os.makedirs(args.out, exist_ok=True)
    rows = converge_study(
        n_list=scenario.converge_n_list,
        radius=scenario.radius,
        dt=scenario.converge_dt,
        t_end=scenario.converge_t_end,
        core_size=scenario.evolve.core_size,
        boundary_size=scenario.evolve.boundary_size,
        degree=scenario.converge_degree,
    )
    write_rows_csv(
        os.path.join(args.out, "convergence.csv"),
        ["n", "spacing", "l2_error"],
        [(row["n"], row["spacing"], row["l2_error"]) for row in rows],
    )
    write_summary(
        os.path.join(args.out, "summary.txt"),
        {
            "command": "converge",
            "status": "ok",
            "seed": seed,
            "resampling": "disabled",
            "note": "convergence runs always disable resampling",
            "t_end": scenario.converge_t_end,
            "dt": scenario.converge_dt,
            "n_list": ",".join(str(row["n"]) for row in rows),
        },
    )
    if scenario.figures and not args.no_figures:
        from . import plots

        plots.plot_convergence(rows, args.out)
    return 0


def _cmd_param_study(args):
    scenario = load_scenario(args.config)
    seed = scenario.seed if args.seed is None else args.seed
    os.makedirs(args.out, exist_ok=True)
    rows = parameter_study(
        n=scenario.n,
        radius=scenario.radius,
        stencil_sizes=scenario.study_sizes,
        degrees=scenario.study_degrees,
    )
    write_rows_csv(
        os.path.join(args.out, "parameter_study.csv"),
        ["stencil_size", "degree", "normal_error", "curvature_error"],
        [
            (row["stencil_size"], row["degree"], row["normal_error"], row["curvature_error"])
            for row in rows
        ],
    )
    write_summary(
        os.path.join(args.out, "summary.txt"),
        {
            "command": "param-study",
            "status": "ok",
            "seed": seed,
            "n": scenario.n,
            "stencil_sizes": ",".join(str(m) for m in scenario.study_sizes),
        },
    )
    if scenario.figures and not args.no_figures:
        from . import plots

        plots.plot_parameter_study(rows, args.out)
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "converge": _cmd_converge,
    "param-study": _cmd_param_study,
}


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except ConfigurationError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"cannot read {exc.filename}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
