"""Figure rendering for the report path.

Every function writes a PNG next to the delimited output and returns
the path.  The Agg backend keeps this usable headless.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _close(fig, path):
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def plot_evolution(frames, directory, name="evolution.png", max_snapshots=8):
    """Overlay of curve snapshots colored by time."""
    path = os.path.join(directory, name)
    picks = np.unique(np.linspace(0, len(frames) - 1, max_snapshots).astype(int))
    cmap = plt.get_cmap("viridis")
    fig, ax = plt.subplots(figsize=(6, 6))
    t_end = max(frames[-1].time, 1e-300)
    for k in picks:
        fr = frames[k]
        pts = np.vstack([fr.points, fr.points[:1]])
        ax.plot(pts[:, 0], pts[:, 1], "-", lw=1.2, color=cmap(fr.time / t_end))
    sm = plt.cm.ScalarMappable(cmap=cmap, norm=plt.Normalize(0.0, frames[-1].time))
    fig.colorbar(sm, ax=ax, label="time")
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title("curve evolution")
    return _close(fig, path)


def plot_series(frames, directory, name="series.png"):
    """Point count and mean center distance against time."""
    path = os.path.join(directory, name)
    times = [fr.time for fr in frames]
    counts = [fr.points.shape[0] for fr in frames]
    radii = []
    for fr in frames:
        center = fr.points.mean(axis=0)
        radii.append(float(np.linalg.norm(fr.points - center, axis=1).mean()))
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.5))
    axes[0].plot(times, counts, drawstyle="steps-post")
    axes[0].set_xlabel("time")
    axes[0].set_ylabel("point count")
    axes[1].plot(times, radii)
    axes[1].set_xlabel("time")
    axes[1].set_ylabel("mean radius")
    fig.tight_layout()
    return _close(fig, path)


def plot_fields(frame, directory, name="fields.png"):
    """Final curve colored by the activator field."""
    path = os.path.join(directory, name)
    fig, ax = plt.subplots(figsize=(6, 6))
    sc = ax.scatter(
        frame.points[:, 0], frame.points[:, 1], c=frame.u, s=12, cmap="plasma"
    )
    fig.colorbar(sc, ax=ax, label="activator")
    ax.set_aspect("equal")
    ax.set_title(f"fields at t = {frame.time:g}")
    return _close(fig, path)


def plot_convergence(rows, directory, name="convergence.png"):
    """Log-log radius error against point count with a first-order guide."""
    path = os.path.join(directory, name)
    n = np.array([row["n"] for row in rows], dtype=float)
    err = np.array([row["l2_error"] for row in rows])
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.loglog(n, err, "o-", label="measured")
    ax.loglog(n, err[0] * n[0] / n, "k--", lw=0.8, label="first order")
    ax.set_xlabel("N")
    ax.set_ylabel("RMS radius error")
    ax.legend()
    fig.tight_layout()
    return _close(fig, path)


def plot_parameter_study(rows, directory, name="parameter_study.png"):
    """Curvature error against degree, one line per stencil size."""
    path = os.path.join(directory, name)
    fig, ax = plt.subplots(figsize=(5.5, 4))
    sizes = sorted({row["stencil_size"] for row in rows})
    for m in sizes:
        sub = [row for row in rows if row["stencil_size"] == m]
        ax.semilogy(
            [row["degree"] for row in sub],
            [row["curvature_error"] for row in sub],
            "o-",
            label=f"m = {m}",
        )
    ax.set_xlabel("degree")
    ax.set_ylabel("max curvature error")
    ax.legend()
    fig.tight_layout()
    return _close(fig, path)
