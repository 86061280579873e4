"""Delimited frame files and run summaries.

Floats are written with repr-level precision so files round-trip
exactly: re-reading a frame and recomputing a statistic reproduces the
in-memory value bit for bit.
"""

from __future__ import annotations

import os

import numpy as np

FRAME_HEADER = "step,time,index,x,y,kappa,nx,ny,u,v"


def _fmt(x):
    return format(float(x), ".17g")


def frame_filename(step):
    return f"frame_{step:06d}.csv"


def write_frame_csv(directory, frame):
    """One CSV per frame with the canonical column layout."""
    path = os.path.join(directory, frame_filename(frame.step))
    n = frame.points.shape[0]
    with open(path, "w") as fh:
        fh.write(FRAME_HEADER + "\n")
        for i in range(n):
            u = "" if frame.u is None else _fmt(frame.u[i])
            v = "" if frame.v is None else _fmt(frame.v[i])
            fh.write(
                ",".join(
                    [
                        str(frame.step),
                        _fmt(frame.time),
                        str(i),
                        _fmt(frame.points[i, 0]),
                        _fmt(frame.points[i, 1]),
                        _fmt(frame.kappa[i]),
                        _fmt(frame.normals[i, 0]),
                        _fmt(frame.normals[i, 1]),
                        u,
                        v,
                    ]
                )
                + "\n"
            )
    return path


def read_frame_csv(path):
    """Columns of a frame file as a dict of arrays (u, v None when empty)."""
    with open(path) as fh:
        header = fh.readline().strip()
        if header != FRAME_HEADER:
            raise ValueError(f"{path}: unexpected header {header!r}")
        cols = [[] for _ in range(10)]
        for line in fh:
            parts = line.rstrip("\n").split(",")
            for store, part in zip(cols, parts):
                store.append(part)
    step = np.asarray(cols[0], dtype=int)
    out = {
        "step": step,
        "time": np.asarray(cols[1], dtype=float),
        "index": np.asarray(cols[2], dtype=int),
        "points": np.column_stack(
            [np.asarray(cols[3], dtype=float), np.asarray(cols[4], dtype=float)]
        ),
        "kappa": np.asarray(cols[5], dtype=float),
        "normals": np.column_stack(
            [np.asarray(cols[6], dtype=float), np.asarray(cols[7], dtype=float)]
        ),
    }
    for name, col in (("u", cols[8]), ("v", cols[9])):
        out[name] = None if not col or col[0] == "" else np.asarray(col, dtype=float)
    return out


def write_summary(path, stats):
    """Plain key: value lines, floats at full precision."""
    with open(path, "w") as fh:
        for key, value in stats.items():
            if isinstance(value, float):
                value = _fmt(value)
            fh.write(f"{key}: {value}\n")
    return path


def read_summary(path):
    out = {}
    with open(path) as fh:
        for line in fh:
            if not line.strip():
                continue
            key, _, value = line.partition(":")
            out[key.strip()] = value.strip()
    return out


def write_rows_csv(path, header, rows):
    """Small generic CSV writer for study tables."""
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(
                ",".join(_fmt(x) if isinstance(x, float) else str(x) for x in row) + "\n"
            )
    return path
