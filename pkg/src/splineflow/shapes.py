"""Initial point clouds for the built-in scenarios."""

from __future__ import annotations

import csv

import numpy as np

from .cover import PointCloud
from .errors import ConfigurationError


def circle_points(radius=1.0, n=200):
    """n points counterclockwise on a circle around the origin."""
    if radius <= 0:
        raise ConfigurationError("radius must be positive")
    if n < 4:
        raise ConfigurationError("need at least 4 points")
    phi = 2.0 * np.pi * np.arange(n) / n
    return PointCloud(radius * np.column_stack([np.cos(phi), np.sin(phi)]))


def asterisk_points(n=300, base=1.0, amplitude=0.3, lobes=4):
    """Eight-lobed star r(phi) = base + amplitude * cos(lobes * phi)^2."""
    if n < 4:
        raise ConfigurationError("need at least 4 points")
    phi = 2.0 * np.pi * np.arange(n) / n
    r = base + amplitude * np.cos(lobes * phi) ** 2
    return PointCloud(np.column_stack([r * np.cos(phi), r * np.sin(phi)]))


def load_points(path):
    """Point cloud from a CSV of x,y rows; a non-numeric first row is a header."""
    rows = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or not "".join(row).strip():
                continue
            try:
                rows.append((float(row[0]), float(row[1])))
            except (ValueError, IndexError):
                if lineno == 1:
                    continue
                raise ConfigurationError(
                    f"{path}:{lineno}: expected two numeric columns"
                ) from None
    if len(rows) < 4:
        raise ConfigurationError(f"{path}: need at least 4 points")
    return PointCloud(np.asarray(rows))
