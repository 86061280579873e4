import numpy as np
import pytest

from splineflow.evolve import FrameRecord
from splineflow.output import (
    FRAME_HEADER,
    frame_filename,
    read_frame_csv,
    read_summary,
    write_frame_csv,
    write_rows_csv,
    write_summary,
)


def sample_frame(with_fields=False):
    rng = np.random.default_rng(11)
    n = 12
    points = rng.normal(size=(n, 2))
    kappa = rng.normal(size=n)
    normals = rng.normal(size=(n, 2))
    u = rng.random(n) if with_fields else None
    v = rng.random(n) if with_fields else None
    return FrameRecord(step=42, time=0.042, points=points, kappa=kappa,
                       normals=normals, u=u, v=v)


def test_frame_filename_padding():
    assert frame_filename(0) == "frame_000000.csv"
    assert frame_filename(12345) == "frame_012345.csv"


def test_frame_roundtrip_exact(tmp_path):
    frame = sample_frame(with_fields=True)
    path = write_frame_csv(str(tmp_path), frame)
    back = read_frame_csv(path)
    assert np.all(back["step"] == 42)
    assert np.all(back["time"] == 0.042)
    assert np.array_equal(back["index"], np.arange(len(frame.points)))
    # .17g formatting is lossless for float64
    assert np.array_equal(back["points"], frame.points)
    assert np.array_equal(back["kappa"], frame.kappa)
    assert np.array_equal(back["normals"], frame.normals)
    assert np.array_equal(back["u"], frame.u)
    assert np.array_equal(back["v"], frame.v)


def test_frame_without_fields_leaves_u_empty(tmp_path):
    frame = sample_frame(with_fields=False)
    path = write_frame_csv(str(tmp_path), frame)
    text = open(path).read().splitlines()
    assert text[0] == FRAME_HEADER
    assert text[1].endswith(",,")
    back = read_frame_csv(path)
    assert back["u"] is None and back["v"] is None


def test_frame_header_validated(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("x,y\n1,2\n")
    with pytest.raises(ValueError):
        read_frame_csv(str(path))


def test_summary_roundtrip(tmp_path):
    stats = {"command": "simulate", "final_step": 100, "final_mean_radius": 0.8}
    path = tmp_path / "summary.txt"
    write_summary(str(path), stats)
    text = path.read_text()
    assert "final_step: 100" in text
    back = read_summary(str(path))
    assert back["command"] == "simulate"
    assert back["final_step"] == "100"


def test_write_rows_csv(tmp_path):
    path = tmp_path / "rows.csv"
    write_rows_csv(str(path), ["a", "b"], [[1, 2.5], [3, 0.125]])
    lines = path.read_text().splitlines()
    assert lines[0] == "a,b"
    assert lines[1] == "1,2.5"
    assert lines[2] == "3,0.125"
