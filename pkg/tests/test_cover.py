import numpy as np
import pytest

from splineflow import (
    ConfigurationError,
    DegenerateInputError,
    PointCloud,
    circle_points,
    ensure_counterclockwise,
    partition,
)


def test_point_cloud_validation():
    with pytest.raises(ConfigurationError):
        PointCloud(np.zeros((3, 2)))
    with pytest.raises(ConfigurationError):
        PointCloud(np.zeros((5, 3)))
    with pytest.raises(ConfigurationError):
        PointCloud(np.full((5, 2), np.inf))
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    with pytest.raises(DegenerateInputError):
        PointCloud(pts)


def test_spacings_are_cyclic():
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    pc = PointCloud(pts)
    np.testing.assert_allclose(pc.spacings(), np.ones(4))
    assert len(pc) == 4
    assert pc.diameter() == 1.0


def test_orientation_and_flip():
    ccw = circle_points(n=12)
    assert ccw.orientation() == 1.0
    cw = PointCloud(ccw.points[::-1].copy())
    assert cw.orientation() == -1.0
    flipped = ensure_counterclockwise(cw)
    assert flipped.orientation() == 1.0
    # already counterclockwise clouds come back untouched
    assert ensure_counterclockwise(ccw) is ccw


def test_signed_area_of_circle():
    pc = circle_points(radius=2.0, n=500)
    # polygon area n/2 r^2 sin(2 pi / n)
    exact = 0.5 * 500 * 4.0 * np.sin(2.0 * np.pi / 500)
    np.testing.assert_allclose(pc.signed_area(), exact, rtol=1e-12)


def test_partition_tiles_the_cloud():
    cloud = circle_points(n=20)
    cover = partition(cloud, core_size=4, boundary_size=2)
    assert len(cover) == 5
    owned = np.concatenate([st.core_indices for st in cover])
    assert sorted(owned.tolist()) == list(range(20))
    for st in cover:
        assert st.size == 6
        assert st.core_size == 4
        # indices are a contiguous cyclic run
        diffs = np.diff(st.indices) % 20
        assert np.all(diffs == 1)
        assert set(st.core_indices) & set(st.boundary_indices) == set()


def test_partition_owner_map():
    cloud = circle_points(n=15)
    cover = partition(cloud, core_size=5, boundary_size=4)
    for st in cover:
        for idx in st.core_indices:
            assert cover.stencil_of(idx) == st.label


def test_partition_merges_single_point_remainder():
    cloud = circle_points(n=11)
    cover = partition(cloud, core_size=5, boundary_size=2)
    sizes = [st.core_size for st in cover]
    assert sizes == [5, 6]
    owned = np.concatenate([st.core_indices for st in cover])
    assert sorted(owned.tolist()) == list(range(11))


def test_partition_remainder_kept_when_viable():
    cloud = circle_points(n=13)
    cover = partition(cloud, core_size=5, boundary_size=2)
    assert [st.core_size for st in cover] == [5, 5, 3]


def test_partition_validation():
    cloud = circle_points(n=10)
    with pytest.raises(ConfigurationError):
        partition(cloud, core_size=0, boundary_size=2)
    with pytest.raises(ConfigurationError):
        partition(cloud, core_size=4, boundary_size=3)
    with pytest.raises(ConfigurationError):
        partition(cloud, core_size=9, boundary_size=2)


def test_stencil_wraps_around_the_seam():
    cloud = circle_points(n=12)
    cover = partition(cloud, core_size=4, boundary_size=4)
    first = cover[0]
    assert first.indices[0] == 10  # two boundary points borrowed from the end
    last = cover[-1]
    assert last.indices[-1] == (last.core_indices[-1] + 2) % 12
