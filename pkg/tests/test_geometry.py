import math

import numpy as np
import pytest

from offsetmorse import (
    OffsetSet,
    PointCloud,
    Region,
    classify,
    distance,
    hausdorff_distance,
    load_points_text,
    nearest_set,
)
from offsetmorse.errors import DimensionMismatch, EmptyInput

TWO_DISK = PointCloud(np.array([[-0.5, 0.0], [0.5, 0.0]]))


def brute_distance(points, x):
    return min(math.dist(p, x) for p in points)


class TestDistance:
    def test_single_point_norm(self):
        cloud = PointCloud(np.array([[0.0, 0.0]]))
        assert distance(cloud, [3.0, 4.0]) == 5.0

    def test_on_sample(self):
        cloud = PointCloud(np.array([[0.0, 0.0], [1.0, 0.0]]))
        assert distance(cloud, [1.0, 0.0]) == 0.0

    def test_crease_point_of_two_disks(self):
        # equidistant point above the gap: hypotenuse sqrt(0.25 + 0.6245^2)
        x = [0.0, 0.6245]
        got = distance(TWO_DISK, x)
        assert got == pytest.approx(0.8, abs=1e-3)
        assert got == pytest.approx(brute_distance(TWO_DISK.points, x), abs=0)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            distance(TWO_DISK, [1.0, 2.0, 3.0])

    def test_one_lipschitz(self):
        rng = np.random.RandomState(0)
        cloud = PointCloud(rng.randn(7, 3))
        for _ in range(200):
            x, y = rng.randn(3), rng.randn(3)
            assert abs(distance(cloud, x) - distance(cloud, y)) <= np.linalg.norm(x - y) + 1e-12


class TestNearestSet:
    def test_symmetric_pair(self):
        cloud = PointCloud(np.array([[-1.0, 0.0], [1.0, 0.0]]))
        assert nearest_set(cloud, [0.0, 1.0], 1e-9) == [0, 1]

    def test_unique(self):
        cloud = PointCloud(np.array([[-1.0, 0.0], [1.0, 0.0]]))
        assert nearest_set(cloud, [0.5, 0.0], 1e-9) == [1]

    def test_crease_equidistance(self):
        x = [0.0, 0.6245]
        assert nearest_set(TWO_DISK, x, 1e-6) == [0, 1]
        d0 = math.dist(TWO_DISK.points[0], x)
        d1 = math.dist(TWO_DISK.points[1], x)
        assert d0 == pytest.approx(0.8, abs=1e-3)
        assert d1 == pytest.approx(0.8, abs=1e-3)

    def test_all_indices_realize_distance(self):
        rng = np.random.RandomState(1)
        cloud = PointCloud(rng.randn(9, 2))
        for _ in range(50):
            x = rng.randn(2)
            d = distance(cloud, x)
            for i in nearest_set(cloud, x, 1e-9):
                assert math.dist(cloud.points[i], x) <= d + 1e-9


class TestClassify:
    def test_center_is_interior(self):
        off = OffsetSet(PointCloud(np.array([[0.0, 0.0]])), 1.0)
        assert classify(off, [0.0, 0.0]).region is Region.INTERIOR

    def test_sphere_is_boundary(self):
        off = OffsetSet(PointCloud(np.array([[0.0, 0.0]])), 1.0)
        assert classify(off, [0.0, 1.0]).region is Region.BOUNDARY

    def test_above_crease_is_outside(self):
        off = OffsetSet(TWO_DISK, 0.8)
        x = [0.0, 0.7]
        assert brute_distance(TWO_DISK.points, x) > 0.8
        assert classify(off, x).region is Region.OUTSIDE

    def test_labels_consistent_with_distance(self):
        rng = np.random.RandomState(2)
        off = OffsetSet(PointCloud(rng.randn(5, 2)), 0.7)
        tol = 1e-7
        for _ in range(200):
            x = 3 * rng.randn(2)
            label = classify(off, x, tol)
            d = distance(off.cloud, x)
            if label.region is Region.INTERIOR:
                assert d <= off.epsilon
            elif label.region is Region.OUTSIDE:
                assert d > off.epsilon
            assert label.margin == pytest.approx(d - off.epsilon, abs=1e-15)


class TestHausdorff:
    def test_identical(self):
        assert hausdorff_distance([[0.0, 0.0]], [[0.0, 0.0]]) == 0.0

    def test_two_singletons(self):
        assert hausdorff_distance([[0.0, 0.0]], [[0.0, 3.0]]) == 3.0

    def test_asymmetric_sets(self):
        a = [[0.0, 0.0], [2.0, 0.0]]
        b = [[1.0, 0.0]]
        # brute force both directed sup-min distances
        d_ab = max(min(math.dist(p, q) for q in b) for p in a)
        d_ba = max(min(math.dist(p, q) for q in a) for p in b)
        assert max(d_ab, d_ba) == 1.0
        assert hausdorff_distance(a, b) == 1.0

    def test_empty_rejected(self):
        with pytest.raises(EmptyInput):
            hausdorff_distance(np.empty((0, 2)), [[0.0, 0.0]])


class TestConstruction:
    def test_duplicates_rejected(self):
        with pytest.raises(ValueError):
            PointCloud(np.array([[0.0, 0.0], [0.0, 5e-10]]))

    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError):
            PointCloud(np.array([[0.0, np.nan]]))

    def test_empty_rejected(self):
        with pytest.raises(EmptyInput):
            PointCloud(np.empty((0, 2)))

    def test_points_immutable(self):
        cloud = PointCloud(np.array([[0.0, 0.0], [1.0, 0.0]]))
        with pytest.raises(ValueError):
            cloud.points[0, 0] = 5.0

    def test_epsilon_positive(self):
        with pytest.raises(ValueError):
            OffsetSet(TWO_DISK, 0.0)


class TestPointFile:
    def test_round_trip_with_comments(self, tmp_path):
        path = tmp_path / "pts.txt"
        path.write_text("# a comment\n0.5 0.0\n-0.5 0.0  # trailing\n\n")
        cloud = load_points_text(path)
        assert cloud.size == 2
        assert cloud.dimension == 2
        np.testing.assert_allclose(cloud.points, [[0.5, 0.0], [-0.5, 0.0]])

    def test_ragged_rows_rejected(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("0 1\n0 1 2\n")
        with pytest.raises(DimensionMismatch):
            load_points_text(path)
