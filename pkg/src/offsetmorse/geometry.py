"""Point clouds, exact distance queries, and offset membership.

The cloud is a finite list of samples; every query below is exact up to
floating arithmetic (no approximate spatial index is involved), and all
types are immutable after construction so queries are thread-safe.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch, EmptyInput

MIN_SEPARATION = 1e-9
DEFAULT_TOL_NEAR = 1e-9
DEFAULT_TOL_BOUNDARY = 1e-7


def _as_point(x, dimension: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (dimension,):
        raise DimensionMismatch(f"expected a vector of length {dimension}, got shape {x.shape}")
    return x


@dataclass(frozen=True)
class PointCloud:
    """Finite sample set in R^d; duplicates (separation < 1e-9) are rejected."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise EmptyInput("a point cloud needs at least one point of fixed dimension")
        if not np.all(np.isfinite(pts)):
            raise ValueError("point coordinates must be finite")
        diff = pts[:, None, :] - pts[None, :, :]
        sep = np.sqrt(np.sum(diff * diff, axis=-1))
        np.fill_diagonal(sep, np.inf)
        if sep.min() < MIN_SEPARATION:
            i, j = np.unravel_index(int(np.argmin(sep)), sep.shape)
            raise ValueError(f"points {i} and {j} are closer than {MIN_SEPARATION}")
        pts = pts.copy()
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    @property
    def dimension(self) -> int:
        return self.points.shape[1]

    @property
    def size(self) -> int:
        return self.points.shape[0]

    def bounding_box(self) -> np.ndarray:
        """(2, d) array of per-axis [min, max]."""
        return np.stack([self.points.min(axis=0), self.points.max(axis=0)])

    def diameter(self) -> float:
        diff = self.points[:, None, :] - self.points[None, :, :]
        return float(np.sqrt(np.sum(diff * diff, axis=-1)).max())

    def distances_from(self, x) -> np.ndarray:
        """Distances from a single query point to every sample."""
        x = _as_point(x, self.dimension)
        return np.sqrt(np.sum((self.points - x) ** 2, axis=1))

    def distance_field(self, pts: np.ndarray, chunk: int = 262144) -> np.ndarray:
        """d_Y evaluated at an (n, d) batch, chunked to bound memory."""
        pts = np.asarray(pts, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != self.dimension:
            raise DimensionMismatch(f"expected (n, {self.dimension}) batch, got {pts.shape}")
        out = np.empty(pts.shape[0])
        for lo in range(0, pts.shape[0], chunk):
            block = pts[lo : lo + chunk]
            d2 = np.sum((block[:, None, :] - self.points[None, :, :]) ** 2, axis=2)
            out[lo : lo + chunk] = np.sqrt(d2.min(axis=1))
        return out


def distance(cloud: PointCloud, x) -> float:
    """Euclidean distance from x to the cloud (min over samples)."""
    return float(cloud.distances_from(x).min())


def nearest_set(cloud: PointCloud, x, tol_near: float = DEFAULT_TOL_NEAR) -> list[int]:
    """Indices of all samples within tol_near of realizing the distance."""
    if tol_near < 0:
        raise ValueError("tol_near must be nonnegative")
    dists = cloud.distances_from(x)
    return [int(i) for i in np.flatnonzero(dists <= dists.min() + tol_near)]


def hausdorff_distance(a, b) -> float:
    """Symmetric Hausdorff distance between two nonempty finite sets."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise EmptyInput("hausdorff_distance needs two nonempty sets")
    if a.shape[1] != b.shape[1]:
        raise DimensionMismatch("sets live in different dimensions")
    cross = np.sqrt(np.sum((a[:, None, :] - b[None, :, :]) ** 2, axis=2))
    return float(max(cross.min(axis=1).max(), cross.min(axis=0).max()))


class Region(enum.Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    OUTSIDE = "outside"


@dataclass(frozen=True)
class MembershipLabel:
    region: Region
    margin: float  # d_Y(x) - epsilon, signed


@dataclass(frozen=True)
class OffsetSet:
    """The union of closed epsilon-balls around the cloud samples."""

    cloud: PointCloud
    epsilon: float

    def __post_init__(self):
        if not (self.epsilon > 0 and np.isfinite(self.epsilon)):
            raise ValueError("epsilon must be a positive finite real")

    @property
    def dimension(self) -> int:
        return self.cloud.dimension

    def signed_margin(self, x) -> float:
        return distance(self.cloud, x) - self.epsilon

    def inflated_box(self, extra: float = 0.0) -> np.ndarray:
        box = self.cloud.bounding_box()
        pad = self.epsilon + extra
        return np.stack([box[0] - pad, box[1] + pad])


def classify(offset: OffsetSet, x, tol_boundary: float = DEFAULT_TOL_BOUNDARY) -> MembershipLabel:
    """Interior / Boundary / Outside with a tolerance band around the boundary."""
    if tol_boundary <= 0:
        raise ValueError("tol_boundary must be positive")
    margin = offset.signed_margin(x)
    if margin < -tol_boundary:
        region = Region.INTERIOR
    elif margin > tol_boundary:
        region = Region.OUTSIDE
    else:
        region = Region.BOUNDARY
    return MembershipLabel(region=region, margin=margin)


def load_points_text(path) -> PointCloud:
    """Read one point per line, coordinates whitespace-separated, '#' comments."""
    rows = []
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        rows.append([float(tok) for tok in line.split()])
    if not rows:
        raise EmptyInput(f"no points found in {path}")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise DimensionMismatch(f"inconsistent coordinate counts in {path}: {sorted(widths)}")
    return PointCloud(np.asarray(rows, dtype=float))
