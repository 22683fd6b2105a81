"""Rasterized sublevel sets and their cubical Betti numbers (d = 2).

A pixel is occupied iff its center satisfies d_Y <= epsilon and f <= c. The
complex on occupied pixels has vertices = pixels, edges between 4-neighbors,
and squares where a full 2x2 block is occupied; chi = V - E + F, b0 comes
from 4-connectivity labeling, and b1 = b0 - chi. The complement's
connectivity is never used. Betti numbers are accepted only when two
consecutive grid refinements agree.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .composite import SmoothFunction
from .errors import GridTooCoarse, UnstableGrid
from .geometry import OffsetSet

FOUR_CONNECTED = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]])
MAX_REFINEMENTS = 4


@dataclass(frozen=True)
class GridSpec:
    """Axis-aligned raster window: per-axis (min, max) bounds and spacing."""

    bounds: tuple[tuple[float, float], tuple[float, float]]
    spacing: float

    def __post_init__(self):
        if self.spacing <= 0:
            raise ValueError("spacing must be positive")
        for lo, hi in self.bounds:
            if not lo < hi:
                raise ValueError("each axis needs min < max")

    @classmethod
    def for_offset(cls, offset: OffsetSet, spacing: float, margin: float | None = None) -> "GridSpec":
        pad = max(margin if margin is not None else 0.0, 2.0 * spacing)
        box = offset.inflated_box(extra=pad)
        return cls(bounds=tuple((float(lo), float(hi)) for lo, hi in box.T), spacing=spacing)

    def refined(self, factor: float = 0.5) -> "GridSpec":
        return GridSpec(bounds=self.bounds, spacing=self.spacing * factor)

    def shape(self) -> tuple[int, int]:
        return tuple(
            int(np.ceil((hi - lo) / self.spacing - 1e-12)) for lo, hi in self.bounds
        )

    def centers(self) -> tuple[np.ndarray, np.ndarray]:
        (x0, _), (y0, _) = self.bounds
        nx, ny = self.shape()
        xs = x0 + (np.arange(nx) + 0.5) * self.spacing
        ys = y0 + (np.arange(ny) + 0.5) * self.spacing
        return xs, ys

    def covers(self, offset: OffsetSet) -> bool:
        box = offset.inflated_box(extra=2.0 * self.spacing)
        return all(
            self.bounds[k][0] <= box[0][k] and box[1][k] <= self.bounds[k][1]
            for k in range(2)
        )


@dataclass(frozen=True)
class BitGrid:
    occupancy: np.ndarray  # (nx, ny) bool
    grid: GridSpec
    level: float

    def __post_init__(self):
        occ = np.asarray(self.occupancy, dtype=bool)
        occ.flags.writeable = False
        object.__setattr__(self, "occupancy", occ)

    @property
    def pixel_count(self) -> int:
        return int(self.occupancy.sum())

    def area(self) -> float:
        return self.pixel_count * self.grid.spacing ** 2


class SublevelRaster:
    """Caches the distance mask and function values of one grid resolution."""

    def __init__(self, offset: OffsetSet, f: SmoothFunction, grid: GridSpec):
        if offset.dimension != 2:
            raise ValueError("rasterization is implemented for d = 2")
        if grid.spacing > offset.epsilon / 10.0:
            raise GridTooCoarse(
                f"spacing {grid.spacing} exceeds the floor epsilon/10 = {offset.epsilon / 10.0}"
            )
        if not grid.covers(offset):
            raise ValueError("grid does not cover the inflated bounding box")
        self.offset = offset
        self.f = f
        self.grid = grid
        xs, ys = grid.centers()
        mesh = np.stack(np.meshgrid(xs, ys, indexing="ij"), axis=-1)
        pts = mesh.reshape(-1, 2)
        dist = offset.cloud.distance_field(pts)
        self.points = pts
        self.distance = dist
        self.in_offset = (dist <= offset.epsilon).reshape(len(xs), len(ys))
        self.f_values = f.value_many(pts).reshape(len(xs), len(ys))

    def occupancy_at(self, c: float) -> BitGrid:
        return BitGrid(
            occupancy=self.in_offset & (self.f_values <= c), grid=self.grid, level=c
        )


def rasterize_sublevel(
    offset: OffsetSet, f: SmoothFunction, c: float, grid: GridSpec
) -> BitGrid:
    """Center-sampled raster of the sublevel body X_c (deterministic)."""
    return SublevelRaster(offset, f, grid).occupancy_at(c)


def betti_2d(grid: BitGrid) -> tuple[int, int, int]:
    """(b0, b1, chi) of the cubical complex on occupied pixels."""
    occ = grid.occupancy
    vertices = int(occ.sum())
    if vertices == 0:
        return 0, 0, 0
    edges = int((occ[1:, :] & occ[:-1, :]).sum()) + int((occ[:, 1:] & occ[:, :-1]).sum())
    faces = int((occ[1:, 1:] & occ[:-1, 1:] & occ[1:, :-1] & occ[:-1, :-1]).sum())
    chi = vertices - edges + faces
    _, b0 = ndimage.label(occ, structure=FOUR_CONNECTED)
    return int(b0), int(b0 - chi), int(chi)


@dataclass(frozen=True)
class BettiRow:
    c: float
    b0: int
    b1: int
    chi: int
    resolution: float
    stable: bool

    def to_dict(self) -> dict:
        return {
            "c": self.c,
            "b0": self.b0,
            "b1": self.b1,
            "chi": self.chi,
            "resolution": self.resolution,
            "stable": self.stable,
        }


@dataclass(frozen=True)
class BettiProfile:
    rows: tuple[BettiRow, ...]

    def to_dict(self) -> dict:
        return {"rows": [r.to_dict() for r in self.rows]}

    def pairs(self) -> list[tuple[float, tuple[int, int]]]:
        return [(r.c, (r.b0, r.b1)) for r in self.rows]


class BettiSweeper:
    """Stable Betti evaluation with per-resolution raster caching."""

    def __init__(self, offset: OffsetSet, f: SmoothFunction, grid: GridSpec):
        self.offset = offset
        self.f = f
        self.base_grid = grid
        self._cache: dict[float, SublevelRaster] = {}

    def _raster(self, grid: GridSpec) -> SublevelRaster:
        key = grid.spacing
        if key not in self._cache:
            self._cache[key] = SublevelRaster(self.offset, self.f, grid)
        return self._cache[key]

    def stable_at(self, c: float) -> BettiRow:
        grid = self.base_grid
        prev = betti_2d(self._raster(grid).occupancy_at(c))
        for _ in range(MAX_REFINEMENTS):
            finer = grid.refined()
            cur = betti_2d(self._raster(finer).occupancy_at(c))
            if cur[:2] == prev[:2]:
                return BettiRow(
                    c=c, b0=cur[0], b1=cur[1], chi=cur[2],
                    resolution=finer.spacing, stable=True,
                )
            prev, grid = cur, finer
        raise UnstableGrid(
            f"Betti numbers at c = {c} did not stabilize within {MAX_REFINEMENTS} refinements"
        )


def stable_betti(
    offset: OffsetSet, f: SmoothFunction, c: float, grid: GridSpec
) -> tuple[int, int, int, float]:
    """(b0, b1, chi, resolution) once two consecutive refinements agree."""
    row = BettiSweeper(offset, f, grid).stable_at(c)
    return row.b0, row.b1, row.chi, row.resolution
