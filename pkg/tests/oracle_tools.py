"""Independent oracles used by the tests.

Nothing here touches the package's solvers: the min-norm oracle is a dense
convex-weight grid search (full coarse simplex grid, then local zero-sum
offset grids refined around the incumbent) finished by exact pairwise
weight exchanges; Betti oracles run GF(2) boundary-matrix ranks.
"""

from __future__ import annotations

import itertools

import numpy as np


def simplex_grid(m: int, steps: int) -> np.ndarray:
    """All weight vectors with coordinates k/steps summing to 1."""
    rows = []
    for cuts in itertools.combinations(range(steps + m - 1), m - 1):
        prev = -1
        parts = []
        for c in cuts:
            parts.append(c - prev - 1)
            prev = c
        parts.append(steps + m - 2 - prev)
        rows.append(parts)
    return np.asarray(rows, dtype=float) / steps


def _zero_sum_offsets(m: int, radius: int = 2) -> np.ndarray:
    offs = [o for o in itertools.product(range(-radius, radius + 1), repeat=m) if sum(o) == 0]
    return np.asarray(offs, dtype=float)


def grid_min_norm(vectors: np.ndarray, coarse: int = 12, final_step: float = 1e-8) -> float:
    """Min norm over the convex hull via multiscale grid search + pair polish."""
    v = np.asarray(vectors, dtype=float)
    m = v.shape[0]
    if m == 1:
        return float(np.linalg.norm(v[0]))

    def value(lams: np.ndarray) -> np.ndarray:
        pts = lams @ v
        return np.sqrt(np.sum(pts * pts, axis=-1))

    grid = simplex_grid(m, coarse)
    vals = value(grid)
    lam = grid[int(np.argmin(vals))]
    best = float(vals.min())

    offsets = _zero_sum_offsets(m)
    step = 1.0 / coarse
    recenters = 0
    while step > final_step and recenters < 500:
        cand = lam[None, :] + step * offsets
        feasible = np.all(cand >= -1e-15, axis=1)
        cand = np.clip(cand[feasible], 0.0, None)
        cvals = value(cand)
        k = int(np.argmin(cvals))
        if cvals[k] < best - 1e-18:
            moved_to_boundary = np.max(np.abs(cand[k] - lam)) >= 2 * step - 1e-15
            lam, best = cand[k], float(cvals[k])
            if moved_to_boundary:
                recenters += 1
                continue
        step *= 0.5

    # exact pairwise weight exchanges (1D quadratic line searches)
    x = lam @ v
    for _ in range(200):
        improved = False
        for i in range(m):
            if lam[i] <= 0:
                continue
            for j in range(m):
                if i == j:
                    continue
                d = v[j] - v[i]
                dd = float(d @ d)
                if dd == 0.0:
                    continue
                t = float(np.clip(-(x @ d) / dd, -lam[j], lam[i]))
                if abs(t) < 1e-18:
                    continue
                new_x = x + t * d
                if float(new_x @ new_x) < float(x @ x) - 1e-30:
                    lam = lam.copy()
                    lam[i] -= t
                    lam[j] += t
                    x = new_x
                    improved = True
        if not improved:
            break
    return float(np.linalg.norm(x))


def _gf2_rank(mat: np.ndarray) -> int:
    """Row-reduction rank over GF(2)."""
    m = (np.asarray(mat) % 2).astype(np.uint8).copy()
    rank = 0
    rows, cols = m.shape
    for col in range(cols):
        pivot = None
        for r in range(rank, rows):
            if m[r, col]:
                pivot = r
                break
        if pivot is None:
            continue
        m[[rank, pivot]] = m[[pivot, rank]]
        for r in range(rows):
            if r != rank and m[r, col]:
                m[r] ^= m[rank]
        rank += 1
        if rank == rows:
            break
    return rank


def betti_by_boundary_ranks(occupancy: np.ndarray) -> tuple[int, int]:
    """(b0, b1) of the pixel cubical complex via GF(2) boundary-matrix ranks."""
    occ = np.asarray(occupancy, dtype=bool)
    verts = [tuple(idx) for idx in np.argwhere(occ)]
    v_index = {p: k for k, p in enumerate(verts)}
    edges = []
    for (i, j) in verts:
        if (i + 1, j) in v_index:
            edges.append(((i, j), (i + 1, j)))
        if (i, j + 1) in v_index:
            edges.append(((i, j), (i, j + 1)))
    e_index = {e: k for k, e in enumerate(edges)}
    squares = []
    for (i, j) in verts:
        if all(p in v_index for p in ((i + 1, j), (i, j + 1), (i + 1, j + 1))):
            squares.append((i, j))

    nv, ne, nf = len(verts), len(edges), len(squares)
    if nv == 0:
        return 0, 0
    d1 = np.zeros((nv, ne), dtype=np.uint8)
    for k, (a, b) in enumerate(edges):
        d1[v_index[a], k] = 1
        d1[v_index[b], k] = 1
    d2 = np.zeros((ne, nf), dtype=np.uint8)
    for k, (i, j) in enumerate(squares):
        for edge in (
            ((i, j), (i + 1, j)),
            ((i, j), (i, j + 1)),
            ((i + 1, j), (i + 1, j + 1)),
            ((i, j + 1), (i + 1, j + 1)),
        ):
            d2[e_index[edge], k] = 1
    r1 = _gf2_rank(d1) if ne else 0
    r2 = _gf2_rank(d2) if nf else 0
    b0 = nv - r1
    b1 = (ne - r1) - r2
    return b0, b1


def greedy_raster_descent(phi_grid: np.ndarray, start: tuple[int, int]) -> list[tuple[int, int]]:
    """Steepest-descent walk on a rasterized field (8-neighborhood), for flow oracles."""
    path = [start]
    cur = start
    nx, ny = phi_grid.shape
    while True:
        i, j = cur
        best = cur
        best_val = phi_grid[i, j]
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                a, b = i + di, j + dj
                if 0 <= a < nx and 0 <= b < ny and phi_grid[a, b] < best_val:
                    best, best_val = (a, b), phi_grid[a, b]
        if best == cur:
            return path
        cur = best
        path.append(cur)
