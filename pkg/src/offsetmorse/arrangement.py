"""Exact boundary strata of a planar union of equal balls, and critical points.

The boundary of the offset decomposes into circular arcs (per ball, the
angular intervals not covered by any other ball) and crease vertices (points
on exactly two circles, carrying a wedge normal cone). Critical points of the
restricted test function are solved in closed form on arcs and by a wedge
membership test at creases; restricted Hessians use the stratum-curvature
formula kappa = <n, x - c> / rho^2, which equals 1/epsilon on arcs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .convex import GeneratorSet
from .errors import (
    CreaseStratum,
    GradientVanishesOnX,
    NotOnBoundary,
    TangentPair,
)
from .geometry import OffsetSet, Region, classify
from .composite import Family, SmoothFunction

TWO_PI = 2.0 * math.pi
UNCOVERED_TOL = 1e-9
GRAD_TOL = 1e-9
DEDUPE_TOL = 1e-7
DEFAULT_TOL_WEDGE = 1e-6
DEFAULT_TOL_TANGENT_FACTOR = 1e-7
DEFAULT_TOL_H = 1e-7
DEFAULT_TOL_SEP = 1e-5
DEFAULT_TOL_VALUE = 1e-7


@dataclass(frozen=True)
class Arc:
    """Uncovered angular intervals on the circle of one ball.

    Intervals are (start, end) with start in [0, 2pi) and start < end <=
    start + 2pi; a full circle is the single interval (0, 2pi).
    """

    ball_index: int
    center: np.ndarray
    radius: float
    intervals: tuple[tuple[float, float], ...]

    def point_at(self, theta: float) -> np.ndarray:
        return self.center + self.radius * np.array([math.cos(theta), math.sin(theta)])

    def total_angle(self) -> float:
        return sum(e - s for s, e in self.intervals)


@dataclass(frozen=True)
class CreaseVertex:
    """A boundary point on exactly two circles, with its wedge normals."""

    location: np.ndarray
    pair: tuple[int, int]
    normals: np.ndarray  # (2, 2): rows are (x - y_i)/eps, (x - y_j)/eps


BoundaryStratum = Arc | CreaseVertex


def _merge_circular(covered: list[tuple[float, float]]) -> list[tuple[float, float]]:
    """Union of angular intervals, returned as disjoint sorted pieces of [0, 2pi]."""
    pieces = []
    for s, e in covered:
        width = e - s
        if width >= TWO_PI:
            return [(0.0, TWO_PI)]
        s = s % TWO_PI
        e = s + width
        if e <= TWO_PI:
            pieces.append((s, e))
        else:
            pieces.append((s, TWO_PI))
            pieces.append((0.0, e - TWO_PI))
    pieces.sort()
    merged = [list(pieces[0])]
    for s, e in pieces[1:]:
        if s <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], e)
        else:
            merged.append([s, e])
    return [(s, e) for s, e in merged]


def _uncovered_intervals(covered: list[tuple[float, float]]) -> list[tuple[float, float]]:
    if not covered:
        return [(0.0, TWO_PI)]
    merged = _merge_circular(covered)
    if merged == [(0.0, TWO_PI)]:
        return []
    gaps = []
    if merged[0][0] > 0.0:
        gaps.append((0.0, merged[0][0]))
    for (s1, e1), (s2, e2) in zip(merged, merged[1:]):
        gaps.append((e1, s2))
    if merged[-1][1] < TWO_PI:
        gaps.append((merged[-1][1], TWO_PI))
    # rejoin a gap that wraps through angle 0
    if len(gaps) >= 2 and gaps[0][0] == 0.0 and gaps[-1][1] == TWO_PI:
        first, last = gaps[0], gaps.pop()
        gaps[0] = (last[0], first[1] + TWO_PI)
    return [(s % TWO_PI, (s % TWO_PI) + (e - s)) for s, e in gaps]


def enumerate_strata(
    offset: OffsetSet, tol_tangent: float | None = None
) -> list[BoundaryStratum]:
    """All arcs and crease vertices of the offset boundary (d = 2 only)."""
    if offset.dimension != 2:
        raise ValueError("the boundary arrangement is implemented for d = 2")
    if tol_tangent is None:
        tol_tangent = DEFAULT_TOL_TANGENT_FACTOR * offset.epsilon
    pts = offset.cloud.points
    n = offset.cloud.size
    eps = offset.epsilon

    crossing: dict[int, list[tuple[float, float]]] = {i: [] for i in range(n)}
    pairs = []
    for i in range(n):
        for j in range(i + 1, n):
            diff = pts[j] - pts[i]
            dist = float(np.linalg.norm(diff))
            if abs(dist - 2.0 * eps) <= tol_tangent:
                raise TangentPair(i, j, dist)
            if dist >= 2.0 * eps:
                continue
            pairs.append((i, j, diff, dist))
            beta = math.acos(dist / (2.0 * eps))
            psi_ij = math.atan2(diff[1], diff[0])
            crossing[i].append((psi_ij - beta, psi_ij + beta))
            psi_ji = math.atan2(-diff[1], -diff[0])
            crossing[j].append((psi_ji - beta, psi_ji + beta))

    strata: list[BoundaryStratum] = []
    for i in range(n):
        intervals = sorted(_uncovered_intervals(crossing[i]))
        if intervals:
            strata.append(
                Arc(ball_index=i, center=pts[i], radius=eps, intervals=tuple(intervals))
            )

    for i, j, diff, dist in pairs:
        mid = 0.5 * (pts[i] + pts[j])
        half = math.sqrt(max(eps * eps - 0.25 * dist * dist, 0.0))
        unit = diff / dist
        perp = np.array([-unit[1], unit[0]])
        for sgn in (1.0, -1.0):
            x = mid + sgn * half * perp
            if float(offset.cloud.distances_from(x).min()) < eps - UNCOVERED_TOL:
                continue
            normals = np.stack([(x - pts[i]) / eps, (x - pts[j]) / eps])
            strata.append(CreaseVertex(location=x, pair=(i, j), normals=normals))
    return strata


def arcs_of(strata: list[BoundaryStratum]) -> list[Arc]:
    return [s for s in strata if isinstance(s, Arc)]


def creases_of(strata: list[BoundaryStratum]) -> list[CreaseVertex]:
    return [s for s in strata if isinstance(s, CreaseVertex)]


def normal_cone(offset: OffsetSet, x, tol: float = 1e-7) -> GeneratorSet:
    """Generators (x - y_i)/eps over the balls whose sphere passes through x."""
    x = np.asarray(x, dtype=float)
    dists = offset.cloud.distances_from(x)
    if abs(float(dists.min()) - offset.epsilon) > tol:
        raise NotOnBoundary(f"point at d_Y = {float(dists.min())!r} is not on the boundary")
    idx = np.flatnonzero(np.abs(dists - offset.epsilon) <= tol)
    return GeneratorSet((x - offset.cloud.points[idx]) / offset.epsilon)


@dataclass(frozen=True)
class CriticalPointRecord:
    location: np.ndarray
    value: float
    gradient_norm: float
    normal: np.ndarray
    stratum: BoundaryStratum
    hessian_restricted: float | None  # absent on crease strata
    index: int
    infinite_count: int
    cell_dimension: int  # index + infinite_count
    degenerate: bool
    degenerate_reason: str | None = None

    def to_dict(self) -> dict:
        kind = "arc" if isinstance(self.stratum, Arc) else "crease"
        balls = (
            [self.stratum.ball_index]
            if isinstance(self.stratum, Arc)
            else list(self.stratum.pair)
        )
        return {
            "location": [float(c) for c in self.location],
            "value": self.value,
            "gradient_norm": self.gradient_norm,
            "normal": [float(c) for c in self.normal],
            "stratum": kind,
            "balls": balls,
            "hessian_restricted": self.hessian_restricted,
            "index": self.index,
            "infinite_count": self.infinite_count,
            "cell_dimension": self.cell_dimension,
            "degenerate": self.degenerate,
            "degenerate_reason": self.degenerate_reason,
        }


def _arc_candidates(center: np.ndarray, eps: float, f: SmoothFunction) -> list[np.ndarray]:
    """Circle points where the outward normal equals -grad f / ||grad f||."""
    if f.family is Family.LINEAR:
        u = f.vector / np.linalg.norm(f.vector)
        return [center - eps * u]
    w = f.vector - center
    wn = float(np.linalg.norm(w))
    if wn < GRAD_TOL:
        return []
    w = w / wn
    if f.sign > 0:
        return [center + eps * w] if wn > eps else []
    return [center - eps * w]


def _stratum_curvature(n: np.ndarray, x: np.ndarray, sphere_center: np.ndarray, rho: float) -> float:
    return float(n @ (x - sphere_center)) / (rho * rho)


def _arc_hessian(
    offset: OffsetSet, center: np.ndarray, x: np.ndarray, f: SmoothFunction, tol_h: float
) -> tuple[float, int, bool]:
    n = (x - center) / offset.epsilon
    t = np.array([-n[1], n[0]])
    kappa = _stratum_curvature(n, x, center, offset.epsilon)
    grad = f.gradient(x)
    h = float(t @ f.hessian() @ t) + float(np.linalg.norm(grad)) * kappa
    if h > tol_h:
        return h, 0, False
    if h < -tol_h:
        return h, 1, False
    return h, 0, True


def restricted_hessian(
    offset: OffsetSet, record: CriticalPointRecord, f: SmoothFunction, tol_h: float = DEFAULT_TOL_H
) -> tuple[float, int]:
    """Restricted Hessian and its index for an arc record."""
    if not isinstance(record.stratum, Arc):
        raise CreaseStratum("crease strata have no finite tangent direction in d = 2")
    h, index, _ = _arc_hessian(offset, record.stratum.center, record.location, f, tol_h)
    return h, index


def _wedge_coordinates(normals: np.ndarray, v: np.ndarray) -> tuple[float, float]:
    """Coefficients (a, b) with a*n_i + b*n_j = v; cross-product form in 2D."""
    n_i, n_j = normals
    det = n_i[0] * n_j[1] - n_i[1] * n_j[0]
    a = (v[0] * n_j[1] - v[1] * n_j[0]) / det
    b = (n_i[0] * v[1] - n_i[1] * v[0]) / det
    return float(a), float(b)


def find_critical_points(
    offset: OffsetSet,
    f: SmoothFunction,
    strata: list[BoundaryStratum] | None = None,
    tol_wedge: float = DEFAULT_TOL_WEDGE,
    tol_h: float = DEFAULT_TOL_H,
) -> list[CriticalPointRecord]:
    """All critical points of the restricted function, with cell dimensions.

    Quadratic centers inside (or on) the offset are rejected: the gradient
    vanishes there, which is a degenerate critical point the boundary scan
    cannot represent.
    """
    if offset.dimension != 2:
        raise ValueError("critical-point enumeration is implemented for d = 2")
    if f.family is Family.QUADRATIC:
        if classify(offset, f.vector).region is not Region.OUTSIDE:
            raise GradientVanishesOnX(
                "quadratic center lies in the offset: zero gradient on X"
            )
    if strata is None:
        strata = enumerate_strata(offset)

    records: list[CriticalPointRecord] = []

    for crease in creases_of(strata):
        x = crease.location
        grad = f.gradient(x)
        gnorm = float(np.linalg.norm(grad))
        if gnorm < GRAD_TOL:
            raise GradientVanishesOnX(f"gradient vanishes at crease {x.tolist()}")
        v = -grad / gnorm
        a, b = _wedge_coordinates(crease.normals, v)
        margin = min(a, b)
        if margin < -tol_wedge:
            continue
        degenerate = margin < tol_wedge
        records.append(
            CriticalPointRecord(
                location=x,
                value=f.value(x),
                gradient_norm=gnorm,
                normal=v,
                stratum=crease,
                hessian_restricted=None,
                index=0,
                infinite_count=1,
                cell_dimension=1,
                degenerate=degenerate,
                degenerate_reason="wedge-boundary normal" if degenerate else None,
            )
        )

    for arc in arcs_of(strata):
        for x in _arc_candidates(arc.center, offset.epsilon, f):
            if float(offset.cloud.distances_from(x).min()) < offset.epsilon - UNCOVERED_TOL:
                continue
            grad = f.gradient(x)
            gnorm = float(np.linalg.norm(grad))
            if gnorm < GRAD_TOL:
                raise GradientVanishesOnX(f"gradient vanishes at arc candidate {x.tolist()}")
            h, index, degenerate = _arc_hessian(offset, arc.center, x, f, tol_h)
            records.append(
                CriticalPointRecord(
                    location=x,
                    value=f.value(x),
                    gradient_norm=gnorm,
                    normal=-grad / gnorm,
                    stratum=arc,
                    hessian_restricted=h,
                    index=index,
                    infinite_count=0,
                    cell_dimension=index,
                    degenerate=degenerate,
                    degenerate_reason="zero restricted Hessian" if degenerate else None,
                )
            )

    # merge duplicates by location; crease records (listed first) win
    kept: list[CriticalPointRecord] = []
    for rec in records:
        if any(np.linalg.norm(rec.location - k.location) <= DEDUPE_TOL for k in kept):
            continue
        kept.append(rec)
    kept.sort(key=lambda r: (r.value, r.location[0], r.location[1]))
    return kept


@dataclass(frozen=True)
class MorseReport:
    is_morse: bool
    degenerate_indices: tuple[int, ...]
    min_separation: float | None
    isolation_ok: bool
    levels: tuple[tuple[float, tuple[int, ...], tuple[int, ...]], ...]
    # levels: (value, record indices, sorted cell-dimension multiset)

    def to_dict(self) -> dict:
        return {
            "is_morse": self.is_morse,
            "degenerate_indices": list(self.degenerate_indices),
            "min_separation": self.min_separation,
            "isolation_ok": self.isolation_ok,
            "levels": [
                {"value": v, "records": list(idx), "cell_dimensions": list(lams)}
                for v, idx, lams in self.levels
            ],
        }


def check_morse(
    records: list[CriticalPointRecord],
    tol_sep: float = DEFAULT_TOL_SEP,
    tol_value: float = DEFAULT_TOL_VALUE,
) -> MorseReport:
    """Degeneracy flags, isolation witness, and per-level grouping."""
    degenerate = tuple(i for i, r in enumerate(records) if r.degenerate)
    min_sep = None
    if len(records) > 1:
        locs = np.stack([r.location for r in records])
        diff = locs[:, None, :] - locs[None, :, :]
        sep = np.sqrt(np.sum(diff * diff, axis=2))
        np.fill_diagonal(sep, np.inf)
        min_sep = float(sep.min())
    isolation_ok = min_sep is None or min_sep >= tol_sep

    levels: list[tuple[float, tuple[int, ...], tuple[int, ...]]] = []
    used: set[int] = set()
    for i, rec in enumerate(records):
        if i in used:
            continue
        group = [j for j in range(len(records)) if abs(records[j].value - rec.value) <= tol_value]
        used.update(group)
        lams = tuple(sorted(records[j].cell_dimension for j in group))
        levels.append((rec.value, tuple(group), lams))
    levels.sort(key=lambda lvl: lvl[0])

    return MorseReport(
        is_morse=not degenerate,
        degenerate_indices=degenerate,
        min_separation=min_sep,
        isolation_ok=isolation_ok,
        levels=tuple(levels),
    )


def sample_boundary(
    strata: list[BoundaryStratum], count: int, seed: int = 0
) -> list[np.ndarray]:
    """Deterministic boundary sample: crease vertices plus random arc angles."""
    rng = np.random.RandomState(seed)
    pts = [c.location for c in creases_of(strata)]
    arcs = arcs_of(strata)
    weights = np.array([a.total_angle() for a in arcs])
    need = max(count - len(pts), 0)
    if arcs and need:
        share = np.maximum(np.ceil(weights / weights.sum() * need).astype(int), 1)
        for arc, k in zip(arcs, share):
            spans = np.array([e - s for s, e in arc.intervals])
            for _ in range(int(k)):
                pick = rng.choice(len(arc.intervals), p=spans / spans.sum())
                s, e = arc.intervals[pick]
                # stay off the interval endpoints (crease vertices live there)
                theta = s + (0.05 + 0.9 * rng.rand()) * (e - s)
                pts.append(arc.point_at(theta))
    return pts


def _angle_interval(vectors: np.ndarray) -> tuple[float, float]:
    """Angular extent [lo, hi] of a 2D cone spanned by generators (< pi spread)."""
    ref = math.atan2(*vectors.sum(axis=0)[::-1])
    angles = []
    for v in vectors:
        a = math.atan2(v[1], v[0])
        while a <= ref - math.pi:
            a += TWO_PI
        while a > ref + math.pi:
            a -= TWO_PI
        angles.append(a)
    return min(angles), max(angles)


def cone_angular_gap(gens_a: GeneratorSet, gens_b: GeneratorSet) -> float:
    """Hausdorff gap (radians) between the 2D cones spanned by two generator sets."""
    lo_a, hi_a = _angle_interval(gens_a.vectors)
    lo_b, hi_b = _angle_interval(gens_b.vectors)
    mid_a, mid_b = 0.5 * (lo_a + hi_a), 0.5 * (lo_b + hi_b)
    shift = round((mid_a - mid_b) / TWO_PI) * TWO_PI
    lo_b, hi_b = lo_b + shift, hi_b + shift
    return max(abs(lo_a - lo_b), abs(hi_a - hi_b))
