"""Clarke gradients of the cloud distance, regular-value certificates, mu-reach.

Certification is sampling-based, not interval-rigorous. Raw grid samples
generically have a unique nearest sample (delta = 1), while the infimum of
delta over a shell lives on bisectors, so three sample families are combined:

  * the regular grid over the inflated bounding box, filtered to the shell;
  * grid points projected along a distance-gradient generator onto nearby
    level values (tightens coverage of the exact level);
  * near-tie samples projected onto the exact bisector of the tied sample
    pair, where delta is evaluated with the exact tie tolerance.

Verdicts carry the sample spacing; the Refuted slack equals one spacing
(1-Lipschitz modulus of d_Y), and Inconclusive fills the gap in between.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field

import numpy as np

from .convex import GeneratorSet, MinNormResult, min_norm_point
from .errors import BasePointOnCloud, EmptyShell
from .geometry import DEFAULT_TOL_NEAR, PointCloud, _as_point

UNIT_TOL = 1e-9


@dataclass(frozen=True)
class ClarkeGradientApprox:
    """Generators (unit directions to nearest samples) of the distance gradient at x."""

    base_point: np.ndarray
    generators: GeneratorSet
    min_norm: MinNormResult

    @property
    def delta(self) -> float:
        return self.min_norm.norm


def clarke_gradient_distance(
    cloud: PointCloud, x, tol_near: float = DEFAULT_TOL_NEAR
) -> ClarkeGradientApprox:
    """Convex hull of unit directions from the nearest samples to x (x outside Y)."""
    x = _as_point(x, cloud.dimension)
    dists = cloud.distances_from(x)
    d = float(dists.min())
    if d <= 10.0 * tol_near:
        raise BasePointOnCloud(f"query point is on the cloud (d_Y = {d!r})")
    idx = np.flatnonzero(dists <= d + tol_near)
    dirs = (x - cloud.points[idx]) / dists[idx, None]
    gens = GeneratorSet(dirs)
    return ClarkeGradientApprox(base_point=x, generators=gens, min_norm=min_norm_point(gens))


def _delta_at(cloud: PointCloud, x, tol_near: float) -> float:
    """delta(clarke d_Y) at x, with a fast path for unique nearest samples."""
    dists = cloud.distances_from(x)
    d = float(dists.min())
    idx = np.flatnonzero(dists <= d + tol_near)
    if idx.size == 1:
        return 1.0
    dirs = (x - cloud.points[idx]) / dists[idx, None]
    return min_norm_point(GeneratorSet(dirs)).norm


def _grid_points(box: np.ndarray, spacing: float) -> np.ndarray:
    axes = [np.arange(lo, hi + 0.5 * spacing, spacing) for lo, hi in box.T]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def shell_sample(cloud: PointCloud, epsilon: float, delta: float, spacing: float) -> np.ndarray:
    """Sample points with d_Y in [epsilon - delta, epsilon + delta].

    Regular grid over the bounding box inflated by epsilon + delta, filtered to
    the shell; retained points are additionally projected along a nearest-sample
    direction onto the levels {epsilon - delta/2, epsilon, epsilon + delta/2}.
    """
    if not (0 < delta < epsilon):
        raise ValueError("need 0 < delta < epsilon")
    if spacing <= 0:
        raise ValueError("spacing must be positive")
    box = cloud.bounding_box()
    pad = epsilon + delta
    box = np.stack([box[0] - pad, box[1] + pad])
    pts = _grid_points(box, spacing)
    d = cloud.distance_field(pts)
    in_shell = (d >= epsilon - delta) & (d <= epsilon + delta)
    if not np.any(in_shell):
        raise EmptyShell(f"no grid point with spacing {spacing} lands in the shell")
    kept = pts[in_shell]
    kept_d = d[in_shell]

    # project each kept point along its nearest-sample direction onto nearby levels
    nearest = np.argmin(
        np.sum((kept[:, None, :] - cloud.points[None, :, :]) ** 2, axis=2), axis=1
    )
    dirs = (kept - cloud.points[nearest]) / kept_d[:, None]
    extras = []
    levels = (
        epsilon - delta, epsilon - 0.5 * delta, epsilon,
        epsilon + 0.5 * delta, epsilon + delta,
    )
    for level in levels:
        extras.append(kept + (level - kept_d[:, None]) * dirs)
    extra = np.concatenate(extras, axis=0)
    extra_d = cloud.distance_field(extra)
    ok = (extra_d >= epsilon - delta) & (extra_d <= epsilon + delta)
    return np.concatenate([kept, extra[ok]], axis=0)


def _bisector_candidates(
    cloud: PointCloud, pts: np.ndarray, capture: float
) -> np.ndarray:
    """Near-tie samples projected onto the exact bisector of the tied pair."""
    if cloud.size < 2 or pts.shape[0] == 0:
        return np.empty((0, cloud.dimension))
    d2 = np.sum((pts[:, None, :] - cloud.points[None, :, :]) ** 2, axis=2)
    dist = np.sqrt(d2)
    dmin = dist.min(axis=1)
    tied = dist <= (dmin + capture)[:, None]
    out = []
    for a, b in itertools.combinations(range(cloud.size), 2):
        mask = tied[:, a] & tied[:, b]
        if not np.any(mask):
            continue
        w = cloud.points[b] - cloud.points[a]
        c0 = 0.5 * (cloud.points[b] @ cloud.points[b] - cloud.points[a] @ cloud.points[a])
        sel = pts[mask]
        proj = sel - ((sel @ w - c0) / (w @ w))[:, None] * w
        out.append(proj)
    if not out:
        return np.empty((0, cloud.dimension))
    return np.concatenate(out, axis=0)


class Verdict(enum.Enum):
    CERTIFIED = "certified"
    REFUTED = "refuted"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class RegularValueCertificate:
    epsilon: float
    mu_required: float
    shell_halfwidth: float
    mu_observed: float
    sample_count: int
    sample_spacing: float
    verdict: Verdict
    witness: np.ndarray | None = None
    shell_points: np.ndarray | None = field(default=None, repr=False)
    shell_deltas: np.ndarray | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        doc = {
            "epsilon": self.epsilon,
            "mu_required": self.mu_required,
            "shell_halfwidth": self.shell_halfwidth,
            "mu_observed": self.mu_observed,
            "sample_count": self.sample_count,
            "sample_spacing": self.sample_spacing,
            "verdict": self.verdict.value,
            "witness": None if self.witness is None else [float(c) for c in self.witness],
        }
        return doc


def certify_regular_value(
    cloud: PointCloud,
    epsilon: float,
    mu_required: float,
    delta: float | None = None,
    spacing: float | None = None,
    tol_near: float = DEFAULT_TOL_NEAR,
) -> RegularValueCertificate:
    """Sampled certificate that epsilon is a regular value of d_Y at level mu.

    Certified iff the sampled infimum of delta over the shell is >= mu_required;
    Refuted (with witness) iff some sample falls below mu_required - spacing;
    Inconclusive otherwise.
    """
    if delta is None:
        delta = epsilon / 10.0
    if spacing is None:
        spacing = epsilon / 50.0
    samples = shell_sample(cloud, epsilon, delta, spacing)
    crease = _bisector_candidates(cloud, samples, capture=2.0 * spacing)
    if crease.shape[0]:
        cd = cloud.distance_field(crease)
        ok = (cd >= epsilon - delta) & (cd <= epsilon + delta) & (cd > 10.0 * tol_near)
        samples = np.concatenate([samples, crease[ok]], axis=0)

    deltas = np.array([_delta_at(cloud, x, tol_near) for x in samples])
    worst = int(np.argmin(deltas))
    mu_observed = float(deltas[worst])
    slack = spacing
    if mu_observed >= mu_required:
        verdict, witness = Verdict.CERTIFIED, None
    elif mu_observed < mu_required - slack:
        verdict, witness = Verdict.REFUTED, samples[worst]
    else:
        verdict, witness = Verdict.INCONCLUSIVE, None
    return RegularValueCertificate(
        epsilon=epsilon,
        mu_required=mu_required,
        shell_halfwidth=delta,
        mu_observed=mu_observed,
        sample_count=samples.shape[0],
        sample_spacing=spacing,
        verdict=verdict,
        witness=witness,
        shell_points=samples,
        shell_deltas=deltas,
    )


@dataclass(frozen=True)
class MuReachEstimate:
    mu: float
    lower_bracket: float
    upper_bracket: float
    resolution: float

    def to_dict(self) -> dict:
        return {
            "mu": self.mu,
            "lower_bracket": self.lower_bracket,
            "upper_bracket": self.upper_bracket,
            "resolution": self.resolution,
        }


def mu_reach_estimate(
    cloud: PointCloud,
    mu: float,
    resolution: float,
    max_iter: int = 40,
    tol_near: float = DEFAULT_TOL_NEAR,
) -> MuReachEstimate:
    """Bracket the mu-reach by binary search over offsets of the sampled band.

    lower_bracket is the largest tested s with no sampled delta < mu in
    {0 < d_Y <= s}; upper_bracket the smallest tested s with a violation.
    When no violation is ever sampled both brackets sit at the window top.
    """
    if not (0 < mu <= 1):
        raise ValueError("mu must lie in (0, 1]")
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    hi = cloud.diameter() + 1.0
    spacing = resolution / 2.0
    box = cloud.bounding_box()
    box = np.stack([box[0] - hi, box[1] + hi])
    pts = _grid_points(box, spacing)
    d = cloud.distance_field(pts)
    band = (d > 10.0 * tol_near) & (d <= hi)
    pts, d = pts[band], d[band]

    # violation evidence: (d_Y, delta) pairs where delta could fall below mu
    evidence_d: list[float] = []
    evidence_delta: list[float] = []
    d2 = np.sum((pts[:, None, :] - cloud.points[None, :, :]) ** 2, axis=2)
    ties = np.sqrt(d2) <= (d + tol_near)[:, None]
    multi = np.flatnonzero(ties.sum(axis=1) > 1)
    for i in multi:
        evidence_d.append(float(d[i]))
        evidence_delta.append(_delta_at(cloud, pts[i], tol_near))
    crease = _bisector_candidates(cloud, pts, capture=2.0 * spacing)
    if crease.shape[0]:
        cd = cloud.distance_field(crease)
        ok = (cd > 10.0 * tol_near) & (cd <= hi)
        for x, dx in zip(crease[ok], cd[ok]):
            evidence_d.append(float(dx))
            evidence_delta.append(_delta_at(cloud, x, tol_near))
    ev_d = np.asarray(evidence_d)
    ev_delta = np.asarray(evidence_delta)

    def violated(s: float) -> bool:
        if ev_d.size == 0:
            return False
        return bool(np.any((ev_d <= s) & (ev_delta < mu)))

    if not violated(hi):
        return MuReachEstimate(mu=mu, lower_bracket=hi, upper_bracket=hi, resolution=resolution)
    lo_b, hi_b = 0.0, hi
    for _ in range(max_iter):
        if hi_b - lo_b <= resolution:
            break
        mid = 0.5 * (lo_b + hi_b)
        if violated(mid):
            hi_b = mid
        else:
            lo_b = mid
    return MuReachEstimate(mu=mu, lower_bracket=lo_b, upper_bracket=hi_b, resolution=resolution)
