"""Discrete approximate inverse flow: descend phi from the b-sublevel to the a-sublevel.

Each step pools Clarke generators at the current point and (when the pooling
radius is positive) at a deterministic stencil of 2d neighbors, takes the
min-norm witness W of the pooled hull, and moves by -h * W/||W||. Pooling can
only enlarge the hull, so ||W|| is a conservative step norm; the descent-rate
certificate is re-verified per trajectory by the test suite. A final bisection
lands the endpoint in [a - landing_slack, a].
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .composite import CompositeLevelFunction, phi_clarke_generators
from .convex import GeneratorSet, min_norm_point
from .errors import RetractionError
from .geometry import _as_point

MAX_BISECTIONS = 60
BACKTRACK_LIMIT = 40


@dataclass(frozen=True)
class FlowParams:
    band_low: float        # a
    band_high: float       # b
    mu_min: float          # required lower bound on delta(phi) in the band
    step: float            # h
    pool_radius: float     # rho
    max_steps: int
    landing_slack: float

    def __post_init__(self):
        if not self.band_low < self.band_high:
            raise ValueError("need a < b")
        if self.step <= 0 or self.mu_min <= 0 or self.landing_slack <= 0:
            raise ValueError("step, mu_min and landing_slack must be positive")
        if self.pool_radius < 0:
            raise ValueError("pool_radius must be nonnegative")
        floor = math.ceil((self.band_high - self.band_low) / (0.5 * self.mu_min * self.step))
        if self.max_steps < floor:
            raise ValueError(f"max_steps must be at least {floor} for this band and step")

    @classmethod
    def for_band(
        cls,
        a: float,
        b: float,
        mu_min: float,
        step: float | None = None,
        pool_radius: float | None = None,
        max_steps: int | None = None,
        landing_slack: float = 1e-6,
    ) -> "FlowParams":
        if step is None:
            step = 0.01 * (b - a) / mu_min
        if pool_radius is None:
            pool_radius = step / 2.0
        if max_steps is None:
            max_steps = 4 * math.ceil((b - a) / (0.5 * mu_min * step))
        return cls(
            band_low=a,
            band_high=b,
            mu_min=mu_min,
            step=step,
            pool_radius=pool_radius,
            max_steps=max_steps,
            landing_slack=landing_slack,
        )

    @property
    def rate_slack(self) -> float:
        return 0.1 * self.mu_min


class Termination(enum.Enum):
    LANDED = "landed"
    CRITICAL = "critical_encountered"
    STEP_LIMIT = "step_limit"


@dataclass(frozen=True)
class Trajectory:
    vertices: np.ndarray     # (k, d) polyline
    phi_values: np.ndarray   # (k,)
    arc_length: float
    termination: Termination
    critical_point: np.ndarray | None = None

    @property
    def start(self) -> np.ndarray:
        return self.vertices[0]

    @property
    def end(self) -> np.ndarray:
        return self.vertices[-1]


def _pooled_witness(clf: CompositeLevelFunction, x: np.ndarray, rho: float) -> np.ndarray:
    gens = [phi_clarke_generators(clf, x).vectors]
    if rho > 0:
        d = x.shape[0]
        for k in range(d):
            for s in (-1.0, 1.0):
                probe = x.copy()
                probe[k] += s * rho
                gens.append(phi_clarke_generators(clf, probe).vectors)
    pooled = GeneratorSet(np.concatenate(gens, axis=0))
    return min_norm_point(pooled).point


def descend(clf: CompositeLevelFunction, x0, params: FlowParams) -> Trajectory:
    """Follow -W/||W|| from x0 until phi lands in [a - landing_slack, a].

    Points already in the a-sublevel are fixed (single-vertex trajectory).
    """
    x = _as_point(x0, clf.offset.dimension)
    a, b = params.band_low, params.band_high
    phi0 = clf.phi(x)
    if phi0 > b + params.landing_slack:
        raise ValueError(f"start point has phi = {phi0!r} above the band top {b!r}")
    if phi0 <= a:
        return Trajectory(
            vertices=x[None, :].copy(),
            phi_values=np.array([phi0]),
            arc_length=0.0,
            termination=Termination.LANDED,
        )

    verts = [x.copy()]
    phis = [phi0]
    arc = 0.0
    termination = Termination.STEP_LIMIT
    critical = None

    for _ in range(params.max_steps):
        w = _pooled_witness(clf, x, params.pool_radius)
        wnorm = float(np.linalg.norm(w))
        if wnorm < params.mu_min:
            termination = Termination.CRITICAL
            critical = x.copy()
            break
        direction = w / wnorm
        phi_here = phis[-1]

        step = params.step
        best = None
        for _ in range(BACKTRACK_LIMIT):
            cand = x - step * direction
            phi_cand = clf.phi(cand)
            if phi_cand <= phi_here:
                best = (cand, phi_cand, step)
                break
            step *= 0.5
        if best is None:
            termination = Termination.CRITICAL
            critical = x.copy()
            break
        cand, phi_cand, step = best

        if phi_cand < a - params.landing_slack:
            # bisect the step length into the landing window [a - slack, a]
            lo, hi = 0.0, step
            landed = None
            for _ in range(MAX_BISECTIONS):
                mid = 0.5 * (lo + hi)
                probe = x - mid * direction
                phi_probe = clf.phi(probe)
                if phi_probe > a:
                    lo = mid
                elif phi_probe < a - params.landing_slack:
                    hi = mid
                else:
                    landed = (probe, phi_probe, mid)
                    break
            if landed is None:
                probe = x - hi * direction
                landed = (probe, clf.phi(probe), hi)
            cand, phi_cand, step = landed

        verts.append(cand.copy())
        phis.append(phi_cand)
        arc += step
        x = cand
        if phi_cand <= a:
            termination = Termination.LANDED
            break

    return Trajectory(
        vertices=np.asarray(verts),
        phi_values=np.asarray(phis),
        arc_length=arc,
        termination=termination,
        critical_point=critical,
    )


@dataclass(frozen=True)
class RetractionSummary:
    start: np.ndarray
    end: np.ndarray
    phi_start: float
    phi_end: float
    arc_length: float
    steps: int


def retract_samples(
    clf: CompositeLevelFunction, samples, params: FlowParams
) -> list[RetractionSummary]:
    """Descend every sample; the batch fails if any trajectory does not land."""
    out = []
    failures = []
    for i, x0 in enumerate(np.asarray(samples, dtype=float)):
        traj = descend(clf, x0, params)
        if traj.termination is not Termination.LANDED:
            failures.append((i, traj))
            continue
        out.append(
            RetractionSummary(
                start=traj.start,
                end=traj.end,
                phi_start=float(traj.phi_values[0]),
                phi_end=float(traj.phi_values[-1]),
                arc_length=traj.arc_length,
                steps=traj.vertices.shape[0] - 1,
            )
        )
    if failures:
        kinds = {t.termination.value for _, t in failures}
        raise RetractionError(
            f"{len(failures)} of {len(samples)} trajectories failed ({', '.join(sorted(kinds))})",
            failures,
        )
    return out
