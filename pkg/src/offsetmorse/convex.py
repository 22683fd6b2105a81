"""Min-norm point in a convex hull, cone membership, and polar-cone tests.

The min-norm solver is a Wolfe-style active-set scheme: a major cycle adds
the generator most violating the supporting-hyperplane condition (ties broken
by lowest index), a minor cycle projects onto the affine hull of the current
corral and drops vertices whose affine weight goes nonpositive. Affine
subproblems are solved by SVD least squares with cutoff 1e-12, so affinely
dependent corrals are handled by rank truncation. Finite termination holds in
exact arithmetic; an iteration cap guards the floating-point version.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import nnls

from .errors import EmptyInput

RANK_TOL = 1e-12


@dataclass(frozen=True)
class GeneratorSet:
    """Finite vector list; read as Conv{v_i} by hull ops, Cone{v_i} by cone ops."""

    vectors: np.ndarray

    def __post_init__(self):
        vec = np.asarray(self.vectors, dtype=float)
        if vec.ndim != 2 or vec.shape[0] == 0:
            raise EmptyInput("a generator set needs at least one vector")
        if not np.all(np.isfinite(vec)):
            raise ValueError("generators must be finite")
        vec = vec.copy()
        vec.flags.writeable = False
        object.__setattr__(self, "vectors", vec)

    @property
    def dimension(self) -> int:
        return self.vectors.shape[1]

    @property
    def size(self) -> int:
        return self.vectors.shape[0]


@dataclass(frozen=True)
class MinNormResult:
    point: np.ndarray        # projection of the origin onto the hull
    norm: float
    coefficients: np.ndarray  # convex weights over the input generators


@dataclass(frozen=True)
class ConeMembership:
    contains: bool
    residual: float
    coefficients: np.ndarray  # nonnegative combination realizing the residual


def _affine_min_weights(basis: np.ndarray) -> np.ndarray:
    """Weights (summing to 1, sign-free) minimizing ||sum w_i b_i||."""
    k = basis.shape[0]
    gram = basis @ basis.T
    system = np.zeros((k + 1, k + 1))
    system[:k, :k] = gram
    system[:k, k] = 1.0
    system[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    sol, *_ = np.linalg.lstsq(system, rhs, rcond=RANK_TOL)
    w = sol[:k]
    s = w.sum()
    if abs(s) > RANK_TOL:
        w = w / s
    return w


def min_norm_point(gens: GeneratorSet, tol: float = RANK_TOL, max_iter: int | None = None) -> MinNormResult:
    """Nearest point to the origin in Conv(gens), with its convex weights.

    Deterministic for a fixed input order; the result satisfies the
    supporting-hyperplane certificate <v, W> >= ||W||^2 - 1e-9 for every
    generator v.
    """
    v = gens.vectors
    m, _ = v.shape
    scale = max(1.0, float(np.max(np.sum(v * v, axis=1))))
    if max_iter is None:
        max_iter = 16 * (m + 2) * (gens.dimension + 2)

    norms2 = np.sum(v * v, axis=1)
    start = int(np.argmin(norms2))  # argmin takes the lowest index on ties
    corral = [start]
    lam = np.array([1.0])
    x = v[start].copy()

    for _ in range(max_iter):
        dots = v @ x
        xx = float(x @ x)
        entering = int(np.argmin(dots))
        if dots[entering] >= xx - tol * scale:
            break
        if entering in corral:
            break  # numerically stalled; certificate asserted by callers/tests
        corral.append(entering)
        lam = np.append(lam, 0.0)

        while True:
            alpha = _affine_min_weights(v[corral])
            if np.all(alpha >= -RANK_TOL):
                lam = np.clip(alpha, 0.0, None)
                break
            # move from lam toward alpha until the first weight hits zero
            neg = alpha < -RANK_TOL
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios = lam[neg] / (lam[neg] - alpha[neg])
            theta = float(min(1.0, np.min(ratios)))
            lam = (1.0 - theta) * lam + theta * alpha
            keep = lam > RANK_TOL
            if not np.any(keep):
                keep[int(np.argmax(lam))] = True
            corral = [c for c, k in zip(corral, keep) if k]
            lam = lam[keep]
        x = lam @ v[corral]

    coeff = np.zeros(m)
    for c, w in zip(corral, lam):
        coeff[c] += w
    coeff = np.clip(coeff, 0.0, None)
    total = coeff.sum()
    if total > 0:
        coeff /= total
    else:
        coeff[corral[0]] = 1.0
    point = coeff @ v
    return MinNormResult(point=point, norm=float(np.linalg.norm(point)), coefficients=coeff)


def delta(gens: GeneratorSet) -> float:
    """Distance from the origin to Conv(gens)."""
    return min_norm_point(gens).norm


def cone_membership(gens: GeneratorSet, v, tol: float) -> ConeMembership:
    """Whether v lies in the cone generated by gens, via nonnegative least squares."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    v = np.asarray(v, dtype=float)
    coeff, residual = nnls(gens.vectors.T, v)
    contains = residual <= tol * max(1.0, float(np.linalg.norm(v)))
    return ConeMembership(contains=bool(contains), residual=float(residual), coefficients=coeff)


def polar_test(gens: GeneratorSet, u, tol: float = 0.0) -> bool:
    """True iff <u, g> <= tol for every generator g."""
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    u = np.asarray(u, dtype=float)
    return bool(np.all(gens.vectors @ u <= tol))
