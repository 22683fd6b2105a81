"""Smooth test functions and the composite level function phi = d-part + level-part.

Two function families are supported, both with constant Hessians:

  * linear:      f(x) = <u, x>,            grad = u,        hess = 0
  * quadratic:   f(x) = (s/2) ||x - p||^2, grad = s (x - p), hess = s * I

phi(x) = max(d_Y(x) - epsilon, 0) + max(f(x) - c, 0) vanishes exactly on the
sublevel body X_c. Generator sets for its Clarke gradient follow a case split
on (membership of x in the offset) x (sign of f - c within tol_level); on the
degenerate collision bands the union of the adjacent cases is emitted, which
is a superset hull and therefore a safe lower bound for delta.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .convex import GeneratorSet, min_norm_point
from .errors import ScenarioError
from .geometry import (
    DEFAULT_TOL_BOUNDARY,
    DEFAULT_TOL_NEAR,
    OffsetSet,
    Region,
    _as_point,
    classify,
)

DEFAULT_TOL_LEVEL = 1e-7


class Family(enum.Enum):
    LINEAR = "linear"
    QUADRATIC = "quadratic"


@dataclass(frozen=True)
class SmoothFunction:
    """A member of the linear or quadratic family on R^d."""

    family: Family
    vector: np.ndarray  # linear: the form u; quadratic: the center p
    sign: int = 1       # quadratic only: +1 or -1

    def __post_init__(self):
        vec = np.asarray(self.vector, dtype=float)
        if vec.ndim != 1 or not np.all(np.isfinite(vec)):
            raise ValueError("function parameter must be a finite vector")
        if self.family is Family.LINEAR and np.linalg.norm(vec) == 0:
            raise ValueError("a linear form needs a nonzero vector")
        if self.family is Family.QUADRATIC and self.sign not in (1, -1):
            raise ValueError("quadratic sign must be +1 or -1")
        vec = vec.copy()
        vec.flags.writeable = False
        object.__setattr__(self, "vector", vec)

    @classmethod
    def linear(cls, u) -> "SmoothFunction":
        return cls(family=Family.LINEAR, vector=np.asarray(u, dtype=float))

    @classmethod
    def quadratic(cls, p, sign: int) -> "SmoothFunction":
        return cls(family=Family.QUADRATIC, vector=np.asarray(p, dtype=float), sign=int(sign))

    @classmethod
    def from_spec(cls, doc: dict) -> "SmoothFunction":
        """Build from the scenario-file form {"type": "linear", "u": [...]} etc."""
        if not isinstance(doc, dict) or "type" not in doc:
            raise ScenarioError("function spec must be an object with a 'type' field")
        kind = doc["type"]
        if kind == "linear":
            extra = set(doc) - {"type", "u"}
            if extra:
                raise ScenarioError(f"unknown function fields: {sorted(extra)}")
            if "u" not in doc:
                raise ScenarioError("linear function needs 'u'")
            return cls.linear(doc["u"])
        if kind == "quadratic":
            extra = set(doc) - {"type", "p", "s"}
            if extra:
                raise ScenarioError(f"unknown function fields: {sorted(extra)}")
            if "p" not in doc or "s" not in doc:
                raise ScenarioError("quadratic function needs 'p' and 's'")
            return cls.quadratic(doc["p"], doc["s"])
        raise ScenarioError(f"unsupported function type {kind!r}")

    def to_dict(self) -> dict:
        if self.family is Family.LINEAR:
            return {"type": "linear", "u": [float(c) for c in self.vector]}
        return {"type": "quadratic", "p": [float(c) for c in self.vector], "s": self.sign}

    @property
    def dimension(self) -> int:
        return self.vector.shape[0]

    def value(self, x) -> float:
        x = _as_point(x, self.dimension)
        if self.family is Family.LINEAR:
            return float(self.vector @ x)
        diff = x - self.vector
        return 0.5 * self.sign * float(diff @ diff)

    def value_many(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        if self.family is Family.LINEAR:
            return pts @ self.vector
        diff = pts - self.vector
        return 0.5 * self.sign * np.sum(diff * diff, axis=1)

    def gradient(self, x) -> np.ndarray:
        x = _as_point(x, self.dimension)
        if self.family is Family.LINEAR:
            return self.vector.copy()
        return self.sign * (x - self.vector)

    def hessian(self, x=None) -> np.ndarray:
        d = self.dimension
        if self.family is Family.LINEAR:
            return np.zeros((d, d))
        return self.sign * np.eye(d)

    def lipschitz_on_box(self, box: np.ndarray) -> float:
        """Upper bound for ||grad f|| over an axis-aligned box ((2, d) min/max)."""
        if self.family is Family.LINEAR:
            return float(np.linalg.norm(self.vector))
        corners = np.abs(np.stack([box[0] - self.vector, box[1] - self.vector]))
        return float(np.linalg.norm(corners.max(axis=0)))


@dataclass(frozen=True)
class CompositeLevelFunction:
    """phi(x) = max(d_Y(x) - epsilon, 0) + max(f(x) - c, 0); zero exactly on X_c."""

    offset: OffsetSet
    f: SmoothFunction
    c: float

    def __post_init__(self):
        if self.f.dimension != self.offset.dimension:
            raise ValueError("function and offset dimensions differ")

    def phi(self, x) -> float:
        return max(self.offset.signed_margin(x), 0.0) + max(self.f.value(x) - self.c, 0.0)

    def phi_many(self, pts: np.ndarray) -> np.ndarray:
        d = self.offset.cloud.distance_field(np.asarray(pts, dtype=float))
        fv = self.f.value_many(pts)
        return np.maximum(d - self.offset.epsilon, 0.0) + np.maximum(fv - self.c, 0.0)


def phi_value(clf: CompositeLevelFunction, x) -> float:
    return clf.phi(x)


def phi_clarke_generators(
    clf: CompositeLevelFunction,
    x,
    tol_boundary: float = DEFAULT_TOL_BOUNDARY,
    tol_level: float = DEFAULT_TOL_LEVEL,
    tol_near: float = DEFAULT_TOL_NEAR,
) -> GeneratorSet:
    """Generators whose hull is the Clarke gradient of phi at x (superset on bands).

    Case split: membership of x in the offset (interior/boundary/outside)
    times sign(f(x) - c) within tol_level. Interval factors [0,1]*g are
    realized by emitting both endpoint generators; hulls coincide.
    """
    x = _as_point(x, clf.offset.dimension)
    label = classify(clf.offset, x, tol_boundary)
    level = clf.f.value(x) - clf.c
    grad = clf.f.gradient(x)
    d = clf.offset.dimension
    zero = np.zeros(d)

    rows: list[np.ndarray] = []
    if label.region is Region.INTERIOR:
        if level > tol_level:
            rows = [grad]
        elif level < -tol_level:
            rows = [zero]
        else:
            rows = [zero, grad]
    else:
        dists = clf.offset.cloud.distances_from(x)
        dmin = dists.min()
        idx = np.flatnonzero(dists <= dmin + tol_near)
        gens = [(x - clf.offset.cloud.points[i]) / dists[i] for i in idx]
        if label.region is Region.OUTSIDE:
            if level < -tol_level:
                rows = gens
            elif level > tol_level:
                rows = [g + grad for g in gens]
            else:
                rows = gens + [g + grad for g in gens]
        else:  # boundary band
            if level < -tol_level:
                rows = [zero] + gens
            elif level > tol_level:
                rows = [grad] + [g + grad for g in gens]
            else:
                rows = [zero, grad] + gens + [g + grad for g in gens]
    return GeneratorSet(np.asarray(rows))


def delta_phi(
    clf: CompositeLevelFunction,
    x,
    tol_boundary: float = DEFAULT_TOL_BOUNDARY,
    tol_level: float = DEFAULT_TOL_LEVEL,
    tol_near: float = DEFAULT_TOL_NEAR,
) -> float:
    return min_norm_point(phi_clarke_generators(clf, x, tol_boundary, tol_level, tol_near)).norm
