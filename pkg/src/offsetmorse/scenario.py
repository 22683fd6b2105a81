"""Scenario files: a single JSON document describing one verification run."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .composite import SmoothFunction
from .errors import ScenarioError
from .geometry import OffsetSet, PointCloud, load_points_text

TOLERANCE_DEFAULTS = {
    "tol_near": 1e-9,
    "tol_boundary": 1e-7,
    "tol_level": 1e-7,
    "tol_wedge": 1e-6,
    "tol_value": 1e-7,
    "tol_sep": 1e-5,
    "tol_h": 1e-7,
    "tol_tangent_factor": 1e-7,
}


@dataclass(frozen=True)
class Tolerances:
    tol_near: float = 1e-9
    tol_boundary: float = 1e-7
    tol_level: float = 1e-7
    tol_wedge: float = 1e-6
    tol_value: float = 1e-7
    tol_sep: float = 1e-5
    tol_h: float = 1e-7
    tol_tangent_factor: float = 1e-7


@dataclass(frozen=True)
class FlowSpec:
    band: tuple[float, float] | None = None
    mu_min: float | None = None
    step: float | None = None
    pool_radius: float | None = None
    max_steps: int | None = None
    landing_slack: float | None = None
    start: tuple[float, ...] | None = None


@dataclass(frozen=True)
class Scenario:
    cloud: PointCloud
    epsilon: float
    mu_required: float
    function: SmoothFunction
    grid_h: float
    grid_margin: float | None = None
    sweep_offset_fraction: float = 1e-4
    flow: FlowSpec = field(default_factory=FlowSpec)
    tolerances: Tolerances = field(default_factory=Tolerances)

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ScenarioError("epsilon must be positive")
        if not (0 < self.mu_required <= 1):
            raise ScenarioError("mu must lie in (0, 1]")
        if self.function.dimension != self.cloud.dimension:
            raise ScenarioError("function and point dimensions differ")

    @property
    def offset(self) -> OffsetSet:
        return OffsetSet(cloud=self.cloud, epsilon=self.epsilon)


def _reject_unknown(doc: dict, allowed: set[str], where: str) -> None:
    extra = set(doc) - allowed
    if extra:
        raise ScenarioError(f"unknown {where} fields: {sorted(extra)}")


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"invalid JSON in {path}: {exc}") from exc
    return parse_scenario(doc, base_dir=path.parent)


def parse_scenario(doc: dict, base_dir: Path | None = None) -> Scenario:
    if not isinstance(doc, dict):
        raise ScenarioError("scenario must be a JSON object")
    allowed = {
        "dimension", "points", "points_file", "epsilon", "mu",
        "function", "grid", "sweep", "flow", "tolerances",
    }
    _reject_unknown(doc, allowed, "scenario")
    for key in ("epsilon", "mu", "function"):
        if key not in doc:
            raise ScenarioError(f"scenario is missing {key!r}")

    if ("points" in doc) == ("points_file" in doc):
        raise ScenarioError("give exactly one of 'points' or 'points_file'")
    if "points" in doc:
        cloud = PointCloud(np.asarray(doc["points"], dtype=float))
    else:
        file_path = Path(doc["points_file"])
        if not file_path.is_absolute() and base_dir is not None:
            file_path = base_dir / file_path
        cloud = load_points_text(file_path)

    if "dimension" in doc and int(doc["dimension"]) != cloud.dimension:
        raise ScenarioError(
            f"declared dimension {doc['dimension']} but points have dimension {cloud.dimension}"
        )

    function = SmoothFunction.from_spec(doc["function"])
    epsilon = float(doc["epsilon"])

    grid_doc = doc.get("grid", {})
    _reject_unknown(grid_doc, {"h", "margin"}, "grid")
    grid_h = float(grid_doc.get("h", epsilon / 50.0))
    grid_margin = float(grid_doc["margin"]) if "margin" in grid_doc else None

    sweep_doc = doc.get("sweep", {})
    _reject_unknown(sweep_doc, {"offset_fraction"}, "sweep")
    offset_fraction = float(sweep_doc.get("offset_fraction", 1e-4))

    flow_doc = doc.get("flow", {})
    _reject_unknown(
        flow_doc,
        {"band", "mu_min", "step", "pool_radius", "max_steps", "landing_slack", "start"},
        "flow",
    )
    band = tuple(float(v) for v in flow_doc["band"]) if "band" in flow_doc else None
    if band is not None and len(band) != 2:
        raise ScenarioError("flow band must be [a, b]")
    flow = FlowSpec(
        band=band,
        mu_min=float(flow_doc["mu_min"]) if "mu_min" in flow_doc else None,
        step=float(flow_doc["step"]) if "step" in flow_doc else None,
        pool_radius=float(flow_doc["pool_radius"]) if "pool_radius" in flow_doc else None,
        max_steps=int(flow_doc["max_steps"]) if "max_steps" in flow_doc else None,
        landing_slack=float(flow_doc["landing_slack"]) if "landing_slack" in flow_doc else None,
        start=tuple(float(v) for v in flow_doc["start"]) if "start" in flow_doc else None,
    )

    tol_doc = doc.get("tolerances", {})
    _reject_unknown(tol_doc, set(TOLERANCE_DEFAULTS), "tolerances")
    tol_kwargs = {k: float(tol_doc.get(k, v)) for k, v in TOLERANCE_DEFAULTS.items()}

    return Scenario(
        cloud=cloud,
        epsilon=epsilon,
        mu_required=float(doc["mu"]),
        function=function,
        grid_h=grid_h,
        grid_margin=grid_margin,
        sweep_offset_fraction=offset_fraction,
        flow=flow,
        tolerances=Tolerances(**tol_kwargs),
    )
