"""Exception types shared across the package."""

from __future__ import annotations


class OffsetMorseError(RuntimeError):
    """Base class for all package-specific failures."""


class DimensionMismatch(OffsetMorseError):
    """A query vector does not match the ambient dimension."""


class EmptyInput(OffsetMorseError):
    """An operation received an empty point list where one is required."""


class BasePointOnCloud(OffsetMorseError):
    """Distance-gradient query at a point (numerically) on the cloud itself."""


class EmptyShell(OffsetMorseError):
    """No grid sample landed in the requested distance shell."""


class NotOnBoundary(OffsetMorseError):
    """Normal-cone query at a point not on the offset boundary."""


class TangentPair(OffsetMorseError):
    """Two samples sit at distance ~2*epsilon: degenerate arrangement."""

    def __init__(self, i: int, j: int, separation: float):
        super().__init__(
            f"samples {i} and {j} are tangent at separation {separation!r}; "
            "perturb the scenario"
        )
        self.pair = (i, j)
        self.separation = separation


class GradientVanishesOnX(OffsetMorseError):
    """The test function's gradient vanishes at a critical candidate."""


class CreaseStratum(OffsetMorseError):
    """Restricted Hessian requested on a crease (no finite tangent direction)."""


class GridTooCoarse(OffsetMorseError):
    """Raster spacing above the hard floor epsilon/10."""


class UnstableGrid(OffsetMorseError):
    """Betti numbers failed to stabilize across grid refinements."""


class TooManyCellsPerLevel(OffsetMorseError):
    """More than 8 cells share one critical value; assignment search refused."""


class NonMorseScenario(OffsetMorseError):
    """A critical record is degenerate; the scenario must be perturbed."""


class RetractionError(OffsetMorseError):
    """Batch retraction hit a critical point or ran out of steps."""

    def __init__(self, message: str, failures: list):
        super().__init__(message)
        self.failures = failures


class ScenarioError(OffsetMorseError):
    """Malformed scenario document."""
