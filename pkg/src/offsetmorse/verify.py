"""End-to-end scenario verification against the cubical-homology oracle.

Pipeline: certify the offset level, enumerate the boundary arrangement, find
and classify critical points, sweep stabilized Betti numbers at planned
filtration values, then evaluate three checks:

  (i)   constancy of (b0, b1) on every open interval between critical values;
  (ii)  handle attachment: across each critical value the Betti delta is
        realizable by the level's cell multiset, one cell at a time;
  (iii) total Euler bookkeeping: chi(final) equals the signed cell count.

A non-Certified certificate yields a NotApplicable report with no claims.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

import numpy as np

from .arrangement import (
    CriticalPointRecord,
    MorseReport,
    check_morse,
    enumerate_strata,
    find_critical_points,
)
from .clarke import RegularValueCertificate, Verdict, certify_regular_value
from .composite import CompositeLevelFunction, delta_phi
from .errors import NonMorseScenario, TooManyCellsPerLevel
from .homology import BettiProfile, BettiRow, BettiSweeper, GridSpec, SublevelRaster
from .scenario import Scenario

BAND_WIDTH = 0.05          # phi-band height for the regularity probe
BAND_SAMPLE_CAP = 200
INTERVAL_CLAMP = 0.45      # probes stay inside their open interval


@dataclass(frozen=True)
class IntervalResult:
    low: float | None
    high: float | None
    betti: tuple[int, int] | None
    passed: bool
    rows: int


def check_constancy(
    profile: BettiProfile, critical_values: list[float]
) -> tuple[bool, list[IntervalResult]]:
    """(b0, b1) must be constant on every open inter-critical interval."""
    crit = sorted(critical_values)
    edges = [None, *crit, None]
    results = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        rows = [
            (r.b0, r.b1)
            for r in profile.rows
            if (lo is None or r.c > lo) and (hi is None or r.c < hi)
        ]
        distinct = sorted(set(rows))
        passed = len(distinct) <= 1
        results.append(
            IntervalResult(
                low=lo,
                high=hi,
                betti=distinct[0] if len(distinct) == 1 else None,
                passed=passed,
                rows=len(rows),
            )
        )
    return all(r.passed for r in results), results


def check_handle_attachment(
    before: tuple[int, int], after: tuple[int, int], lambdas: list[int]
) -> bool:
    """Can the cell multiset turn `before` into `after`, one cell at a time?

    Each cell of dimension k either creates a k-cycle (b_k += 1) or kills a
    (k-1)-cycle (b_{k-1} -= 1); a 0-cell always creates a component.
    """
    if not lambdas:
        raise ValueError("lambdas must be nonempty")
    if len(lambdas) > 8:
        raise TooManyCellsPerLevel(f"{len(lambdas)} cells share one critical value")
    if sum((-1) ** k for k in lambdas) != (after[0] - after[1]) - (before[0] - before[1]):
        return False
    target = (after[0], after[1], 0)
    for choice in itertools.product((0, 1), repeat=len(lambdas)):
        b = [before[0], before[1], 0]
        ok = True
        for lam, kill in zip(lambdas, choice):
            if kill and lam >= 1:
                b[lam - 1] -= 1
                if b[lam - 1] < 0:
                    ok = False
                    break
            else:
                if lam > 2:
                    ok = False
                    break
                b[lam] += 1
        if ok and tuple(b) == target:
            return True
    return False


def check_euler_total(final_row: BettiRow, lambdas: list[int]) -> bool:
    return final_row.chi == sum((-1) ** k for k in lambdas)


@dataclass(frozen=True)
class VerificationReport:
    scenario_digest: dict
    certificate: RegularValueCertificate
    verdict: str  # "pass" | "fail" | "not_applicable"
    morse: MorseReport | None = None
    records: tuple[CriticalPointRecord, ...] = ()
    profile: BettiProfile | None = None
    checks: dict | None = None
    notes: tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self) -> dict:
        doc = {
            "scenario": self.scenario_digest,
            "certificate": self.certificate.to_dict(),
            "verdict": self.verdict,
            "notes": list(self.notes),
        }
        if self.morse is not None:
            doc["morse"] = self.morse.to_dict()
            doc["critical_table"] = [
                {
                    "value": value,
                    "multiplicity": len(idx),
                    "cell_dimensions": list(lams),
                    "records": [self.records[i].to_dict() for i in idx],
                }
                for value, idx, lams in self.morse.levels
            ]
        if self.profile is not None:
            doc["sweep"] = self.profile.to_dict()
        if self.checks is not None:
            doc["checks"] = self.checks
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def to_text(self) -> str:
        lines = [f"verdict: {self.verdict}"]
        lines.append(
            f"certificate: {self.certificate.verdict.value}"
            f" (mu_observed = {self.certificate.mu_observed:.6f},"
            f" required {self.certificate.mu_required})"
        )
        if self.morse is not None:
            lines.append(f"morse: {'ok' if self.morse.is_morse else 'degenerate'}")
            for value, idx, lams in self.morse.levels:
                lines.append(
                    f"  level {value:+.6f}: {len(idx)} critical point(s), cells {list(lams)}"
                )
        if self.profile is not None:
            lines.append("sweep:")
            for row in self.profile.rows:
                lines.append(
                    f"  c = {row.c:+.6f}: b0 = {row.b0}, b1 = {row.b1}, chi = {row.chi}"
                    f" (h = {row.resolution:g})"
                )
        if self.checks is not None:
            for name in ("constancy", "handle_attachment", "euler_total"):
                lines.append(f"check {name}: {'pass' if self.checks[name]['pass'] else 'FAIL'}")
        for note in self.notes:
            lines.append(f"note: {note}")
        return "\n".join(lines) + "\n"


def _scenario_digest(scenario: Scenario) -> dict:
    return {
        "dimension": scenario.cloud.dimension,
        "points": [[float(c) for c in p] for p in scenario.cloud.points],
        "epsilon": scenario.epsilon,
        "mu": scenario.mu_required,
        "function": scenario.function.to_dict(),
        "grid_h": scenario.grid_h,
    }


def plan_sweep_values(
    critical_values: list[float],
    base_offset: float,
    final_value: float,
) -> tuple[list[float], dict[float, tuple[float, float]]]:
    """Probe placement: interval midpoints plus clamped before/after probes.

    Returns the sorted value list and, per critical value, the (before, after)
    probe pair used by the handle check.
    """
    crit = sorted(critical_values)
    values: set[float] = set()
    probes: dict[float, tuple[float, float]] = {}
    for k, c in enumerate(crit):
        gap_below = c - crit[k - 1] if k > 0 else None
        gap_above = crit[k + 1] - c if k + 1 < len(crit) else None
        off_below = base_offset if gap_below is None else min(base_offset, INTERVAL_CLAMP * gap_below)
        off_above = base_offset if gap_above is None else min(base_offset, INTERVAL_CLAMP * gap_above)
        before, after = c - off_below, c + off_above
        probes[c] = (before, after)
        values.update((before, after))
    for c1, c2 in zip(crit, crit[1:]):
        values.add(0.5 * (c1 + c2))
    values.add(final_value)
    return sorted(values), probes


def _band_regularity_probe(
    scenario: Scenario, raster: SublevelRaster, c: float
) -> float | None:
    """Sampled inf of delta(phi) over the band 0 < phi <= BAND_WIDTH at level c."""
    clf = CompositeLevelFunction(offset=scenario.offset, f=scenario.function, c=c)
    phi = np.maximum(raster.distance - scenario.epsilon, 0.0) + np.maximum(
        raster.f_values.ravel() - c, 0.0
    )
    band = np.flatnonzero((phi > 1e-12) & (phi <= BAND_WIDTH))
    if band.size == 0:
        return None
    stride = max(1, band.size // BAND_SAMPLE_CAP)
    picks = band[::stride][:BAND_SAMPLE_CAP]
    tols = scenario.tolerances
    return float(
        min(
            delta_phi(clf, raster.points[i], tols.tol_boundary, tols.tol_level, tols.tol_near)
            for i in picks
        )
    )


def _band_probe_entry(
    scenario: Scenario, raster: SublevelRaster, c: float, shift: float
) -> dict:
    """Band infimum at a regular level and at nearby shifted levels."""
    entry = {"c": c, "shift": shift, "alpha": _band_regularity_probe(scenario, raster, c)}
    entry["alpha_shifted"] = [
        _band_regularity_probe(scenario, raster, c - shift),
        _band_regularity_probe(scenario, raster, c + shift),
    ]
    return entry


def run_scenario(scenario: Scenario) -> VerificationReport:
    """Full pipeline; raises TangentPair / NonMorseScenario / UnstableGrid."""
    offset = scenario.offset
    tols = scenario.tolerances
    digest = _scenario_digest(scenario)

    certificate = certify_regular_value(
        offset.cloud, scenario.epsilon, scenario.mu_required, tol_near=tols.tol_near
    )
    if certificate.verdict is not Verdict.CERTIFIED:
        return VerificationReport(
            scenario_digest=digest,
            certificate=certificate,
            verdict="not_applicable",
            notes=(f"certificate {certificate.verdict.value}: theorems not claimed",),
        )

    strata = enumerate_strata(offset, tol_tangent=tols.tol_tangent_factor * scenario.epsilon)
    records = find_critical_points(
        offset, scenario.function, strata, tol_wedge=tols.tol_wedge, tol_h=tols.tol_h
    )
    morse = check_morse(records, tol_sep=tols.tol_sep, tol_value=tols.tol_value)
    if not morse.is_morse:
        raise NonMorseScenario(
            f"{len(morse.degenerate_indices)} degenerate critical record(s); "
            "perturb the scenario"
        )

    grid = GridSpec.for_offset(offset, scenario.grid_h, scenario.grid_margin)
    sweeper = BettiSweeper(offset, scenario.function, grid)
    base_raster = sweeper._raster(grid)
    f_on_x = base_raster.f_values[base_raster.in_offset]
    f_min, f_max = float(f_on_x.min()), float(f_on_x.max())
    lip = scenario.function.lipschitz_on_box(np.asarray(grid.bounds).T)
    base_offset = max(
        4.0 * scenario.grid_h * lip,
        scenario.sweep_offset_fraction * max(f_max - f_min, 1e-6),
    )

    crit_values = [value for value, _, _ in morse.levels]
    final_value = max(f_max, crit_values[-1] if crit_values else f_max) + max(
        base_offset, scenario.grid_h
    )
    values, probes = plan_sweep_values(crit_values, base_offset, final_value)

    rows = [sweeper.stable_at(c) for c in values]
    profile = BettiProfile(rows=tuple(sorted(rows, key=lambda r: r.c)))
    by_c = {row.c: row for row in profile.rows}

    constancy_ok, intervals = check_constancy(profile, crit_values)
    notes: list[str] = []

    handle_results = []
    all_lambdas: list[int] = []
    for value, idx, lams in morse.levels:
        before_c, after_c = probes[value]
        before_row, after_row = by_c[before_c], by_c[after_c]
        before = (before_row.b0, before_row.b1)
        after = (after_row.b0, after_row.b1)
        ok = check_handle_attachment(before, after, list(lams))
        handle_results.append(
            {
                "value": value,
                "cells": list(lams),
                "before": list(before),
                "after": list(after),
                "pass": ok,
            }
        )
        all_lambdas.extend(lams)
        if before == after:
            notes.append(
                f"no visible homology change at value {value:+.6f} "
                "(cell attachments cancel in homology)"
            )
    handle_ok = all(h["pass"] for h in handle_results)

    final_row = profile.rows[-1]
    euler_ok = check_euler_total(final_row, all_lambdas)

    band_probes = []
    for c1, c2 in zip(crit_values, crit_values[1:]):
        mid = 0.5 * (c1 + c2)
        shift = min(0.01, 0.1 * (c2 - c1))
        band_probes.append(_band_probe_entry(scenario, base_raster, mid, shift))
    band_probes.append(_band_probe_entry(scenario, base_raster, final_value, 0.01))

    checks = {
        "constancy": {
            "pass": constancy_ok,
            "intervals": [
                {
                    "low": r.low,
                    "high": r.high,
                    "betti": list(r.betti) if r.betti is not None else None,
                    "rows": r.rows,
                    "pass": r.passed,
                }
                for r in intervals
            ],
        },
        "handle_attachment": {"pass": handle_ok, "levels": handle_results},
        "euler_total": {
            "pass": euler_ok,
            "chi_final": final_row.chi,
            "signed_cell_sum": sum((-1) ** k for k in all_lambdas),
        },
        "band_delta": band_probes,
    }

    passed = constancy_ok and handle_ok and euler_ok and morse.is_morse
    return VerificationReport(
        scenario_digest=digest,
        certificate=certificate,
        verdict="pass" if passed else "fail",
        morse=morse,
        records=tuple(records),
        profile=profile,
        checks=checks,
        notes=tuple(notes),
    )
