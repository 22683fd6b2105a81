"""Command-line interface.

Exit codes: 0 all checks pass, 1 check failure, 2 not applicable (certificate
not Certified, or malformed scenario), 3 degenerate scenario (tangent pair,
vanishing gradient, non-Morse), 4 unstable grid.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .arrangement import check_morse, enumerate_strata, find_critical_points
from .clarke import Verdict, certify_regular_value
from .composite import CompositeLevelFunction
from .errors import (
    GradientVanishesOnX,
    NonMorseScenario,
    OffsetMorseError,
    ScenarioError,
    TangentPair,
    TooManyCellsPerLevel,
    UnstableGrid,
)
from .flow import FlowParams, descend
from .scenario import Scenario, load_scenario
from .verify import VerificationReport, run_scenario

EXIT_PASS = 0
EXIT_CHECK_FAILURE = 1
EXIT_NOT_APPLICABLE = 2
EXIT_DEGENERATE = 3
EXIT_UNSTABLE = 4

DEGENERATE_ERRORS = (TangentPair, GradientVanishesOnX, NonMorseScenario, TooManyCellsPerLevel)


def _emit(text: str, out: str | None) -> None:
    if out:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    else:
        sys.stdout.write(text)


def _csv_path(args, name: str) -> Path | None:
    if not args.csv_dir:
        return None
    directory = Path(args.csv_dir)
    directory.mkdir(parents=True, exist_ok=True)
    return directory / name


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _figures_enabled(args) -> bool:
    return bool(args.csv_dir) and not args.no_figures


def _scenario(args) -> Scenario:
    return load_scenario(args.scenario)


def _cmd_certify(args) -> int:
    scenario = _scenario(args)
    cert = certify_regular_value(
        scenario.cloud, scenario.epsilon, scenario.mu_required,
        tol_near=scenario.tolerances.tol_near,
    )
    _emit(json.dumps(cert.to_dict(), sort_keys=True, indent=2) + "\n", args.out)
    path = _csv_path(args, "certificate.csv")
    if path is not None and cert.shell_points is not None:
        _write_csv(
            path,
            ["x", "y", "delta"],
            [[float(p[0]), float(p[1]), float(d)]
             for p, d in zip(cert.shell_points, cert.shell_deltas)],
        )
        if _figures_enabled(args):
            from .plots import certificate_figure

            certificate_figure(cert, path.with_suffix(".png"))
    return EXIT_PASS if cert.verdict is Verdict.CERTIFIED else EXIT_NOT_APPLICABLE


def _critical_rows(records) -> list[list]:
    rows = []
    for rec in records:
        doc = rec.to_dict()
        rows.append(
            [
                doc["location"][0], doc["location"][1], doc["value"],
                doc["gradient_norm"], doc["normal"][0], doc["normal"][1],
                doc["stratum"], " ".join(str(b) for b in doc["balls"]),
                "" if doc["hessian_restricted"] is None else doc["hessian_restricted"],
                doc["index"], doc["infinite_count"], doc["cell_dimension"],
                int(doc["degenerate"]), doc["degenerate_reason"] or "",
            ]
        )
    return rows


def _cmd_critical(args) -> int:
    scenario = _scenario(args)
    offset = scenario.offset
    tols = scenario.tolerances
    strata = enumerate_strata(offset, tol_tangent=tols.tol_tangent_factor * scenario.epsilon)
    records = find_critical_points(
        offset, scenario.function, strata, tol_wedge=tols.tol_wedge, tol_h=tols.tol_h
    )
    morse = check_morse(records, tol_sep=tols.tol_sep, tol_value=tols.tol_value)
    doc = [r.to_dict() for r in records]
    _emit(json.dumps(doc, sort_keys=True, indent=2) + "\n", args.out)
    sys.stderr.write(f"morse: {'ok' if morse.is_morse else 'degenerate'}\n")
    path = _csv_path(args, "critical.csv")
    if path is not None:
        _write_csv(
            path,
            ["x", "y", "value", "gradient_norm", "normal_x", "normal_y", "stratum",
             "balls", "hessian_restricted", "index", "infinite_count",
             "cell_dimension", "degenerate", "reason"],
            _critical_rows(records),
        )
        if _figures_enabled(args):
            from .plots import arrangement_figure

            arrangement_figure(offset, strata, records, path.with_suffix(".png"))
    return EXIT_PASS if morse.is_morse else EXIT_DEGENERATE


def _sweep_outputs(args, report: VerificationReport, scenario: Scenario) -> None:
    path = _csv_path(args, "sweep.csv")
    if path is None or report.profile is None:
        return
    _write_csv(
        path,
        ["c", "b0", "b1", "chi", "resolution", "stable"],
        [[r.c, r.b0, r.b1, r.chi, r.resolution, int(r.stable)] for r in report.profile.rows],
    )
    crit_path = _csv_path(args, "critical.csv")
    _write_csv(
        crit_path,
        ["x", "y", "value", "gradient_norm", "normal_x", "normal_y", "stratum",
         "balls", "hessian_restricted", "index", "infinite_count",
         "cell_dimension", "degenerate", "reason"],
        _critical_rows(report.records),
    )
    if _figures_enabled(args):
        from .plots import arrangement_figure, certificate_figure, sweep_figure

        crit_values = [value for value, _, _ in report.morse.levels] if report.morse else []
        sweep_figure(report.profile, crit_values, path.with_suffix(".png"))
        strata = enumerate_strata(scenario.offset)
        arrangement_figure(
            scenario.offset, strata, list(report.records), crit_path.with_suffix(".png")
        )
        certificate_figure(report.certificate, (Path(args.csv_dir) / "certificate.png"))


def _report_exit_code(report: VerificationReport) -> int:
    if report.verdict == "not_applicable":
        return EXIT_NOT_APPLICABLE
    return EXIT_PASS if report.passed else EXIT_CHECK_FAILURE


def _cmd_sweep(args) -> int:
    scenario = _scenario(args)
    report = run_scenario(scenario)
    if report.profile is None:
        _emit(report.to_json(), args.out)
        return _report_exit_code(report)
    lines = ["c,b0,b1,chi,resolution,stable"]
    for r in report.profile.rows:
        lines.append(f"{r.c!r},{r.b0},{r.b1},{r.chi},{r.resolution!r},{int(r.stable)}")
    _emit("\n".join(lines) + "\n", args.out)
    _sweep_outputs(args, report, scenario)
    return _report_exit_code(report)


def _cmd_flow(args) -> int:
    scenario = _scenario(args)
    flow_spec = scenario.flow
    band = _parse_pair(args.band) if args.band else flow_spec.band
    if band is None:
        raise ScenarioError("flow needs --band a,b (or a 'flow.band' scenario entry)")
    start = _parse_pair(args.start) if args.start else flow_spec.start
    if start is None:
        raise ScenarioError("flow needs --start x,y (or a 'flow.start' scenario entry)")
    mu_min = args.mu_min if args.mu_min is not None else flow_spec.mu_min
    if mu_min is None:
        raise ScenarioError("flow needs --mu-min (or a 'flow.mu_min' scenario entry)")
    level = args.level if args.level is not None else float("inf")
    clf = CompositeLevelFunction(offset=scenario.offset, f=scenario.function, c=level)
    params = FlowParams.for_band(
        band[0], band[1], mu_min,
        step=flow_spec.step, pool_radius=flow_spec.pool_radius,
        max_steps=flow_spec.max_steps,
        landing_slack=flow_spec.landing_slack or 1e-6,
    )
    traj = descend(clf, np.asarray(start, dtype=float), params)
    lines = ["vertex,x,y,phi"]
    for i, (v, p) in enumerate(zip(traj.vertices, traj.phi_values)):
        lines.append(f"{i},{float(v[0])!r},{float(v[1])!r},{float(p)!r}")
    _emit("\n".join(lines) + "\n", args.out)
    sys.stderr.write(
        f"termination: {traj.termination.value}, arc_length = {traj.arc_length!r}\n"
    )
    path = _csv_path(args, "flow.csv")
    if path is not None:
        _write_csv(
            path,
            ["vertex", "x", "y", "phi"],
            [[i, float(v[0]), float(v[1]), float(p)]
             for i, (v, p) in enumerate(zip(traj.vertices, traj.phi_values))],
        )
        if _figures_enabled(args):
            from .plots import flow_figure

            strata = enumerate_strata(scenario.offset)
            flow_figure(scenario.offset, strata, [traj], path.with_suffix(".png"))
    return EXIT_PASS if traj.termination.value == "landed" else EXIT_CHECK_FAILURE


def _verify_one(args, scenario_path: Path) -> int:
    scenario = load_scenario(scenario_path)
    report = run_scenario(scenario)
    out_lines = [f"scenario: {scenario_path}"]
    out_lines.append(f"certificate: {report.certificate.verdict.value}")
    if report.checks is not None:
        for name in ("constancy", "handle_attachment", "euler_total"):
            status = "pass" if report.checks[name]["pass"] else "FAIL"
            out_lines.append(f"check {name}: {status}")
    out_lines.append(f"verdict: {report.verdict}")
    _emit("\n".join(out_lines) + "\n", args.out)
    _sweep_outputs(args, report, scenario)
    return _report_exit_code(report)


def _cmd_verify(args) -> int:
    if args.all:
        worst = EXIT_PASS
        paths = sorted(Path(args.all).glob("*.json"))
        if not paths:
            raise ScenarioError(f"no scenario files in {args.all}")
        for path in paths:
            try:
                code = _verify_one(args, path)
            except DEGENERATE_ERRORS as exc:
                sys.stderr.write(f"{path}: degenerate scenario: {exc}\n")
                code = EXIT_DEGENERATE
            except UnstableGrid as exc:
                sys.stderr.write(f"{path}: {exc}\n")
                code = EXIT_UNSTABLE
            worst = max(worst, code)
        return worst
    if not args.scenario:
        raise ScenarioError("verify needs a scenario file or --all <dir>")
    return _verify_one(args, Path(args.scenario))


def _cmd_report(args) -> int:
    scenario = _scenario(args)
    report = run_scenario(scenario)
    _emit(report.to_text() if args.text else report.to_json(), args.out)
    _sweep_outputs(args, report, scenario)
    return _report_exit_code(report)


def _parse_pair(text: str) -> tuple[float, float]:
    parts = [p for p in text.replace(",", " ").split() if p]
    if len(parts) != 2:
        raise ScenarioError(f"expected two comma-separated numbers, got {text!r}")
    return float(parts[0]), float(parts[1])


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", help="write the primary output to this path instead of stdout")
    parser.add_argument("--csv-dir", help="directory for CSV outputs and rendered figures")
    parser.add_argument("--no-figures", action="store_true", help="suppress PNG rendering")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="offsetmorse",
        description="certify point-cloud offsets and verify Morse theorems against "
        "a cubical-homology oracle",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("certify", help="regular-value certificate for the offset level")
    p.add_argument("scenario")
    _add_common(p)
    p.set_defaults(func=_cmd_certify)

    p = sub.add_parser("critical", help="boundary arrangement critical points")
    p.add_argument("scenario")
    _add_common(p)
    p.set_defaults(func=_cmd_critical)

    p = sub.add_parser("sweep", help="stabilized Betti numbers across the filtration")
    p.add_argument("scenario")
    _add_common(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("flow", help="descend the composite level function")
    p.add_argument("scenario")
    p.add_argument("--start", help="start point 'x,y'")
    p.add_argument("--band", help="band 'a,b'")
    p.add_argument("--mu-min", type=float, dest="mu_min")
    p.add_argument("--level", type=float, help="level c (default: distance part only)")
    _add_common(p)
    p.set_defaults(func=_cmd_flow)

    p = sub.add_parser("verify", help="full pipeline with pass/fail checks")
    p.add_argument("scenario", nargs="?")
    p.add_argument("--all", help="verify every *.json scenario in a directory")
    _add_common(p)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("report", help="full verification report document")
    p.add_argument("scenario")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--json", action="store_true", default=True)
    group.add_argument("--text", action="store_true")
    _add_common(p)
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DEGENERATE_ERRORS as exc:
        sys.stderr.write(f"degenerate scenario: {exc}\n")
        return EXIT_DEGENERATE
    except UnstableGrid as exc:
        sys.stderr.write(f"unstable grid: {exc}\n")
        return EXIT_UNSTABLE
    except ScenarioError as exc:
        sys.stderr.write(f"scenario error: {exc}\n")
        return EXIT_NOT_APPLICABLE
    except OffsetMorseError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CHECK_FAILURE


if __name__ == "__main__":
    sys.exit(main())
