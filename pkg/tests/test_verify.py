import json
import math

import numpy as np
import pytest

from offsetmorse import (
    BettiProfile,
    BettiRow,
    PointCloud,
    SmoothFunction,
    Verdict,
    check_constancy,
    check_euler_total,
    check_handle_attachment,
    parse_scenario,
    run_scenario,
)
from offsetmorse.errors import ScenarioError, TooManyCellsPerLevel
from offsetmorse.scenario import Scenario

HEIGHT = SmoothFunction.linear([0.0, 1.0])
CREASE_Y = math.sqrt(0.39)


def two_disk_scenario(**overrides):
    kwargs = dict(
        cloud=PointCloud(np.array([[-0.5, 0.0], [0.5, 0.0]])),
        epsilon=0.8,
        mu_required=0.6,
        function=HEIGHT,
        grid_h=0.005,
    )
    kwargs.update(overrides)
    return Scenario(**kwargs)


def profile_from(pairs):
    rows = tuple(
        BettiRow(c=c, b0=b0, b1=b1, chi=b0 - b1, resolution=0.01, stable=True)
        for c, (b0, b1) in pairs
    )
    return BettiProfile(rows=rows)


class TestConstancy:
    PAIRS = [
        (-0.9, (0, 0)),
        (-0.75, (2, 0)),
        (-0.7, (2, 0)),
        (-0.64, (2, 0)),
        (-0.5, (1, 0)),
        (1.0, (1, 0)),
    ]
    CRIT = [-0.8, -CREASE_Y]

    def test_clean_profile_passes(self):
        ok, intervals = check_constancy(profile_from(self.PAIRS), self.CRIT)
        assert ok
        assert len(intervals) == 3
        assert [i.betti for i in intervals] == [(0, 0), (2, 0), (1, 0)]

    def test_corrupted_row_fails_with_interval_identified(self):
        corrupted = list(self.PAIRS)
        corrupted[2] = (-0.7, (3, 0))
        ok, intervals = check_constancy(profile_from(corrupted), self.CRIT)
        assert not ok
        bad = [i for i in intervals if not i.passed]
        assert len(bad) == 1
        assert bad[0].low == -0.8
        assert bad[0].high == pytest.approx(-CREASE_Y)

    def test_empty_leading_interval_passes(self):
        ok, intervals = check_constancy(profile_from(self.PAIRS[:1]), self.CRIT)
        assert intervals[0].betti == (0, 0)
        assert intervals[0].passed


class TestHandleAttachment:
    def test_merge_by_one_cell(self):
        assert check_handle_attachment((2, 0), (1, 0), [1])

    def test_cap_by_two_cell(self):
        assert check_handle_attachment((1, 1), (1, 0), [2])

    def test_zero_cell_cannot_create_cycle(self):
        assert not check_handle_attachment((1, 0), (1, 1), [0])

    def test_two_births(self):
        assert check_handle_attachment((0, 0), (2, 0), [0, 0])

    def test_merge_and_loop_closure(self):
        assert check_handle_attachment((2, 0), (1, 1), [1, 1])

    def test_cancelling_pair_allows_no_visible_change(self):
        assert check_handle_attachment((1, 0), (1, 0), [0, 1])

    def test_euler_mismatch_rejected(self):
        assert not check_handle_attachment((1, 0), (1, 0), [1])

    def test_too_many_cells(self):
        with pytest.raises(TooManyCellsPerLevel):
            check_handle_attachment((0, 0), (9, 0), [0] * 9)

    def test_empty_multiset_rejected(self):
        with pytest.raises(ValueError):
            check_handle_attachment((0, 0), (0, 0), [])


class TestEulerTotal:
    def test_two_disk_bookkeeping(self):
        final = BettiRow(c=1.0, b0=1, b1=0, chi=1, resolution=0.01, stable=True)
        assert check_euler_total(final, [0, 0, 1])

    def test_annulus_bookkeeping(self):
        final = BettiRow(c=2.0, b0=1, b1=1, chi=0, resolution=0.01, stable=True)
        assert check_euler_total(final, [0, 0, 0, 0, 1, 1, 1, 1])

    def test_mismatch(self):
        final = BettiRow(c=2.0, b0=1, b1=0, chi=1, resolution=0.01, stable=True)
        assert not check_euler_total(final, [0, 0])


class TestRunScenario:
    def test_two_disk_golden(self):
        report = run_scenario(two_disk_scenario())
        assert report.verdict == "pass"
        assert report.certificate.verdict is Verdict.CERTIFIED
        levels = [(round(v, 5), lams) for v, _, lams in report.morse.levels]
        assert levels == [(-0.8, (0, 0)), (round(-CREASE_Y, 5), (1,))]
        pairs = report.profile.pairs()
        # empty, two caps, merged, final: (0,0) -> (2,0) -> (1,0)
        seen = []
        for _, betti in pairs:
            if not seen or seen[-1] != betti:
                seen.append(betti)
        assert seen == [(0, 0), (2, 0), (1, 0)]
        assert report.checks["euler_total"]["chi_final"] == 1
        assert report.checks["euler_total"]["signed_cell_sum"] == 2 - 1

    def test_single_ball_contractible_at_every_level(self):
        scenario = Scenario(
            cloud=PointCloud(np.array([[0.0, 0.0]])),
            epsilon=1.0,
            mu_required=0.9,
            function=HEIGHT,
            grid_h=0.02,
        )
        report = run_scenario(scenario)
        assert report.verdict == "pass"
        assert len(report.records) == 1
        assert report.records[0].cell_dimension == 0
        for row in report.profile.rows:
            if row.c >= -1.0 + 0.01:
                assert (row.b0, row.b1, row.chi) == (1, 0, 1)

    def test_not_applicable_emits_no_claims(self):
        scenario = two_disk_scenario(epsilon=0.5, mu_required=0.5)
        report = run_scenario(scenario)
        assert report.verdict == "not_applicable"
        assert report.certificate.verdict in (Verdict.REFUTED, Verdict.INCONCLUSIVE)
        assert report.morse is None
        assert report.profile is None
        doc = report.to_dict()
        assert "critical_table" not in doc
        assert "sweep" not in doc

    def test_band_regularity_probes_positive(self):
        # the sampled band infimum stays positive at regular levels and at
        # nearby shifted levels
        report = run_scenario(two_disk_scenario())
        probes = report.checks["band_delta"]
        assert probes
        for probe in probes:
            values = [probe["alpha"], *probe["alpha_shifted"]]
            for alpha in values:
                assert alpha is None or alpha > 0.05

    def test_report_bytes_reproducible(self):
        a = run_scenario(two_disk_scenario()).to_json()
        b = run_scenario(two_disk_scenario()).to_json()
        assert a == b
        json.loads(a)  # well-formed

    def test_text_rendering(self):
        text = run_scenario(two_disk_scenario()).to_text()
        assert "verdict: pass" in text
        assert "check constancy: pass" in text


class TestScenarioParsing:
    DOC = {
        "dimension": 2,
        "points": [[-0.5, 0.0], [0.5, 0.0]],
        "epsilon": 0.8,
        "mu": 0.6,
        "function": {"type": "linear", "u": [0, 1]},
        "grid": {"h": 0.005},
        "sweep": {"offset_fraction": 1e-4},
        "flow": {"band": [0.5, 1.0], "mu_min": 0.9},
        "tolerances": {"tol_near": 1e-9},
    }

    def test_round_trip(self):
        scenario = parse_scenario(self.DOC)
        assert scenario.epsilon == 0.8
        assert scenario.mu_required == 0.6
        assert scenario.grid_h == 0.005
        assert scenario.flow.band == (0.5, 1.0)
        assert scenario.tolerances.tol_near == 1e-9

    @pytest.mark.parametrize(
        "mutate",
        [
            lambda d: d.update({"unknown_top": 1}),
            lambda d: d["grid"].update({"weird": 1}),
            lambda d: d["sweep"].update({"weird": 1}),
            lambda d: d["flow"].update({"weird": 1}),
            lambda d: d["tolerances"].update({"weird": 1}),
            lambda d: d["function"].update({"weird": 1}),
        ],
    )
    def test_unknown_fields_rejected(self, mutate):
        doc = json.loads(json.dumps(self.DOC))
        mutate(doc)
        with pytest.raises(ScenarioError):
            parse_scenario(doc)

    def test_exactly_one_point_source(self):
        doc = json.loads(json.dumps(self.DOC))
        doc["points_file"] = "pts.txt"
        with pytest.raises(ScenarioError):
            parse_scenario(doc)
        del doc["points"]
        del doc["points_file"]
        with pytest.raises(ScenarioError):
            parse_scenario(doc)

    def test_points_file_resolved_relative(self, tmp_path):
        (tmp_path / "pts.txt").write_text("-0.5 0\n0.5 0\n")
        doc = json.loads(json.dumps(self.DOC))
        del doc["points"]
        doc["points_file"] = "pts.txt"
        path = tmp_path / "scenario.json"
        path.write_text(json.dumps(doc))
        from offsetmorse import load_scenario

        scenario = load_scenario(path)
        assert scenario.cloud.size == 2

    def test_dimension_mismatch_rejected(self):
        doc = json.loads(json.dumps(self.DOC))
        doc["dimension"] = 3
        with pytest.raises(ScenarioError):
            parse_scenario(doc)

    def test_mu_range_enforced(self):
        doc = json.loads(json.dumps(self.DOC))
        doc["mu"] = 1.5
        with pytest.raises(ScenarioError):
            parse_scenario(doc)
