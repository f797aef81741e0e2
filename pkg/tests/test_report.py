import numpy as np
import pytest

import shapebench as sb
from shapebench.errors import FormatError
from shapebench.exclusion import ContrastMode
from shapebench.matcher import MatchRecord, Outcome, Scored
from shapebench.report import (
    CurvePoint,
    ErrorCurve,
    curves_to_csv,
    emit_report,
    error_curves,
    parse_csv,
    read_report,
    report_json,
    top_errors,
)

REF = sb.parse_view_name("ball.00.pw.07.d")
OTHER_SAME = sb.parse_view_name("ball.01.p.02.d")
OTHER_DIFF = sb.parse_view_name("cube.00.p.02.d")
PMC = sb.parse_view_name("ball.00.xpw.02.d")


def fake_record(outcome, spec, ref_row=0, top1_score=0.9, pmc_score=0.8):
    if outcome is Outcome.SKIPPED:
        return MatchRecord(REF, ref_row, spec, outcome, None, None)
    top_view = {
        Outcome.CORRECT: PMC,
        Outcome.CATEGORY_CORRECT: OTHER_SAME,
        Outcome.INCORRECT: OTHER_DIFF,
    }[outcome]
    return MatchRecord(
        REF, ref_row, spec, outcome,
        Scored(top_view, 5, top1_score), Scored(PMC, 9, pmc_score),
    )


def spec(dims="pw", radius=2, mode=ContrastMode.NONE):
    return sb.ExclusionSpec(sb.Cvt.parse(dims), radius, mode)


class TestErrorCurves:
    def test_all_correct_rates_zero(self):
        records = [fake_record(Outcome.CORRECT, spec(), ref_row=i) for i in range(10)]
        [curve] = error_curves(records)
        [p] = curve.points
        assert p.object_error == 0.0 and p.category_error == 0.0

    def test_counting_example(self):
        s = spec()
        records = (
            [fake_record(Outcome.CORRECT, s, i) for i in range(5)]
            + [fake_record(Outcome.CATEGORY_CORRECT, s, 5 + i) for i in range(3)]
            + [fake_record(Outcome.INCORRECT, s, 8 + i) for i in range(2)]
        )
        [curve] = error_curves(records)
        [p] = curve.points
        assert p.n_qualified == 10 and p.n_skipped == 0
        assert p.object_error == pytest.approx(0.5)
        assert p.category_error == pytest.approx(0.2)

    def test_skipped_excluded_from_denominator(self):
        s = spec()
        records = [
            fake_record(Outcome.INCORRECT, s, 0),
            fake_record(Outcome.CORRECT, s, 1),
            fake_record(Outcome.SKIPPED, s, 2),
            fake_record(Outcome.SKIPPED, s, 3),
        ]
        [curve] = error_curves(records)
        [p] = curve.points
        assert p.n_qualified == 4 and p.n_skipped == 2
        assert p.object_error == pytest.approx(0.5)

    def test_empty_cell_emits_null_point(self):
        s_present, s_empty = spec(radius=0), spec(radius=9)
        records = [fake_record(Outcome.CORRECT, s_present)]
        [curve] = error_curves(records, specs=[s_present, s_empty])
        assert [p.radius for p in curve.points] == [0, 9]
        assert curve.points[1].n_qualified == 0
        assert curve.points[1].object_error is None

    def test_category_error_never_exceeds_object_error(self):
        rng = np.random.default_rng(0)
        s = spec()
        outcomes = [Outcome.CORRECT, Outcome.CATEGORY_CORRECT, Outcome.INCORRECT, Outcome.SKIPPED]
        records = [
            fake_record(outcomes[rng.integers(4)], s, i) for i in range(200)
        ]
        [curve] = error_curves(records)
        [p] = curve.points
        assert p.category_error <= p.object_error

    def test_ordering_none_first_then_radii_and_dims(self):
        specs = [
            spec("pw", 3), spec("pw", None), spec("pw", 0),
            spec("p", 1), spec("xyp", 1), spec("pw", 1, ContrastMode.SOFT),
        ]
        records = [fake_record(Outcome.CORRECT, s) for s in specs]
        curves = error_curves(records)
        assert [(c.dims, c.mode) for c in curves] == [
            ("p", "none"), ("pw", "none"), ("pw", "soft"), ("xyp", "none")
        ]
        pw_none = curves[1]
        assert [p.radius for p in pw_none.points] == [None, 0, 3]


class TestTopErrors:
    def test_no_errors_empty(self):
        records = [fake_record(Outcome.CORRECT, spec()), fake_record(Outcome.SKIPPED, spec())]
        assert top_errors(records, 10) == []

    def test_single_error_margin(self):
        rec = fake_record(Outcome.INCORRECT, spec(), top1_score=0.97, pmc_score=0.90)
        [ex] = top_errors([rec], 10)
        assert ex.margin == pytest.approx(0.07)
        assert ex.top1 == OTHER_DIFF.name
        assert ex.best_pmc == PMC.name

    def test_ranked_by_margin_then_ref_row(self):
        s = spec()
        records = [
            fake_record(Outcome.INCORRECT, s, ref_row=4, top1_score=0.9, pmc_score=0.8),
            fake_record(Outcome.CATEGORY_CORRECT, s, ref_row=1, top1_score=0.95, pmc_score=0.5),
            fake_record(Outcome.INCORRECT, s, ref_row=2, top1_score=0.9, pmc_score=0.8),
            fake_record(Outcome.CORRECT, s, ref_row=0, top1_score=1.0, pmc_score=1.0),
        ]
        got = top_errors(records, 3)
        assert [round(e.margin, 6) for e in got] == [0.45, pytest.approx(0.1), pytest.approx(0.1)]
        assert [e.reference for e in got] == [REF.name] * 3
        # the two margin ties order by reference row (2 before 4)
        assert got[1].margin == got[2].margin

    def test_returns_all_when_fewer(self):
        records = [fake_record(Outcome.INCORRECT, spec())]
        assert len(top_errors(records, 5)) == 1


class TestSerialization:
    def test_csv_line_contract(self):
        curve = ErrorCurve(dims="pw", mode="none",
                           points=[CurvePoint(2, 1000, 0, 0.6, 0.35)])
        text = curves_to_csv([curve])
        assert text.splitlines()[1] == "pw,none,2,1000,0,0.600000,0.350000"

    def test_no_exclusion_radius_prints_none(self):
        curve = ErrorCurve(dims="pr", mode="soft",
                           points=[CurvePoint(None, 10, 1, 0.5, 0.25)])
        assert "pr,soft,none,10,1,0.500000,0.250000" in curves_to_csv([curve])

    def test_csv_round_trip_values(self):
        curves = [
            ErrorCurve(dims="pw", mode="none",
                       points=[CurvePoint(None, 31, 0, 1 / 3, 0.2), CurvePoint(2, 9, 3, None, None)]),
            ErrorCurve(dims="p", mode="hard", points=[CurvePoint(0, 7, 0, 0.0, 0.0)]),
        ]
        parsed = parse_csv(curves_to_csv(curves))
        # 6-digit decimals are the values of record
        flat = [(c.dims, c.mode, p.radius, p.n_qualified, p.n_skipped, p.object_error, p.category_error)
                for c in parsed for p in c.points]
        assert flat == [
            ("pw", "none", None, 31, 0, 0.333333, 0.2),
            ("pw", "none", 2, 9, 3, None, None),
            ("p", "hard", 0, 7, 0, 0.0, 0.0),
        ]
        # re-emitting the parsed curves reproduces the same bytes
        assert curves_to_csv(parsed) == curves_to_csv(curves)

    def test_csv_rejects_bad_header(self):
        with pytest.raises(FormatError):
            parse_csv("nope\n")

    def test_report_round_trip(self, tmp_path):
        records = [
            fake_record(Outcome.INCORRECT, spec(), top1_score=0.9, pmc_score=0.7),
            fake_record(Outcome.CORRECT, spec(radius=None), ref_row=1),
        ]
        curves = error_curves(records)
        exemplars = top_errors(records, 5)
        config = {"metric": "correlation", "specs": [str(spec())]}
        path = tmp_path / "report.json"
        emit_report(curves, exemplars, config, csv_path=tmp_path / "r.csv", report_path=path)
        curves2, exemplars2, config2 = read_report(path)
        assert config2 == config
        assert report_json(curves2, exemplars2, config2) == report_json(curves, exemplars, config)
        assert (tmp_path / "r.csv").read_text() == curves_to_csv(curves)

    def test_read_report_requires_sections(self, tmp_path):
        p = tmp_path / "x.json"
        p.write_text("{}")
        with pytest.raises(FormatError, match="curves"):
            read_report(p)
        p.write_text('{"curves": []}')
        with pytest.raises(FormatError, match="exemplars"):
            read_report(p)
        p.write_text("not json")
        with pytest.raises(FormatError, match="JSON"):
            read_report(p)
