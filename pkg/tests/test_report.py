import json
import math

from halfline.report import Case, SpectralReport, cell, fmt_float, jsonable


def test_fmt_float_round_trips():
    for x in (0.1, 1 / 3, 1e-300, -2.5e10, math.pi):
        assert float(fmt_float(x)) == x
    assert fmt_float(-0.0) == "0"
    assert fmt_float(math.inf) == "inf" and fmt_float(math.nan) == "nan"


def test_cell_formats():
    assert cell(True) == "true"
    assert cell(1 - 2j) == "1-2i"
    assert cell({"b": 1, "a": 2}) == '{"a": 2, "b": 1}'


def test_jsonable_complex_and_nonfinite():
    assert jsonable({"z": 1 + 2j, "x": math.nan}) == {"z": {"re": 1.0, "im": 2.0}, "x": "nan"}


def test_case_status_follows_tolerance():
    assert Case.compare("a", 1.0, 1.0 + 1e-9, 1e-8).passed
    assert not Case.compare("a", 1.0, 1.1, 1e-8).passed
    assert Case.compare("r", 100.0, 100.5, 1e-2, relative=True).passed
    b = Case.bound("b", 2.0, 1.0)
    assert b.abs_error == 1.0 and not b.passed
    assert Case.flag("f", True).passed and not Case.flag("f", False).passed


def test_report_summary_and_serialization():
    rep = SpectralReport("demo", config_echo={"seed": 42})
    rep.add(Case.compare("z", 1.0, 1.0, 0.0))
    rep.add(Case.compare("a", 1.0, 2.0, 0.5))
    assert rep.summary == {"pass": 1, "fail": 1, "total": 2}
    assert not rep.passed
    srt = rep.sorted()
    assert [c.id for c in srt.cases] == ["a", "z"]
    payload = json.loads(srt.to_json())
    assert payload["summary"]["fail"] == 1 and payload["config"]["seed"] == 42
    lines = srt.to_csv().splitlines()
    assert lines[0].startswith("suite,id,status")
    assert lines[1].startswith("demo,a,fail")
    assert srt.to_csv() == rep.sorted().to_csv()
