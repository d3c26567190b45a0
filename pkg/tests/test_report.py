from gcsl.report import format_records, format_text, parse_records, percent
from gcsl.smc import Estimate


def test_percent():
    assert percent(0.923) == "92.3 %"
    assert percent(0.0) == "0.0 %"
    assert percent(1.0) == "100.0 %"


def test_text_report():
    est = Estimate(200, 184, 0.92, ">=", 0.9, "holds", seed=3, seeds=(1, 2))
    text = format_text(est, "req2")
    assert "92.0 %" in text and "P >= 90.0 %" in text and "verdict     holds" in text


def test_records_round_trip():
    a = Estimate(3, 2, 2 / 3, ">=", 0.9, "violated", 0.05, 0.01, 7, (11, 12, 13))
    b = Estimate(1, 1, 1.0, "<", 0.5, "violated", seed=0, seeds=(4,))
    back = parse_records(format_records(a, "x") + format_records(b, "y"))
    assert [r["contract"] for r in back] == ["x", "y"]
    assert back[0]["p_hat"] == 2 / 3 and back[0]["seeds"] == [11, 12, 13]
    assert back[0]["epsilon"] == 0.05 and back[1]["epsilon"] == ""
    assert back[1]["n"] == 1 and back[1]["successes"] == 1
