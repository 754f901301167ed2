import csv
import io
import json
from fractions import Fraction as F
from pathlib import Path

import mpmath
import pytest

from powsum import cli
from powsum.checks import CHECKS, CheckDef
from powsum.kernel import PrecisionPolicy, UsageError
from powsum.report import (
    CSV_HEADER, GridSpec, emit_report, exit_code, format_value, parse_value,
    report_from_dict, report_to_csv, report_to_dict, report_to_json, run_campaign,
)

GOLDEN = Path(__file__).parent / "golden"


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def failing_check(monkeypatch):
    """A stand-in check whose inequality is false everywhere."""
    monkeypatch.setitem(CHECKS, "always_false", CheckDef(
        "always_false", ("n",), False, "0 >= 1",
        lambda s: None, lambda s: True, lambda s: (lambda p: (0, 1))))
    return "always_false"


class TestReport:
    def test_json_keys(self):
        doc = report_to_dict(run_campaign(GridSpec("alzer", 1, 3, (1,))))
        assert list(doc) == ["campaign", "grid", "records", "summary", "wall_time_ms"]
        assert set(doc["summary"]) == {"holds", "fails", "indeterminate"}

    def test_rational_serialized_exactly(self):
        doc = report_to_dict(run_campaign(GridSpec("theorem1", 2, 2, (2,), (2,), mode="exact")))
        assert doc["records"][0]["lhs"] == "25/33"
        assert doc["records"][0]["rhs"] == "49/69"

    def test_csv_header(self):
        text = report_to_csv(run_campaign(GridSpec("alzer", 1, 2, (1,))))
        assert text.splitlines()[0] == "check,n,r,alpha,rprime,outcome,lhs,rhs,precision_bits,advisory"
        assert next(csv.reader(io.StringIO(text))) == CSV_HEADER

    def test_summary_matches_records(self):
        rep = run_campaign(GridSpec("martins", 1, 5, (F(1, 2), 2)))
        doc = report_to_dict(rep)
        assert doc["summary"]["holds"] == len(doc["records"]) == 10

    def test_records_sorted(self):
        rep = run_campaign(GridSpec("alzer", 1, 3, (2, F(1, 2), 1)))
        keys = [(r.n, r.r) for r in rep.records]
        assert keys == sorted(keys)

    def test_interval_round_trip(self):
        rep = run_campaign(GridSpec("alzer", 1, 2, (F(1, 2),)))
        rec = rep.records[0]
        text = format_value(rec.verdict.lhs)
        assert parse_value(text, rec.verdict.precision_used) == rec.verdict.lhs
        with mpmath.workdps(60):
            lo, hi = (mpmath.mpf(t) for t in text[1:-1].split(","))
            assert lo <= 12 - 8 * mpmath.sqrt(2) <= hi

    def test_round_trip_through_dict(self):
        rep = run_campaign(GridSpec("alzer", 1, 2, (F(1, 2), 1)))
        back = report_from_dict(json.loads(report_to_json(rep)))
        assert report_to_dict(back, False) == report_to_dict(rep, False)
        assert report_to_csv(back) == report_to_csv(rep)

    def test_determinism(self):
        grid = GridSpec("theorem1", 1, 30, (2, 3), (2,), mode="exact")
        a = report_to_dict(run_campaign(grid), include_wall_time=False)
        b = report_to_dict(run_campaign(grid), include_wall_time=False)
        assert json.dumps(a) == json.dumps(b)

    def test_campaign_id_depends_on_grid(self):
        a = run_campaign(GridSpec("alzer", 1, 2, (1,)))
        b = run_campaign(GridSpec("alzer", 1, 3, (1,)))
        assert a.campaign_id != b.campaign_id

    @pytest.mark.parametrize("grid", [
        GridSpec("alzer", 1, 3, ()),
        GridSpec("alzer", 3, 1, (1,)),
        GridSpec("theorem1", 1, 3, (2,), (1,)),
        GridSpec("alzer", 1, 2, (2,), mode="exact"),
        GridSpec("unknown", 1, 2, (2,)),
    ])
    def test_invalid_grid(self, grid):
        with pytest.raises(UsageError):
            run_campaign(grid)

    def test_invalid_grid_rejected_before_evaluation(self, monkeypatch):
        calls = []
        monkeypatch.setattr("powsum.report.check_named", lambda *a: calls.append(a))
        with pytest.raises(UsageError):
            run_campaign(GridSpec("alzer", 1, 3, (1, -1)))
        assert calls == []

    def test_exit_code_soundness(self):
        assert exit_code({"holds": 3, "fails": 0, "indeterminate": 0}) == 0
        assert exit_code({"holds": 3, "fails": 1, "indeterminate": 2}) == 1
        assert exit_code({"holds": 0, "fails": 0, "indeterminate": 1}) == 2

    def test_failure_witness(self, failing_check):
        doc = report_to_dict(run_campaign(GridSpec(failing_check, 1, 2)))
        rec = doc["records"][0]
        assert rec["outcome"] == "fails"
        assert rec["witness"] == {"params": {"n": "1"}, "lhs": "0", "rhs": "1"}

    def test_emit_to_file(self, tmp_path):
        rep = run_campaign(GridSpec("alzer", 1, 1, (1,)))
        emit_report(rep, "csv", tmp_path / "out.csv")
        assert (tmp_path / "out.csv").read_text() == report_to_csv(rep)


class TestGolden:
    def test_exact_json(self):
        rep = run_campaign(GridSpec("theorem1", 1, 2, (2,), (2,), mode="exact"))
        got = json.dumps(report_to_dict(rep, include_wall_time=False), indent=2) + "\n"
        assert got == (GOLDEN / "theorem1_exact.json").read_text()

    def test_interval_csv(self):
        rep = run_campaign(GridSpec("alzer", 1, 2, (1, F(1, 2))))
        assert report_to_csv(rep) == (GOLDEN / "alzer_interval.csv").read_text()


class TestCli:
    def test_theorem1_exact(self, capsys):
        code, out, _ = run_cli(capsys, "check", "theorem1", "--r", "2", "--alpha", "2",
                               "--n-max", "100", "--mode", "exact")
        assert code == 0
        doc = json.loads(out)
        assert doc["summary"] == {"holds": 100, "fails": 0, "indeterminate": 0}

    def test_replay(self, capsys):
        code, out, _ = run_cli(capsys, "replay", "--n", "1", "--r", "1", "--alpha", "2")
        assert code == 0
        assert out.count("holds") >= 6 and "(equality)" in out

    def test_replay_json(self, capsys):
        code, out, _ = run_cli(capsys, "replay", "--n", "2", "--r", "2", "--alpha", "2",
                               "--mode", "exact", "--json")
        doc = json.loads(out)
        assert code == 0 and doc["overall"] == "holds" and doc["chain_consistent"]
        assert doc["steps"][-1]["lhs"] == "25/33"

    def test_alpha_out_of_range(self, capsys):
        code, _, err = run_cli(capsys, "check", "theorem1", "--alpha", "1", "--r", "2")
        assert code == 64 and "alpha" in err

    def test_decimal_rejected(self, capsys):
        code, _, err = run_cli(capsys, "check", "alzer", "--r", "0.5")
        assert code == 64 and "usage:" in err

    @pytest.mark.parametrize("argv", [[], ["frobnicate"], ["check", "alzer", "--bogus"],
                                      ["check", "nosuch"]])
    def test_usage_errors(self, capsys, argv):
        code, _, err = run_cli(capsys, *argv)
        assert code == 64 and "usage" in err

    def test_indeterminate_exit(self, capsys):
        code, out, _ = run_cli(capsys, "check", "alzer", "--r", "2", "--n-min", "200",
                               "--n-max", "200", "--precision-start", "8", "--precision-max", "8")
        assert code == 2
        assert json.loads(out)["summary"]["indeterminate"] == 1

    def test_failure_exit(self, capsys, failing_check):
        code, _, err = run_cli(capsys, "check", failing_check, "--n-max", "2")
        assert code == 1
        assert err.count("finding:") == 2

    def test_env_precision(self, capsys, monkeypatch):
        monkeypatch.setenv("POWSUM_PRECISION_START", "8")
        monkeypatch.setenv("POWSUM_PRECISION_MAX", "8")
        code, _, _ = run_cli(capsys, "check", "alzer", "--r", "2", "--n-min", "200",
                             "--n-max", "200")
        assert code == 2
        assert PrecisionPolicy.from_env().max_bits == 8

    def test_negative_rational(self, capsys):
        code, out, _ = run_cli(capsys, "check", "alzer_neg_lower", "--r=-1/2,-2", "--n-max", "3")
        assert code == 0 and json.loads(out)["summary"]["holds"] == 6

    def test_scan(self, capsys):
        code, out, _ = run_cli(capsys, "scan", "problem1", "--n-max", "10", "--r", "1",
                               "--rprime", "3")
        doc = json.loads(out)
        assert code == 0
        assert all(rec["labels"] == ["covered-by-corollary1"] for rec in doc["records"])

    def test_scan_reversed_pair(self, capsys):
        code, _, _ = run_cli(capsys, "scan", "problem1", "--n-max", "3", "--r", "2",
                             "--rprime", "3/2")
        assert code == 64

    def test_report_conversion(self, capsys, tmp_path):
        src = tmp_path / "rep.json"
        run_cli(capsys, "check", "alzer", "--r", "1/2,1", "--n-max", "2", "--out", str(src))
        dst = tmp_path / "rep.csv"
        code, _, _ = run_cli(capsys, "report", "--in", str(src), "--format", "csv",
                             "--out", str(dst))
        assert code == 0
        assert dst.read_text() == (GOLDEN / "alzer_interval.csv").read_text()

    def test_report_bad_input(self, capsys, tmp_path):
        src = tmp_path / "junk.json"
        src.write_text("{}")
        code, _, _ = run_cli(capsys, "report", "--in", str(src))
        assert code == 64

    def test_io_error(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, "check", "alzer", "--r", "1",
                               "--out", str(tmp_path / "missing" / "x.json"))
        assert code == 74 and "I/O" in err
        code, _, _ = run_cli(capsys, "report", "--in", str(tmp_path / "absent.json"))
        assert code == 74

    def test_determinism_bytes(self, capsys):
        outs = []
        for _ in range(2):
            _, out, _ = run_cli(capsys, "check", "theorem1", "--r", "2", "--alpha", "2",
                                "--n-max", "100", "--mode", "exact")
            doc = json.loads(out)
            doc.pop("wall_time_ms")
            outs.append(json.dumps(doc, indent=2))
        assert outs[0] == outs[1]
