import csv
import io
import json

import numpy as np
import pytest

from ssrduality.cli import CSV_COLUMNS, fmt_num, main

HEADER = "p,min_pt_eigenvalue,negativity,frame_separable,siv_closed_form,siv_minimizer"


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


def test_header_constant():
    assert ",".join(CSV_COLUMNS) == HEADER


def test_fmt_num():
    assert fmt_num(1 / 3) == "0.333333333333"
    assert fmt_num(-0.0) == "0"
    assert fmt_num(0.25) == "0.25"


class TestSweepRows:
    def test_row_count_and_grid(self, sweep_21):
        assert len(sweep_21) == 21
        assert np.allclose([r.p for r in sweep_21], np.linspace(0, 1, 21))

    def test_p_two_tenths(self, sweep_21):
        row = next(r for r in sweep_21 if abs(r.p - 0.2) < 1e-12)
        assert abs(row.min_pt_eigenvalue + 0.05) <= 1e-9
        assert row.frame_separable

    def test_end_points(self, sweep_21):
        first, last = sweep_21[0], sweep_21[-1]
        assert first.negativity == 0 and first.frame_separable
        assert first.siv_ratio is None
        assert last.siv_closed_form == 0.25
        assert abs(last.siv_minimizer - 1) <= 1e-8

    def test_ratio_is_four(self, sweep_21):
        for row in sweep_21[1:]:
            assert abs(row.siv_ratio - 4) <= 1e-6


class TestSweepCommand:
    def test_csv(self, tmp_path, capsys):
        out = tmp_path / "s.csv"
        code, cap = run(capsys, "sweep", "--steps", "3", "--out", str(out))
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == HEADER
        assert lines[1] == "0,0,0,true,0,0"
        assert lines[3] == "1,-0.25,0.25,false,0.25,1"
        meta = json.loads((tmp_path / "s.csv.manifest.json").read_text())
        assert meta["seed"] == 42 and "timestamp" in meta
        assert "ratio" in cap.out and "4.000000" in cap.out

    def test_json_matches_csv(self, tmp_path, capsys):
        main(["sweep", "--steps", "5", "--p-min", "0.1", "--out", str(tmp_path / "s.csv")])
        main(["sweep", "--steps", "5", "--p-min", "0.1", "--format", "json",
              "--out", str(tmp_path / "s.json")])
        capsys.readouterr()
        doc = json.loads((tmp_path / "s.json").read_text())
        assert set(doc) == {"rows", "manifest"}
        rows = list(csv.DictReader(io.StringIO((tmp_path / "s.csv").read_text())))
        assert len(rows) == len(doc["rows"]) == 5
        for c, j in zip(rows, doc["rows"]):
            assert list(j) == list(CSV_COLUMNS)
            for key in CSV_COLUMNS:
                if key == "frame_separable":
                    assert c[key] == ("true" if j[key] else "false")
                else:
                    assert fmt_num(float(c[key])) == fmt_num(j[key])

    def test_byte_identical_without_timestamp(self, tmp_path, capsys):
        for name in ("a", "b"):
            main(["sweep", "--steps", "3", "--format", "json", "--no-timestamp",
                  "--out", str(tmp_path / f"{name}.json")])
        capsys.readouterr()
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
        assert "timestamp" not in json.loads((tmp_path / "a.json").read_text())["manifest"]

    @pytest.mark.parametrize(
        "argv",
        [
            ["--p-min", "0.8", "--p-max", "0.2"],
            ["--steps", "1"],
            ["--p-max", "1.5"],
            ["--format", "xml"],
        ],
    )
    def test_invalid_arguments(self, tmp_path, capsys, argv):
        with pytest.raises(SystemExit) as exc:
            main(["sweep", "--out", str(tmp_path / "x.csv"), *argv])
        assert exc.value.code == 2

    def test_unwritable_path(self, tmp_path, capsys):
        code, cap = run(capsys, "sweep", "--steps", "2",
                        "--out", str(tmp_path / "missing" / "s.csv"))
        assert code == 2
        assert "cannot write" in cap.err


class TestDemo:
    def test_default_passes(self, capsys):
        code, cap = run(capsys, "demo")
        assert code == 0
        assert cap.out.count("[PASS]") == 4

    def test_zero_noise_fails(self, capsys):
        code, cap = run(capsys, "demo", "--p", "0")
        assert code == 1
        assert "[FAIL]" in cap.out

    def test_bad_p(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["demo", "--p", "-1"])
        assert exc.value.code == 2


def test_threshold(capsys):
    code, cap = run(capsys, "threshold")
    assert code == 0
    fields = dict(line.split()[:2] for line in cap.out.splitlines() if line.startswith(("werner", "siv")))
    assert abs(float(fields["werner_ppt_threshold"]) - 1 / 3) <= 1e-6
    assert abs(float(fields["siv_bound_unnormalized"]) - 1 / 24) <= 1e-6
    assert "1/24" in cap.out


class TestTwirl:
    def test_two_copies(self, capsys):
        code, cap = run(capsys, "twirl", "two-copies")
        assert code == 0
        entries = [line for line in cap.out.splitlines() if line.strip().startswith("|")]
        assert len(entries) == 6
        assert all(line.split()[-1] == "0.25" for line in entries)
        assert "|0110><1001|" in cap.out
        assert "(1, 1): 4, 0.5" in cap.out

    def test_pdc_distinguishable_polarization(self, capsys):
        code, cap = run(capsys, "twirl", "pdc-dist-pol", "--dump")
        assert code == 0
        matrix = [line for line in cap.out.splitlines() if line.endswith("j")]
        assert len(matrix) == 4
        diag = [float(row.split()[i].split("+")[0]) for i, row in enumerate(matrix)]
        assert np.allclose(diag, [0, 0.5, 0.5, 0], atol=1e-15)

    @pytest.mark.parametrize("name", ["rho-p:0.3", "pdc-dist-mom", "hyper"])
    def test_other_targets(self, capsys, name):
        code, _ = run(capsys, "twirl", name)
        assert code == 0

    @pytest.mark.parametrize("name", ["nonsense", "rho-p:2"])
    def test_unknown_state(self, capsys, name):
        code, cap = run(capsys, "twirl", name)
        assert code == 2
        assert "error" in cap.err
