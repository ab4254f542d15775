import csv
import json

import numpy as np
import pytest

from loewner.cli import main

ZERO = '{"family":"constant","params":{"value":0},"T":1}'


def run(argv):
    return main(argv)


class TestTrace:
    def test_trivial_driving_row_at_one(self, tmp_path, capsys):
        assert run(["trace", "--driving", ZERO, "--dt", "1e-3",
                    "--out", str(tmp_path)]) == 0
        rows = list(csv.DictReader(open(tmp_path / "trace.csv")))
        last = rows[-1]
        assert float(last["t"]) == pytest.approx(1.0)
        assert float(last["re"]) == pytest.approx(0.0, abs=1e-6)
        assert float(last["im"]) == pytest.approx(2.0, abs=1e-6)
        meta = json.loads((tmp_path / "trace.meta.json").read_text())
        assert "spec_hash" in meta

    def test_byte_identical_reruns(self, tmp_path):
        cfg = '{"family":"brownian","params":{"kappa":2.0},"T":1,"normalize":true,"seed":9}'
        for d in ("a", "b"):
            assert run(["trace", "--driving", cfg, "--dt", "5e-3",
                        "--out", str(tmp_path / d)]) == 0
        assert (tmp_path / "a" / "trace.csv").read_bytes() == \
               (tmp_path / "b" / "trace.csv").read_bytes()


class TestStrictness:
    def test_unknown_config_key_exits_2(self, tmp_path):
        bad = '{"family":"constant","params":{"value":0},"T":1,"bogus":1}'
        assert run(["trace", "--driving", bad, "--dt", "1e-3",
                    "--out", str(tmp_path)]) == 2

    def test_invalid_json_exits_2(self, tmp_path):
        assert run(["trace", "--driving", "{nope", "--dt", "1e-3",
                    "--out", str(tmp_path)]) == 2

    def test_unknown_subcommand_exits_2(self):
        assert run(["frobnicate"]) == 2

    def test_bad_log_level_exits_2(self, monkeypatch, capsys):
        monkeypatch.setenv("LOEWNER_LOG", "chatty")
        assert run(["verify", "--only", "5"]) == 2
        monkeypatch.delenv("LOEWNER_LOG")


class TestSubcommands:
    def test_transition_label(self, capsys):
        assert run(["imag-eq", "transition", "--C", "1.9", "--T", "1"]) == 0
        assert "vanishing" in capsys.readouterr().out

    def test_transition_sweep_csv(self, tmp_path):
        assert run(["imag-eq", "transition", "--sweep", "1.0,2.5", "--T", "1",
                    "--out", str(tmp_path)]) == 0
        lines = (tmp_path / "transition.csv").read_text().splitlines()
        assert lines[0] == "C,T,status,witness_y0"
        assert len(lines) == 3

    def test_g_test(self, capsys):
        spec = '{"family":"sqrt_approach","params":{"c":3},"T":1}'
        assert run(["real-eq", "g-test", "--driving", spec, "--T", "1",
                    "--t1", "0", "--t2", "3.1"]) == 0
        assert "holds: True" in capsys.readouterr().out

    def test_sharp_example(self, tmp_path, capsys):
        assert run(["real-eq", "sharp-example", "--a", "1.5", "--k-max", "20",
                    "--out", str(tmp_path)]) == 0
        out = capsys.readouterr().out
        assert "running_min" in out
        assert (tmp_path / "sharp_example.csv").exists()

    def test_capture_scan(self, tmp_path, capsys):
        spec = '{"family":"sqrt_approach","params":{"c":5},"T":1}'
        assert run(["capture-scan", "--driving", spec, "--out", str(tmp_path)]) == 0
        out = capsys.readouterr().out
        assert "capture interval" in out
        header = (tmp_path / "capture_scan.csv").read_text().splitlines()[0]
        assert header == "x0,status,capture_time,certificate"

    def test_weierstrass_check_single(self, tmp_path, capsys):
        assert run(["weierstrass", "check", "--b", "16", "--N", "8",
                    "--out", str(tmp_path)]) == 0
        lines = (tmp_path / "weierstrass_checks.csv").read_text().splitlines()
        assert lines[0] == "b,N,c,check,margin,verdict"
        assert all(l.endswith("pass") for l in lines[1:])

    def test_figure_reference_lines(self, tmp_path):
        assert run(["figure", "--a", "1.5", "--k-max", "10",
                    "--out", str(tmp_path)]) == 0
        rows = list(csv.DictReader(open(tmp_path / "sharp_figure.csv")))
        assert float(rows[0]["ref_a"]) == 1.5
        assert float(rows[0]["ref_band_top"]) == pytest.approx(1.5 + 4 / 1.5)

    def test_verify_single_criterion(self, capsys):
        assert run(["verify", "--only", "5"]) == 0
        assert "PASS" in capsys.readouterr().out

    def test_con1_classification(self, tmp_path, capsys):
        assert run(["imag-eq", "con1", "--const", "1.5", "--y0", "0.5",
                    "--out", str(tmp_path)]) == 0
        assert "vanishing" in capsys.readouterr().out
