"""CLI surface: tables, simulation runs, comparisons, reproduction bundles."""

import json
import math

import numpy as np
import pytest

from occutime.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def read_table(path):
    header = {}
    rows = []
    cols = None
    for line in path.read_text().splitlines():
        if line.startswith("#"):
            key, value = line[1:].split("=", 1)
            header[key.strip()] = value.strip()
        elif cols is None:
            cols = line.split(",")
        else:
            rows.append([float(tok) for tok in line.split(",")])
    return header, cols, np.asarray(rows)


class TestTheory:
    def test_arcsine_grid_row(self, capsys):
        code, out, _ = run(capsys, "theory", "arcsine", "--grid", "101")
        assert code == 0
        rows = [line for line in out.splitlines() if line.startswith("0.25,")]
        assert len(rows) == 1
        cdf = float(rows[0].split(",")[2])
        assert cdf == pytest.approx(1.0 / 3.0, abs=1e-12)

    def test_aging_arcsine_atoms_in_header(self, tmp_path, capsys):
        out_csv = tmp_path / "aging.csv"
        code, _, _ = run(capsys, "theory", "aging-arcsine", "--r", "1",
                         "--grid", "41", "--out", str(out_csv))
        assert code == 0
        header, cols, rows = read_table(out_csv)
        assert float(header["atom_0"]) == 0.25
        assert float(header["atom_1"]) == 0.25
        assert cols == ["s", "pdf", "cdf"]
        assert rows.shape[0] == 41
        assert (tmp_path / "aging.manifest.json").is_file()

    def test_aging_lamperti_matches_aging_arcsine(self, tmp_path, capsys):
        a_csv = tmp_path / "a.csv"
        b_csv = tmp_path / "b.csv"
        run(capsys, "theory", "aging-arcsine", "--r", "1", "--grid", "41",
            "--out", str(a_csv))
        run(capsys, "theory", "aging-lamperti", "--alpha", "0.5", "--beta", "1",
            "--p-plus", "0.5", "--r", "1", "--grid", "41", "--out", str(b_csv))
        _, _, rows_a = read_table(a_csv)
        _, _, rows_b = read_table(b_csv)
        interior = slice(1, -1)
        assert np.allclose(rows_a[interior, 1], rows_b[interior, 1], atol=1e-5)
        assert np.allclose(rows_a[:, 2], rows_b[:, 2], atol=1e-5)

    def test_usage_errors_exit_one(self, capsys):
        code, _, err = run(capsys, "theory", "lamperti")
        assert code == 1 and "alpha" in err
        code, _, err = run(capsys, "theory", "aging-arcsine", "--r", "-1")
        assert code == 1
        code, _, err = run(capsys, "theory", "nonsense")
        assert code == 1


class TestSimulate:
    def test_byte_identical_reruns_across_workers(self, tmp_path, capsys):
        args = ["simulate", "bm", "--tm", "50", "--r", "1", "--n", "300", "--seed", "7"]
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        assert run(capsys, *args, "--out", str(a))[0] == 0
        assert run(capsys, *args, "--workers", "3", "--out", str(b))[0] == 0
        assert a.read_bytes() == b.read_bytes()

    def test_manifest_contents_and_rerun(self, tmp_path, capsys):
        out = tmp_path / "s.csv"
        code, _, _ = run(capsys, "simulate", "renewal", "--alpha", "0.7", "--tm", "500",
                         "--r", "1", "--n", "200", "--seed", "11", "--out", str(out))
        assert code == 0
        manifest = json.loads((tmp_path / "s.manifest.json").read_text())
        assert manifest["master_seed"] == 11
        assert manifest["params"]["model"] == "renewal"
        assert manifest["params"]["alpha"] == 0.7
        assert manifest["outputs"] == [str(out)]
        assert manifest["wall_time_s"] >= 0.0

        again = tmp_path / "s2.csv"
        code, _, _ = run(capsys, "simulate", "renewal", "--from-manifest",
                         str(tmp_path / "s.manifest.json"), "--out", str(again))
        assert code == 0
        assert out.read_bytes() == again.read_bytes()

    def test_map_run_with_fig3_flags(self, tmp_path, capsys):
        out = tmp_path / "m.csv"
        code, _, _ = run(capsys, "simulate", "map", "--alpha", "0.5", "--c", "0.6",
                         "--tm", "2000", "--r", "0.01", "--n", "100", "--seed", "1",
                         "--out", str(out))
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "index,seed,fraction"
        assert len(lines) == 101

    def test_config_file_defaults_and_flag_override(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("tm = 500\nr = 1\nn = 150\nalpha = 0.5\n")
        out = tmp_path / "c.csv"
        code, _, _ = run(capsys, "simulate", "renewal", "--config", str(cfg),
                         "--n", "80", "--seed", "3", "--out", str(out))
        assert code == 0
        manifest = json.loads((tmp_path / "c.manifest.json").read_text())
        assert manifest["params"]["n"] == 80          # flag wins
        assert manifest["params"]["tm"] == 500.0      # config supplies the rest

    def test_missing_required_flags(self, tmp_path, capsys):
        code, _, err = run(capsys, "simulate", "bm", "--out", str(tmp_path / "x.csv"))
        assert code == 1 and "tm" in err
        code, _, err = run(capsys, "simulate", "map", "--tm", "100",
                           "--out", str(tmp_path / "y.csv"))
        assert code == 1


class TestCompare:
    @pytest.fixture()
    def renewal_samples(self, tmp_path, capsys):
        out = tmp_path / "r.csv"
        run(capsys, "simulate", "renewal", "--alpha", "0.5", "--tm", "5000",
            "--r", "1", "--n", "1500", "--seed", "13", "--out", str(out))
        return out

    def test_matched_pair_passes(self, renewal_samples, tmp_path, capsys):
        report_path = tmp_path / "report.json"
        code, out, _ = run(capsys, "compare", str(renewal_samples), "--theory",
                           "aging-arcsine", "--r", "1", "--allowance", "0.02",
                           "--out", str(report_path))
        assert code == 0
        report = json.loads(report_path.read_text())
        assert report["passed"] is True
        assert report["metadata"]["samples_master_seed"] == 13
        assert "PASS" in out

    def test_mismatched_aging_ratio_fails(self, renewal_samples, tmp_path, capsys):
        code, out, _ = run(capsys, "compare", str(renewal_samples), "--theory",
                           "aging-arcsine", "--r", "0.02",
                           "--out", str(tmp_path / "bad.json"))
        assert code == 0
        report = json.loads((tmp_path / "bad.json").read_text())
        assert report["passed"] is False
        assert "FAIL" in out

    def test_empty_samples_usage_error(self, tmp_path, capsys):
        empty = tmp_path / "empty.csv"
        empty.write_text("index,seed,fraction\n")
        code, _, err = run(capsys, "compare", str(empty), "--theory", "arcsine")
        assert code == 1 and "no samples" in err

    def test_missing_file_usage_error(self, capsys):
        code, _, err = run(capsys, "compare", "nope.csv", "--theory", "arcsine")
        assert code == 1


class TestReproduce:
    def test_fig2_bundle_structure_and_quality(self, tmp_path, capsys):
        bundle = tmp_path / "fig2"
        code, _, _ = run(capsys, "reproduce", "fig2", "--n", "400", "--grid", "129",
                         "--bins", "20", "--seed", "5", "--out", str(bundle))
        assert code == 0
        manifest = json.loads((bundle / "bundle.json").read_text())
        assert manifest["figure"] == "fig2"
        assert [s["r"] for s in manifest["series"]] == [0.1, 1.0, 10.0]
        assert manifest["overrides"] == {"n": 400, "grid": 129, "bins": 20}
        for series in manifest["series"]:
            for key in ("samples", "histogram", "theory"):
                assert (bundle / series[key]).is_file()
        # desk-scale sanity: the r = 0.1 series tracks its aging law
        code, out, _ = run(capsys, "compare", str(bundle / "samples_r0.1.csv"),
                           "--theory", "aging-arcsine", "--r", "0.1",
                           "--out", str(tmp_path / "rep.json"))
        assert code == 0
        report = json.loads((tmp_path / "rep.json").read_text())
        assert report["ks_distance"] < report["dkw_epsilon"] + 0.01

    def test_fig3a_bundle_small_scale(self, tmp_path, capsys):
        bundle = tmp_path / "fig3a"
        code, _, _ = run(capsys, "reproduce", "fig3a", "--n", "60", "--grid", "65",
                         "--bins", "10", "--seed", "5", "--out", str(bundle))
        assert code == 0
        manifest = json.loads((bundle / "bundle.json").read_text())
        assert manifest["preset"]["alpha"] == "0.5"
        assert len(manifest["series"]) == 3
        header, _, rows = read_table(bundle / "theory_r0.01.csv")
        assert float(header["beta"]) == pytest.approx(0.8148148148148148, abs=1e-12)
        assert rows[-1, 2] == 1.0  # cdf reaches one

    def test_reproduce_requires_out(self, capsys):
        code, _, err = run(capsys, "reproduce", "fig2")
        assert code == 1 and "--out" in err
