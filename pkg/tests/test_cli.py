"""Command-line front end: flag parsing, config precedence, CSV and
manifest output, reproducibility, exit codes, figure recipes."""

import csv
import json
import math
import subprocess
import sys

import pytest

import q1dscatter as q
from q1dscatter import cli


def run_cli(args, capsys):
    code = cli.main(args)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def read_csv(path):
    meta, rows = {}, []
    with open(path, newline="") as fh:
        data_lines = []
        for line in fh:
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition(":")
                meta[key.strip()] = value.strip()
            else:
                data_lines.append(line)
    reader = csv.DictReader(data_lines)
    rows = list(reader)
    return meta, rows


# ------------------------------------------------------------- happy paths


def test_transverse_two_site(tmp_path, capsys, two_site_spectrum):
    out = tmp_path / "t.csv"
    code, stdout, _ = run_cli(["transverse", "--trap", "two-site", "--v",
                               "1.0", "--output", str(out)], capsys)
    assert code == 0
    assert str(out) in stdout
    meta, rows = read_csv(out)
    assert len(rows) == 2
    # repr round-trip: CSV floats reproduce the binary values exactly
    for n, row in enumerate(rows):
        assert float(row["energy"]) == float(two_site_spectrum.energies[n])
    assert (tmp_path / "t.csv.manifest.json").exists()


def test_single_sweep_and_metadata(tmp_path, capsys, two_site_spectrum):
    out = tmp_path / "s.csv"
    code, _, _ = run_cli(["single", "--trap", "two-site", "--v", "1.0",
                          "--u-from", "-6", "--u-to", "6", "--points", "13",
                          "--output", str(out)], capsys)
    assert code == 0
    meta, rows = read_csv(out)
    assert len(rows) == 13
    assert float(meta["u-cir"]) == pytest.approx(-30.009137607725254,
                                                 rel=1e-12)
    mid = rows[6]
    assert float(mid["u"]) == 0.0
    assert float(mid["u1d"]) == 0.0
    for row in rows:
        assert float(row["atan_u1d"]) == pytest.approx(
            math.atan(float(row["u1d"])), abs=1e-15)


def test_ring_with_crossings(tmp_path, capsys):
    out = tmp_path / "r.csv"
    code, _, _ = run_cli(["ring", "--trap", "harmonic", "--omega", "0.1",
                          "--n-states", "21", "--length", "50",
                          "--branches", "2", "--crossings",
                          "--u-from", "-8", "--u-to", "8", "--points", "5",
                          "--output", str(out)], capsys)
    assert code == 0
    _, rows = read_csv(out)
    assert rows and all(row["length"] == "50" for row in rows)
    _, crossings = read_csv(tmp_path / "r_crossings.csv")
    assert len(crossings) == 9
    assert all(float(c["u"]) < 0.0 for c in crossings)


def test_twobody_resonance_report(tmp_path, capsys):
    out = tmp_path / "tb.csv"
    code, _, _ = run_cli(["twobody", "--trap", "two-site", "--v", "1.0",
                          "--resonances", "--u-from", "-40",
                          "--output", str(out)], capsys)
    assert code == 0
    meta, rows = read_csv(out)
    visible = [r for r in rows if r["visible"] == "True"]
    assert len(visible) == 2
    assert float(visible[0]["u"]) == pytest.approx(-26.966192414218135,
                                                   rel=1e-11)
    assert meta["zero-crossings"].startswith("-7.34862960967")


def test_oracle_gated_and_correct(tmp_path, capsys, two_site_spectrum):
    out = tmp_path / "o.csv"
    base = ["oracle", "--trap", "two-site", "--v", "1.0", "--mode", "single",
            "--u", "-2", "--lx", "100", "--output", str(out)]
    code, _, err = run_cli(base, capsys)
    assert code == 2  # refused without --validate
    code, _, _ = run_cli(base + ["--validate"], capsys)
    assert code == 0
    _, rows = read_csv(out)
    theory = q.effective_u1d(two_site_spectrum, -2.0).a
    assert float(rows[0]["a"]) == pytest.approx(theory, abs=1e-6)


def test_tabulated_trap_flags(tmp_path, capsys):
    out = tmp_path / "tab.csv"
    # --values=... (equals form) keeps argparse from reading the leading
    # minus of a negative coordinate as a new flag
    code, _, _ = run_cli(["transverse", "--trap", "tabulated",
                          "--values=-1:0.3,0:0,1:0.3",
                          "--output", str(out)], capsys)
    assert code == 0
    meta, rows = read_csv(out)
    assert len(rows) == 3
    assert meta["symmetric"] == "True"


# ---------------------------------------------------------- reproducibility


def test_config_hash_ignores_execution_keys(tmp_path, capsys):
    args = ["single", "--trap", "two-site", "--v", "1.0", "--u-from", "-4",
            "--u-to", "4", "--points", "5"]
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    run_cli(args + ["--output", str(out1), "--threads", "1"], capsys)
    run_cli(args + ["--output", str(out2), "--threads", "2"], capsys)
    meta1, _ = read_csv(out1)
    meta2, _ = read_csv(out2)
    assert meta1["config-hash"] == meta2["config-hash"]
    # the data bytes are identical too (threading cannot change them)
    assert out1.read_bytes() == out2.read_bytes()


def test_config_hash_tracks_physics(tmp_path, capsys):
    base = ["single", "--trap", "two-site", "--v", "1.0", "--u-from", "-4",
            "--points", "5"]
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    run_cli(base + ["--u-to", "4", "--output", str(out1)], capsys)
    run_cli(base + ["--u-to", "5", "--output", str(out2)], capsys)
    meta1, _ = read_csv(out1)
    meta2, _ = read_csv(out2)
    assert meta1["config-hash"] != meta2["config-hash"]


def test_config_file_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("trap = two-site\nv = 1.0\nu_from = -6\nu_to = -2\n"
                   "points = 5\n")
    out = tmp_path / "c.csv"
    # the flag wins over the file
    code, _, _ = run_cli(["single", "--config", str(cfg), "--u-to", "-1",
                          "--output", str(out)], capsys)
    assert code == 0
    manifest = json.loads((tmp_path / "c.csv.manifest.json").read_text())
    assert manifest["config"]["u_to"] == -1.0
    assert manifest["config"]["u_from"] == -6.0
    _, rows = read_csv(out)
    assert float(rows[-1]["u"]) == -1.0


def test_manifest_round_trip(tmp_path, capsys):
    out1 = tmp_path / "first.csv"
    args = ["single", "--trap", "two-site", "--v", "1.0", "--u-from", "-9",
            "--u-to", "3", "--points", "7", "--output", str(out1)]
    code, _, _ = run_cli(args, capsys)
    assert code == 0
    out2 = tmp_path / "second.csv"
    code, _, _ = run_cli(["single", "--config",
                          str(tmp_path / "first.csv.manifest.json"),
                          "--output", str(out2)], capsys)
    assert code == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_manifest_subcommand_mismatch(tmp_path, capsys):
    out = tmp_path / "first.csv"
    run_cli(["single", "--trap", "two-site", "--v", "1.0", "--u-from", "-2",
             "--u-to", "2", "--points", "3", "--output", str(out)], capsys)
    code, _, err = run_cli(["twobody", "--config",
                            str(tmp_path / "first.csv.manifest.json")],
                           capsys)
    assert code == 2


# ----------------------------------------------------------------- failures


def expect_error(args, capsys, exit_code, error_name=None):
    code, _, err = run_cli(args, capsys)
    assert code == exit_code
    record = json.loads(err.strip().splitlines()[-1])
    assert record["exit_code"] == exit_code
    assert record["message"]
    if error_name:
        assert record["error"] == error_name
    return record


def test_unknown_flag_is_config_error(capsys):
    expect_error(["single", "--no-such-flag"], capsys, 2, "ConfigError")


def test_missing_trap_parameter(capsys):
    expect_error(["single", "--trap", "two-site", "--u-from", "-1",
                  "--u-to", "1", "--points", "3"], capsys, 2, "ConfigError")


def test_empty_sweep_rejected(tmp_path, capsys):
    expect_error(["single", "--trap", "two-site", "--v", "1.0",
                  "--u-from", "-1", "--u-to", "1", "--points", "0",
                  "--output", str(tmp_path / "x.csv")], capsys, 2)
    expect_error(["twobody", "--trap", "two-site", "--v", "1.0",
                  "--output", str(tmp_path / "y.csv")], capsys, 2)


def test_unknown_config_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("nonsense_key = 1\n")
    expect_error(["single", "--config", str(cfg)], capsys, 2)


def test_solver_failure_exit_code(tmp_path, capsys):
    # pinned basis too small for the channel tail tolerance
    expect_error(["single", "--trap", "harmonic", "--omega", "1e-3",
                  "--n-states", "40", "--u-from", "-1", "--u-to", "1",
                  "--points", "3", "--output", str(tmp_path / "x.csv")],
                 capsys, 3, "TailTooLarge")


def test_regime_violation_exit_code(tmp_path, capsys):
    # at k = 2.5 an excited transverse channel is open
    expect_error(["single", "--trap", "harmonic", "--omega", "0.1",
                  "--n-states", "21", "--k", "2.5", "--u-from", "-1",
                  "--u-to", "1", "--points", "3",
                  "--output", str(tmp_path / "x.csv")],
                 capsys, 4, "OpenChannel")


def test_unknown_figure(capsys):
    expect_error(["figure", "fig9"], capsys, 2, "UnknownFigure")


# ------------------------------------------------------------------ figures


def test_figure_recipes_resolve():
    expected = {"fig1": "single", "fig2": "continuum", "fig3": "ring",
                "fig4": "twobody", "fig5": "twobody"}
    for name, subcommand in expected.items():
        recipe = cli.figure_recipe(name)
        assert recipe.subcommand == subcommand
        assert recipe.options["output"] == f"{name}.csv"
        assert len(recipe.config_hash()) == 12
    with pytest.raises(q.UnknownFigure):
        cli.figure_recipe("fig0")


def test_figure_fig5_end_to_end(tmp_path, capsys):
    code, stdout, _ = run_cli(["figure", "fig5", "--output-dir",
                               str(tmp_path)], capsys)
    assert code == 0
    meta, rows = read_csv(tmp_path / "fig5.csv")
    assert len(rows) == 600
    assert float(meta["r-entrance"]) == pytest.approx(0.2297233270802732,
                                                      rel=1e-12)
    _, res_rows = read_csv(tmp_path / "fig5_resonances.csv")
    visible = [r for r in res_rows if r["visible"] == "True"]
    assert len(visible) == 4
    assert float(visible[0]["u"]) == pytest.approx(-8.286470998861734,
                                                   rel=1e-10)


def test_figure_fig1_end_to_end(tmp_path, capsys):
    code, _, _ = run_cli(["figure", "fig1", "--output-dir", str(tmp_path)],
                         capsys)
    assert code == 0
    meta, rows = read_csv(tmp_path / "fig1.csv")
    assert len(rows) == 600
    assert float(meta["u-cir"]) == pytest.approx(-2.762302199601078,
                                                 rel=1e-12)


def test_console_script_entry_point(tmp_path):
    out = tmp_path / "e.csv"
    proc = subprocess.run(
        [sys.executable, "-m", "q1dscatter.cli", "transverse", "--trap",
         "two-site", "--v", "1.0", "--output", str(out)],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert out.exists()
