import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from bosemix import __version__
from bosemix.cli import SCENARIOS, main, resolve
from bosemix.dephasing import GammaKind, gamma
from bosemix.errors import ConfigError
from bosemix.reservoir import Branch

FAST = ["--steps", "64", "--t-max", "4"]


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], dtype=float)


def test_gamma_single_files_and_header(tmp_path):
    assert main(["gamma-single", "--out", str(tmp_path), *FAST]) == 0
    manifest = json.loads((tmp_path / "gamma-single_manifest.json").read_text())
    assert manifest["outputs"] == ["gamma-single_gamma0_upper_L0.75.csv", "gamma-single_gamma0_lower_L0.75.csv"]
    header, data = read_csv(tmp_path / manifest["outputs"][0])
    assert header == ["t", "r12=0.2", "r12=1", "r12=3"]
    assert data.shape == (65, 4)
    np.testing.assert_array_equal(data[:, 0], np.linspace(0, 4, 65))
    cfg = resolve("gamma-single").config(0.2, 0.75)
    assert data[17, 1] == gamma(cfg, Branch.UPPER, GammaKind.GAMMA0, data[17, 0])


def test_csv_text_format(tmp_path):
    main(["gamma-single", "--out", str(tmp_path), "--r12", "0.5", *FAST])
    raw = (tmp_path / "gamma-single_gamma0_lower_L0.75.csv").read_bytes()
    assert b"\r" not in raw and raw.endswith(b"\n")
    last = raw.decode().splitlines()[-1].split(",")
    assert last[0] == "4" and float(last[1]) > 0 and len(last[1].replace("-", "").replace(".", "")) >= 15


def test_manifest_contents(tmp_path):
    main(["gamma-two", "--out", str(tmp_path), "--r12", "0.2", "--convention", "as_printed", *FAST])
    m = json.loads((tmp_path / "gamma-two_manifest.json").read_text())
    assert m["tool"] == "bosemix" and m["version"] == __version__
    assert m["convention"] == "as_printed" and m["config"]["convention"] == "as_printed"
    assert m["config"]["alpha"] == 0.76 and m["config"]["L"] == [0.75] and m["config"]["d"] is None
    assert m["wall_clock_seconds"] >= 0 and len(m["outputs"]) == 4


def test_rerun_and_manifest_round_trip_are_byte_identical(tmp_path):
    args = ["decay-rates", "--r12", "0.9", "--L", "0.75", *FAST]
    main([*args, "--out", str(tmp_path / "a")])
    main([*args, "--out", str(tmp_path / "b")])
    manifest = tmp_path / "a" / "decay-rates_manifest.json"
    main(["decay-rates", "--config", str(manifest), "--out", str(tmp_path / "c")])
    for name in json.loads(manifest.read_text())["outputs"]:
        ref = (tmp_path / "a" / name).read_bytes()
        assert (tmp_path / "b" / name).read_bytes() == ref
        assert (tmp_path / "c" / name).read_bytes() == ref


def test_parallel_matches_serial(tmp_path):
    args = ["induced-coupling", "--r12", "0.2,0.9", "--steps", "64", "--t-max", "6"]
    main([*args, "--out", str(tmp_path / "s")])
    main([*args, "--out", str(tmp_path / "p"), "--jobs", "2"])
    for f in (tmp_path / "s").glob("*.csv"):
        assert (tmp_path / "p" / f.name).read_bytes() == f.read_bytes()


def test_nonmarkov_summary(tmp_path):
    main(["nonmarkov-single", "--out", str(tmp_path), "--r12", "0.2", "--steps", "64", "--t-max", "10"])
    header, data = read_csv(tmp_path / "nonmarkov-single_measure.csv")
    assert header[:2] == ["L", "r12"] and "N_upper" in header and "N_lower" in header
    assert data.shape == (1, 8) and data[0, header.index("N_upper")] >= 0


def test_sdf_scenario_writes_ohmicity_table(tmp_path):
    assert main(["sdf-single", "--out", str(tmp_path), "--r12", "0.2", "--L", "0.75"]) == 0
    header, data = read_csv(tmp_path / "sdf-single_sdf0_lower_L0.75.csv")
    assert header == ["omega", "r12=0.2"] and data.shape == (400, 2)
    rows = list(csv.DictReader(open(tmp_path / "sdf-single_ohmicity.csv")))
    assert {r["branch"] for r in rows} == {"upper", "lower"}
    assert all(r["class"] in ("sub-Ohmic", "Ohmic", "super-Ohmic", "undetermined") for r in rows)


def test_validate_empty_file_gives_canonical_parameters(tmp_path, capsys):
    path = tmp_path / "empty.ini"
    path.write_text("")
    assert main(["validate", str(path)]) == 0
    cfg = json.loads(capsys.readouterr().out)["config"]
    assert cfg["alpha"] == 0.76 and cfg["p"] == 0.5 and cfg["L"] == [0.75]
    assert cfg["r12"] == [0.2, 1.0, 3.0] and cfg["allow_immiscible"]


def test_unknown_key_names_nearest(tmp_path, capsys):
    path = tmp_path / "typo.ini"
    path.write_text("[scenario]\nsteps = 100\nalpah = 0.5\n")
    assert main(["validate", str(path)]) == 2
    err = capsys.readouterr().err
    assert f"{path}:3: unknown key 'alpah' (did you mean 'alpha'?)" in err


def test_errors_are_aggregated_and_line_anchored(tmp_path):
    path = tmp_path / "bad.ini"
    path.write_text("[scenario]\n# comment\nsteps = ten\nalpha = -1\n\n[output]\nx = 1\n")
    with pytest.raises(ConfigError) as info:
        resolve("gamma-single", path)
    errors = info.value.errors
    assert any(e.startswith(f"{path}:3: steps") for e in errors)
    assert any(e.startswith(f"{path}:4: alpha") for e in errors)
    assert any(e.startswith(f"{path}:6: unknown section [output]") for e in errors)


def test_physical_section(tmp_path):
    path = tmp_path / "phys.ini"
    path.write_text("[physical]\ndensity = 3.6e7\n")
    with pytest.raises(ConfigError) as info:
        resolve("gamma-single", path)
    assert any("missing key" in e for e in info.value.errors)


def test_explicit_high_r12_needs_flag(tmp_path, capsys, caplog):
    args = ["gamma-single", "--out", str(tmp_path), "--r12", "1.5", *FAST]
    assert main(args) == 2
    assert "--allow-immiscible" in capsys.readouterr().err
    assert main([*args, "--allow-immiscible"]) == 0
    assert any("threshold" in r.message for r in caplog.records)
    m = json.loads((tmp_path / "gamma-single_manifest.json").read_text())
    assert m["warnings"] and m["config"]["allow_immiscible"]


def test_invalid_values_exit_nonzero(tmp_path, capsys):
    assert main(["gamma-single", "--out", str(tmp_path), "--steps", "10"]) == 2
    assert "steps must be >= 64" in capsys.readouterr().err
    with pytest.raises(SystemExit):
        main(["no-such-scenario"])


def test_every_scenario_is_a_subcommand():
    for name in SCENARIOS:
        settings = resolve(name)
        assert settings.r12 == [0.2, 1.0, 3.0]
    assert resolve("concurrence").L == [7.5] and resolve("concurrence").t_max == 40.0


def test_module_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "bosemix", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and __version__ in out.stdout
