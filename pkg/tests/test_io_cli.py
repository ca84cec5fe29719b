import csv
import json
import math
import shutil
from pathlib import Path

import numpy as np
import pytest

from leakyscm.cli import EXIT_CONFIG, EXIT_MATERIAL, EXIT_NOT_FOUND, EXIT_OK, EXIT_VALIDATION, main, select_mode
from leakyscm.config import ConfigError, SweepConfig, parse_complex, parse_config
from leakyscm.results import CSV_COLUMNS, load_dataset, pass_fraction, validate_dataset

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="module")
def three_freq(tmp_path_factory):
    out = tmp_path_factory.mktemp("three_freq")
    assert main(["sweep", "--config", str(DATA / "three_freq.json"), "--out", str(out), "--quiet"]) == EXIT_OK
    return out


def read_rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_defaults():
    cfg = parse_config({})
    assert cfg.n_points == 50 and cfg.steps == 150
    assert cfg.max_attenuation_np_mm == 15.0 and cfg.interface_residual_tol == 1e-3
    assert cfg.f_max_mhz == pytest.approx(30 / (2 * math.pi))
    assert cfg.zeta["shear_leaky"] == (10, 10j) and cfg.zeta["fully_leaky"] == (10j, 10j)
    assert len(cfg.omegas()) == 150 and cfg.omegas()[-1] == pytest.approx(30.0)


def test_config_round_trip():
    text = (DATA / "three_freq.json").read_text()
    cfg = parse_config(json.loads(text))
    again = parse_config(json.loads(cfg.to_json()))
    assert again.to_dict() == cfg.to_dict()
    assert again.digest() == cfg.digest()


def test_custom_material_and_zeta():
    cfg = parse_config({
        "materials": {"steel": {"rho": 7.85, "c_l": 5.96, "c_t": 3.26}},
        "run": {"system": {"side_b": "steel"}, "zeta": {"shear_leaky": [5, "5j"]}},
    })
    assert cfg.system().side_b.name == "steel"
    assert cfg.options().zeta["shear_leaky"] == (5, 5j)


@pytest.mark.parametrize("bad", [
    {"run": {"frequency": {"steps": 0}}},
    {"run": {"frequency": {"min_mhz": 2, "max_mhz": 1}}},
    {"run": {"n_points": 4}},
    {"run": {"system": {"half_thickness_mm": -1}}},
    {"run": {"zeta": {"evanescent": [0, 10]}}},
    {"run": {"zeta": {"sideways": [1, 1]}}},
    {"materials": {"x": {"rho": 1, "c_l": 1, "c_t": 2}}},
])
def test_config_errors(bad):
    with pytest.raises(ConfigError):
        parse_config(bad)


def test_parse_complex():
    assert parse_complex("10j") == 10j
    assert parse_complex("3+4i") == 3 + 4j
    assert parse_complex([1, 2]) == 1 + 2j
    with pytest.raises(ConfigError):
        parse_complex("ten")


def test_steps_zero_writes_nothing(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"run": {"frequency": {"steps": 0}}}))
    out = tmp_path / "out"
    assert main(["sweep", "--config", str(cfg), "--out", str(out)]) == EXIT_CONFIG
    assert not out.exists()


def test_unknown_material(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"run": {"system": {"guide": "unobtainium"}}}))
    assert main(["sweep", "--config", str(cfg), "--out", str(tmp_path / "o")]) == EXIT_MATERIAL


def test_golden_csv(three_freq):
    rows = read_rows(three_freq / "dispersion.csv")
    golden = read_rows(DATA / "golden_three_freq.csv")
    assert tuple(rows[0].keys()) == CSV_COLUMNS
    assert len(rows) == len(golden)
    for r, g in zip(rows, golden):
        assert r["case_id"] == g["case_id"]
        assert float(r["frequency_MHz"]) == float(g["frequency_MHz"])
        for key in ("re_kx_rad_per_mm", "im_kx_np_per_mm", "phase_velocity_km_per_s"):
            assert float(r[key]) == pytest.approx(float(g[key]), rel=1e-9, abs=1e-12)
    # every case interval is populated
    assert {r["case_id"] for r in rows} == {"0", "1", "2"}
    assert (three_freq / "plot_dispersion.py").exists() and (three_freq / "plot_attenuation.py").exists()


def test_dataset_ordering(three_freq):
    ds = load_dataset(three_freq)
    keys = [(m.omega, m.case.index, m.k_x.real) for m in ds.modes]
    assert keys == sorted(keys)
    meta = json.loads((three_freq / "modes.json").read_text())["metadata"]
    assert "config_hash" in meta and meta["steps"] == 3


def test_rerun_is_byte_identical(three_freq, tmp_path):
    out = tmp_path / "again"
    assert main(["sweep", "--config", str(DATA / "three_freq.json"), "--out", str(out), "--quiet"]) == EXIT_OK
    assert (out / "dispersion.csv").read_bytes() == (three_freq / "dispersion.csv").read_bytes()


def test_parallel_matches_serial(three_freq, tmp_path):
    out = tmp_path / "par"
    assert main(["sweep", "--config", str(DATA / "three_freq.json"), "--out", str(out), "--quiet", "--jobs", "2"]) == EXIT_OK
    assert (out / "dispersion.csv").read_bytes() == (three_freq / "dispersion.csv").read_bytes()


def test_validate_healthy(three_freq, capsys):
    assert main(["validate", "--data", str(three_freq)]) == EXIT_OK
    assert "(100.0%)" in capsys.readouterr().out
    assert read_rows(three_freq / "validation.csv")


def test_validate_negative_control(three_freq, tmp_path):
    bad = tmp_path / "bad"
    shutil.copytree(three_freq, bad)
    data = json.loads((bad / "modes.json").read_text())
    for r in data["modes"]:
        r["k_x"] = [r["k_x"][0] * 1.01, r["k_x"][1] * 1.01]
    (bad / "modes.json").write_text(json.dumps(data))
    ds = load_dataset(bad)
    rows = validate_dataset(ds)
    assert pass_fraction(rows) < 0.1
    assert main(["validate", "--data", str(bad)]) == EXIT_VALIDATION


def test_validate_empty(three_freq, tmp_path):
    empty = tmp_path / "empty"
    shutil.copytree(three_freq, empty)
    data = json.loads((empty / "modes.json").read_text())
    data["modes"] = []
    (empty / "modes.json").write_text(json.dumps(data))
    assert main(["validate", "--data", str(empty)]) == EXIT_OK
    assert (empty / "validation.csv").read_text().count("\n") == 1


def test_modeshape_shear_leaky(three_freq, tmp_path):
    out = tmp_path / "shape"
    assert main(["modeshape", "--data", str(three_freq), "--freq", "1.03", "--mode", "shear-leaky", "--out", str(out)]) == EXIT_OK
    (csv_path,) = out.glob("modeshape_*.csv")
    rows = read_rows(csv_path)
    side_b = [r for r in rows if r["region"] == "side_b"]
    amp = [math.hypot(float(r["re_ux"]), float(r["im_ux"])) + math.hypot(float(r["re_uy"]), float(r["im_uy"])) for r in side_b]
    # the radiated shear wave grows with distance from the plate
    assert amp[-1] > amp[len(amp) // 2]
    meta = json.loads(next(out.glob("modeshape_*.json")).read_text())
    assert meta["continuity_error"] < 1e-3
    assert (out / f"plot_{csv_path.stem}.py").exists()


def test_modeshape_non_radiating(three_freq, tmp_path):
    out = tmp_path / "shape"
    assert main(["modeshape", "--data", str(three_freq), "--freq", "3.53", "--mode", "non-radiating", "--out", str(out)]) == EXIT_OK
    rows = read_rows(next(out.glob("modeshape_*.csv")))
    uy = np.array([complex(float(r["re_uy"]), float(r["im_uy"])) for r in rows])
    ux = np.array([complex(float(r["re_ux"]), float(r["im_ux"])) for r in rows])
    amp = np.abs(ux) + np.abs(uy)
    assert amp[0] < 0.05 * amp.max() and amp[-1] < 0.05 * amp.max()


def test_modeshape_not_found(three_freq, capsys):
    assert main(["modeshape", "--data", str(three_freq), "--freq", "9.0"]) == EXIT_NOT_FOUND
    assert "outside the sweep range" in capsys.readouterr().err
    assert main(["modeshape", "--data", str(three_freq), "--freq", "1.03", "--mode", "40"]) == EXIT_NOT_FOUND
    assert "candidates" in capsys.readouterr().err


def test_select_mode_empty():
    from leakyscm.cli import ModeNotFoundError

    with pytest.raises(ModeNotFoundError):
        select_mode([], None)


def test_materials_list(capsys):
    assert main(["materials", "list"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "aluminium" in out and "epoxy" in out
