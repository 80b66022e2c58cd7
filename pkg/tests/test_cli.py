import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from photonpair import cli
from photonpair import io as pio
from photonpair.design import SCAN_FIELDS
from photonpair.errors import ScenarioError
from photonpair.pipeline import ScenarioConfig, load_scenario, parse_scenario
from photonpair.wigner import E_INV, main_contour, polygon_area

from .conftest import ROOT, SCENARIO_NAMES, SCENARIOS

GOLDEN = ROOT / "tests" / "golden"
REGEN = os.environ.get("PHOTONPAIR_REGEN_GOLDEN") == "1"


def _run(argv, capsys):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


# --- scenario parsing ---------------------------------------------------------------


MINIMAL = "material = BBO\npm_type = II\nlength_mm = 5\nlambda_c_nm = 800\npump_fwhm_nm = 5\n"


def test_parse_minimal_and_defaults():
    cfg = parse_scenario(MINIMAL, "demo")
    assert cfg.name == "demo" and cfg.pmf == "sinc" and cfg.sigma_g is None
    assert cfg.contour_level == pytest.approx(E_INV)
    assert parse_scenario(cfg.to_text(), "other") == cfg


@pytest.mark.parametrize("text,key", [
    (MINIMAL + "colour = blue\n", "colour"),
    (MINIMAL.replace("length_mm = 5\n", ""), "length_mm"),
    (MINIMAL.replace("length_mm = 5", "length_mm = -1"), "length_mm"),
    (MINIMAL.replace("length_mm = 5", "length_mm = five"), "length_mm"),
    (MINIMAL + "length_mm = 6\n", "length_mm"),
    (MINIMAL + "sigma_g =\n", "sigma_g"),
    (MINIMAL + "grid_N = 300\n", "grid_N"),
    (MINIMAL + "pmf = lorentz\n", "pmf"),
])
def test_parse_errors_name_the_key(text, key):
    with pytest.raises(ScenarioError) as info:
        parse_scenario(text, "bad")
    assert key in str(info.value)


def test_shipped_scenarios_parse():
    for name in SCENARIO_NAMES:
        cfg = load_scenario(SCENARIOS / f"{name}.txt")
        assert isinstance(cfg, ScenarioConfig) and cfg.name == name


# --- exit codes -----------------------------------------------------------------------


def test_usage_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text(MINIMAL + "colour = blue\n")
    code, _, err = _run(["report", "--scenario", bad], capsys)
    assert code == cli.EXIT_USAGE and "colour" in err
    assert _run(["report"], capsys)[0] == cli.EXIT_USAGE
    assert _run(["design", "BBO", "sgvm", "900:800"], capsys)[0] == cli.EXIT_USAGE
    assert _run(["design", "BBO", "sgvm", "800:800"], capsys)[0] == cli.EXIT_USAGE
    code, _, err = _run(["wigner", "--scenario", SCENARIOS / "bbo_sgvm.txt"], capsys)
    assert code == cli.EXIT_USAGE and "--out" in err
    assert _run(["report", "--scenario", tmp_path / "missing.txt"], capsys)[0] == cli.EXIT_USAGE


def test_compute_exit_code(tmp_path, capsys):
    code, _, err = _run(["design", "BBO", "sgvm", "800:900"], capsys)
    assert code == cli.EXIT_COMPUTE and "SGVM" in err
    clipped = tmp_path / "clipped.txt"
    clipped.write_text(MINIMAL + "grid_N = 128\ngrid_span = 0.05\n")
    code, _, err = _run(["report", "--scenario", clipped], capsys)
    assert code == cli.EXIT_COMPUTE and "SupportClippedError" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "photonpair", "design", "KDP", "agvm", "780:880"],
                          capture_output=True, text=True, check=True)
    row = json.loads(proc.stdout)
    assert row["lambda_c_nm"] == pytest.approx(830, abs=10)


# --- design -----------------------------------------------------------------------------


def test_design_rows(capsys):
    code, out, _ = _run(["design", "BBO", "sgvm", "1300:1700"], capsys)
    row = json.loads(out)
    assert code == 0
    assert row["lambda_c_nm"] == pytest.approx(1514, abs=10)
    assert row["theta_deg"] == pytest.approx(28.8, abs=0.5)
    code, out, _ = _run(["design", "KDP", "agvm", "780:880", "--csv"], capsys)
    header, values = out.strip().splitlines()
    row = dict(zip(header.split(","), values.split(",")))
    assert float(row["lambda_c_nm"]) == pytest.approx(830, abs=10)
    assert float(row["theta_deg"]) == pytest.approx(67.7, abs=0.5)
    again = _run(["design", "KDP", "agvm", "780:880", "--csv"], capsys)[1]
    assert again == out


# --- report / wigner / scan files -------------------------------------------------------


def _assert_finite(obj, path="report"):
    if isinstance(obj, dict):
        for k, v in obj.items():
            _assert_finite(v, f"{path}.{k}")
    elif isinstance(obj, float):
        assert math.isfinite(obj), path


def test_report_files_and_rerun(tmp_path, capsys):
    out = tmp_path / "kdp"
    code, stdout, _ = _run(["report", "--scenario", SCENARIOS / "kdp_agvm.txt", "--out", out,
                            "--csv"], capsys)
    assert code == 0 and stdout == ""
    report = pio.read_json(out / "report.json")
    _assert_finite(report)
    lam = pio.read_schmidt(report["files"]["schmidt"])
    assert lam[0] == pytest.approx(1 / report["entanglement"]["K"], rel=0.2)
    # the echoed scenario reproduces the run
    echo = tmp_path / "echo.txt"
    echo.write_text(ScenarioConfig(**report["scenario"]).to_text())
    code, stdout, _ = _run(["report", "--scenario", echo, "--json"], capsys)
    assert json.loads(stdout)["numerical"] == report["numerical"]


def test_wigner_files_roundtrip(tmp_path, capsys):
    out = tmp_path / "w"
    code, _, _ = _run(["wigner", "--scenario", SCENARIOS / "kdp_agvm.txt", "--out", out], capsys)
    assert code == 0
    names = sorted(p.name for p in out.iterdir())
    assert names == sorted(list(cli.WIGNER_FILES.values()) + ["report.json"])
    w = pio.read_cwf(out / "cwf.csv")
    assert w.values.shape == (w.omega.size, w.t.size)
    assert w.integral() == pytest.approx(1, abs=1e-3)
    num = pio.read_contours(out / "contour_numeric.csv")
    ana = pio.read_contours(out / "contour_analytic.csv")
    for c in num + ana:
        assert np.array_equal(c[0], c[-1])
    ratio = polygon_area(main_contour(num)) / polygon_area(main_contour(ana))
    assert abs(ratio - 1) < 0.05
    i_w = pio.read_profile(out / "i_omega.csv")
    i_t = pio.read_profile(out / "i_t.csv")
    assert i_w.integral() == pytest.approx(1, abs=1e-6)
    assert i_t.integral() == pytest.approx(1, abs=1e-6)


def test_wigner_contour_level_flag(tmp_path, capsys):
    args = ["wigner", "--scenario", SCENARIOS / "bbo_sgvm.txt"]
    _run(args + ["--out", tmp_path / "a", "--contour-level", "0.5"], capsys)
    _run(args + ["--out", tmp_path / "b"], capsys)
    a = main_contour(pio.read_contours(tmp_path / "a" / "contour_numeric.csv"))
    b = main_contour(pio.read_contours(tmp_path / "b" / "contour_numeric.csv"))
    assert polygon_area(a) < polygon_area(b)
    assert _run(args + ["--out", tmp_path / "c", "--contour-level", "2"], capsys)[0] == 2


def test_wigner_nogvm_contours_disagree_in_time(tmp_path, capsys):
    out = tmp_path / "nogvm"
    _run(["wigner", "--scenario", SCENARIOS / "bbo_nogvm.txt", "--out", out], capsys)
    num = main_contour(pio.read_contours(out / "contour_numeric.csv"))
    ana = main_contour(pio.read_contours(out / "contour_analytic.csv"))
    t_num = np.ptp(num[:, 1]) / 2
    t_ana = np.ptp(ana[:, 1]) / 2
    assert t_num > 1.4 * t_ana


def test_scan_files(tmp_path, capsys):
    out = tmp_path / "scan"
    code, stdout, _ = _run(["scan", "--scenario", SCENARIOS / "bbo_sgvm.txt", "--out", out,
                            "--lengths", "1,2.3", "--bandwidths", "15", "--threads", "2"], capsys)
    assert code == 0
    rows = pio.read_scan(out / "scan.csv")
    assert [r["length_mm"] for r in rows] == [1.0, 2.3]
    assert set(rows[0]) == set(SCAN_FIELDS)
    meta = pio.read_json(out / "scan.csv.json")
    assert meta["lengths_mm"] == [1.0, 2.3] and meta["base"]["name"] == "bbo_sgvm"
    assert _run(["scan", "--scenario", SCENARIOS / "bbo_sgvm.txt", "--out", out,
                 "--lengths", "a,b"], capsys)[0] == cli.EXIT_USAGE


def test_data_dir_env_in_versions(tmp_path, monkeypatch, capsys):
    from photonpair import crystal as cr

    text = (cr.data_dir() / cr.SELLMEIER_FILE).read_text().replace("2024.1", "env-test")
    (tmp_path / cr.SELLMEIER_FILE).write_text(text)
    monkeypatch.setenv(cr.DATA_ENV, str(tmp_path))
    code, out, _ = _run(["design", "BBO", "sgvm", "1300:1700", "--json"], capsys)
    assert code == 0
    code, out, _ = _run(["report", "--scenario", SCENARIOS / "bbo_sgvm.txt", "--grid-n", "256"],
                        capsys)
    assert json.loads(out)["versions"]["sellmeier"] == "env-test"


# --- goldens ------------------------------------------------------------------------------

# analytic and setup numbers are deterministic; numeric ones may move with BLAS/FFT builds
TOLERANCES = {"numerical": 1e-4, "entanglement": 1e-4}
SKIP = {"versions", "files"}


def _compare(got, want, rel, path):
    if isinstance(want, dict):
        assert set(got) == set(want), path
        for k in want:
            if k == "purity_discrepancy":
                assert abs(got[k]) < 1e-8
                continue
            _compare(got[k], want[k], rel, f"{path}.{k}")
    elif isinstance(want, float):
        assert got == pytest.approx(want, rel=rel, abs=1e-12), path
    else:
        assert got == want, path


@pytest.mark.parametrize("name", SCENARIO_NAMES)
def test_golden_reports(name, capsys):
    code, out, _ = _run(["report", "--scenario", SCENARIOS / f"{name}.txt", "--json"], capsys)
    assert code == 0
    report = json.loads(out)
    path = GOLDEN / f"{name}.json"
    if REGEN:
        pio.write_json(path, report)
    golden = pio.read_json(path)
    for section, want in golden.items():
        if section in SKIP:
            continue
        _compare(report[section], want, TOLERANCES.get(section, 1e-9), section)


def test_golden_headline_numbers():
    kdp = pio.read_json(GOLDEN / "kdp_agvm.json")
    assert kdp["numerical"]["delta_t_fs"] == pytest.approx(30.4, rel=0.1)
    nogvm = pio.read_json(GOLDEN / "bbo_nogvm.json")
    assert nogvm["numerical"]["delta_t_fs"] == pytest.approx(205.7, rel=0.1)
    assert nogvm["gaussian"]["delta_t_fs"] == pytest.approx(127.2, rel=0.1)


@pytest.mark.xfail(strict=True, reason="the numeric correlation time of a sinc PMF is the "
                   "top-hat width |tau_-|/2 = 106.7 fs; 67.5 fs is the Gaussian-model value")
def test_sgvm_numeric_correlation_time():
    sg = pio.read_json(GOLDEN / "bbo_sgvm.json")
    assert sg["numerical"]["tau_c_fs"] == pytest.approx(67.5, rel=0.1)
