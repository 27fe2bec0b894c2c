import json
import subprocess
import sys

import pytest

from vacua import cli
from vacua.config import sample_hard_sphere, save_positions
from vacua.params import DipoleSpecies


def run(*argv):
    return subprocess.run([sys.executable, "-m", "vacua.cli", *argv], capture_output=True, text=True)


def test_coefficients_report():
    p = run("coefficients", "--json")
    out = json.loads(p.stdout)
    checks = {c["name"]: c for c in out["result"]["checks"]}
    assert set(checks) == {"radiative_bracket_7_6", "schwinger_rho2", "schwinger_extended_rho3",
                           "radiative_rho3", "onsager_prefactor", "ll_consistency"}
    failing = sorted(k for k, c in checks.items() if not c["pass"])
    assert failing == [], f"failing checks: {failing}"


def test_lamb_rho1_example():
    p = run("lamb-rho1", "--zeta0", "0.02", "--g", "1e-8", "--json")
    assert p.returncode == 0, p.stderr
    shift = json.loads(p.stdout)["result"]["shift"]
    assert shift["value"] < 0
    assert set(shift["breakdown"]) == {"near_field", "radiative"}


def test_unknown_flag_exit_2():
    p = run("lamb-free", "--bogus")
    assert p.returncode == 2
    assert "usage:" in p.stderr


def test_parameter_error_exit_2():
    p = run("lamb-free", "--g", "0.5", "--cutoff", "10")
    assert p.returncode == 2
    assert "InvalidParameter" in p.stderr


def test_numerical_error_exit_3():
    p = run("lamb-free", "--g", "0.01", "--cutoff", "200", "--renormalized")
    assert p.returncode == 3
    assert "DivergentRenormalization" in p.stderr


def test_json_is_deterministic():
    a = run("vacuum-rho2", "--zeta0", "0.05", "--g", "1e-8", "--rho_bar", "0.01", "--json")
    b = run("vacuum-rho2", "--zeta0", "0.05", "--g", "1e-8", "--rho_bar", "0.01", "--json")
    assert a.returncode == 0 and a.stdout == b.stdout


@pytest.mark.parametrize("cmd,extra,cols", [
    ("effmedium", ["--g", "1e-3", "--rho_bar", "0.01", "--zeta0", "0.3"], "u,chi,n,lorentz_factor"),
    ("schwinger", ["--g", "1e-3", "--rho_bar", "0.01", "--zeta0", "0.3", "--cutoff", "20"], "u,n,integrand"),
])
def test_spectra_csv_and_json(cmd, extra, cols):
    p = run(cmd, *extra, "--format", "csv", "--points", "5")
    assert p.returncode == 0, p.stderr
    lines = p.stdout.splitlines()
    assert lines[0].startswith("# units:")
    assert lines[1] == cols
    assert len(lines) == 2 + 5
    q = run(cmd, *extra, "--format", "json", "--points", "5")
    assert q.returncode == 0
    json.loads(q.stdout)


def test_config_file_and_flag_override(tmp_path, capsys):
    cfgf = tmp_path / "run.cfg"
    cfgf.write_text("# run parameters\ng = 1e-8\nzeta0 = 0.05\nrho_bar = 0.01\n")
    assert cli.main(["lamb-rho1", "--config", str(cfgf), "--json"]) == 0
    a = json.loads(capsys.readouterr().out)
    assert a["manifest"]["parameters"] == {"g": 1e-8, "rho_bar": 0.01, "zeta0": 0.05}
    assert cli.main(["lamb-rho1", "--config", str(cfgf), "--rho_bar", "0.02", "--json"]) == 0
    b = json.loads(capsys.readouterr().out)
    assert b["manifest"]["parameters"]["rho_bar"] == 0.02
    assert b["result"]["shift"]["value"] == pytest.approx(2 * a["result"]["shift"]["value"], rel=1e-12)


def test_config_file_rejects_unknown_key(tmp_path):
    cfgf = tmp_path / "bad.cfg"
    cfgf.write_text("g = 1e-8\ncolour = blue\n")
    assert cli.main(["lamb-rho1", "--config", str(cfgf)]) == 2


def test_config_energy_and_manifest_sidecar(tmp_path):
    cfg = sample_hard_sphere(8, 0.02, 0.1, seed=2, species=DipoleSpecies(1e-6))
    pos = tmp_path / "pos.txt"
    save_positions(cfg, pos)
    out = tmp_path / "res.json"
    p = run("config-energy", "--positions", str(pos), "--g", "1e-6", "--index", "0", "--json", "--out", str(out))
    assert p.returncode == 0, p.stderr
    assert json.loads(out.read_text()) == json.loads(p.stdout)
    side = json.loads((tmp_path / "res.json.manifest.json").read_text())
    assert side["wall_time"] >= 0 and side["command"] == "config-energy"


def test_ensemble_rejects_single_sample():
    p = run("ensemble", "--g", "1e-6", "--zeta0", "0.1", "--rho_bar", "0.01", "--n", "4", "--samples", "1")
    assert p.returncode == 2


def test_ensemble_small_run_records_seed():
    p = run("ensemble", "--g", "1e-6", "--zeta0", "0.1", "--rho_bar", "0.02", "--n", "4", "--samples", "16",
            "--seed", "5", "--json")
    assert p.returncode == 0, p.stderr
    out = json.loads(p.stdout)
    assert out["manifest"]["seed"] == 5
