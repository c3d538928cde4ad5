import subprocess
import sys

import numpy as np
import pytest

from jadeif import fileio
from jadeif.cli import main


@pytest.fixture
def ex1_csv(tmp_path):
    p = tmp_path / "ex1.csv"
    assert main(["synth", "ex1", "-o", str(p)]) == 0
    return p


def test_synth_columns(ex1_csv):
    sig, cols = fileio.read_columns(ex1_csv, required=("value", "clean", "phase"))
    assert len(sig) == 3000
    assert sig.sample_period == pytest.approx(0.1)
    assert not np.allclose(cols["value"], cols["clean"])


def test_synth_snr_option(tmp_path):
    p = tmp_path / "s.csv"
    assert main(["synth", "ex2", "--snr-db", "4.11", "--seed", "3", "-o", str(p)]) == 0
    _, cols = fileio.read_columns(p, required=("clean",))
    noise = cols["value"] - cols["clean"]
    snr = 20 * np.log10(np.linalg.norm(cols["clean"]) / np.linalg.norm(noise))
    assert snr == pytest.approx(4.11, abs=1e-6)


def test_synth_then_jade(ex1_csv, tmp_path):
    out = tmp_path / "j.csv"
    assert main(["jade", str(ex1_csv), "--truth-crossings", "-o", str(out)]) == 0
    _, cols = fileio.read_columns(out, required=("phase_rad", "if_hz", "amplitude"))
    _, truth = fileio.read_columns(ex1_csv, required=("phase",))
    core = slice(300, 2700)
    err = np.linalg.norm(cols["phase_rad"][core] - truth["phase"][core]) / np.linalg.norm(truth["phase"][core])
    assert err < 0.02


@pytest.mark.parametrize("cmd", [["decompose"], ["baseline", "ht"], ["pipeline"]])
def test_commands_run(ex1_csv, tmp_path, cmd):
    out = tmp_path / "o.csv"
    assert main(cmd + [str(ex1_csv), "-o", str(out)]) == 0
    assert out.read_text().startswith("time,")


def test_plot_command(ex1_csv, tmp_path):
    svg = tmp_path / "p.svg"
    assert main(["plot", str(ex1_csv), "--columns", "value,clean", "-o", str(svg)]) == 0
    assert svg.read_text().count("<polyline") == 2
    assert main(["plot", str(ex1_csv), "--columns", "nope", "-o", str(svg)]) == 2


def test_bench_sweep_and_compare(tmp_path, capsys):
    assert main(["bench", "sweep", "--fixture", "ex1", "--seeds", "2", "--snr-db", "9.19,-1.45"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "snr_db,epsilon_median,epsilon_iqr" and len(lines) == 3
    assert main(["bench", "compare", "--fixture", "ex2"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "method,epsilon,error" and len(out) == 5


@pytest.mark.parametrize("argv", [
    [],
    ["synth", "nonexistent"],
    ["jade", "x.csv", "--window", "abc"],
    ["bench", "sweep", "--method", "wavelet"],
])
def test_usage_errors_exit_1(argv):
    assert main(argv) == 1


def test_data_errors_exit_2(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("time,value\n0,1\n1,x\n")
    assert main(["jade", str(bad)]) == 2
    assert main(["decompose", str(tmp_path / "missing.csv")]) == 2


def test_config_file(ex1_csv, tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("# comment\nmax-imfs = 1\n")
    out = tmp_path / "d.csv"
    assert main(["decompose", str(ex1_csv), "--config", str(cfg), "-o", str(out)]) == 0
    assert out.read_text().splitlines()[0] == "time,imf_1,remainder"
    # flags override the file
    assert main(["decompose", str(ex1_csv), "--config", str(cfg), "--max-imfs", "2", "-o", str(out)]) == 0
    assert out.read_text().splitlines()[0] == "time,imf_1,imf_2,remainder"


@pytest.mark.parametrize("text", ["bogus = 1\n", "no equals sign\n", "max-imfs = many\n"])
def test_bad_config_exit_1(ex1_csv, tmp_path, text):
    cfg = tmp_path / "c.cfg"
    cfg.write_text(text)
    assert main(["decompose", str(ex1_csv), "--config", str(cfg)]) == 1


def test_module_entry_point(ex1_csv):
    r = subprocess.run([sys.executable, "-m", "jadeif", "baseline", "dq", str(ex1_csv)],
                       capture_output=True, text=True)
    assert r.returncode == 0
    assert r.stdout.splitlines()[0] == "time,phase_rad,if_hz"
