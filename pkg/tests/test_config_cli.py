"""Config parsing, metadata round-trip, and the command-line surface."""

import subprocess
import sys

import numpy as np
import pytest

from jetflow import verify
from jetflow.carnot import IX1, IY, IY20, StructureConstants, basis_vector
from jetflow.cli import main
from jetflow.config import (ConfigError, ExperimentConfig, flat_items,
                            from_flat_lines, load_config, with_overrides)
from jetflow.integrators import IntegratorConfig

QUARTIC_TOML = """\
mu = [0.0, 0.0, 0.0, 0.0, 0.0, 1.0]

[initial]
reduced = [0.1, 0.0, 0.9937303457175895, 0.3]

[integrator]
step = 1e-3
t_final = 2.0
sample_stride = 100

[analysis]
energy = 0.5
seeds = [[0.0, 0.0, 0.4, 0.916515138991168], [0.2, 0.0, 0.6, 0.7997499609252883]]
max_crossings = 10

[output]
path = "{out}"
format = "csv"
"""


def write_config(tmp_path, text=QUARTIC_TOML, name="exp.toml", out="run.csv"):
    path = tmp_path / name
    path.write_text(text.format(out=tmp_path / out))
    return str(path)


def read_lines(path):
    with open(path, encoding="utf-8") as fh:
        return fh.read().splitlines()


def test_load_config_happy_path(tmp_path):
    cfg = load_config(write_config(tmp_path))
    assert cfg.mu == (0.0, 0.0, 0.0, 0.0, 0.0, 1.0)
    assert cfg.initial_reduced == (0.1, 0.0, 0.9937303457175895, 0.3)
    assert cfg.initial_full is None
    assert cfg.integrator.step == 1e-3
    assert cfg.integrator.sample_stride == 100
    assert cfg.energy == 0.5
    assert len(cfg.seeds) == 2
    assert cfg.output_format == "csv"


def test_unknown_key_is_rejected_by_name(tmp_path):
    text = QUARTIC_TOML + "\n[integrator.extra]\nfoo = 1\n"
    with pytest.raises(ConfigError) as info:
        load_config(write_config(tmp_path, text))
    assert "integrator." in str(info.value)


def test_missing_required_field_is_named(tmp_path):
    text = QUARTIC_TOML.replace("step = 1e-3\n", "")
    with pytest.raises(ConfigError, match="integrator.step"):
        load_config(write_config(tmp_path, text))


def test_both_initial_blocks_rejected(tmp_path):
    text = QUARTIC_TOML.replace(
        "[integrator]",
        "full = [0,0,0,0,0,0,0,0, 0,0, 0.0,0.0,0.0,0.0,0.0,1.0]\n\n[integrator]")
    with pytest.raises(ConfigError, match="initial"):
        load_config(write_config(tmp_path, text))


def test_full_initial_momentum_block_must_match_mu(tmp_path):
    text = QUARTIC_TOML.replace(
        "reduced = [0.1, 0.0, 0.9937303457175895, 0.3]",
        "full = [0,0,0,0,0,0,0,0, 0.5,0.3, 9.0,0.0,0.0,0.0,0.0,1.0]")
    with pytest.raises(ConfigError, match="initial.full"):
        load_config(write_config(tmp_path, text))


def test_non_numeric_entry_is_rejected(tmp_path):
    text = QUARTIC_TOML.replace("step = 1e-3", 'step = "fast"')
    with pytest.raises(ConfigError, match="integrator.step"):
        load_config(write_config(tmp_path, text))


def test_flat_items_round_trip(tmp_path):
    cfg = load_config(write_config(tmp_path))
    lines = [f"{key} = {literal}" for key, literal in flat_items(cfg)]
    assert from_flat_lines(lines) == cfg


def test_flat_items_round_trip_with_shoot_block(tmp_path):
    text = QUARTIC_TOML + "\n[shoot]\ntarget = [0.5, 0.2]\nhorizon = 2.0\n"
    cfg = load_config(write_config(tmp_path, text))
    lines = [f"{key} = {literal}" for key, literal in flat_items(cfg)]
    assert from_flat_lines(lines) == cfg


def test_overrides_revalidate(tmp_path):
    cfg = load_config(write_config(tmp_path))
    cfg2 = with_overrides(cfg, step=5e-4, t_final=1.0, out="other.csv")
    assert cfg2.integrator.step == 5e-4
    assert cfg2.integrator.t_final == 1.0
    assert cfg2.output_path == "other.csv"
    with pytest.raises(ConfigError):
        with_overrides(cfg, step=-1.0)


def test_verify_clean_run_passes_and_is_deterministic():
    r1 = verify.format_report(verify.run_structure_suite())
    r2 = verify.format_report(verify.run_structure_suite())
    assert r1 == r2
    assert "overall: PASS" in r1
    assert r1.count("PASS") >= 11


def test_verify_detects_corrupted_structure_constant():
    bad = StructureConstants.canonical().replace_entry(
        IX1, IY20, 0.5 * basis_vector(IY))
    results = verify.run_structure_suite(structure=bad)
    failing = [r.name for r in results if not r.passed]
    assert "bracket-table" in failing


def test_cli_verify_exit_codes(capsys):
    assert main(["verify"]) == 0
    out1 = capsys.readouterr().out
    assert "overall: PASS" in out1
    assert main(["verify", "--inject-fault", "0,2,7,0.5"]) == 1
    out2 = capsys.readouterr().out
    assert "FAIL" in out2
    assert "bracket-table" in out2


def test_cli_verify_report_is_byte_identical(tmp_path, capsys):
    out_a, out_b = str(tmp_path / "a.txt"), str(tmp_path / "b.txt")
    assert main(["verify", "--out", out_a]) == 0
    assert main(["verify", "--out", out_b]) == 0
    capsys.readouterr()
    assert open(out_a, "rb").read() == open(out_b, "rb").read()


def test_cli_simulate_writes_deterministic_file(tmp_path, capsys):
    cfg_path = write_config(tmp_path)
    assert main(["simulate", "--config", cfg_path, "--freeze-metadata"]) == 0
    capsys.readouterr()
    lines = read_lines(str(tmp_path / "run.csv"))
    meta = [ln for ln in lines if ln.startswith("#")]
    body = [ln for ln in lines if not ln.startswith("#")]
    assert body[0] == "t,x,y,p_x,p_y,energy"
    assert len(body) == 1 + 21  # header + 20 strided samples + t=0
    assert not any("generated" in ln for ln in meta)
    # byte-identical rerun
    first = open(tmp_path / "run.csv", "rb").read()
    assert main(["simulate", "--config", cfg_path, "--freeze-metadata"]) == 0
    capsys.readouterr()
    assert open(tmp_path / "run.csv", "rb").read() == first


def test_cli_metadata_echo_reparses_to_equal_config(tmp_path, capsys):
    cfg_path = write_config(tmp_path)
    assert main(["simulate", "--config", cfg_path, "--freeze-metadata"]) == 0
    capsys.readouterr()
    lines = read_lines(str(tmp_path / "run.csv"))
    echo = [ln[len("# cfg."):] for ln in lines if ln.startswith("# cfg.")]
    cfg = load_config(cfg_path)
    assert from_flat_lines(echo) == cfg


def test_cli_timestamp_present_without_freeze(tmp_path, capsys):
    cfg_path = write_config(tmp_path)
    assert main(["simulate", "--config", cfg_path]) == 0
    capsys.readouterr()
    lines = read_lines(str(tmp_path / "run.csv"))
    assert any(ln.startswith("# generated = ") for ln in lines)


def test_cli_step_override_changes_row_count(tmp_path, capsys):
    cfg_path = write_config(tmp_path)
    assert main(["simulate", "--config", cfg_path, "--freeze-metadata",
                 "--step", "2e-3", "--t-final", "1.0"]) == 0
    capsys.readouterr()
    lines = read_lines(str(tmp_path / "run.csv"))
    body = [ln for ln in lines if not ln.startswith("#")]
    # 500 steps sampled every 100 -> 0, 100, ..., 500 plus header
    assert len(body) == 1 + 6
    assert any("cfg.integrator.step = 0.002" in ln for ln in lines)


def test_cli_section_run(tmp_path, capsys):
    cfg_path = write_config(tmp_path)
    out = str(tmp_path / "sec.csv")
    assert main(["section", "--config", cfg_path, "--freeze-metadata",
                 "--out", out, "--t-final", "120.0"]) == 0
    capsys.readouterr()
    lines = read_lines(out)
    body = [ln for ln in lines if not ln.startswith("#")]
    assert body[0] == "seed_index,crossing_index,t,x,p_x"
    assert len(body) == 1 + 20  # two seeds, ten crossings each
    seed_col = {row.split(",")[0] for row in body[1:]}
    assert seed_col == {"0.0", "1.0"}


def test_cli_section_requires_energy(tmp_path, capsys):
    text = QUARTIC_TOML.replace("energy = 0.5\n", "")
    cfg_path = write_config(tmp_path, text)
    assert main(["section", "--config", cfg_path]) == 2
    err = capsys.readouterr().err
    assert "analysis.energy" in err


def test_cli_off_shell_seed_exits_with_config_error(tmp_path, capsys):
    text = QUARTIC_TOML.replace("0.916515138991168", "0.95")
    cfg_path = write_config(tmp_path, text)
    assert main(["section", "--config", cfg_path]) == 2
    err = capsys.readouterr().err
    assert "seed 0" in err


def test_cli_lyapunov_harmonic_summary_row(tmp_path, capsys):
    text = """\
mu = [0.0, 0.0, 0.0, 1.0, 0.0, 0.0]

[initial]
reduced = [0.5, 0.0, 0.0, 0.5]

[integrator]
step = 1e-2
t_final = 200.0

[output]
path = "{out}"
"""
    cfg_path = write_config(tmp_path, text, out="lyap.csv")
    assert main(["lyapunov", "--config", cfg_path, "--freeze-metadata"]) == 0
    capsys.readouterr()
    lines = read_lines(str(tmp_path / "lyap.csv"))
    body = [ln for ln in lines if not ln.startswith("#")]
    assert body[0] == "t,mle_running"
    final = float(body[-1].split(",")[1])
    assert abs(final) <= 1e-3


def test_cli_shoot_run(tmp_path, capsys):
    text = QUARTIC_TOML + "\n[shoot]\ntarget = [0.5, 0.2]\nhorizon = 2.0\n"
    cfg_path = write_config(tmp_path, text, out="shoot.csv")
    assert main(["shoot", "--config", cfg_path, "--freeze-metadata",
                 "--step", "2e-4"]) == 0
    capsys.readouterr()
    lines = read_lines(str(tmp_path / "shoot.csv"))
    assert "# converged = true" in lines
    body = [ln for ln in lines if not ln.startswith("#")]
    assert body[0] == "iteration,p_x,p_y,residual"
    assert float(body[-1].split(",")[3]) < 1e-9


def test_cli_escape_writes_truncation_marker(tmp_path, capsys):
    text = """\
mu = [0.0, 0.0, 0.0, 0.0, 0.0, 1.0]

[initial]
reduced = [8.0, 0.0, 0.0, 0.0]

[integrator]
step = 2.0
t_final = 200.0

[output]
path = "{out}"
"""
    cfg_path = write_config(tmp_path, text, out="esc.csv")
    assert main(["simulate", "--config", cfg_path, "--freeze-metadata"]) == 3
    capsys.readouterr()
    lines = read_lines(str(tmp_path / "esc.csv"))
    assert lines[-1].startswith("# truncated: flow escaped at t = ")
    body = [ln for ln in lines if not ln.startswith("#")]
    assert len(body) >= 2  # header plus at least the initial sample


def test_cli_malformed_config_exits_2_without_output(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text("mu = [0.0, oops]\n")
    assert main(["simulate", "--config", str(bad),
                 "--out", str(tmp_path / "never.csv")]) == 2
    assert not (tmp_path / "never.csv").exists()
    assert "error" in capsys.readouterr().err


def test_cli_tsv_format(tmp_path, capsys):
    text = QUARTIC_TOML.replace('format = "csv"', 'format = "tsv"')
    cfg_path = write_config(tmp_path, text, out="run.tsv")
    assert main(["simulate", "--config", cfg_path, "--freeze-metadata",
                 "--out", str(tmp_path / "run.tsv")]) == 0
    capsys.readouterr()
    lines = read_lines(str(tmp_path / "run.tsv"))
    body = [ln for ln in lines if not ln.startswith("#")]
    assert body[0] == "t\tx\ty\tp_x\tp_y\tenergy"


def test_cli_plot_writes_png(tmp_path, capsys):
    cfg_path = write_config(tmp_path)
    assert main(["simulate", "--config", cfg_path, "--freeze-metadata",
                 "--plot"]) == 0
    capsys.readouterr()
    png = tmp_path / "run.png"
    assert png.exists()
    assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_console_entry_point_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "jetflow.cli", "--version"],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert "jetflow" in proc.stdout


def test_experiment_config_direct_construction_validates():
    integ = IntegratorConfig(step=1e-3, t_final=1.0)
    with pytest.raises(ConfigError):
        ExperimentConfig(mu=(0.0,) * 6, integrator=integ)  # no initial data
    cfg = ExperimentConfig(mu=(0.0,) * 6, integrator=integ,
                           initial_reduced=(0.0, 0.0, 1.0, 0.0))
    assert cfg.delimiter == ","
