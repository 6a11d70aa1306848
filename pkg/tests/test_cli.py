import json

import numpy as np
import pytest

from dbar3d.cli import main
from dbar3d.pipeline import ExperimentConfig


@pytest.fixture
def tiny_cfg_path(tmp_path):
    cfg = ExperimentConfig(profile="poly", amplitude=4.0, power=4,
                           n_volume=16, half_width=1.5, n_p=2, n_radial=4,
                           n_angular=8, n_phi=8, harmonic_degree=4,
                           rho_list=(3.0, 3.5, 4.0, 4.5),
                           deltas=(1e-2, 1e-4), rho_cap=3.5, beta=0.5,
                           out_dir=str(tmp_path / "out"))
    path = tmp_path / "cfg.json"
    cfg.to_json(path)
    return path


def test_verify_constants():
    assert main(["verify-constants"]) == 0


def test_forward_writes_container(tiny_cfg_path, capsys):
    assert main(["--config", str(tiny_cfg_path), "forward"]) == 0
    out_dir = ExperimentConfig.from_json(tiny_cfg_path).out_dir
    header = json.loads((pytest.importorskip("pathlib").Path(out_dir)
                         / "forward.json").read_text())
    names = {a["name"] for a in header["arrays"]}
    assert names == {"phi_v", "phi_0"}


def test_scatter_then_dbar(tiny_cfg_path, tmp_path):
    assert main(["--config", str(tiny_cfg_path), "scatter", "--rho", "3"]) == 0
    out_dir = tmp_path / "out"
    assert (out_dir / "slice_rho3.bin").exists()
    assert main(["--config", str(tiny_cfg_path), "dbar",
                 str(out_dir / "slice_rho3")]) == 0
    report = json.loads((out_dir / "dbar_report.json").read_text())
    assert report["converged"] is True
    assert (out_dir / "band.bin").exists()


def test_reconstruct_smoke(tiny_cfg_path, capsys):
    assert main(["--config", str(tiny_cfg_path), "reconstruct",
                 "--rho", "3"]) == 0
    out = capsys.readouterr().out
    assert "naive_err" in out and "eff_err" in out


def test_sweep_rho_cli(tiny_cfg_path, tmp_path):
    assert main(["--config", str(tiny_cfg_path), "sweep-rho"]) == 0
    csv_path = tmp_path / "out" / "rho_sweep.csv"
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "# schema=dbar3d-rho-sweep-v1"
    assert len(lines) == 6  # schema + header + 4 rows
    fits = json.loads(csv_path.with_suffix(".json").read_text())
    assert "naive_slope" in fits and "eff_slope" in fits


def test_sweep_noise_cli(tiny_cfg_path, tmp_path):
    assert main(["--config", str(tiny_cfg_path), "sweep-noise"]) == 0
    csv_path = tmp_path / "out" / "noise_sweep.csv"
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "# schema=dbar3d-noise-sweep-v1"
    assert len(lines) == 4


def test_seed_and_out_overrides(tiny_cfg_path, tmp_path):
    alt = tmp_path / "alt"
    assert main(["--config", str(tiny_cfg_path), "--out", str(alt),
                 "--seed", "9", "scatter", "--rho", "3"]) == 0
    assert (alt / "slice_rho3.bin").exists()
