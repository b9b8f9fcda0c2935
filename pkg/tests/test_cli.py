"""Tests for the ringbif command line."""

import csv
import json

import pytest

from ringbif.cli import EXIT_FAILURE, EXIT_OK, EXIT_USAGE, RunConfig, UsageError, main


def _header(path):
    with path.open() as fh:
        return next(csv.reader(fh))


class TestExitCodes:
    def test_equilibrium(self, capsys):
        assert main(["equilibrium", "--n", "5", "--mu", "1"]) == EXIT_OK
        assert "omega" in capsys.readouterr().out

    def test_n_too_small(self):
        assert main(["equilibrium", "--n", "1"]) == EXIT_USAGE

    def test_missing_n(self):
        assert main(["blocks"]) == EXIT_USAGE

    def test_unknown_command(self):
        assert main(["orbit", "--n", "4"]) == EXIT_USAGE

    def test_blocks(self):
        assert main(["blocks", "--n", "4", "--mu", "0"]) == EXIT_OK

    def test_degenerate_bifurcations(self, capsys):
        assert main(["bifurcations", "--kind", "vortex", "--n", "5", "--mu", "4"]) == EXIT_FAILURE
        assert "degenerate" in capsys.readouterr().err

    def test_stability(self):
        assert main(["stability", "--n", "7"]) == EXIT_OK
        assert main(["stability", "--n", "2"]) == EXIT_USAGE

    def test_branch_zero_amplitude(self):
        assert main(["branch", "--n", "4", "--mu", "0", "--k", "2", "--amplitude", "0"]) == EXIT_USAGE

    def test_branch_bad_point(self):
        assert main(["branch", "--n", "4", "--k", "2", "--point", "nu_middle"]) == EXIT_USAGE

    def test_simulate_mu0(self):
        assert main(["simulate", "--kind", "vortex", "--n", "3", "--mu", "0"]) == EXIT_USAGE

    def test_region(self, capsys):
        assert main(["region", "--n", "5", "--mu", "1", "--nu", "10"]) == EXIT_OK
        assert "2b" in capsys.readouterr().out

    def test_region_on_boundary(self):
        assert main(["region", "--n", "5", "--mu", "1", "--nu", "3"]) == EXIT_FAILURE


class TestOutputs:
    def test_equilibrium_json(self, tmp_path):
        out = tmp_path / "eq.json"
        assert main(["equilibrium", "--n", "5", "--mu", "1", "--json", str(out)]) == EXIT_OK
        report = json.loads(out.read_text())
        assert report["omega"] == 3.0
        assert report["kernel_dim"] == 1

    def test_bifurcations_csv(self, tmp_path):
        out = tmp_path / "bif.csv"
        assert main(["bifurcations", "--n", "4", "--mu", "0", "--csv", str(out)]) == EXIT_OK
        assert _header(out) == ["k", "nu", "eta", "symmetry", "provenance", "det_residual", "label"]
        assert (tmp_path / "bif.gp").exists()

    def test_spectrum_csv(self, tmp_path):
        out = tmp_path / "spec.csv"
        args = ["spectrum", "--n", "4", "--k", "2", "--nu-max", "3", "--grid", "20", "--csv", str(out)]
        assert main(args) == EXIT_OK
        assert _header(out) == ["k", "nu", "morse_index", "kernel_dim", "det", "ev0", "ev1"]
        assert (tmp_path / "spec.gp").exists()

    def test_branch_files(self, tmp_path):
        out = tmp_path / "branch.csv"
        args = ["branch", "--n", "4", "--mu", "0", "--k", "2", "--steps", "2", "--truncation", "6"]
        assert main(args + ["--csv", str(out)]) == EXIT_OK
        assert _header(out)[:2] == ["step", "nu"]
        assert _header(tmp_path / "branch_loop_start.csv")[:3] == ["t", "x0", "y0"]
        assert (tmp_path / "branch_loop_final.csv").exists()
        assert (tmp_path / "branch.gp").exists()

    def test_filament_simulation_csv(self, tmp_path):
        out = tmp_path / "traj.csv"
        args = ["simulate", "--kind", "filament", "--n", "4", "--mu", "1", "--gamma", "2", "--t-end", "0.2"]
        assert main(args + ["--csv", str(out)]) == EXIT_OK
        header = _header(out)
        assert header[0] == "t"
        assert "vx0" in header
        assert header[-1] == "vy4"


class TestRunConfig:
    def test_branch_needs_k(self):
        with pytest.raises(UsageError, match="--k"):
            RunConfig(command="branch", n=4).validate()

    def test_k_out_of_range(self):
        with pytest.raises(UsageError, match="1..4"):
            RunConfig(command="spectrum", n=4, k=5).validate()

    def test_scan_point_label(self):
        assert RunConfig(command="branch", n=4, k=2, point="scan:0").validate().point == "scan:0"

    def test_bifurcation_grid(self):
        with pytest.raises(UsageError, match="grid"):
            RunConfig(command="bifurcations", n=4, grid=10).validate()
