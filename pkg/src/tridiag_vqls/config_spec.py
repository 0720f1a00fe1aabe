from unittest.mock import Mock

import pytest
from pydantic import ValidationError

from tridiag_vqls.config import (
    ConfigError,
    ExperimentConfig,
    dump_config,
    load_config,
    parse_config_text,
)
from tridiag_vqls.gateways import ArtifactGateway


class DescribeExperimentConfig:
    """Tests for ExperimentConfig."""

    def should_default_to_the_two_by_two_experiment(self):
        config = ExperimentConfig(output="out")

        assert (config.n, config.alpha, config.beta) == (1, 2.0, -1.0)
        assert config.scheme == "pauli"
        assert config.shots == 8192
        assert config.max_evals == 500

    @pytest.mark.parametrize("mode, tol", [("exact", 1e-6), ("shots", 1e-5)])
    def should_pick_tolerance_by_mode(self, mode, tol):
        assert ExperimentConfig(mode=mode, output="out").tol == tol

    def should_keep_an_explicit_tolerance(self):
        assert ExperimentConfig(mode="shots", tol=1e-3, output="out").tol == 1e-3

    def should_reject_single_qubit_multiqubit_scheme(self):
        with pytest.raises(ConfigError, match="multiqubit scheme requires n ≥ 2"):
            ExperimentConfig(n=1, scheme="multiqubit", output="out")

    def should_reject_zero_shots(self):
        with pytest.raises(ValidationError):
            ExperimentConfig(shots=0, output="out")

    def should_reject_unknown_fields(self):
        with pytest.raises(ValidationError):
            ExperimentConfig(qubits=3, output="out")

    def should_read_default_output_from_environment(self, monkeypatch):
        monkeypatch.setenv("VQLS_OUT", "/tmp/elsewhere")

        assert ExperimentConfig().output == "/tmp/elsewhere"

    def should_fall_back_to_runs_directory(self, monkeypatch):
        monkeypatch.delenv("VQLS_OUT", raising=False)

        assert ExperimentConfig().output == "runs"

    def should_derive_solver_settings(self):
        config = ExperimentConfig(n=3, mode="shots", shots=64, seed=4, ansatz="layered_ry_cx", layers=2, output="out")

        assert config.tridiagonal_spec().dim == 8
        assert config.ansatz_spec().parameter_count == 9
        assert config.eval_mode().shots == 64
        assert config.eval_mode().seed == 4
        assert config.optimizer_settings().tol == 1e-5
        assert config.optimizer_settings().seed == 4


class DescribeParseConfigText:
    """Tests for the key=value reader."""

    def should_skip_comments_and_blank_lines(self):
        text = "# the 4x4 run\n\nn = 2\nalpha=2   # diagonal\nscheme=multiqubit\n"

        assert parse_config_text(text) == {"n": "2", "alpha": "2", "scheme": "multiqubit"}

    def should_reject_lines_without_equals(self):
        with pytest.raises(ConfigError, match="Line 2"):
            parse_config_text("n=2\nalpha 2\n")

    def should_reject_unknown_keys(self):
        with pytest.raises(ConfigError, match="unknown key 'qubits'"):
            parse_config_text("qubits=2\n")

    def should_reject_repeated_keys(self):
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config_text("n=2\nn=3\n")


class DescribeLoadConfig:
    """Tests for merging files and overrides."""

    @pytest.fixture
    def gateway(self):
        gateway = Mock(spec=ArtifactGateway)
        gateway.read_text.return_value = "n=2\nmode=shots\nseed=3\noutput=from-file\n"
        return gateway

    def should_read_values_from_the_file(self, gateway):
        config = load_config("run.cfg", {}, gateway)

        gateway.read_text.assert_called_once_with("run.cfg")
        assert (config.n, config.mode, config.seed, config.output) == (2, "shots", 3, "from-file")

    def should_let_flags_override_the_file(self, gateway):
        config = load_config("run.cfg", {"seed": 9, "n": None}, gateway)

        assert config.seed == 9
        assert config.n == 2

    def should_work_without_a_file(self):
        assert load_config(None, {"n": 3, "output": "x"}).n == 3


class DescribeDumpConfig:
    """Tests for writing the effective configuration."""

    def should_write_sorted_keys(self):
        keys = [line.split("=")[0] for line in dump_config(ExperimentConfig(output="out")).splitlines()]

        assert keys == sorted(keys)

    def should_round_trip_through_the_parser(self):
        config = ExperimentConfig(n=2, alpha=0.1, beta=-1 / 3, scheme="multiqubit", cost="nonnormalized",
                                  mode="shots", shots=100, seed=7, layers=2, ansatz="layered_ry_cx", output="out/dir")

        assert ExperimentConfig(**parse_config_text(dump_config(config))) == config
