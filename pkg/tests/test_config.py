"""Config schema: strict keys, epsilon/reynolds handling, round-trips."""

import pytest

from shearlab.config import ConfigError, ExperimentConfig, parse_config

GOOD = """
run_name: paper-n1
profile: {n: 1, c: 0.07}
reynolds: 10000
box: {Lx: 2.0, Nx: 128, Ny: 129}
time:
  horizon: 60.0
  output_interval: 0.1
  dt: {mode: cfl, safety: 0.5, max: 0.05}
snapshots: [0.0, 4.9, 14.9, 24.9]
perturbation: {amplitude: 0.01, seed: 101, jmax: 8, kmax: 8, decay: 2.0}
dealias: true
bc_mode: auto
"""


class TestParsing:
    def test_reynolds_becomes_epsilon(self):
        cfg = parse_config(GOOD)
        assert cfg.epsilon == pytest.approx(1e-4)
        assert cfg.reynolds == pytest.approx(10000)

    def test_epsilon_direct(self):
        cfg = parse_config("profile: {n: 2, c: 0.05}\nepsilon: 0.0\n"
                           "perturbation: {amplitude: 0.0}")
        assert cfg.epsilon == 0.0
        assert cfg.reynolds == float("inf")

    def test_both_viscosities_rejected(self):
        with pytest.raises(ConfigError, match="exactly one"):
            parse_config("epsilon: 1.0e-4\nreynolds: 10000\n")

    def test_neither_viscosity_rejected(self):
        with pytest.raises(ConfigError, match="exactly one"):
            parse_config("profile: {n: 1, c: 0.07}\n")

    def test_unknown_key_reports_line(self):
        bad = GOOD.replace("dealias: true", "dealias: true\nwibble: 3")
        lineno = bad.splitlines().index("wibble: 3") + 1
        with pytest.raises(ConfigError, match=rf"wibble.*line {lineno}"):
            parse_config(bad)

    def test_unknown_nested_key(self):
        bad = GOOD.replace("{n: 1, c: 0.07}", "{n: 1, c: 0.07, q: 2}")
        with pytest.raises(ConfigError, match="profile.*q"):
            parse_config(bad)

    def test_invalid_yaml_reports_line(self):
        with pytest.raises(ConfigError, match="valid YAML"):
            parse_config("a: [1, 2\nb: 3\n")

    def test_empty_rejected(self):
        with pytest.raises(ConfigError, match="empty"):
            parse_config("")


class TestValidation:
    def test_window_warning_not_error(self):
        cfg = parse_config(GOOD.replace("c: 0.07", "c: 0.03"))
        warnings = cfg.validate()
        assert len(warnings) == 1
        assert "window" in warnings[0]

    def test_in_window_no_warning(self):
        assert parse_config(GOOD).validate() == []

    def test_bad_band(self):
        with pytest.raises(ConfigError, match="jmax"):
            parse_config(GOOD.replace("jmax: 8", "jmax: 100")).validate()

    def test_fixed_dt_requires_value(self):
        bad = GOOD.replace("mode: cfl", "mode: fixed")
        with pytest.raises(ConfigError, match="fixed"):
            parse_config(bad)

    def test_bc_mode_consistency(self):
        with pytest.raises(ConfigError, match="viscous"):
            ExperimentConfig(epsilon=0.0, bc_mode="viscous").validate()
        with pytest.raises(ConfigError, match="inviscid"):
            ExperimentConfig(epsilon=1e-4, bc_mode="inviscid").validate()

    def test_snapshot_outside_horizon(self):
        with pytest.raises(ConfigError, match="snapshot"):
            ExperimentConfig(horizon=5.0, snapshot_times=(6.0,)).validate()


class TestRoundTrip:
    def test_parse_serialize_parse_identity(self):
        cfg = parse_config(GOOD)
        again = parse_config(cfg.to_yaml())
        assert again == cfg

    def test_hash_stable_and_name_independent(self):
        cfg = parse_config(GOOD)
        renamed = parse_config(GOOD.replace("paper-n1", "other-name"))
        assert cfg.config_hash() == parse_config(cfg.to_yaml()).config_hash()
        assert cfg.config_hash() == renamed.config_hash()

    def test_full_precision_floats_survive(self):
        cfg = ExperimentConfig(c=0.07000000000000001, epsilon=1 / 30000.0)
        again = parse_config(cfg.to_yaml())
        assert again.c == cfg.c
        assert again.epsilon == cfg.epsilon
