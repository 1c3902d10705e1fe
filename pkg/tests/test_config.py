import pytest

from lvsim.config import (
    ConfigError,
    ScenarioConfig,
    default_config,
    emit_config,
    parse_config,
    parse_config_text,
    with_overrides,
)
from lvsim.geometry import Position
from lvsim.observation import AttackerMode


class TestDefaults:
    def test_empty_text_gives_reference_scenario(self):
        cfg = parse_config_text("")
        assert cfg == default_config()
        assert cfg.channel.gamma == 3.0
        assert cfg.channel.sigma_db == 5.0
        assert cfg.samples_per_station == 10
        assert cfg.base_rate == 0.5
        assert cfg.claimed == Position(0.0, 40.0)
        assert cfg.deployment.n_stations == 4
        assert cfg.deployment.region.width == 200.0
        assert len(cfg.t_grid) == 24

    def test_comments_and_blank_lines_ignored(self):
        cfg = parse_config_text("\n# comment\n   \nchannel.gamma = 2.5 # inline\n")
        assert cfg.channel.gamma == 2.5

    def test_empty_file_on_disk(self, tmp_path):
        path = tmp_path / "empty.cfg"
        path.write_text("")
        assert parse_config(str(path)) == default_config()

    def test_missing_file_is_config_error(self, tmp_path):
        with pytest.raises(ConfigError):
            parse_config(str(tmp_path / "nope.cfg"))


class TestRoundTrip:
    def test_default_round_trip(self):
        cfg = default_config()
        assert parse_config_text(emit_config(cfg)) == cfg

    def test_custom_round_trip(self):
        text = """
        channel.p0 = -10.5
        channel.gamma = 2.25
        region = 0, 0, 300, 150
        station = 10, 10
        station = 290, 10
        station = 150, 140
        claimed = 150, 75
        samples_per_station = 4
        attacker.mode = at_position
        attacker.position = 150, 9075
        base_rate = 0.3
        trials = 17
        seed = 99
        t_grid = 1, 2.5, 7
        grid_step = 2
        workers = 2
        """
        cfg = parse_config_text(text)
        assert cfg.attacker.mode is AttackerMode.AT_POSITION
        assert cfg.attacker.true_position == Position(150.0, 9075.0)
        assert cfg.deployment.n_stations == 3
        assert parse_config_text(emit_config(cfg)) == cfg


class TestValidation:
    def test_negative_sigma_names_the_key(self):
        with pytest.raises(ConfigError, match="sigma_db"):
            parse_config_text("channel.sigma_db = -1\n")

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown key"):
            parse_config_text("channel.gama = 3\n")

    def test_duplicate_key_rejected(self):
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config_text("trials = 5\ntrials = 6\n")

    def test_missing_equals_sign(self):
        with pytest.raises(ConfigError, match="key = value"):
            parse_config_text("just some words\n")

    def test_claimed_outside_region(self):
        with pytest.raises(ConfigError, match="claimed"):
            parse_config_text("claimed = 500, 0\n")

    def test_attacker_position_requires_mode(self):
        with pytest.raises(ConfigError, match="attacker.position"):
            parse_config_text("attacker.position = 0, 10040\n")

    def test_at_position_mode_requires_position(self):
        with pytest.raises(ConfigError, match="attacker.position"):
            parse_config_text("attacker.mode = at_position\n")

    def test_bad_region_shape(self):
        with pytest.raises(ConfigError, match="region"):
            parse_config_text("region = 0, 0, 0, 100\n")

    def test_bad_number_format(self):
        with pytest.raises(ConfigError, match="trials"):
            parse_config_text("trials = many\n")

    def test_station_needs_two_coordinates(self):
        with pytest.raises(ConfigError, match="station"):
            parse_config_text("station = 1, 2, 3\n")

    def test_t_grid_must_increase(self):
        with pytest.raises(ConfigError, match="t_grid"):
            parse_config_text("t_grid = 2, 1\n")


class TestTGridForms:
    def test_range_form(self):
        cfg = parse_config_text("t_grid = 0.5 : 12 : 0.5\n")
        assert len(cfg.t_grid) == 24
        assert cfg.t_grid[0] == 0.5 and cfg.t_grid[-1] == 12.0

    def test_list_form(self):
        cfg = parse_config_text("t_grid = 1, 2, 4, 8\n")
        assert cfg.t_grid == (1.0, 2.0, 4.0, 8.0)

    def test_bad_range(self):
        with pytest.raises(ConfigError, match="t_grid"):
            parse_config_text("t_grid = 5:1:0.5\n")


class TestOverrides:
    def test_seed_and_trials(self):
        cfg = with_overrides(default_config(), seed=42, trials=77)
        assert cfg.seed == 42 and cfg.trials == 77

    def test_none_means_keep(self):
        cfg = with_overrides(default_config())
        assert cfg == default_config()

    def test_invalid_override_is_config_error(self):
        with pytest.raises(ConfigError):
            with_overrides(default_config(), trials=0)


class TestScenarioInvariants:
    def test_direct_construction_validates(self):
        with pytest.raises(ValueError):
            ScenarioConfig(trials=0)
        with pytest.raises(ValueError):
            ScenarioConfig(base_rate=1.5)
        with pytest.raises(ValueError):
            ScenarioConfig(t_grid=())
        with pytest.raises(ValueError):
            ScenarioConfig(t_grid=(1.0, 1.0))
        with pytest.raises(ValueError):
            ScenarioConfig(claimed=Position(1000.0, 0.0))
