import logging

import pytest
from pydantic import ValidationError

from sensorsched import config


@pytest.fixture
def clean_env(mocker):
    return mocker.patch.dict(config._env, {}, clear=True)


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(
        "seed=3\nlength=500\nclass.0.min=25\ncl.2=5\nperiod.5=33\nbogus=1\n", encoding="utf-8"
    )
    return path


class TestLoadRunConfig:
    """Test cases for load_run_config"""

    def test_defaults(self, clean_env):
        rc = config.load_run_config()

        assert rc.seed == 1
        assert rc.length == 7000
        assert rc.policies == ["fixed", "clpa", "qlbs", "min"]
        assert rc.output_dir == config.DATA_ROOT / "runs"

    def test_config_file(self, clean_env, config_file):
        """Test plain keys, profile keys and period keys are sorted into their fields"""
        rc = config.load_run_config(config_file)

        assert rc.seed == 3
        assert rc.length == 500
        assert rc.profile_overrides == {"class.0.min": "25", "cl.2": "5"}
        assert rc.period_overrides == {5: 33}

    def test_unknown_key_warns(self, clean_env, config_file, caplog):
        with caplog.at_level(logging.WARNING, logger="sensorsched.config"):
            config.load_run_config(config_file)

        assert "bogus" in caplog.text

    def test_file_over_env(self, mocker, config_file):
        """Test the config file wins over .env, which still fills the gaps"""
        mocker.patch.dict(config._env, {"SEED": "7", "EPISODES": "50"}, clear=True)

        rc = config.load_run_config(config_file)

        assert rc.seed == 3
        assert rc.episodes == 50

    def test_overrides_over_file(self, clean_env, config_file):
        """Test explicit values win and None means not given"""
        rc = config.load_run_config(config_file, {"seed": 9, "length": None})

        assert rc.seed == 9
        assert rc.length == 500

    def test_missing_file(self, clean_env, tmp_path):
        with pytest.raises(FileNotFoundError):
            config.load_run_config(tmp_path / "missing.cfg")


class TestRunConfig:
    """Test cases for RunConfig validation"""

    def test_policies_split(self):
        assert config.RunConfig(policies="fixed, min").policies == ["fixed", "min"]

    def test_unknown_policy(self):
        with pytest.raises(ValidationError):
            config.RunConfig(policies="fixed,random")

    def test_reward_format(self):
        assert config.RunConfig(cr1=" 10 / 50 ").cr1 == "10/50"

        with pytest.raises(ValidationError):
            config.RunConfig(cr1="10-50")

    def test_period_overrides_from_flags(self):
        assert config.RunConfig(period_overrides=["5=33", "2=4"]).period_overrides == {5: 33, 2: 4}

    def test_bad_period_override(self):
        with pytest.raises(ValidationError):
            config.RunConfig(period_overrides=["5"])

        with pytest.raises(ValidationError):
            config.RunConfig(period_overrides={5: 0})

    def test_absolute_output_dir(self, tmp_path):
        assert config.RunConfig(out=tmp_path).output_dir == tmp_path

    def test_length_must_be_positive(self):
        with pytest.raises(ValidationError):
            config.RunConfig(length=0)


def test_get_config(mocker):
    mocker.patch.dict(config._env, {"LOG_LEVEL": "DEBUG"})

    assert config.get_config("log_level") == "DEBUG"
    assert config.get_config("missing") is None
