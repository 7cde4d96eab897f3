import pytest

from memcap import ConfigError
from memcap.config import ENV_CONFIG_PATH, load_config


def test_defaults_resolve():
    config = load_config()
    assert config.seed is None
    assert config.get("grids", "input_q") == 100
    assert config.get("capacity", "delays") == "10,50,100"
    assert config.delays() == [10.0, 50.0, 100.0]
    assert config.device_params().g_m == 4.207


def test_file_then_flags_precedence(tmp_path):
    path = tmp_path / "run.ini"
    path.write_text("[run]\nseed = 5\n[capacity]\nn = 77\n")
    config = load_config(path)
    assert config.seed == 5
    assert config.get("capacity", "n") == 77
    config = load_config(path, overrides={("capacity", "n"): 123})
    assert config.get("capacity", "n") == 123


def test_env_var_supplies_default_path(tmp_path, monkeypatch):
    path = tmp_path / "env.ini"
    path.write_text("[run]\nseed = 9\n")
    monkeypatch.setenv(ENV_CONFIG_PATH, str(path))
    assert load_config().seed == 9


def test_unknown_keys_rejected(tmp_path):
    path = tmp_path / "bad.ini"
    path.write_text("[run]\nsead = 5\n")
    with pytest.raises(ConfigError):
        load_config(path)
    path.write_text("[nonsense]\nx = 1\n")
    with pytest.raises(ConfigError):
        load_config(path)


def test_missing_file_rejected(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.ini")


def test_require_seed():
    with pytest.raises(ConfigError):
        load_config().require_seed()
    assert load_config(overrides={("run", "seed"): 3}).require_seed() == 3


def test_hash_changes_iff_config_changes(tmp_path):
    base = load_config(overrides={("run", "seed"): 1})
    same = load_config(overrides={("run", "seed"): 1})
    assert base.config_hash() == same.config_hash()
    changed = load_config(overrides={("run", "seed"): 2})
    assert base.config_hash() != changed.config_hash()
    relocated = load_config(overrides={("run", "seed"): 1, ("run", "out_dir"): str(tmp_path)})
    assert base.config_hash() == relocated.config_hash()  # location is not part of the experiment


def test_schedule_and_grids_built_from_config():
    config = load_config(overrides={("schedule", "reset_ratio"): 1.5})
    schedule = config.schedule(a_set=1.0)
    assert schedule.a_reset == pytest.approx(1.5)
    assert config.s_grid().shape == (100,)
