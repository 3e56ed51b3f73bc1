from __future__ import annotations

from pathlib import Path

import pytest

from spinext_core.config import DEFAULT_SETTINGS, ENV_BUDGET, ENV_CONFIG, load_settings
from spinext_core.errors import ConfigurationError


def _write(tmp_path: Path, text: str) -> Path:
    path = tmp_path / "spinext.yaml"
    path.write_text(text, encoding="utf-8")
    return path


def test_bundled_defaults_match_dataclass():
    assert load_settings(env={}) == DEFAULT_SETTINGS


def test_user_file_overrides_bundled(tmp_path: Path):
    path = _write(
        tmp_path,
        """
version: "1.0.0"
limits:
  g_max: 8
witness:
  seed: 7
""",
    )
    s = load_settings(path, env={})
    assert s.g_max == 8
    assert s.witness_seed == 7
    assert s.g_orbit == DEFAULT_SETTINGS.g_orbit


def test_config_from_environment(tmp_path: Path):
    path = _write(tmp_path, 'version: "1.0.0"\nbudgets:\n  group_budget: 99\n')
    assert load_settings(env={ENV_CONFIG: str(path)}).group_budget == 99


def test_precedence_file_env_flag(tmp_path: Path):
    path = _write(tmp_path, 'version: "1.0.0"\nbudgets:\n  state_budget: 10\n')
    assert load_settings(path, env={}).state_budget == 10
    assert load_settings(path, env={ENV_BUDGET: "20"}).state_budget == 20
    assert load_settings(path, env={ENV_BUDGET: "20"}, state_budget=30).state_budget == 30
    # None overrides are ignored
    assert load_settings(path, env={}, state_budget=None).state_budget == 10


@pytest.mark.parametrize("raw", ["abc", "0", "-5"])
def test_bad_env_budget(raw):
    with pytest.raises(ConfigurationError):
        load_settings(env={ENV_BUDGET: raw})


@pytest.mark.parametrize(
    "text",
    [
        'version: "1.0.0"\nlimits:\n  g_max: 0\n',
        'version: "1.0.0"\nunknown: 1\n',
        "limits:\n  g_max: 3\n",
        'version: "2.0.0"\n',
        'version: "1.9.0"\n',
        'version: "x"\n',
    ],
)
def test_invalid_config_files(tmp_path: Path, text):
    with pytest.raises(ConfigurationError):
        load_settings(_write(tmp_path, text), env={})


def test_missing_config_file(tmp_path: Path):
    with pytest.raises(ConfigurationError) as exc:
        load_settings(tmp_path / "nope.yaml", env={})
    assert "Failed to read config" in str(exc.value)


def test_unknown_override():
    with pytest.raises(ConfigurationError):
        DEFAULT_SETTINGS.with_overrides(no_such_setting=1)
