import logging

import pytest

from operads.config import Settings, load_settings
from operads.errors import ConfigError


def env_file(tmp_path, text: str) -> str:
    path = tmp_path / "operads.env"
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_defaults_when_no_file(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert load_settings() == Settings()


def test_values_are_read_from_the_file(tmp_path):
    path = env_file(tmp_path, "OPERADS_MAX_AUTOMORPHISMS=500\nOPERADS_STRICT_EVALUATION=yes\nOPERADS_SEED=7\n")
    settings = load_settings(path)
    assert settings.max_automorphisms == 500
    assert settings.strict_evaluation is True
    assert settings.seed == 7
    assert settings.log_level == "INFO"


def test_default_file_in_the_working_directory(tmp_path, monkeypatch):
    env_file(tmp_path, "OPERADS_LOG_LEVEL=DEBUG\n")
    monkeypatch.chdir(tmp_path)
    assert load_settings().log_level == "DEBUG"


def test_process_environment_is_ignored(tmp_path, monkeypatch):
    monkeypatch.setenv("OPERADS_SEED", "99")
    assert load_settings(env_file(tmp_path, "")).seed == 0


def test_unknown_keys_are_warned_about(tmp_path, caplog):
    with caplog.at_level(logging.WARNING):
        load_settings(env_file(tmp_path, "OPERADS_COLOUR=blue\n"))
    assert "OPERADS_COLOUR" in caplog.text


@pytest.mark.parametrize("line,message", [
    ("OPERADS_MAX_AUTOMORPHISMS=many", "must be int"),
    ("OPERADS_STRICT_EVALUATION=perhaps", "must be a boolean"),
    ("OPERADS_MAX_AUTOMORPHISMS=0", "must be positive"),
    ("OPERADS_BRUTE_FORCE_FLAG_LIMIT=-1", "must be non-negative"),
    ("OPERADS_LOG_LEVEL=FOO", "must be a logging level name"),
])
def test_bad_values_are_refused(tmp_path, line, message):
    with pytest.raises(ConfigError, match=message):
        load_settings(env_file(tmp_path, line + "\n"))


def test_explicit_missing_file_is_an_error(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_settings(str(tmp_path / "absent.env"))


def test_log_level_is_normalized(tmp_path):
    assert load_settings(env_file(tmp_path, "OPERADS_LOG_LEVEL=warning\n")).log_level == "WARNING"
