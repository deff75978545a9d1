import logging
import os
from dataclasses import dataclass, replace

from dotenv import dotenv_values

from operads.errors import ConfigError

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_FILE = "operads.env"


@dataclass(frozen=True)
class Settings:
    max_automorphisms: int = 10**6
    brute_force_flag_limit: int = 8
    strict_evaluation: bool = False
    seed: int = 0
    log_level: str = "INFO"


# env-file key -> (Settings field, parser)
_KEYS = {
    "OPERADS_MAX_AUTOMORPHISMS": ("max_automorphisms", int),
    "OPERADS_BRUTE_FORCE_FLAG_LIMIT": ("brute_force_flag_limit", int),
    "OPERADS_STRICT_EVALUATION": ("strict_evaluation", "bool"),
    "OPERADS_SEED": ("seed", int),
    "OPERADS_LOG_LEVEL": ("log_level", "level"),
}

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off", ""}


def _parse(key: str, raw: str, kind):
    if kind == "bool":
        value = raw.strip().lower()
        if value in _TRUE:
            return True
        if value in _FALSE:
            return False
        raise ConfigError(f"{key} must be a boolean, got {raw!r}")
    if kind == "level":
        name = raw.strip().upper()
        if not isinstance(logging.getLevelName(name), int):
            raise ConfigError(f"{key} must be a logging level name, got {raw!r}")
        return name
    try:
        return kind(raw.strip())
    except ValueError:
        raise ConfigError(f"{key} must be {kind.__name__}, got {raw!r}") from None


def load_settings(path: str | None = None) -> Settings:
    """
    Reads settings from a dotenv-style file.
    Only the file is consulted; the process environment is left alone.
    A missing default file just means defaults.
    """
    config_path = path or DEFAULT_CONFIG_FILE
    if not os.path.exists(config_path):
        if path is not None:
            raise ConfigError(f"config file not found: {path}")
        return Settings()

    values = dotenv_values(config_path)
    overrides = {}
    for key, raw in values.items():
        if key not in _KEYS:
            logger.warning("⚠️ Ignoring unknown config key %s in %s", key, config_path)
            continue
        field, kind = _KEYS[key]
        overrides[field] = _parse(key, raw or "", kind)

    settings = replace(Settings(), **overrides)
    if settings.max_automorphisms < 1:
        raise ConfigError("OPERADS_MAX_AUTOMORPHISMS must be positive")
    if settings.brute_force_flag_limit < 0:
        raise ConfigError("OPERADS_BRUTE_FORCE_FLAG_LIMIT must be non-negative")
    logger.debug("Loaded settings from %s: %s", config_path, settings)
    return settings


_active = Settings()


def get_settings() -> Settings:
    return _active


def use_settings(settings: Settings) -> None:
    global _active
    _active = settings
