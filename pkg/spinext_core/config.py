"""Runtime limits and budgets.

Resolution order (later wins): bundled ``spinext_config.yaml``, a user file from
``--config`` or ``SPINEXT_CONFIG``, the ``SPINEXT_BUDGET`` environment variable,
and finally explicit CLI flags passed as overrides.
"""

from __future__ import annotations

import logging
import os
from collections.abc import Mapping
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any

from jsonschema import Draft202012Validator
from jsonschema import ValidationError as JsonSchemaValidationError

from .errors import ConfigurationError
from .resources import read_text_resource
from .version import check_config_compat, supported_config_range_str
from .yamlio import load_yaml_text

logger = logging.getLogger(__name__)

ENV_BUDGET = "SPINEXT_BUDGET"
ENV_CONFIG = "SPINEXT_CONFIG"

# flat setting name -> (section, key) in the YAML document
_LAYOUT: dict[str, tuple[str, str]] = {
    "g_max": ("limits", "g_max"),
    "g_orbit": ("limits", "g_orbit"),
    "g_witness": ("limits", "g_witness"),
    "p_max": ("limits", "p_max"),
    "state_budget": ("budgets", "state_budget"),
    "group_budget": ("budgets", "group_budget"),
    "enumeration_chunk": ("budgets", "enumeration_chunk"),
    "witness_seed": ("witness", "seed"),
    "witness_max_tries": ("witness", "max_tries"),
    "witness_max_word": ("witness", "max_word"),
}


@dataclass(frozen=True)
class Settings:
    g_max: int = 6
    g_orbit: int = 4
    g_witness: int = 3
    p_max: int = 16
    state_budget: int = 2**24
    group_budget: int = 10**6
    enumeration_chunk: int = 2**20
    witness_seed: int = 20240601
    witness_max_tries: int = 20000
    witness_max_word: int = 20

    def with_overrides(self, **overrides: Any) -> Settings:
        """Return a copy with the non-None overrides applied."""
        known = {f.name for f in fields(self)}
        unknown = set(overrides) - known
        if unknown:
            raise ConfigurationError(f"Unknown setting(s): {', '.join(sorted(unknown))}")
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


DEFAULT_SETTINGS = Settings()


def _validate_config_doc(doc: dict[str, Any], source: str) -> None:
    schema = load_yaml_text(read_text_resource("config_schema.yaml"), "config_schema.yaml")
    try:
        Draft202012Validator(schema).validate(doc)
    except JsonSchemaValidationError as e:
        path = "/" + "/".join(str(x) for x in e.path) if e.path else "/"
        raise ConfigurationError(
            f"Config validation failed: {source}\n  at: {path}\n  error: {e.message}"
        ) from e
    ver = str(doc.get("version", "")).strip()
    ok, reason = check_config_compat(ver)
    if not ok:
        raise ConfigurationError(
            f"Unsupported config version in {source}: {ver!r} ({reason.value if reason else 'invalid'}); "
            f"supported: {supported_config_range_str()}"
        )


def _flatten(doc: Mapping[str, Any]) -> dict[str, Any]:
    flat: dict[str, Any] = {}
    for name, (section, key) in _LAYOUT.items():
        sec = doc.get(section) or {}
        if key in sec:
            flat[name] = sec[key]
    return flat


def _load_doc(text: str, source: str) -> dict[str, Any]:
    doc = load_yaml_text(text, source)
    _validate_config_doc(doc, source)
    return _flatten(doc)


def _budget_from_env(env: Mapping[str, str]) -> int | None:
    raw = env.get(ENV_BUDGET, "").strip()
    if not raw:
        return None
    try:
        value = int(raw)
    except ValueError as e:
        raise ConfigurationError(f"{ENV_BUDGET} must be an integer, got {raw!r}") from e
    if value < 1:
        raise ConfigurationError(f"{ENV_BUDGET} must be positive, got {value}")
    return value


def load_settings(
    config_path: str | Path | None = None,
    env: Mapping[str, str] | None = None,
    **overrides: Any,
) -> Settings:
    """Resolve settings from bundled defaults, user file, environment and flags."""
    env = os.environ if env is None else env
    values: dict[str, Any] = {}
    try:
        values.update(_load_doc(read_text_resource("spinext_config.yaml"), "spinext_config.yaml"))
    except FileNotFoundError:  # pragma: no cover
        logger.debug("bundled config missing; using dataclass defaults")

    user_path = config_path or env.get(ENV_CONFIG) or None
    if user_path:
        path = Path(user_path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigurationError(
                f"Failed to read config: {path}\n  error: {type(e).__name__}: {e}"
            ) from e
        values.update(_load_doc(text, str(path)))
        logger.debug("loaded user config %s", path)

    env_budget = _budget_from_env(env)
    if env_budget is not None:
        values["state_budget"] = env_budget

    return DEFAULT_SETTINGS.with_overrides(**values).with_overrides(**overrides)
