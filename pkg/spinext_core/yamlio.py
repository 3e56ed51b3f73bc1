from __future__ import annotations

from typing import Any

from ruamel.yaml import YAML
from ruamel.yaml.error import YAMLError

from .errors import ConfigurationError

# strict YAML loader (reject duplicate keys everywhere)
yaml_loader = YAML(typ="safe")
yaml_loader.allow_duplicate_keys = False


def load_yaml_text(text: str, source: str = "<string>") -> dict[str, Any]:
    """Parse a YAML mapping, mapping parser failures to ConfigurationError."""
    try:
        doc = yaml_loader.load(text)
    except YAMLError as e:
        raise ConfigurationError(f"Failed to parse YAML: {source}\n  error: {e}") from e
    if doc is None:
        return {}
    if not isinstance(doc, dict):
        raise ConfigurationError(
            f"Expected a mapping at the top of {source}, got {type(doc).__name__}"
        )
    return doc
