from __future__ import annotations

from enum import Enum
from importlib import metadata
from subprocess import run

import semver  # type: ignore[import-untyped]

from .resources import read_text_resource
from .yamlio import yaml_loader


def _load_compat() -> tuple[tuple[int, int, int], tuple[int, int]]:
    try:
        text = read_text_resource("spinext_compat.yaml")
    except FileNotFoundError:  # pragma: no cover
        return (1, 0, 0), (1, 0)
    try:
        compat = yaml_loader.load(text) or {}
        out = compat.get("output_schema") or {}
        cfg = compat.get("config") or {}
        major = int(out.get("major"))
        max_minor = int(out.get("max_minor"))
        rec_minor = int(out.get("recommended_minor", max_minor))
        return (major, max_minor, rec_minor), (
            int(cfg.get("major")),
            int(cfg.get("max_minor")),
        )
    except Exception:  # pragma: no cover
        return (1, 0, 0), (1, 0)


(
    (OUTPUT_SCHEMA_MAJOR, _OUTPUT_MAX_MINOR, _OUTPUT_RECOMMENDED_MINOR),
    (SUPPORTED_CONFIG_MAJOR, _SUPPORTED_CONFIG_MAX_MINOR),
) = _load_compat()
OUTPUT_SCHEMA_VERSION = f"{OUTPUT_SCHEMA_MAJOR}.{_OUTPUT_RECOMMENDED_MINOR}.0"


def _from_pkg() -> str | None:
    try:
        return metadata.version("spinext")
    except metadata.PackageNotFoundError:
        return None


def _from_git() -> str | None:
    try:
        p = run(
            ["git", "describe", "--tags", "--abbrev=0"],
            capture_output=True,
            text=True,
            check=False,
        )
        if p.returncode == 0:
            return p.stdout.strip().lstrip("v")
        return None
    except OSError:  # pragma: no cover
        return None


def get_version() -> str:
    return _from_pkg() or _from_git() or "0.0.0+dev"


def supported_output_range_str() -> str:
    return f"{OUTPUT_SCHEMA_MAJOR}.0-{OUTPUT_SCHEMA_MAJOR}.{_OUTPUT_MAX_MINOR}"


def supported_config_range_str() -> str:
    return f"{SUPPORTED_CONFIG_MAJOR}.0-{SUPPORTED_CONFIG_MAJOR}.{_SUPPORTED_CONFIG_MAX_MINOR}"


class ConfigVersionIssue(Enum):
    INVALID = "invalid"
    MAJOR_MISMATCH = "major_mismatch"
    MINOR_TOO_NEW = "minor_too_new"


def check_config_compat(ver: str) -> tuple[bool, ConfigVersionIssue | None]:
    try:
        vi = semver.VersionInfo.parse(ver)
    except ValueError:
        return False, ConfigVersionIssue.INVALID
    if vi.major != SUPPORTED_CONFIG_MAJOR:
        return False, ConfigVersionIssue.MAJOR_MISMATCH
    if vi.minor > _SUPPORTED_CONFIG_MAX_MINOR:
        return False, ConfigVersionIssue.MINOR_TOO_NEW
    return True, None
