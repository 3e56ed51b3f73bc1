from __future__ import annotations

import json
import os
import subprocess
import sys
from pathlib import Path
from typing import Any

from spinext_core.quadform import QuadraticRefinement

# CLI runner (used by CLI tests)
_SCRIPT = Path(__file__).resolve().parents[1] / "spinext.py"


def run_cli(
    args: list[str], cwd: Path | None = None, env: dict[str, str] | None = None
) -> tuple[int, str, str]:
    proc_env = {**os.environ, **(env or {})}
    proc = subprocess.run(
        [sys.executable, str(_SCRIPT), *args],
        cwd=str(cwd) if cwd else None,
        env=proc_env,
        capture_output=True,
        text=True,
        check=False,
    )
    return proc.returncode, proc.stdout, proc.stderr


def run_json(args: list[str], **kwargs: Any) -> dict[str, Any]:
    rc, out, err = run_cli([*args, "--format", "json"], **kwargs)
    assert rc == 0, err
    return json.loads(out)


def error_payload(stderr: str) -> dict[str, Any]:
    """Last JSON line written to stderr by a failing command."""
    lines = [ln for ln in stderr.splitlines() if ln.startswith("{")]
    assert lines, f"no error payload in: {stderr!r}"
    return json.loads(lines[-1])["error"]


def forms(*texts: str) -> list[QuadraticRefinement]:
    return [QuadraticRefinement.from_string(t) for t in texts]
