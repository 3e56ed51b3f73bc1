import os
import sys
from pathlib import Path

import pytest

# Ensure repository root is importable so tests can `import spinext`
ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

LONG_TESTS = os.getenv("SPINEXT_LONG_TESTS") == "1"


def pytest_collection_modifyitems(config, items):
    if LONG_TESTS:
        return
    skip_slow = pytest.mark.skip(reason="set SPINEXT_LONG_TESTS=1 to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)
