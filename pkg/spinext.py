#!/usr/bin/env python3
"""spinext CLI shim.

Allows running `python spinext.py` in the repo. Installed entry-point is `spinext`.
"""

from spinext_core import (
    QuadraticRefinement,
    SymplecticSpace,
    TorusSpin,
    __version__,
)
from spinext_core.cli import main

__all__ = [
    "QuadraticRefinement",
    "SymplecticSpace",
    "TorusSpin",
    "__version__",
    "main",
]

if __name__ == "__main__":  # pragma: no cover
    main()  # pragma: no cover
