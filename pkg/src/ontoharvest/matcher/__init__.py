"""Match-kernel backend selection.

The element-sequence matcher exists twice with identical semantics: a
compiled Cython extension (fast path) and a pure-Python fallback.  The
extension is picked at import time when present; set ONTOHARVEST_ENGINE to
``python`` or ``cython`` to force a backend (benchmarks and the parity
tests do).
"""

from __future__ import annotations

import os

from ontoharvest.matcher import _engine_py

_FORCED = os.environ.get("ONTOHARVEST_ENGINE", "").strip().lower()

if _FORCED not in ("", "python", "cython"):
    raise RuntimeError(f"ONTOHARVEST_ENGINE must be 'python' or 'cython', got {_FORCED!r}")

if _FORCED == "python":
    _engine = _engine_py
    BACKEND = "python"
else:
    try:
        from ontoharvest.matcher import _engine_cy as _engine  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        if _FORCED == "cython":
            raise
        _engine = _engine_py
        BACKEND = "python"

find_matches = _engine.find_matches


def available_backends() -> list[str]:
    out = ["python"]
    try:
        from ontoharvest.matcher import _engine_cy  # noqa: F401
    except ImportError:
        pass
    else:
        out.insert(0, "cython")
    return out


def get_engine(name: str):
    """Explicit backend lookup; raises ImportError if unavailable."""
    if name == "python":
        return _engine_py
    if name == "cython":
        from ontoharvest.matcher import _engine_cy

        return _engine_cy
    raise ValueError(f"unknown engine {name!r}")
