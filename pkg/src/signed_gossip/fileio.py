"""Small file-output helpers shared by the exporters and the CLI."""

from __future__ import annotations

import json
import os


def fmt17(x: float) -> str:
    """A float with 17 significant digits; round-trips exactly."""
    return format(float(x), ".17g")


def atomic_write_text(path, text: str) -> None:
    """Write via a temp file and rename, so no partial file ever lands."""
    path = os.fspath(path)
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def json_text(obj) -> str:
    """Deterministic JSON rendering (sorted keys, no NaN)."""
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"
