"""Input errors and JSON loading with position diagnostics."""

from __future__ import annotations

import json
from pathlib import Path

__all__ = ["InputError", "load_json", "loads_json"]


class InputError(ValueError):
    """Malformed user input (fixture, curve file, command-line value)."""


def loads_json(text, source="<string>"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"{source}:{e.lineno}:{e.colno}: {e.msg}") from None


def load_json(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"{path}: {e.strerror}") from None
    return loads_json(text, str(path))
