"""Exact tools for Tanaka prolongation, bracket deformations and tube CR geometry."""

from pathlib import Path

__version__ = "0.1.0"

FIXTURES = Path(__file__).resolve().parent / "fixtures"


def fixture(name):
    """Path of a bundled fixture (``.json`` may be omitted)."""
    p = FIXTURES / name
    if p.suffix != ".json":
        p = p.with_suffix(".json")
    return p
