"""Loader for the versioned regression-baseline table shipped in data/."""
from __future__ import annotations

from fractions import Fraction
from importlib import resources


def load_baselines() -> dict:
    """Parse data/baselines.txt into {key: Fraction | float | int}."""
    text = resources.files("souvlaki").joinpath("data/baselines.txt").read_text()
    out: dict = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, raw = line.split("\t")
        if "/" in raw:
            out[key] = Fraction(raw)
        elif raw.isdigit():
            out[key] = int(raw)
        else:
            out[key] = float(raw)
    return out
