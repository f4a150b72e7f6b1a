"""Solver configuration: a dataclass plus a key=value file reader."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path


@dataclass(frozen=True)
class SolverConfig:
    c: Fraction = Fraction(1, 8)
    c_prime: Fraction = Fraction(1)
    oracle_ceiling: int = 20_000
    height_bound: int = 10**6
    fallback_budget: float = 0.05
    B_min: int = 256
    series_order: int | None = None
    series_extra: int = 4
    halo: int = 2
    refine_depth: int = 2
    census_ceiling: int = 10**7
    exception_ceiling: int = 4096

    def replace(self, **kw) -> "SolverConfig":
        return dataclasses.replace(self, **kw)


def _convert(field: dataclasses.Field, text: str):
    kind = field.type if isinstance(field.type, str) else field.type.__name__
    if "Fraction" in kind:
        return Fraction(text)
    if "float" in kind:
        return float(text)
    if "None" in kind and text.lower() in ("none", ""):
        return None
    return int(text)


def parse_config(text: str, base: SolverConfig | None = None) -> SolverConfig:
    """Read ``key = value`` lines; ``#`` starts a comment."""
    base = base or SolverConfig()
    fields = {f.name: f for f in dataclasses.fields(SolverConfig)}
    updates = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in fields:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        updates[key] = _convert(fields[key], value)
    return base.replace(**updates)


def load_config(path: str | Path | None) -> SolverConfig:
    if path is None:
        return SolverConfig()
    return parse_config(Path(path).read_text())
