"""Serializable experiment records."""

from __future__ import annotations

import json
import math
import platform
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

SCHEMA_VERSION = 1

_RELATIONS = {
    "<=": lambda a, b: a <= b,
    "<": lambda a, b: a < b,
    "==": lambda a, b: a == b,
    ">=": lambda a, b: a >= b,
}


@dataclass
class Check:
    name: str
    lhs: Any
    rhs: Any
    relation: str = "<="
    asserted: bool = True

    @property
    def verdict(self) -> bool:
        return bool(_RELATIONS[self.relation](self.lhs, self.rhs))

    def to_dict(self):
        return {
            "name": self.name,
            "lhs": _jsonable(self.lhs),
            "rhs": _jsonable(self.rhs),
            "relation": self.relation,
            "asserted": self.asserted,
            "verdict": "pass" if self.verdict else "fail",
        }


@dataclass
class ReportDocument:
    kind: str
    config: dict = field(default_factory=dict)
    quantities: dict = field(default_factory=dict)
    ratios: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    sections: dict = field(default_factory=dict)
    wall_time: float | None = None

    def add(self, name, value):
        self.quantities[name] = value
        return value

    def ratio(self, name, value):
        self.ratios[name] = value
        return value

    def check(self, name, lhs, rhs, relation="<=", asserted=True) -> bool:
        c = Check(name, lhs, rhs, relation, asserted)
        self.checks.append(c)
        return c.verdict

    def note(self, text):
        self.notes.append(text)

    def section(self, name, report: "ReportDocument"):
        self.sections[name] = report
        return report

    def get_check(self, name) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def all_checks(self, prefix: str = ""):
        """(section path, check) pairs, depth first."""
        yield from ((prefix, c) for c in self.checks)
        for name, sub in self.sections.items():
            yield from sub.all_checks(f"{prefix}/{name}" if prefix else name)

    @property
    def passed(self) -> bool:
        return all(c.verdict for _, c in self.all_checks() if c.asserted)

    def failures(self):
        return [(path, c) for path, c in self.all_checks() if c.asserted and not c.verdict]

    def to_dict(self, provenance=True):
        d = {
            "schema": SCHEMA_VERSION,
            "kind": self.kind,
            "config": _jsonable(self.config),
            "quantities": _jsonable(self.quantities),
            "ratios": _jsonable(self.ratios),
            "checks": [c.to_dict() for c in self.checks],
            "passed": self.passed,
        }
        if self.notes:
            d["notes"] = list(self.notes)
        if self.sections:
            d["sections"] = {k: v.to_dict(provenance=False) for k, v in self.sections.items()}
        if provenance:
            from . import __version__
            from ._accel import backend_name

            d["provenance"] = {
                "package": "sumprodlab",
                "version": __version__,
                "backend": backend_name(),
                "python": platform.python_version(),
                "wall_time": self.wall_time,
            }
        return d

    def to_json(self, provenance=True, indent=2) -> str:
        return json.dumps(self.to_dict(provenance), indent=indent, sort_keys=True)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else x.numerator
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, float):
        return x if math.isfinite(x) else str(x)
    if hasattr(x, "item"):  # numpy scalars
        return _jsonable(x.item())
    if isinstance(x, int):
        return x
    if hasattr(x, "to_dict"):
        return x.to_dict()
    return str(x)


class Timer:
    """Context manager recording wall time into a report."""

    def __init__(self, report: ReportDocument):
        self.report = report

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self.report

    def __exit__(self, *exc):
        self.report.wall_time = round(time.perf_counter() - self.t0, 6)
        return False
