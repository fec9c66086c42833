"""Verification reports: one row per checked case, serializable to CSV or JSON."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any


def fmt_float(x: float) -> str:
    """17 significant digits, enough to round-trip any double."""
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x + 0.0, ".17g")  # + 0.0 turns -0.0 into 0.0


def jsonable(x: Any) -> Any:
    """Complex numbers become ``{"re", "im"}``; numpy scalars become Python numbers."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if hasattr(x, "item") and not isinstance(x, (str, bytes)):
        try:
            x = x.item()
        except (ValueError, AttributeError):
            x = x.tolist()
            return jsonable(x)
    if isinstance(x, complex):
        return {"re": _num(x.real), "im": _num(x.imag)}
    if isinstance(x, float):
        return _num(x)
    return x


def _num(x: float):
    # JSON has no inf/nan; keep them readable as strings
    return x if math.isfinite(x) else fmt_float(x)


def cell(x: Any) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, complex):
        return f"{fmt_float(x.real)}{'+' if x.imag >= 0 or math.isnan(x.imag) else '-'}{fmt_float(abs(x.imag))}i"
    if isinstance(x, float):
        return fmt_float(x)
    if hasattr(x, "item"):
        return cell(x.item())
    if isinstance(x, (dict, list, tuple)):
        return json.dumps(jsonable(x), sort_keys=True)
    return str(x)


@dataclass
class Case:
    id: str
    inputs: dict
    expected: Any
    actual: Any
    abs_error: float
    tolerance: float
    ref: str = ""
    status: str = field(init=False)

    def __post_init__(self):
        self.abs_error = float(self.abs_error)
        self.tolerance = float(self.tolerance)
        self.status = "pass" if self.abs_error <= self.tolerance else "fail"

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    @classmethod
    def compare(cls, id, expected, actual, tolerance, inputs=None, ref="", relative=False):
        """Equality within ``tolerance`` (scaled by ``|expected|`` when ``relative``)."""
        err = abs(complex(actual) - complex(expected))
        tol = tolerance * abs(complex(expected)) if relative else tolerance
        return cls(id, inputs or {}, _plain(expected), _plain(actual), err, tol, ref)

    @classmethod
    def bound(cls, id, lhs, rhs, tolerance=0.0, inputs=None, ref=""):
        """Inequality ``lhs <= rhs``; the error is the amount by which it is violated."""
        lhs, rhs = float(lhs), float(rhs)
        return cls(id, inputs or {}, rhs, lhs, max(0.0, lhs - rhs), tolerance, ref)

    @classmethod
    def flag(cls, id, ok: bool, inputs=None, ref="", detail=None):
        return cls(id, inputs or {}, True, bool(ok) if detail is None else detail,
                   0.0 if ok else 1.0, 0.0, ref)

    def row(self) -> dict:
        return {
            "id": self.id, "inputs": self.inputs, "expected": self.expected,
            "actual": self.actual, "abs_error": self.abs_error,
            "tolerance": self.tolerance, "status": self.status, "ref": self.ref,
        }


def _plain(x):
    if hasattr(x, "item"):
        x = x.item()
    if isinstance(x, complex) and x.imag == 0:
        return x.real
    return x


@dataclass
class SpectralReport:
    suite: str
    cases: list = field(default_factory=list)
    config_echo: dict = field(default_factory=dict)

    def add(self, case: Case) -> Case:
        self.cases.append(case)
        return case

    def extend(self, other: "SpectralReport") -> None:
        self.cases.extend(other.cases)

    @property
    def summary(self) -> dict:
        npass = sum(c.passed for c in self.cases)
        return {"pass": npass, "fail": len(self.cases) - npass, "total": len(self.cases)}

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)

    def failures(self) -> list:
        return [c for c in self.cases if not c.passed]

    def sorted(self) -> "SpectralReport":
        return SpectralReport(self.suite, sorted(self.cases, key=lambda c: c.id), self.config_echo)

    def to_json(self) -> str:
        payload = {
            "suite": self.suite,
            "summary": self.summary,
            "config": self.config_echo,
            "cases": [c.row() for c in self.cases],
        }
        return json.dumps(jsonable(payload), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        cols = ["suite", "id", "status", "expected", "actual", "abs_error", "tolerance", "ref", "inputs"]
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for c in self.cases:
            row = c.row()
            w.writerow([self.suite] + [cell(row[k]) for k in cols[1:]])
        return buf.getvalue()
