"""Report documents and their JSON/CSV serialization.

Every real number leaves the process formatted with 17 significant digits,
which round-trips IEEE doubles exactly.
"""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

SOURCES = ("PAPER", "TRIVIAL", "DERIVED")


def fmt_real(x: float) -> str:
    return format(float(x), ".17g")


@dataclass
class Check:
    name: str
    expected: object
    actual: object
    tolerance: float
    source: str

    def __post_init__(self):
        if self.source not in SOURCES:
            raise ValueError(f"unknown source tag {self.source!r}")

    @property
    def passed(self) -> bool:
        if isinstance(self.expected, bool):
            return bool(self.actual) == self.expected
        try:
            return abs(float(self.actual) - float(self.expected)) <= self.tolerance
        except (TypeError, ValueError):
            return False

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "expected": self.expected,
            "actual": self.actual,
            "tolerance": self.tolerance,
            "source": self.source,
            "passed": self.passed,
        }


@dataclass
class ReportDocument:
    experiment: str
    inputs: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    tables: dict = field(default_factory=dict)  # name -> (header, rows); written as CSV

    def check(self, name, expected, actual, tolerance=0.0, source="DERIVED") -> Check:
        c = Check(name, expected, actual, tolerance, source)
        self.checks.append(c)
        return c

    def table(self, name: str, header, rows) -> None:
        self.tables[name] = (list(header), [list(r) for r in rows])

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> dict:
        return {
            "experiment": self.experiment,
            "inputs": self.inputs,
            "results": self.results,
            "residuals": self.residuals,
            "checks": [c.to_json() for c in self.checks],
            "passed": self.passed,
            "tables": sorted(self.tables),
        }

    def summary_lines(self) -> list[str]:
        lines = [f"[{self.experiment}] {'PASS' if self.passed else 'FAIL'}"]
        for c in self.checks:
            lines.append(
                f"  {'PASS' if c.passed else 'FAIL'} {c.name}: actual={_plain(c.actual)} "
                f"expected={_plain(c.expected)} tol={c.tolerance:g} [{c.source}]"
            )
        return lines

    def write(self, out_dir) -> list[Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        paths = [out / f"{self.experiment}.json"]
        paths[0].write_text(dumps(self.to_json()) + "\n")
        for name, (header, rows) in sorted(self.tables.items()):
            p = out / f"{self.experiment}.{name}.csv"
            p.write_text(to_csv(header, rows))
            paths.append(p)
        return paths


def _plain(x):
    if isinstance(x, float):
        return fmt_real(x)
    return x


def _to_builtin(x):
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.ndarray):
        return [_to_builtin(v) for v in x.tolist()]
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


def dumps(obj, indent: int = 2) -> str:
    """JSON text with reals printed at 17 significant digits; NaN/inf become null."""
    import json

    def enc(x, level):
        x = _to_builtin(x)
        pad = " " * (indent * (level + 1))
        end = " " * (indent * level)
        if isinstance(x, bool) or x is None:
            return json.dumps(x)
        if isinstance(x, int):
            return str(x)
        if isinstance(x, float):
            return fmt_real(x) if math.isfinite(x) else "null"
        if isinstance(x, str):
            return json.dumps(x)
        if isinstance(x, dict):
            if not x:
                return "{}"
            items = [f"{pad}{json.dumps(str(k))}: {enc(v, level + 1)}" for k, v in x.items()]
            return "{\n" + ",\n".join(items) + "\n" + end + "}"
        if isinstance(x, (list, tuple)):
            if not x:
                return "[]"
            if all(isinstance(_to_builtin(v), (int, float, bool)) or v is None for v in x):
                return "[" + ", ".join(enc(v, level + 1) for v in x) + "]"
            return "[\n" + ",\n".join(pad + enc(v, level + 1) for v in x) + "\n" + end + "]"
        raise TypeError(f"cannot serialize {type(x).__name__}")

    return enc(obj, 0)


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt_real(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def thread_cap() -> int:
    try:
        n = int(os.environ.get("KOBALT_THREADS", "1"))
    except ValueError:
        n = 1
    return max(1, n)


def parallel_map(fn, items) -> list:
    """Order-preserving map over at most KOBALT_THREADS worker threads."""
    items = list(items)
    n = min(thread_cap(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
