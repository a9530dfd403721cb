"""Report documents: a run manifest, named tables, discrepancy notices, checks."""

from __future__ import annotations

import csv
import datetime as _dt
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__

SCHEMA_VERSION = 1


def to_jsonable(value):
    """Convert numpy scalars/arrays, tuples and non-finite floats to plain JSON values."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


@dataclass
class RunManifest:
    command: str
    argv: list
    seed: int | None
    domain: str | None
    n: int | None
    config: dict = field(default_factory=dict)
    tool: str = "ctrlscape"
    version: str = __version__
    timestamp: str = field(
        default_factory=lambda: _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"))
    suites: dict = field(default_factory=dict)


@dataclass
class ReportDocument:
    """Everything one command produced.

    ``tables`` maps a table name to a list of flat-ish records; ``checks`` maps a
    check name to pass/fail. ``timing`` is kept apart from the numeric payload
    so reruns can be compared byte for byte.
    """

    manifest: RunManifest
    tables: dict = field(default_factory=dict)
    notices: list = field(default_factory=list)
    checks: dict = field(default_factory=dict)
    timing: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(self.checks.values())

    def check(self, name: str, ok) -> bool:
        self.checks[name] = bool(ok)
        self.manifest.suites[name] = "pass" if ok else "fail"
        return bool(ok)

    def notice(self, paper_claim: str, paper_location: str, measured, verdict: str):
        self.notices.append({"paper_claim": paper_claim, "paper_location": paper_location,
                             "measured": to_jsonable(measured), "verdict": verdict})

    def as_dict(self) -> dict:
        return to_jsonable({
            "schema_version": SCHEMA_VERSION,
            "manifest": asdict(self.manifest),
            "passed": self.passed,
            "checks": self.checks,
            "tables": self.tables,
            "notices": self.notices,
            "timing": self.timing,
        })

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, ensure_ascii=False)

    def numeric_payload(self) -> str:
        """Serialized tables, notices and checks; identical for identical seeds."""
        d = self.as_dict()
        return json.dumps({k: d[k] for k in ("checks", "tables", "notices")}, sort_keys=True)

    def write_json(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_json() + "\n", encoding="utf-8")
        return path

    def write_csv(self, directory) -> list[Path]:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        written = []
        tables = dict(self.tables)
        if self.notices:
            tables["discrepancy_notices"] = self.notices
        for name, rows in tables.items():
            rows = to_jsonable(rows)
            if not rows:
                continue
            cols = list(dict.fromkeys(k for r in rows for k in r))
            path = directory / f"{name}.csv"
            with path.open("w", newline="", encoding="utf-8") as fh:
                w = csv.DictWriter(fh, fieldnames=cols)
                w.writeheader()
                for r in rows:
                    w.writerow({k: json.dumps(v) if isinstance(v, (list, dict)) else v
                                for k, v in r.items()})
            written.append(path)
        return written

    def summary(self) -> str:
        lines = [f"{self.manifest.tool} {self.manifest.command}  "
                 f"domain={self.manifest.domain} N={self.manifest.n} seed={self.manifest.seed}"]
        for name, rows in self.tables.items():
            lines.append("")
            lines.append(f"[{name}]")
            lines.extend(_format_table(to_jsonable(rows)))
        for note in self.notices:
            lines.append("")
            lines.append(f"NOTICE ({note['paper_location']}): {note['paper_claim']}")
            lines.append(f"  measured: {note['measured']}  verdict: {note['verdict']}")
        lines.append("")
        for name, ok in self.checks.items():
            lines.append(f"{'PASS' if ok else 'FAIL'}  {name}")
        return "\n".join(lines)


def _cell(v) -> str:
    if isinstance(v, float):
        return f"{v:.3e}" if v != 0 and (abs(v) < 1e-3 or abs(v) >= 1e5) else f"{v:g}"
    if isinstance(v, list):
        return "(" + ",".join(_cell(x) for x in v) + ")"
    return str(v)


def _format_table(rows, max_rows: int = 40) -> list[str]:
    if not rows:
        return ["(empty)"]
    cols = list(dict.fromkeys(k for r in rows for k in r))
    cells = [[_cell(r.get(c, "")) for c in cols] for r in rows[:max_rows]]
    widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
    out = ["  ".join(c.ljust(w) for c, w in zip(cols, widths))]
    out += ["  ".join(v.ljust(w) for v, w in zip(row, widths)) for row in cells]
    if len(rows) > max_rows:
        out.append(f"... {len(rows) - max_rows} more rows")
    return out
