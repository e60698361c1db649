"""Run reports and their three renderings: human table, JSON lines, CSV.

A JSON-lines report is the records, one object per line, followed by a
single header line ``{"report": {...}}`` carrying the command, parameters,
seed, prime, wall time, tool version and summary. :meth:`RunReport.from_json_lines`
reads that back into an equal :class:`RunReport`.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from typing import Any, Iterable

FORMATS = ("table", "json-lines", "csv")


def tool_version() -> str:
    from . import __version__

    return __version__


@dataclass
class RunReport:
    command: str
    parameters: dict[str, Any]
    seed: int
    prime: int
    records: list[dict[str, Any]] = field(default_factory=list)
    wall_time: float = 0.0
    version: str = field(default_factory=tool_version)
    summary: dict[str, Any] = field(default_factory=dict)

    def header(self) -> dict[str, Any]:
        out = asdict(self)
        out.pop("records")
        return out

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> RunReport:
        return cls(**json.loads(text))

    def to_json_lines(self) -> str:
        lines = [json_record(r) for r in self.records]
        lines.append(json.dumps({"report": self.header()}, sort_keys=True))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_json_lines(cls, text: str) -> RunReport:
        records, header = [], None
        for line in text.splitlines():
            if not line.strip():
                continue
            obj = json.loads(line)
            if set(obj) == {"report"}:
                header = obj["report"]
            else:
                records.append(obj)
        if header is None:
            raise ValueError("no report header line found")
        return cls(records=records, **header)


def json_record(record: dict[str, Any]) -> str:
    return json.dumps(record, sort_keys=True)


def _cell(v: Any) -> str:
    if isinstance(v, (list, tuple)):
        return " ".join(str(x) for x in v)
    if isinstance(v, dict):
        return json.dumps(v, sort_keys=True)
    return str(v)


def render_table(record: dict[str, Any]) -> str:
    width = max((len(k) for k in record), default=0)
    return "\n".join(f"{k:<{width}}  {_cell(v)}" for k, v in record.items())


def csv_header(columns: Iterable[str]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerow(list(columns))
    return buf.getvalue()


def csv_row(record: dict[str, Any], columns: Iterable[str]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerow([_cell(record.get(c, "")) for c in columns])
    return buf.getvalue()
