"""Findings, per-document reports and corpus summaries, with canonical serialization.

Canonical JSON uses a fixed key order and fixed decimal places (GFI to 2
places) so that identical analyses serialize to identical bytes. Anything
time-dependent lives in the optional envelope, never in the report itself.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any

from . import __version__
from .textmetrics import TextStats

GDPR_IDS = ("GDPR1", "GDPR2", "GDPR3", "GDPR4", "GDPR5", "GDPR6")
GUIDELINE_IDS = ("UG-A", "UG-B", "UG-C", "UG-D", "UG-E", "UG-F")
STATUSES = ("satisfied", "not_satisfied", "indeterminate")
VERDICTS = ("compliant", "not_compliant", "indeterminate")


@dataclass(frozen=True)
class Evidence:
    start: int
    end: int
    label: str
    text: str


@dataclass(frozen=True)
class Finding:
    rule_id: str
    status: str
    evidence: tuple[Evidence, ...] = ()
    message: str = ""
    remediation: str = ""
    details: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.status not in STATUSES:
            raise ValueError(f"bad status {self.status!r}")

    @property
    def satisfied(self) -> bool:
        return self.status == "satisfied"


def verdict_for(findings: list[Finding] | tuple[Finding, ...]) -> str:
    """compliant iff GDPR1-6 are all satisfied; any explicit failure is not_compliant."""
    by_id = {f.rule_id: f.status for f in findings}
    statuses = [by_id.get(rid, "indeterminate") for rid in GDPR_IDS]
    if all(s == "satisfied" for s in statuses):
        return "compliant"
    if "not_satisfied" in statuses:
        return "not_compliant"
    return "indeterminate"


@dataclass(frozen=True)
class Report:
    source_id: str
    stats: TextStats
    findings: tuple[Finding, ...]
    tool_version: str = __version__

    def __post_init__(self) -> None:
        ids = [f.rule_id for f in self.findings]
        if len(ids) != len(set(ids)):
            raise ValueError("rule ids must be unique within a report")

    @property
    def verdict(self) -> str:
        return verdict_for(self.findings)

    def finding(self, rule_id: str) -> Finding:
        for f in self.findings:
            if f.rule_id == rule_id:
                return f
        raise KeyError(rule_id)

    def status(self, rule_id: str) -> str:
        return self.finding(rule_id).status

    @property
    def usability(self) -> tuple[int, int]:
        guidelines = [f for f in self.findings if f.rule_id in GUIDELINE_IDS]
        return sum(f.satisfied for f in guidelines), len(guidelines)

    def to_data(self) -> dict:
        satisfied, total = self.usability
        return {
            "tool_version": self.tool_version,
            "source_id": self.source_id,
            "verdict": self.verdict,
            "stats": stats_data(self.stats),
            "usability": {"satisfied": satisfied, "total": total},
            "findings": [finding_data(f) for f in self.findings],
        }

    def to_json(self, envelope: bool = False, now: datetime | None = None) -> str:
        data: Any = self.to_data()
        if envelope:
            data = envelope_data(data, now)
        return canonical_json(data)

    def to_text(self) -> str:
        s = self.stats
        satisfied, total = self.usability
        lines = [
            f"policylint {self.tool_version}  {self.source_id}",
            f"verdict: {self.verdict}",
            f"words {s.word_count}  sentences {s.sentence_count}  complex {s.complex_word_count} "
            f"({s.complex_percent:.2f}%)  GFI {s.gfi:.2f}",
            "",
        ]
        for f in self.findings:
            lines.append(f"{f.rule_id:<6} {f.status:<14} {f.message}")
        lines.append("")
        lines.append(f"usability guidelines satisfied: {satisfied}/{total}")
        fixes = [f for f in self.findings if not f.satisfied and f.remediation]
        if fixes:
            lines.append("")
            lines.append("suggested fixes:")
            lines += [f"  {f.rule_id}: {f.remediation}" for f in fixes]
        return "\n".join(lines) + "\n"


# -- canonical serialization ------------------------------------------------------


@dataclass(frozen=True)
class Fixed:
    """A float that serializes with a fixed number of decimal places."""

    value: float
    places: int


def stats_data(stats: TextStats) -> dict:
    return {
        "word_count": stats.word_count,
        "sentence_count": stats.sentence_count,
        "complex_word_count": stats.complex_word_count,
        "complex_ratio": Fixed(stats.complex_ratio, 4),
        "complex_percent": Fixed(stats.complex_percent, 2),
        "gfi": Fixed(stats.gfi, 2),
    }


def finding_data(f: Finding) -> dict:
    return {
        "rule_id": f.rule_id,
        "status": f.status,
        "message": f.message,
        "remediation": f.remediation,
        "evidence": [{"start": e.start, "end": e.end, "label": e.label, "text": e.text} for e in f.evidence],
        "details": {k: _detail(v) for k, v in sorted(f.details.items())},
    }


def _detail(value: Any) -> Any:
    if isinstance(value, TextStats):
        return stats_data(value)
    if isinstance(value, float):
        return Fixed(value, 4)
    return value


def envelope_data(report: dict, now: datetime | None = None) -> dict:
    stamp = (now or datetime.now(timezone.utc)).isoformat(timespec="seconds")
    return {"generated_at": stamp, "report": report}


def canonical_json(data: Any) -> str:
    return _emit(data, 0) + "\n"


def _emit(value: Any, depth: int) -> str:
    pad = "  " * (depth + 1)
    end = "  " * depth
    if isinstance(value, Fixed):
        return f"{value.value:.{value.places}f}"
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_emit(v, depth + 1)}" for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        return "[\n" + ",\n".join(pad + _emit(v, depth + 1) for v in value) + "\n" + end + "]"
    if isinstance(value, float):
        return f"{value:.4f}"
    return json.dumps(value, ensure_ascii=False)


# -- corpus -----------------------------------------------------------------------

CSV_COLUMNS = ("source_id", "words", "complex", "complex_percent", "gfi") + tuple(r.lower() for r in GDPR_IDS) + ("verdict",)


@dataclass(frozen=True)
class CorpusRow:
    source_id: str
    stats: TextStats | None
    statuses: dict[str, str]
    verdict: str
    error: str | None = None

    @classmethod
    def from_report(cls, report: Report) -> "CorpusRow":
        statuses = {rid: report.status(rid) for rid in GDPR_IDS}
        return cls(report.source_id, report.stats, statuses, report.verdict)

    @classmethod
    def from_stats(cls, source_id: str, stats: TextStats, statuses: dict[str, str] | None = None) -> "CorpusRow":
        statuses = {rid: (statuses or {}).get(rid, "indeterminate") for rid in GDPR_IDS}
        findings = [Finding(rid, s) for rid, s in statuses.items()]
        return cls(source_id, stats, statuses, verdict_for(findings))

    @classmethod
    def failed(cls, source_id: str, error: str) -> "CorpusRow":
        return cls(source_id, None, dict.fromkeys(GDPR_IDS, "indeterminate"), "indeterminate", error)

    def csv_values(self) -> list[str]:
        s = self.stats
        numbers = (
            ["", "", "", ""]
            if s is None
            else [str(s.word_count), str(s.complex_word_count), f"{s.complex_percent:.2f}", f"{s.gfi:.2f}"]
        )
        return [self.source_id, *numbers, *(self.statuses[r] for r in GDPR_IDS), self.verdict]

    def to_data(self) -> dict:
        data: dict[str, Any] = {"source_id": self.source_id}
        data["stats"] = None if self.stats is None else stats_data(self.stats)
        data["statuses"] = {r: self.statuses[r] for r in GDPR_IDS}
        data["verdict"] = self.verdict
        data["error"] = self.error
        return data


@dataclass(frozen=True)
class CorpusSummary:
    rows: tuple[CorpusRow, ...]
    tool_version: str = __version__

    def aggregate(self) -> dict:
        gfis = [r.stats.gfi for r in self.rows if r.stats is not None]
        if not gfis:
            return {"documents": len(self.rows), "scored": 0, "gfi_mean": None, "gfi_min": None, "gfi_max": None}
        return {
            "documents": len(self.rows),
            "scored": len(gfis),
            "gfi_mean": Fixed(sum(gfis) / len(gfis), 2),
            "gfi_min": Fixed(min(gfis), 2),
            "gfi_max": Fixed(max(gfis), 2),
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in self.rows:
            writer.writerow(row.csv_values())
        return buf.getvalue()

    def to_data(self) -> dict:
        return {
            "tool_version": self.tool_version,
            "aggregate": self.aggregate(),
            "rows": [r.to_data() for r in self.rows],
        }

    def to_json(self, envelope: bool = False, now: datetime | None = None) -> str:
        data: Any = self.to_data()
        if envelope:
            data = envelope_data(data, now)
        return canonical_json(data)

    def to_text(self) -> str:
        lines = [f"{'source':<40} {'words':>6} {'complex':>7} {'%':>6} {'GFI':>6}  verdict"]
        for row in self.rows:
            s = row.stats
            if s is None:
                lines.append(f"{row.source_id:<40} {'-':>6} {'-':>7} {'-':>6} {'-':>6}  {row.verdict} ({row.error})")
            else:
                lines.append(
                    f"{row.source_id:<40} {s.word_count:>6} {s.complex_word_count:>7} "
                    f"{s.complex_percent:>6.2f} {s.gfi:>6.2f}  {row.verdict}"
                )
        agg = self.aggregate()
        if agg["scored"]:
            lines.append(
                f"GFI mean {agg['gfi_mean'].value:.2f}  min {agg['gfi_min'].value:.2f}  max {agg['gfi_max'].value:.2f}"
            )
        return "\n".join(lines) + "\n"
