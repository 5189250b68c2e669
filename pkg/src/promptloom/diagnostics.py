"""Aggregates run diagnostics into a document-level compatibility report.

The report answers the questions designers otherwise answer by staring at
the mockup after many runs: which prompts misbehave, which elements
overflow, and how much written lengths swing.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .document import MockDocument, capacity_chars
from .engine import RunResult
from .splitter import ERROR_KINDS, INFO_KINDS, WARNING_KINDS

SEVERITY_ERROR = "error"
SEVERITY_WARNING = "warning"
SEVERITY_INFO = "info"

_SEVERITY_RANK = {SEVERITY_ERROR: 2, SEVERITY_WARNING: 1, SEVERITY_INFO: 0}


def severity_of(kind: str) -> str:
    """Split failures break the input/output contract outright, so they rank
    above layout problems; empty values and absent stop words are hints."""
    if kind in ERROR_KINDS:
        return SEVERITY_ERROR
    if kind in WARNING_KINDS:
        return SEVERITY_WARNING
    if kind in INFO_KINDS:
        return SEVERITY_INFO
    return SEVERITY_INFO


@dataclass
class ElementStats:
    overflow_count: int = 0
    writes: int = 0
    min_length: int = 0
    max_length: int = 0
    total_length: int = 0
    capacity: int | None = None

    @property
    def mean_length(self) -> float:
        return self.total_length / self.writes if self.writes else 0.0


@dataclass
class CompatibilityReport:
    runs_analyzed: int = 0
    run_ids: set[str] = field(default_factory=set)
    per_prompt: dict[str, dict[str, int]] = field(default_factory=dict)
    per_element: dict[str, ElementStats] = field(default_factory=dict)
    by_subject: dict[tuple[str, str], int] = field(default_factory=dict)


@dataclass(frozen=True)
class Finding:
    severity: str
    kind: str
    subject: str
    count: int


def ingest(
    report: CompatibilityReport, run: RunResult, doc: MockDocument | None = None
) -> CompatibilityReport:
    """Fold one finished run into the report. Idempotent per run_id.

    Pass the document to record written elements' current capacity.
    """
    if run.run_id in report.run_ids:
        return report
    report.run_ids.add(run.run_id)
    report.runs_analyzed += 1

    counters = report.per_prompt.setdefault(run.prompt_id, {})
    for diag in run.diagnostics:
        counters[diag.kind] = counters.get(diag.kind, 0) + 1
        key = (diag.kind, diag.subject)
        report.by_subject[key] = report.by_subject.get(key, 0) + 1
        if diag.kind == "Overflow":
            stats = report.per_element.setdefault(diag.subject, ElementStats())
            stats.overflow_count += 1

    for write in run.writes:
        stats = report.per_element.setdefault(write.element_id, ElementStats())
        length = len(write.new_text)
        if stats.writes == 0:
            stats.min_length = stats.max_length = length
        else:
            stats.min_length = min(stats.min_length, length)
            stats.max_length = max(stats.max_length, length)
        stats.writes += 1
        stats.total_length += length
        if doc is not None and doc.has_text_element(write.element_id):
            stats.capacity = capacity_chars(doc.find_text_element(write.element_id))
    return report


def summarize(report: CompatibilityReport) -> list[Finding]:
    """Findings ordered by severity desc, evidence count desc, subject asc."""
    findings = [
        Finding(severity_of(kind), kind, subject, count)
        for (kind, subject), count in report.by_subject.items()
    ]
    findings.sort(
        key=lambda f: (-_SEVERITY_RANK[f.severity], -f.count, f.subject, f.kind)
    )
    return findings


def report_to_json(report: CompatibilityReport) -> dict:
    """Stable-keyed plain-dict form for the CLI and service."""
    return {
        "runs_analyzed": report.runs_analyzed,
        "per_prompt": {
            pid: dict(sorted(counters.items()))
            for pid, counters in sorted(report.per_prompt.items())
        },
        "per_element": {
            eid: {
                "overflow_count": stats.overflow_count,
                "max_length": stats.max_length,
                "capacity": stats.capacity,
            }
            for eid, stats in sorted(report.per_element.items())
        },
        "length_variance": {
            eid: {
                "min": stats.min_length,
                "max": stats.max_length,
                "mean": stats.mean_length,
            }
            for eid, stats in sorted(report.per_element.items())
            if stats.writes
        },
        "findings": [
            {
                "severity": f.severity,
                "kind": f.kind,
                "subject": f.subject,
                "count": f.count,
            }
            for f in summarize(report)
        ],
    }
