"""A session owns one document plus its prompts, run history and report.

All mutation flows through the session; the service layer serializes access
with one lock per session, and the CLI drives a session single-threaded.
"""

from __future__ import annotations

import time
from dataclasses import replace
from typing import Callable

from .backends import CompletionBackend
from .diagnostics import CompatibilityReport, ingest
from .document import MockDocument, set_text
from .engine import RunResult, fire_trigger, run_prompt
from .prompts import (
    InfusedPrompt,
    ValidationReport,
    check_prompt_set,
    validate_prompt,
)

DEFAULT_HISTORY_CAP = 200


def counting_clock(start: float = 0.0, step: float = 1.0) -> Callable[[], float]:
    """A logical clock for reproducible run timestamps (CLI reports, tests)."""
    state = {"now": start - step}

    def tick() -> float:
        state["now"] += step
        return state["now"]

    return tick


class Session:
    def __init__(
        self,
        doc: MockDocument,
        prompts: list[InfusedPrompt] | None = None,
        backend: CompletionBackend | None = None,
        history_cap: int = DEFAULT_HISTORY_CAP,
        clock: Callable[[], float] = time.time,
    ):
        self.doc = doc
        self.prompts: list[InfusedPrompt] = list(prompts or [])
        self.backend = backend
        self.history_cap = history_cap
        self.clock = clock
        self.run_history: list[RunResult] = []
        self.report = CompatibilityReport()
        self._run_counter = 0

    # -- prompts ------------------------------------------------------------

    def prompt_by_id(self, prompt_id: str) -> InfusedPrompt | None:
        for p in self.prompts:
            if p.prompt_id == prompt_id:
                return p
        return None

    def upsert_prompt(self, prompt: InfusedPrompt) -> ValidationReport:
        """Add or replace a prompt. Stored only when the configuration is
        violation-free (including the auto-run cycle check); the report tells
        the caller what, if anything, was wrong."""
        others = [p for p in self.prompts if p.prompt_id != prompt.prompt_id]
        report = validate_prompt(prompt, self.doc, others)
        set_report = check_prompt_set([*others, prompt], self.doc)
        report.violations.extend(set_report.violations)
        report.warnings.extend(set_report.warnings)
        if report.ok:
            self.prompts = [*others, prompt]
        return report

    def delete_prompt(self, prompt_id: str) -> bool:
        before = len(self.prompts)
        self.prompts = [p for p in self.prompts if p.prompt_id != prompt_id]
        return len(self.prompts) != before

    def validate(self, prompt_id: str) -> ValidationReport | None:
        prompt = self.prompt_by_id(prompt_id)
        if prompt is None:
            return None
        others = [p for p in self.prompts if p.prompt_id != prompt_id]
        return validate_prompt(prompt, self.doc, others)

    # -- document -----------------------------------------------------------

    def set_text(self, element_id: str, text: str) -> MockDocument:
        self.doc = set_text(self.doc, element_id, text)
        return self.doc

    def bump_revision(self) -> int:
        """Mark a session-level mutation (prompt changes count too, so every
        change-feed event carries a fresh revision)."""
        self.doc = replace(self.doc, revision=self.doc.revision + 1)
        return self.doc.revision

    def stale_prompts(self) -> list[str]:
        """Prompt ids that no longer validate against the current document."""
        stale = []
        for p in self.prompts:
            others = [q for q in self.prompts if q.prompt_id != p.prompt_id]
            if not validate_prompt(p, self.doc, others).ok:
                stale.append(p.prompt_id)
        return stale

    # -- runs ---------------------------------------------------------------

    def next_run_id(self) -> str:
        self._run_counter += 1
        return f"run-{self._run_counter:04d}"

    def record(self, result: RunResult) -> None:
        self.run_history.append(result)
        if len(self.run_history) > self.history_cap:
            del self.run_history[: len(self.run_history) - self.history_cap]
        ingest(self.report, result, self.doc)

    def run(self, prompt_id: str) -> RunResult | None:
        """Run one prompt directly (the "Run Prompt" button)."""
        prompt = self.prompt_by_id(prompt_id)
        if prompt is None:
            return None
        others = [p for p in self.prompts if p.prompt_id != prompt_id]
        doc, result = run_prompt(
            prompt,
            self.doc,
            self.backend,
            run_id=self.next_run_id(),
            clock=self.clock,
            other_prompts=others,
        )
        self.doc = doc
        self.record(result)
        return result

    def fire(self, trigger_id: str) -> list[RunResult]:
        return fire_trigger(trigger_id, self)
