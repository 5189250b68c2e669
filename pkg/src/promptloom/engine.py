"""Prompt execution: render, complete, stop-trim, split, write back.

A run either applies all of its extracted-value writes as one revision bump
or leaves the document untouched. Elements whose attribute went missing keep
their previous text (designers' placeholder scaffolding survives a bad run);
overflowing text is written anyway and flagged, because seeing the overflow
is the point.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, replace
from typing import TYPE_CHECKING, Callable

from .backends import CompletionBackend, CompletionRequest
from .document import MockDocument, apply_writes, capacity_chars
from .errors import BackendError, StaleBindingError, UnboundTriggerError
from .prompts import InfusedPrompt, validate_prompt
from .splitter import (
    EMPTY_VALUE,
    OVERFLOW,
    STOP_WORD_ABSENT,
    Diagnostic,
    apply_stop,
    split,
)
from .template import RenderedPrompt, render

if TYPE_CHECKING:
    from .session import Session

STATUS_OK = "ok"
STATUS_BACKEND_ERROR = "backend_error"
STATUS_VALIDATION_ERROR = "validation_error"


@dataclass(frozen=True)
class Write:
    element_id: str
    old_text: str
    new_text: str


@dataclass(frozen=True)
class RunResult:
    run_id: str
    prompt_id: str
    status: str
    rendered: RenderedPrompt | None = None
    raw_completion: str = ""
    writes: tuple[Write, ...] = ()
    diagnostics: tuple[Diagnostic, ...] = ()
    cascade_runs: tuple[str, ...] = ()
    started: float = 0.0
    finished: float = 0.0
    error: str = ""

    def written_elements(self) -> set[str]:
        return {w.element_id for w in self.writes}


def run_prompt(
    prompt: InfusedPrompt,
    doc: MockDocument,
    backend: CompletionBackend,
    *,
    run_id: str = "run-0001",
    clock: Callable[[], float] = time.time,
    other_prompts: list[InfusedPrompt] = (),
    cascade_runs: tuple[str, ...] = (),
) -> tuple[MockDocument, RunResult]:
    """Execute one prompt against the document; returns (new doc, result).

    Revalidates first: the document may have changed since the prompt was
    authored. On any failure the document comes back unchanged.
    """
    started = clock()

    def failed(status: str, error: str, rendered: RenderedPrompt | None = None) -> tuple[MockDocument, RunResult]:
        return doc, RunResult(
            run_id=run_id,
            prompt_id=prompt.prompt_id,
            status=status,
            rendered=rendered,
            cascade_runs=cascade_runs,
            started=started,
            finished=clock(),
            error=error,
        )

    report = validate_prompt(prompt, doc, other_prompts)
    if not report.ok:
        summary = "; ".join(f"{v.rule}({v.subject})" for v in report.violations)
        return failed(STATUS_VALIDATION_ERROR, summary)

    try:
        rendered = render(prompt, doc)
    except StaleBindingError as exc:
        return failed(STATUS_VALIDATION_ERROR, str(exc))

    try:
        completion = backend.complete(
            CompletionRequest.from_params(rendered.text, prompt.params)
        )
    except BackendError as exc:
        return failed(STATUS_BACKEND_ERROR, str(exc), rendered)

    diagnostics: list[Diagnostic] = []
    stop_word = prompt.params.stop_word
    trimmed = apply_stop(completion, stop_word)
    if stop_word is not None and stop_word not in completion:
        diagnostics.append(
            Diagnostic(STOP_WORD_ABSENT, stop_word, "stop word never occurred in the completion")
        )

    writes: list[Write] = []
    if prompt.output.mode == "single":
        target = prompt.output.single_target
        writes.append(Write(target, doc.text_of(target), trimmed))
        if trimmed.strip() == "":
            diagnostics.append(
                Diagnostic(EMPTY_VALUE, target, "completion was empty after the stop word")
            )
    else:
        result = split(trimmed, prompt.output.split)
        diagnostics.extend(result.diagnostics)
        for entry, binding in zip(result.values, prompt.output.split.attributes):
            if entry.found:
                writes.append(Write(binding.target, doc.text_of(binding.target), entry.value))

    for write in writes:
        capacity = capacity_chars(doc.find_text_element(write.element_id))
        if len(write.new_text) > capacity:
            diagnostics.append(
                Diagnostic(
                    OVERFLOW,
                    write.element_id,
                    f"{len(write.new_text)} chars exceed capacity {capacity}",
                )
            )

    new_doc = apply_writes(doc, {w.element_id: w.new_text for w in writes})
    return new_doc, RunResult(
        run_id=run_id,
        prompt_id=prompt.prompt_id,
        status=STATUS_OK,
        rendered=rendered,
        raw_completion=completion,
        writes=tuple(writes),
        diagnostics=tuple(diagnostics),
        cascade_runs=cascade_runs,
        started=started,
        finished=clock(),
    )


def dry_run(prompt: InfusedPrompt, doc: MockDocument) -> RenderedPrompt:
    """Preview the exact prompt the backend would receive. No call, no writes."""
    return render(prompt, doc)


def rendered_to_json(rendered: RenderedPrompt | None) -> dict | None:
    if rendered is None:
        return None
    return {
        "text": rendered.text,
        "slot_values": [
            {"element": element_id, "text": value}
            for element_id, value in rendered.slot_values
        ],
    }


def run_result_to_json(result: RunResult) -> dict:
    """Stable-keyed plain-dict form used by both the service and CLI reports."""
    return {
        "run_id": result.run_id,
        "prompt_id": result.prompt_id,
        "status": result.status,
        "rendered": rendered_to_json(result.rendered),
        "raw_completion": result.raw_completion,
        "writes": [
            {"element": w.element_id, "old_text": w.old_text, "new_text": w.new_text}
            for w in result.writes
        ],
        "diagnostics": [
            {"kind": d.kind, "subject": d.subject, "detail": d.detail}
            for d in result.diagnostics
        ],
        "cascade_runs": list(result.cascade_runs),
        "started": result.started,
        "finished": result.finished,
        "error": result.error,
    }


def fire_trigger(trigger_id: str, session: "Session") -> list[RunResult]:
    """Run the prompt bound to a trigger, then cascade through auto-run prompts.

    Cascading is breadth-first over prompts whose input elements were just
    written, each prompt at most once per firing, so it terminates even if
    somebody sneaks a cycle past configuration checks.
    """
    session.doc.find_trigger(trigger_id)
    bound = [p for p in session.prompts if p.trigger == trigger_id]
    if not bound:
        raise UnboundTriggerError(f"trigger {trigger_id!r} is not bound to any prompt")

    queue: deque[tuple[InfusedPrompt, str]] = deque([(bound[0], session.next_run_id())])
    scheduled = {bound[0].prompt_id}
    results: list[RunResult] = []
    while queue:
        prompt, run_id = queue.popleft()
        doc, result = run_prompt(
            prompt,
            session.doc,
            session.backend,
            run_id=run_id,
            clock=session.clock,
            other_prompts=session.prompts,
        )
        # Woken prompts get their run ids at enqueue time so the parent
        # result can name them; ids stay in execution order (FIFO).
        written = result.written_elements()
        cascade_ids: list[str] = []
        for candidate in sorted(session.prompts, key=lambda p: p.prompt_id):
            if not candidate.auto_run or candidate.prompt_id in scheduled:
                continue
            if written & set(candidate.input_slots()):
                child_id = session.next_run_id()
                scheduled.add(candidate.prompt_id)
                queue.append((candidate, child_id))
                cascade_ids.append(child_id)
        result = replace(result, cascade_runs=tuple(cascade_ids))
        session.doc = doc
        session.record(result)
        results.append(result)
    return results
