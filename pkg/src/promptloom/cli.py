"""Headless entry points: validate configurations, run scenario scripts
against a backend, and launch the service.

Exit codes: 0 clean, 1 findings at error severity, 2 configuration problems,
3 backend failures.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from .backends import BackendConfig
from .backends import backend_from_config as _backend_from_config
from .diagnostics import report_to_json, summarize
from .document import document_to_json, load_document
from .engine import run_result_to_json
from .errors import BindError, DocumentError, UnboundTriggerError, UnknownElementError
from .prompts import check_prompt_set, prompt_dependency_graph, prompts_from_json, validate_prompt
from .session import Session, counting_clock

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_CONFIG = 2
EXIT_BACKEND = 3


def _fail_config(message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(EXIT_CONFIG)


def _load_document(path: str):
    try:
        return load_document(Path(path).read_bytes())
    except (DocumentError, OSError) as exc:
        _fail_config(f"{path}: {exc}")


def _load_prompts(path: str):
    try:
        return prompts_from_json(json.loads(Path(path).read_text(encoding="utf-8")))
    except (DocumentError, OSError, json.JSONDecodeError) as exc:
        _fail_config(f"{path}: {exc}")


def _load_scenario(path: str) -> list[dict]:
    try:
        steps = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        _fail_config(f"{path}: {exc}")
    if not isinstance(steps, list):
        _fail_config(f"{path}: scenario must be a JSON array of steps")
    for i, step in enumerate(steps):
        if not isinstance(step, dict):
            _fail_config(f"{path}: step {i} must be an object")
        if "set" in step and not (
            isinstance(step["set"], dict)
            and all(isinstance(v, str) for v in step["set"].values())
        ):
            _fail_config(f"{path}: step {i} 'set' must map element ids to strings")
        if "fire" in step and not isinstance(step["fire"], str):
            _fail_config(f"{path}: step {i} 'fire' must be a trigger id")
    return steps


def _backend_config(backend: str, fixtures: str | None, endpoint: str | None, timeout: float) -> BackendConfig:
    if backend == "scripted":
        if not fixtures:
            raise click.UsageError("--fixtures is required with --backend scripted")
        return BackendConfig(kind="scripted", fixture_path=fixtures, timeout=timeout)
    if backend == "http":
        endpoint = endpoint or os.environ.get("PROMPTLOOM_ENDPOINT", "")
        if not endpoint:
            raise click.UsageError(
                "--endpoint (or PROMPTLOOM_ENDPOINT) is required with --backend http"
            )
        return BackendConfig(kind="http", endpoint_url=endpoint, timeout=timeout)
    return BackendConfig(kind="oracle", timeout=timeout)


def _validate_configuration(doc, prompts) -> list:
    violations = []
    for prompt in prompts:
        others = [p for p in prompts if p.prompt_id != prompt.prompt_id]
        report = validate_prompt(prompt, doc, others)
        violations.extend((prompt.prompt_id, v) for v in report.violations)
        for warning in report.warnings:
            click.echo(f"warning: {prompt.prompt_id}: {warning.rule}: {warning.detail}")
    set_report = check_prompt_set(prompts, doc)
    violations.extend(("*", v) for v in set_report.violations)
    for warning in set_report.warnings:
        click.echo(f"warning: {warning.rule}: {warning.detail}")
    return violations


@click.group()
def main():
    """Wire mockup text elements to prompt inputs and outputs, then run them."""


@main.command()
@click.option("--document", "document_path", required=True, type=click.Path())
@click.option("--prompts", "prompts_path", required=True, type=click.Path())
def validate(document_path, prompts_path):
    """Check the mapping rules for every prompt; exit 0 only if clean."""
    doc = _load_document(document_path)
    prompts = _load_prompts(prompts_path)
    violations = _validate_configuration(doc, prompts)
    for prompt_id, violation in violations:
        click.echo(f"{prompt_id}: {violation.rule}: {violation.detail}")
    if violations:
        sys.exit(EXIT_FINDINGS)
    click.echo(f"ok: {len(prompts)} prompt(s) valid against {doc.doc_id!r}")
    sys.exit(EXIT_OK)


@main.command()
@click.option("--document", "document_path", required=True, type=click.Path())
@click.option("--prompts", "prompts_path", required=True, type=click.Path())
@click.option("--scenario", "scenario_path", required=True, type=click.Path())
@click.option("--backend", type=click.Choice(["oracle", "scripted", "http"]), default="oracle")
@click.option("--fixtures", type=click.Path(), default=None)
@click.option("--endpoint", default=None)
@click.option("--timeout", type=float, default=30.0)
@click.option("--report", "report_path", required=True, type=click.Path())
def run(document_path, prompts_path, scenario_path, backend, fixtures, endpoint, timeout, report_path):
    """Execute a scenario (set inputs, fire triggers) and write a report."""
    doc = _load_document(document_path)
    prompts = _load_prompts(prompts_path)
    steps = _load_scenario(scenario_path)

    violations = _validate_configuration(doc, prompts)
    if violations:
        for prompt_id, violation in violations:
            click.echo(f"error: {prompt_id}: {violation.rule}: {violation.detail}", err=True)
        sys.exit(EXIT_CONFIG)

    config = _backend_config(backend, fixtures, endpoint, timeout)
    try:
        session_backend = _backend_from_config(config)
    except DocumentError as exc:
        _fail_config(str(exc))

    session = Session(doc, prompts=prompts, backend=session_backend, clock=counting_clock())
    for i, step in enumerate(steps):
        for element_id, text in step.get("set", {}).items():
            try:
                session.set_text(element_id, text)
            except DocumentError as exc:
                _fail_config(f"step {i}: {exc}")
        if "fire" in step:
            try:
                results = session.fire(step["fire"])
            except (UnknownElementError, UnboundTriggerError) as exc:
                _fail_config(f"step {i}: {exc}")
            for result in results:
                click.echo(
                    f"run {result.run_id}: {result.prompt_id} -> {result.status}"
                    + (f" ({len(result.writes)} writes)" if result.writes else "")
                )

    findings = summarize(session.report)
    payload = {
        "document": document_to_json(session.doc),
        "dependency_graph": prompt_dependency_graph(session.prompts),
        "runs": [run_result_to_json(r) for r in session.run_history],
        "report": report_to_json(session.report),
    }
    Path(report_path).write_text(
        json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )
    click.echo(f"report written to {report_path}")

    for finding in findings:
        click.echo(f"{finding.severity}: {finding.kind} x{finding.count} ({finding.subject})")
    if any(r.status == "backend_error" for r in session.run_history):
        sys.exit(EXIT_BACKEND)
    if any(f.severity == "error" for f in findings):
        sys.exit(EXIT_FINDINGS)
    sys.exit(EXIT_OK)


@main.command()
@click.option("--port", type=int, default=7878, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--backend", type=click.Choice(["oracle", "scripted", "http"]), default="oracle")
@click.option("--fixtures", type=click.Path(), default=None)
@click.option("--endpoint", default=None)
@click.option("--timeout", type=float, default=30.0)
@click.option("--state-dir", type=click.Path(), default=None)
@click.option("--ui-dir", type=click.Path(), default=None)
def serve(port, host, backend, fixtures, endpoint, timeout, state_dir, ui_dir):
    """Run the HTTP service (loopback by default)."""
    from .service.server import serve as run_server

    config = _backend_config(backend, fixtures, endpoint, timeout)
    if ui_dir is None and Path("frontend/dist").is_dir():
        ui_dir = "frontend/dist"
    try:
        run_server(
            port=port, host=host, backend_config=config, state_dir=state_dir, ui_dir=ui_dir
        )
    except BindError as exc:
        _fail_config(str(exc))


if __name__ == "__main__":
    main()
