"""promptloom: wire static UI mockups to LLM prompts.

Text elements feed prompt input slots; completions are stop-trimmed, split
by attribute labels and written back into elements; triggers fire prompts
and chained prompts cascade. Incompatibilities (overflow, missing or extra
attributes, duplicates) surface as diagnostics.
"""

from .backends import (
    BackendConfig,
    CompletionBackend,
    CompletionRequest,
    HttpBackend,
    OracleBackend,
    ScriptedBackend,
    backend_from_config,
    inject_failure,
)
from .diagnostics import CompatibilityReport, Finding, ingest, report_to_json, summarize
from .document import (
    MockDocument,
    TextElement,
    TriggerElement,
    capacity_chars,
    load_document,
    save_document,
    set_text,
)
from .engine import RunResult, Write, dry_run, fire_trigger, run_prompt
from .prompts import (
    AttributeBinding,
    InfusedPrompt,
    OutputSpec,
    SamplingParams,
    SplitSpec,
    TemplateSegment,
    ValidationReport,
    Violation,
    check_prompt_set,
    has_cycle,
    prompt_dependency_graph,
    validate_prompt,
)
from .session import Session, counting_clock
from .splitter import Diagnostic, SplitResult, apply_stop, split
from .template import RenderedPrompt, render

__version__ = "0.1.0"
