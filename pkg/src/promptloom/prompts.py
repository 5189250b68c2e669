"""Infused prompt model and configuration validation.

A prompt is a list of template segments (literal text interleaved with
element-bound input slots), sampling parameters, an output routing spec and
an optional trigger binding. validate_prompt checks the input/output mapping
rules before anything executes; violations are returned as data, never
raised.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .document import ElementId, MockDocument
from .errors import SchemaError

# Violation kinds. MappingRuleC and MappingRuleE are the two rejected
# input/output mappings; the rest guard referential integrity and
# write-conflict freedom within one prompt.
MAPPING_RULE_C = "MappingRuleC"  # one element bound to two input slots
MAPPING_RULE_E = "MappingRuleE"  # prompt routes to zero outputs
UNKNOWN_ELEMENT = "UnknownElement"
WRONG_ELEMENT_KIND = "WrongElementKind"
EMPTY_ATTRIBUTE_LABEL = "EmptyAttributeLabel"
DUPLICATE_ATTRIBUTE_LABEL = "DuplicateAttributeLabel"
DUPLICATE_ATTRIBUTE_TARGET = "DuplicateAttributeTarget"
SELF_WRITE = "SelfWrite"
TRIGGER_ALREADY_BOUND = "TriggerAlreadyBound"
EMPTY_TEMPLATE = "EmptyTemplate"
AUTO_RUN_CYCLE = "AutoRunCycle"

# Warning kinds: suspicious but runnable configurations.
LABEL_SUBSTRING = "LabelSubstring"
SHARED_OUTPUT_TARGET = "SharedOutputTarget"


@dataclass(frozen=True)
class TemplateSegment:
    """Either literal prompt text or a slot bound to a text element."""

    kind: str  # "literal" | "input_slot"
    literal_text: str = ""
    slot_element: ElementId = ""

    @staticmethod
    def literal(text: str) -> "TemplateSegment":
        return TemplateSegment(kind="literal", literal_text=text)

    @staticmethod
    def slot(element_id: ElementId) -> "TemplateSegment":
        return TemplateSegment(kind="input_slot", slot_element=element_id)


@dataclass(frozen=True)
class AttributeBinding:
    """One attribute label (e.g. "Artist:") routed to one output element."""

    label: str
    target: ElementId


@dataclass(frozen=True)
class SplitSpec:
    attributes: tuple[AttributeBinding, ...] = ()

    @property
    def labels(self) -> list[str]:
        return [a.label for a in self.attributes]


@dataclass(frozen=True)
class OutputSpec:
    """Routing for the completion: everything to one element, or split by attributes."""

    mode: str  # "single" | "multiple"
    single_target: ElementId = ""
    split: SplitSpec = field(default_factory=SplitSpec)

    @staticmethod
    def single(target: ElementId) -> "OutputSpec":
        return OutputSpec(mode="single", single_target=target)

    @staticmethod
    def multiple(attributes: list[AttributeBinding]) -> "OutputSpec":
        return OutputSpec(mode="multiple", split=SplitSpec(tuple(attributes)))

    def targets(self) -> list[ElementId]:
        if self.mode == "single":
            return [self.single_target] if self.single_target else []
        return [a.target for a in self.split.attributes]


@dataclass(frozen=True)
class SamplingParams:
    temperature: float = 0.7
    stop_word: str | None = None
    max_tokens: int = 256

    def __post_init__(self) -> None:
        if not 0.0 <= self.temperature <= 1.0:
            raise SchemaError(f"temperature must be in [0, 1], got {self.temperature}")
        if self.max_tokens < 1:
            raise SchemaError(f"max_tokens must be >= 1, got {self.max_tokens}")
        if self.stop_word is not None and self.stop_word == "":
            raise SchemaError("stop_word, if present, must be non-empty")


@dataclass(frozen=True)
class InfusedPrompt:
    """A prompt wired into the mockup.

    The one-shot example that primes the completion format is ordinary
    literal text inside the segments; it is not modeled separately.
    """

    prompt_id: str
    name: str
    segments: tuple[TemplateSegment, ...]
    params: SamplingParams = field(default_factory=SamplingParams)
    output: OutputSpec = field(default_factory=lambda: OutputSpec(mode="single"))
    trigger: ElementId | None = None
    auto_run: bool = False

    def input_slots(self) -> list[ElementId]:
        """Slot element ids in segment order (possibly with duplicates)."""
        return [s.slot_element for s in self.segments if s.kind == "input_slot"]


@dataclass(frozen=True)
class Violation:
    rule: str
    subject: str
    detail: str


@dataclass
class ValidationReport:
    prompt_id: str
    violations: list[Violation] = field(default_factory=list)
    warnings: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_prompt(
    prompt: InfusedPrompt,
    doc: MockDocument,
    other_prompts: list[InfusedPrompt] = (),
) -> ValidationReport:
    """Check the configuration rules for one prompt against a document.

    other_prompts supplies context for the trigger 1:1 rule; pass the other
    prompts of the session when available. Pure: never mutates, never raises.
    """
    report = ValidationReport(prompt_id=prompt.prompt_id)
    add = report.violations.append

    if not prompt.segments:
        add(Violation(EMPTY_TEMPLATE, prompt.prompt_id, "prompt has no segments"))

    # (a) referential integrity, (b) no element bound to two input slots
    seen_slots: set[str] = set()
    flagged_dup: set[str] = set()
    for slot in prompt.input_slots():
        if not doc.has_text_element(slot):
            kind = WRONG_ELEMENT_KIND if doc.has_trigger(slot) else UNKNOWN_ELEMENT
            add(Violation(kind, slot, f"input slot {slot!r} is not a text element"))
        elif slot in seen_slots and slot not in flagged_dup:
            add(
                Violation(
                    MAPPING_RULE_C,
                    slot,
                    f"element {slot!r} is bound to more than one input slot",
                )
            )
            flagged_dup.add(slot)
        seen_slots.add(slot)

    # (c) at least one output target
    targets = prompt.output.targets()
    if not targets:
        add(Violation(MAPPING_RULE_E, prompt.prompt_id, "prompt routes to no output element"))

    for target in targets:
        if not doc.has_text_element(target):
            kind = WRONG_ELEMENT_KIND if doc.has_trigger(target) else UNKNOWN_ELEMENT
            add(Violation(kind, target, f"output target {target!r} is not a text element"))

    # (d) distinct labels and targets in multiple mode
    if prompt.output.mode == "multiple":
        labels_seen: set[str] = set()
        targets_seen: set[str] = set()
        for binding in prompt.output.split.attributes:
            if not binding.label:
                add(Violation(EMPTY_ATTRIBUTE_LABEL, binding.target, "attribute label is empty"))
            elif binding.label in labels_seen:
                add(
                    Violation(
                        DUPLICATE_ATTRIBUTE_LABEL,
                        binding.label,
                        f"attribute label {binding.label!r} appears twice",
                    )
                )
            labels_seen.add(binding.label)
            if binding.target in targets_seen:
                add(
                    Violation(
                        DUPLICATE_ATTRIBUTE_TARGET,
                        binding.target,
                        f"element {binding.target!r} is the target of two attributes",
                    )
                )
            targets_seen.add(binding.target)
        # Substring labels make extraction ambiguous in ways the splitter
        # cannot detect at run time; warn at configuration time.
        labels = [b.label for b in prompt.output.split.attributes if b.label]
        for i, a in enumerate(labels):
            for b in labels[i + 1 :]:
                if a != b and (a in b or b in a):
                    report.warnings.append(
                        Violation(
                            LABEL_SUBSTRING,
                            a if a in b else b,
                            f"label {(a if a in b else b)!r} is a substring of "
                            f"{(b if a in b else a)!r}",
                        )
                    )

    # (e) no element both read and written by the same prompt
    for slot in sorted(set(prompt.input_slots()) & set(targets)):
        add(
            Violation(
                SELF_WRITE,
                slot,
                f"element {slot!r} is both an input slot and an output target",
            )
        )

    # (f) trigger exists, is a trigger, and is not bound elsewhere
    if prompt.trigger is not None:
        if not doc.has_trigger(prompt.trigger):
            kind = WRONG_ELEMENT_KIND if doc.has_text_element(prompt.trigger) else UNKNOWN_ELEMENT
            add(Violation(kind, prompt.trigger, f"trigger {prompt.trigger!r} is not a trigger element"))
        for other in other_prompts:
            if other.prompt_id != prompt.prompt_id and other.trigger == prompt.trigger:
                add(
                    Violation(
                        TRIGGER_ALREADY_BOUND,
                        prompt.trigger,
                        f"trigger {prompt.trigger!r} is already bound to prompt "
                        f"{other.prompt_id!r}",
                    )
                )
                break

    return report


def check_prompt_set(
    prompts: list[InfusedPrompt], doc: MockDocument
) -> ValidationReport:
    """Cross-prompt checks for a whole configuration.

    Violations: a dependency cycle when any prompt is set to auto-run (the
    cascade would not terminate). Warnings: two prompts writing the same
    element (legal, runs are serialized, but worth surfacing).
    """
    report = ValidationReport(prompt_id="*")
    if any(p.auto_run for p in prompts):
        graph = prompt_dependency_graph(prompts)
        if has_cycle(graph):
            report.violations.append(
                Violation(
                    AUTO_RUN_CYCLE,
                    "*",
                    "auto_run prompts form a dependency cycle",
                )
            )
    writers: dict[str, str] = {}
    for p in sorted(prompts, key=lambda p: p.prompt_id):
        for target in p.output.targets():
            if target in writers and writers[target] != p.prompt_id:
                report.warnings.append(
                    Violation(
                        SHARED_OUTPUT_TARGET,
                        target,
                        f"element {target!r} is written by prompts "
                        f"{writers[target]!r} and {p.prompt_id!r}",
                    )
                )
            else:
                writers[target] = p.prompt_id
    return report


def prompt_dependency_graph(prompts: list[InfusedPrompt]) -> dict[str, list[str]]:
    """Adjacency map with edge P -> Q iff an output target of P is an input slot of Q.

    Nodes and successor lists are ordered by prompt_id so the graph is
    deterministic regardless of input order.
    """
    by_id = {p.prompt_id: p for p in prompts}
    graph: dict[str, list[str]] = {pid: [] for pid in sorted(by_id)}
    for pid in sorted(by_id):
        written = set(by_id[pid].output.targets())
        for qid in sorted(by_id):
            if qid == pid:
                continue
            if written & set(by_id[qid].input_slots()):
                graph[pid].append(qid)
    return graph


def has_cycle(graph: dict[str, list[str]]) -> bool:
    """True iff the directed graph contains a cycle (iterative three-color DFS)."""
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {node: WHITE for node in graph}
    for start in graph:
        if color[start] != WHITE:
            continue
        stack: list[tuple[str, int]] = [(start, 0)]
        color[start] = GRAY
        while stack:
            node, idx = stack[-1]
            successors = graph.get(node, [])
            if idx < len(successors):
                stack[-1] = (node, idx + 1)
                nxt = successors[idx]
                state = color.get(nxt, WHITE)
                if state == GRAY:
                    return True
                if state == WHITE:
                    color[nxt] = GRAY
                    stack.append((nxt, 0))
            else:
                color[node] = BLACK
                stack.pop()
    return False


# --- JSON (de)serialization -------------------------------------------------


def _segment_from_json(obj: dict) -> TemplateSegment | None:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise SchemaError("segment must be an object with a 'kind' field")
    kind = obj["kind"]
    if kind == "literal":
        text = obj.get("text")
        if not isinstance(text, str):
            raise SchemaError("literal segment needs a string 'text' field")
        return TemplateSegment.literal(text)
    if kind == "input_slot":
        element = obj.get("element")
        if not isinstance(element, str) or not element:
            raise SchemaError("input_slot segment needs a non-empty 'element' field")
        return TemplateSegment.slot(element)
    raise SchemaError(f"unknown segment kind {kind!r}")


def _normalize_segments(segments: list[TemplateSegment]) -> tuple[TemplateSegment, ...]:
    """Drop empty literals unless they sit between two slots (where they keep
    the slots apart in the segment list)."""
    out: list[TemplateSegment] = []
    for i, seg in enumerate(segments):
        if seg.kind == "literal" and seg.literal_text == "":
            before = segments[i - 1] if i > 0 else None
            after = segments[i + 1] if i + 1 < len(segments) else None
            between_slots = (
                before is not None
                and after is not None
                and before.kind == "input_slot"
                and after.kind == "input_slot"
            )
            if not between_slots:
                continue
        out.append(seg)
    return tuple(out)


def _output_from_json(obj: dict) -> OutputSpec:
    if not isinstance(obj, dict) or "mode" not in obj:
        raise SchemaError("output must be an object with a 'mode' field")
    mode = obj["mode"]
    if mode == "single":
        target = obj.get("target")
        if not isinstance(target, str) or not target:
            raise SchemaError("single output needs a non-empty 'target' field")
        return OutputSpec.single(target)
    if mode == "multiple":
        attrs = obj.get("attributes")
        if not isinstance(attrs, list):
            raise SchemaError("multiple output needs an 'attributes' list")
        bindings = []
        for a in attrs:
            if (
                not isinstance(a, dict)
                or not isinstance(a.get("label"), str)
                or not isinstance(a.get("target"), str)
            ):
                raise SchemaError("attribute needs string 'label' and 'target' fields")
            bindings.append(AttributeBinding(label=a["label"], target=a["target"]))
        return OutputSpec.multiple(bindings)
    raise SchemaError(f"unknown output mode {mode!r}")


def prompt_from_json(obj: dict) -> InfusedPrompt:
    if not isinstance(obj, dict):
        raise SchemaError("prompt must be a JSON object")
    for key, types in (("prompt_id", str), ("name", str), ("segments", list)):
        if not isinstance(obj.get(key), types):
            raise SchemaError(f"prompt: missing or mistyped field {key!r}")
    params_obj = obj.get("params", {})
    if not isinstance(params_obj, dict):
        raise SchemaError("prompt: 'params' must be an object")
    temperature = params_obj.get("temperature", 0.7)
    max_tokens = params_obj.get("max_tokens", 256)
    stop_word = params_obj.get("stop_word")
    if not isinstance(temperature, (int, float)) or isinstance(temperature, bool):
        raise SchemaError("params.temperature must be a number")
    if not isinstance(max_tokens, int) or isinstance(max_tokens, bool):
        raise SchemaError("params.max_tokens must be an integer")
    if stop_word is not None and not isinstance(stop_word, str):
        raise SchemaError("params.stop_word must be a string or null")
    trigger = obj.get("trigger")
    if trigger is not None and not isinstance(trigger, str):
        raise SchemaError("prompt: 'trigger' must be a string or null")
    auto_run = obj.get("auto_run", False)
    if not isinstance(auto_run, bool):
        raise SchemaError("prompt: 'auto_run' must be a boolean")
    segments = [_segment_from_json(s) for s in obj["segments"]]
    return InfusedPrompt(
        prompt_id=obj["prompt_id"],
        name=obj["name"],
        segments=_normalize_segments(segments),
        params=SamplingParams(
            temperature=float(temperature), stop_word=stop_word, max_tokens=max_tokens
        ),
        output=_output_from_json(obj.get("output", {})),
        trigger=trigger,
        auto_run=auto_run,
    )


def prompt_to_json(prompt: InfusedPrompt) -> dict:
    segments = []
    for seg in prompt.segments:
        if seg.kind == "literal":
            segments.append({"kind": "literal", "text": seg.literal_text})
        else:
            segments.append({"kind": "input_slot", "element": seg.slot_element})
    if prompt.output.mode == "single":
        output = {"mode": "single", "target": prompt.output.single_target}
    else:
        output = {
            "mode": "multiple",
            "attributes": [
                {"label": a.label, "target": a.target}
                for a in prompt.output.split.attributes
            ],
        }
    return {
        "prompt_id": prompt.prompt_id,
        "name": prompt.name,
        "segments": segments,
        "params": {
            "temperature": prompt.params.temperature,
            "stop_word": prompt.params.stop_word,
            "max_tokens": prompt.params.max_tokens,
        },
        "output": output,
        "trigger": prompt.trigger,
        "auto_run": prompt.auto_run,
    }


def prompts_from_json(obj) -> list[InfusedPrompt]:
    """Parse a list of prompts (the --prompts file is a JSON array)."""
    if not isinstance(obj, list):
        raise SchemaError("prompts file must be a JSON array")
    prompts = [prompt_from_json(p) for p in obj]
    seen: set[str] = set()
    for p in prompts:
        if p.prompt_id in seen:
            raise SchemaError(f"duplicate prompt_id {p.prompt_id!r}")
        seen.add(p.prompt_id)
    return prompts
