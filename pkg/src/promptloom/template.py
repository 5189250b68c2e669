"""Prompt rendering: interpolate current element text into input slots.

What the element shows is what the model receives: no escaping, no
whitespace normalization.
"""

from __future__ import annotations

from dataclasses import dataclass

from .document import ElementId, MockDocument
from .errors import StaleBindingError, UnknownElementError
from .prompts import InfusedPrompt


@dataclass(frozen=True)
class RenderedPrompt:
    """Final prompt text plus the slot substitutions captured at render time."""

    text: str
    slot_values: tuple[tuple[ElementId, str], ...]


def render(prompt: InfusedPrompt, doc: MockDocument) -> RenderedPrompt:
    """Concatenate literal segments with the bound elements' current text.

    Callers are expected to have validated the prompt; a slot whose element
    has since disappeared raises StaleBindingError.
    """
    parts: list[str] = []
    slot_values: list[tuple[ElementId, str]] = []
    for seg in prompt.segments:
        if seg.kind == "literal":
            parts.append(seg.literal_text)
        else:
            try:
                value = doc.text_of(seg.slot_element)
            except UnknownElementError as exc:
                raise StaleBindingError(
                    f"slot element {seg.slot_element!r} no longer exists"
                ) from exc
            parts.append(value)
            slot_values.append((seg.slot_element, value))
    return RenderedPrompt(text="".join(parts), slot_values=tuple(slot_values))
