"""Mockup document model: text elements, triggers, geometry, persistence.

Documents are plain values. Mutating operations return a new document with
the revision bumped; callers (the session layer) serialize writes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

from .errors import (
    DuplicateIdError,
    NotATextElementError,
    ParseError,
    SchemaError,
    UnknownElementError,
)

ElementId = str

ROLE_HINTS = ("input", "output", "static")

# Monospace approximation: average glyph width and line height as multiples
# of the font size. Deliberately crude; see capacity_chars.
GLYPH_WIDTH_FACTOR = 0.6
LINE_HEIGHT_FACTOR = 1.3


@dataclass
class TextElement:
    """A text box in the mockup.

    role_hint is advisory metadata only: an element written by one prompt may
    legitimately serve as the input of another, so nothing enforces it.
    """

    id: ElementId
    name: str
    text: str
    x: float
    y: float
    width: float
    height: float
    font_size: float
    role_hint: str = "static"

    def __post_init__(self) -> None:
        if not self.id:
            raise SchemaError("element id must be non-empty")
        if self.width < 0 or self.height < 0:
            raise SchemaError(f"element {self.id!r}: width/height must be >= 0")
        if self.font_size <= 0:
            raise SchemaError(f"element {self.id!r}: font_size must be > 0")
        if self.role_hint not in ROLE_HINTS:
            raise SchemaError(
                f"element {self.id!r}: role_hint must be one of {ROLE_HINTS}"
            )


@dataclass
class TriggerElement:
    """A button-like element; firing it executes the prompt bound to it."""

    id: ElementId
    label: str

    def __post_init__(self) -> None:
        if not self.id:
            raise SchemaError("trigger id must be non-empty")


@dataclass
class MockDocument:
    doc_id: str
    title: str
    text_elements: list[TextElement] = field(default_factory=list)
    triggers: list[TriggerElement] = field(default_factory=list)
    revision: int = 0

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for el in [*self.text_elements, *self.triggers]:
            if el.id in seen:
                raise DuplicateIdError(f"duplicate element id {el.id!r}")
            seen.add(el.id)

    def find_text_element(self, element_id: ElementId) -> TextElement:
        for el in self.text_elements:
            if el.id == element_id:
                return el
        raise UnknownElementError(f"no element with id {element_id!r}")

    def find_trigger(self, trigger_id: ElementId) -> TriggerElement:
        for tr in self.triggers:
            if tr.id == trigger_id:
                return tr
        raise UnknownElementError(f"no trigger with id {trigger_id!r}")

    def has_text_element(self, element_id: ElementId) -> bool:
        return any(el.id == element_id for el in self.text_elements)

    def has_trigger(self, trigger_id: ElementId) -> bool:
        return any(tr.id == trigger_id for tr in self.triggers)

    def text_of(self, element_id: ElementId) -> str:
        return self.find_text_element(element_id).text


def _require(obj: dict, key: str, types, where: str):
    if key not in obj:
        raise SchemaError(f"{where}: missing field {key!r}")
    value = obj[key]
    if not isinstance(value, types) or isinstance(value, bool):
        raise SchemaError(f"{where}: field {key!r} has wrong type")
    return value


def _element_from_json(obj: dict) -> TextElement:
    if not isinstance(obj, dict):
        raise SchemaError("text element must be an object")
    where = f"element {obj.get('id', '?')!r}"
    return TextElement(
        id=_require(obj, "id", str, where),
        name=_require(obj, "name", str, where),
        text=_require(obj, "text", str, where),
        x=float(_require(obj, "x", (int, float), where)),
        y=float(_require(obj, "y", (int, float), where)),
        width=float(_require(obj, "width", (int, float), where)),
        height=float(_require(obj, "height", (int, float), where)),
        font_size=float(_require(obj, "font_size", (int, float), where)),
        role_hint=_require(obj, "role_hint", str, where),
    )


def _trigger_from_json(obj: dict) -> TriggerElement:
    if not isinstance(obj, dict):
        raise SchemaError("trigger must be an object")
    where = f"trigger {obj.get('id', '?')!r}"
    return TriggerElement(
        id=_require(obj, "id", str, where),
        label=_require(obj, "label", str, where),
    )


def document_from_json(obj: dict) -> MockDocument:
    """Build a document from an already-parsed JSON object."""
    if not isinstance(obj, dict):
        raise SchemaError("document must be a JSON object")
    elements = _require(obj, "text_elements", list, "document")
    triggers = _require(obj, "triggers", list, "document")
    return MockDocument(
        doc_id=_require(obj, "doc_id", str, "document"),
        title=_require(obj, "title", str, "document"),
        text_elements=[_element_from_json(e) for e in elements],
        triggers=[_trigger_from_json(t) for t in triggers],
        revision=0,
    )


def load_document(raw: bytes | str) -> MockDocument:
    """Parse serialized document JSON. Freshly loaded documents start at revision 0."""
    if isinstance(raw, bytes):
        try:
            raw = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"document is not UTF-8: {exc}") from exc
    try:
        obj = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc}") from exc
    return document_from_json(obj)


def document_to_json(doc: MockDocument) -> dict:
    """Plain-dict form of the document, matching the wire schema (no revision)."""
    return {
        "doc_id": doc.doc_id,
        "title": doc.title,
        "text_elements": [
            {
                "id": el.id,
                "name": el.name,
                "text": el.text,
                "x": el.x,
                "y": el.y,
                "width": el.width,
                "height": el.height,
                "font_size": el.font_size,
                "role_hint": el.role_hint,
            }
            for el in doc.text_elements
        ],
        "triggers": [{"id": tr.id, "label": tr.label} for tr in doc.triggers],
    }


def save_document(doc: MockDocument) -> bytes:
    """Serialize to canonical UTF-8 JSON: sorted keys, floats everywhere,
    two-space indent, trailing newline. Repeated saves are byte-identical."""
    text = json.dumps(document_to_json(doc), sort_keys=True, indent=2, ensure_ascii=False)
    return (text + "\n").encode("utf-8")


def set_text(doc: MockDocument, element_id: ElementId, text: str) -> MockDocument:
    """Return a copy of doc with one element's text replaced and revision bumped."""
    target = None
    for el in doc.text_elements:
        if el.id == element_id:
            target = el
            break
    if target is None:
        if doc.has_trigger(element_id):
            raise NotATextElementError(f"{element_id!r} is a trigger, not a text element")
        raise UnknownElementError(f"no element with id {element_id!r}")
    elements = [
        replace(el, text=text) if el.id == element_id else el
        for el in doc.text_elements
    ]
    return replace(doc, text_elements=elements, revision=doc.revision + 1)


def apply_writes(doc: MockDocument, writes: dict[ElementId, str]) -> MockDocument:
    """Apply several text writes atomically as a single revision bump.

    Used by the engine for write-back; every key must name a text element.
    """
    if not writes:
        return doc
    for element_id in writes:
        doc.find_text_element(element_id)
    elements = [
        replace(el, text=writes[el.id]) if el.id in writes else el
        for el in doc.text_elements
    ]
    return replace(doc, text_elements=elements, revision=doc.revision + 1)


def capacity_chars(el: TextElement) -> int:
    """Approximate how many characters fit inside an element.

    Columns come from width over average glyph width (0.6 * font_size), rows
    from height over line height (1.3 * font_size); rows clamp to at least 1
    so a short box still holds one line. Character-count capacity is a
    deliberate simplification: exact typography is out of scope.
    """
    cols = math.floor(el.width / (GLYPH_WIDTH_FACTOR * el.font_size))
    rows = max(1, math.floor(el.height / (LINE_HEIGHT_FACTOR * el.font_size)))
    return cols * rows
