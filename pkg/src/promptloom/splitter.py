"""Completion post-processing: stop-word truncation and attribute splitting.

Splitting is exact, case-sensitive substring matching with a forward-only
cursor — predictable for designers, no regexes. Every failure mode is a
diagnostic, never an exception: a run that goes sideways should land in the
mockup where it can be seen.
"""

from __future__ import annotations

from dataclasses import dataclass

from .prompts import SplitSpec

# Diagnostic kinds
MISSING_ATTRIBUTE = "MissingAttribute"
EXTRA_ATTRIBUTE_OCCURRENCE = "ExtraAttributeOccurrence"
DUPLICATE_VALUE = "DuplicateValue"
EMPTY_VALUE = "EmptyValue"
OVERFLOW = "Overflow"
STOP_WORD_ABSENT = "StopWordAbsent"

ERROR_KINDS = (MISSING_ATTRIBUTE, EXTRA_ATTRIBUTE_OCCURRENCE)
WARNING_KINDS = (OVERFLOW, DUPLICATE_VALUE)
INFO_KINDS = (EMPTY_VALUE, STOP_WORD_ABSENT)


@dataclass(frozen=True)
class Diagnostic:
    """A detected incompatibility between a completion and the mockup.

    subject is the attribute label for split problems and the element id for
    overflow.
    """

    kind: str
    subject: str
    detail: str = ""


@dataclass(frozen=True)
class ExtractedValue:
    label: str
    value: str
    found: bool


@dataclass(frozen=True)
class SplitResult:
    """Per-attribute values in spec order plus everything suspicious."""

    values: tuple[ExtractedValue, ...]
    diagnostics: tuple[Diagnostic, ...]


def apply_stop(completion: str, stop_word: str | None) -> str:
    """Truncate strictly before the first occurrence of the stop word.

    Identity when there is no stop word or it never occurs; the caller is
    responsible for recording StopWordAbsent in the latter case.
    """
    if stop_word is None:
        return completion
    pos = completion.find(stop_word)
    if pos == -1:
        return completion
    return completion[:pos]


def split(completion: str, spec: SplitSpec) -> SplitResult:
    """Carve a completion into per-attribute values.

    A cursor starts at 0; each label is matched at its first occurrence at or
    after the cursor, which then advances past the label. A found attribute's
    value is the text up to the next found label (or the end of the string),
    whitespace-trimmed. A label that never matches leaves its attribute
    missing and the cursor untouched — the cursor never rewinds, so labels
    appearing out of spec order are reported as missing rather than matched
    retroactively.
    """
    diagnostics: list[Diagnostic] = []
    matches: list[tuple[int, int] | None] = []
    cursor = 0
    for binding in spec.attributes:
        pos = completion.find(binding.label, cursor)
        if pos == -1:
            matches.append(None)
            diagnostics.append(
                Diagnostic(
                    MISSING_ATTRIBUTE,
                    binding.label,
                    f"label {binding.label!r} not found at or after offset {cursor}",
                )
            )
        else:
            matches.append((pos, pos + len(binding.label)))
            cursor = pos + len(binding.label)

    found_idx = [i for i, m in enumerate(matches) if m is not None]
    values: list[ExtractedValue] = []
    spans: dict[int, tuple[int, int]] = {}
    for k, i in enumerate(found_idx):
        start = matches[i][1]
        end = matches[found_idx[k + 1]][0] if k + 1 < len(found_idx) else len(completion)
        spans[i] = (start, end)
    for i, binding in enumerate(spec.attributes):
        if matches[i] is None:
            values.append(ExtractedValue(binding.label, "", False))
        else:
            start, end = spans[i]
            values.append(ExtractedValue(binding.label, completion[start:end].strip(), True))

    # Additional occurrences of any label inside the extracted region are the
    # model over-producing (e.g. a third and fourth item when the mockup has
    # room for two); surplus text stays in the last value and gets flagged.
    # Occurrences starting inside a matched label's own span are that match,
    # not surplus.
    if found_idx:
        scan_from = matches[found_idx[0]][1]
        matched_intervals = [matches[i] for i in found_idx]
        for binding in spec.attributes:
            label = binding.label
            pos = completion.find(label, scan_from)
            while pos != -1:
                inside = any(start <= pos < end for start, end in matched_intervals)
                if not inside:
                    diagnostics.append(
                        Diagnostic(
                            EXTRA_ATTRIBUTE_OCCURRENCE,
                            label,
                            f"label {label!r} occurs again at offset {pos}",
                        )
                    )
                pos = completion.find(label, pos + 1)

    seen_values: dict[str, str] = {}
    for entry in values:
        if not entry.found or not entry.value:
            continue
        if entry.value in seen_values:
            diagnostics.append(
                Diagnostic(
                    DUPLICATE_VALUE,
                    entry.label,
                    f"same value as {seen_values[entry.value]!r}",
                )
            )
        else:
            seen_values[entry.value] = entry.label

    for entry in values:
        if entry.found and entry.value == "":
            diagnostics.append(
                Diagnostic(EMPTY_VALUE, entry.label, "extracted value is empty")
            )

    return SplitResult(values=tuple(values), diagnostics=tuple(diagnostics))
