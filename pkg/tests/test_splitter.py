import re

from hypothesis import given, settings
from hypothesis import strategies as st

from promptloom.prompts import AttributeBinding, SplitSpec
from promptloom.splitter import (
    Diagnostic,
    apply_stop,
    split,
)


def spec_of(*labels):
    return SplitSpec(tuple(AttributeBinding(label, f"el-{i}") for i, label in enumerate(labels)))


def kinds(result):
    return [d.kind for d in result.diagnostics]


def values(result):
    return [(v.label, v.value, v.found) for v in result.values]


# -- apply_stop ---------------------------------------------------------------


def test_stop_truncates_before_first_occurrence():
    assert apply_stop("A: x\n---\nB: y", "---") == "A: x\n"


def test_stop_none_is_identity():
    assert apply_stop("A: x", None) == "A: x"


def test_stop_absent_is_identity():
    assert apply_stop("A: x", "ZZZ") == "A: x"


def test_stop_at_position_zero():
    assert apply_stop("---rest", "---") == ""


# -- split: fixture cases -----------------------------------------------------


def test_artist_description_split():
    completion = (
        "Artist: A Tribe Called Quest\n"
        "Description: Jazz-infused hip hop out of Queens."
    )
    result = split(completion, spec_of("Artist:", "Description:"))
    assert values(result) == [
        ("Artist:", "A Tribe Called Quest", True),
        ("Description:", "Jazz-infused hip hop out of Queens.", True),
    ]
    assert result.diagnostics == ()


def _naive_occurrences(completion, label):
    """Independent oracle: all occurrence offsets of a label."""
    return [m.start() for m in re.finditer(re.escape(label), completion)]


def test_repeated_groups_surface_extra_occurrences():
    # The model produced four dishes where the mockup holds one; surplus
    # lands in the last value and every later label occurrence is flagged.
    completion = (
        "Dish: Shakshuka\nDescription: d1\n"
        "Dish: Huevos Rancheros\nDescription: d2"
    )
    result = split(completion, spec_of("Dish:", "Description:"))
    assert values(result) == [
        ("Dish:", "Shakshuka", True),
        ("Description:", "d1\nDish: Huevos Rancheros\nDescription: d2", True),
    ]
    assert sorted(kinds(result)) == ["ExtraAttributeOccurrence", "ExtraAttributeOccurrence"]
    # cross-check against a full-position scan: one matched occurrence each,
    # every other occurrence flagged
    for label in ("Dish:", "Description:"):
        occurrences = _naive_occurrences(completion, label)
        flagged = [d for d in result.diagnostics if d.subject == label]
        assert len(flagged) == len(occurrences) - 1


def test_missing_attribute_keeps_remaining_text_in_previous_value():
    result = split("Artist: X", spec_of("Artist:", "Description:"))
    assert values(result) == [("Artist:", "X", True), ("Description:", "", False)]
    assert kinds(result) == ["MissingAttribute"]
    assert result.diagnostics[0].subject == "Description:"


def test_duplicate_values_flagged():
    result = split("Dish: Tacos\nDish2: Tacos", spec_of("Dish:", "Dish2:"))
    assert kinds(result) == ["DuplicateValue"]
    assert result.diagnostics[0].subject == "Dish2:"


def test_empty_value_flagged():
    result = split("A:\nB: x", spec_of("A:", "B:"))
    assert values(result) == [("A:", "", True), ("B:", "x", True)]
    assert kinds(result) == ["EmptyValue"]


def test_out_of_order_labels_are_missing_not_rewound():
    # cursor is forward-only: a label occurring before the cursor is missing
    result = split("Description: d\nArtist: a", spec_of("Artist:", "Description:"))
    assert values(result) == [("Artist:", "a", True), ("Description:", "", False)]
    assert "MissingAttribute" in kinds(result)


def test_all_labels_missing():
    result = split("nothing to see", spec_of("A:", "B:"))
    assert values(result) == [("A:", "", False), ("B:", "", False)]
    assert kinds(result) == ["MissingAttribute", "MissingAttribute"]


def test_values_are_whitespace_trimmed():
    result = split("A:   padded   \nB:\n\n x \n", spec_of("A:", "B:"))
    assert values(result)[0] == ("A:", "padded", True)
    assert values(result)[1] == ("B:", "x", True)


def test_label_inside_matched_label_is_not_extra():
    # "Part:" appears inside "Part: two" value region only as the real match
    completion = "Item: one\nPart: two"
    result = split(completion, spec_of("Item:", "Part:"))
    assert result.diagnostics == ()


def test_split_is_pure():
    spec = spec_of("A:", "B:")
    completion = "A: 1\nB: 2"
    assert split(completion, spec) == split(completion, spec)


# -- round-trip property ------------------------------------------------------

WORD = st.text(alphabet="abcdefghijklmnopqrstuvwxyz", min_size=1, max_size=8)


@st.composite
def labels_and_values(draw):
    n = draw(st.integers(min_value=1, max_value=6))
    words = draw(
        st.lists(WORD, min_size=n, max_size=n, unique=True)
    )
    # suffixing with ':' plus the index keeps labels from being substrings
    # of each other
    labels = [f"{w}{i}:" for i, w in enumerate(words)]
    values = []
    for i in range(n):
        value = draw(WORD) + f"-{i}"
        values.append(value)
    return labels, values


@given(labels_and_values())
@settings(max_examples=300, deadline=None)
def test_round_trip_recovers_values(case):
    labels, vals = case
    joined = "\n".join(f"{label} {value}" for label, value in zip(labels, vals))
    result = split(joined, spec_of(*labels))
    assert [v.value for v in result.values] == vals
    assert all(v.found for v in result.values)
    assert result.diagnostics == ()
