import pytest

from app import lz77
from app.entities import Lz77Parse, Phrase
from app.exceptions import ParameterError, ReservedByteError, StructuralError
from app.kernel import (
    KernelSegment, build_kernel, check_parameters, check_query, dedup_kernel, keep_reach, map_kernel_match
)
from app.sequences import concatenate


def test_sample_text_kernel(running_text):
    kernel = build_kernel(running_text, lz77.parse(running_text), max_pattern_length=2, max_edits=0)
    assert kernel.data == b"abaa#ab"
    assert kernel.segments == (KernelSegment(1, 4, 1), KernelSegment(6, 2, 6))
    assert list(kernel.cuts_in_text) == [1, 2, 3, 6]
    assert list(kernel.cuts_in_kernel) == [1, 2, 3, 6]


def test_separator_block_grows_with_max_edits():
    text = concatenate([("g1", b"ACGTTTTTTTTTTTTTTTTTTTTACGA")])
    kernel = build_kernel(text, lz77.parse(text), max_pattern_length=2, max_edits=2)
    assert b"###" in kernel.data
    assert b"####" not in kernel.data
    assert kernel.reach == 3


def test_kernel_keeps_every_window(running_text):
    lz_parse = lz77.parse(running_text)
    kernel = build_kernel(running_text, lz_parse, max_pattern_length=3, max_edits=1)
    reach = keep_reach(3, 1)
    kept = set()
    for segment in kernel.segments:
        kept.update(range(segment.text_start, segment.text_end + 1))
        assert kernel.data[segment.kernel_start - 1:segment.kernel_end] == \
            running_text.data[segment.text_start - 1:segment.text_end]
    for cut in lz_parse.cuts:
        assert set(range(max(1, cut - reach + 1), min(running_text.n, cut + reach) + 1)) <= kept


def test_single_character_text_has_empty_kernel():
    text = concatenate([("g1", b"A")])
    kernel = build_kernel(text, lz77.parse(text), max_pattern_length=4, max_edits=0)
    assert kernel.data == b""
    assert kernel.segments == ()


def test_one_cut_with_unit_reach():
    text = concatenate([("g1", b"aaaa")])
    kernel = build_kernel(text, lz77.parse(text), max_pattern_length=1, max_edits=0)
    assert kernel.data == b"aa"
    assert list(kernel.cuts_in_kernel) == [1]


@pytest.mark.parametrize("start, end, expected", [
    (1, 2, (1, 2)),
    (2, 3, (2, 3)),
    (3, 4, (3, 4)),
    (6, 7, (6, 7)),
    (4, 4, None),
    (7, 7, None),
])
def test_map_kernel_match(running_text, start, end, expected):
    kernel = build_kernel(running_text, lz77.parse(running_text), max_pattern_length=2, max_edits=0)
    assert map_kernel_match(kernel, start, end) == expected


def test_map_kernel_match_rejects_separator(running_text):
    kernel = build_kernel(running_text, lz77.parse(running_text), max_pattern_length=2, max_edits=0)
    with pytest.raises(StructuralError):
        map_kernel_match(kernel, 4, 6)


def test_map_kernel_match_shifts_into_later_segments():
    text = concatenate([("g1", b"ACGTTTTTTTTTTTTTTTTTTTTACGA")])
    lz_parse = lz77.parse(text)
    kernel = build_kernel(text, lz_parse, max_pattern_length=2, max_edits=0)
    for segment in kernel.segments:
        for position in range(segment.kernel_start, segment.kernel_end):
            mapped = map_kernel_match(kernel, position, position + 1)
            text_start = segment.text_start + position - segment.kernel_start
            if text_start in lz_parse.cuts:
                assert mapped == (text_start, text_start + 1)
            else:
                assert mapped is None


def _repeated_windows():
    """Cuts at 2 and 12 of a text whose two windows read "cg"; only the cuts matter to the kernel."""
    text = concatenate([("g1", b"acgtxxxxxxacgt")])
    lz_parse = Lz77Parse(phrases=(
        Phrase.make_copy(1, 2, 1),
        Phrase.make_copy(3, 10, 1),
        Phrase.make_copy(13, 2, 3),
    ))
    return text, lz_parse


def test_dedup_removes_repeated_segment():
    text, lz_parse = _repeated_windows()
    kernel = build_kernel(text, lz_parse, max_pattern_length=2, max_edits=0)
    assert kernel.data == b"cg#cg"

    deduped, extended = dedup_kernel(kernel, text, lz_parse)
    assert deduped.data == b"cg"
    assert deduped.segments == (KernelSegment(2, 2, 1),)
    assert list(deduped.cuts_in_text) == [2]
    assert deduped.removed == (Phrase.make_copy(12, 2, 2),)
    assert extended.dummies == (Phrase.make_copy(12, 2, 2),)
    assert extended.phrases == lz_parse.phrases


def test_dedup_without_repeats_keeps_kernel(running_text):
    lz_parse = lz77.parse(running_text)
    kernel = build_kernel(running_text, lz_parse, max_pattern_length=2, max_edits=0)
    deduped, same_parse = dedup_kernel(kernel, running_text, lz_parse)
    assert deduped is kernel
    assert same_parse is lz_parse


def test_check_parameters():
    check_parameters(1, 0)
    with pytest.raises(ParameterError):
        check_parameters(0, 0)
    with pytest.raises(ParameterError):
        check_parameters(3, -1)


def test_check_query():
    check_query(b"AC", 1, max_pattern_length=2, max_edits=1)
    with pytest.raises(ParameterError):
        check_query(b"ACG", 0, max_pattern_length=2, max_edits=1)
    with pytest.raises(ParameterError):
        check_query(b"AC", 2, max_pattern_length=2, max_edits=1)
    with pytest.raises(ParameterError):
        check_query(b"", 0, max_pattern_length=2, max_edits=1)
    with pytest.raises(ReservedByteError):
        check_query(b"A#", 0, max_pattern_length=2, max_edits=1)
