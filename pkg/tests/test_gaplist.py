import bisect
import random

import pytest

from app.codec import ByteReader, ByteWriter
from app.exceptions import BoundsError, ConstructionError
from app.gaplist import GapList


VALUES = [3, 4, 9, 20, 21, 150, 151, 400, 1000, 100000]


@pytest.mark.parametrize("sample_rate", [1, 3, 64])
def test_access(sample_rate):
    gaps = GapList.build(VALUES, sample_rate)
    assert len(gaps) == len(VALUES)
    assert [gaps.access(rank) for rank in range(1, len(VALUES) + 1)] == VALUES
    assert list(gaps) == VALUES


@pytest.mark.parametrize("sample_rate", [1, 2, 4])
def test_successor_and_predecessor(sample_rate):
    gaps = GapList.build(VALUES, sample_rate)
    for x in range(0, 100002):
        slot = bisect.bisect_left(VALUES, x)
        expected = (slot + 1, VALUES[slot]) if slot < len(VALUES) else None
        assert gaps.successor(x) == expected
        slot = bisect.bisect_right(VALUES, x) - 1
        expected = (slot + 1, VALUES[slot]) if slot >= 0 else None
        assert gaps.predecessor(x) == expected
        if x > 1200:
            break


def test_build_stores_gaps_between_values():
    assert GapList.build([2, 3, 4, 7]).gaps() == [2, 1, 1, 3]
    assert GapList.build([5, 5, 9], strict=False).gaps() == [5, 0, 4]


def test_predecessor_returns_last_among_equal_values():
    gaps = GapList.build([2, 5, 5, 5, 8], sample_rate=2, strict=False)
    assert gaps.predecessor(5) == (4, 5)
    assert gaps.successor(5) == (2, 5)
    assert gaps.predecessor(1) is None


def test_empty_list():
    gaps = GapList.build([])
    assert len(gaps) == 0
    assert gaps.successor(1) is None
    assert gaps.predecessor(1) is None


@pytest.mark.parametrize("values, strict", [([0, 2], True), ([3, 2], True), ([2, 2], True), ([3, 2], False)])
def test_build_rejects_unsorted_values(values, strict):
    with pytest.raises(ConstructionError):
        GapList.build(values, strict=strict)


def test_access_out_of_range():
    gaps = GapList.build([1, 2])
    with pytest.raises(BoundsError):
        gaps.access(3)
    with pytest.raises(BoundsError):
        gaps.access(0)


def test_write_read():
    values = sorted(random.Random(3).sample(range(1, 10**6), 500))
    writer = ByteWriter()
    GapList.build(values, sample_rate=16).write(writer)
    reader = ByteReader(writer.getvalue(), "TEST")
    restored = GapList.read(reader)
    reader.expect_end()
    assert list(restored) == values
    assert restored.successor(values[100] + 1) == (102, values[101])
