"""Range-maximum index that answers argmax queries without keeping the values.

The values only shape a max-Cartesian tree (an earlier index is the ancestor of an
equal later one). The argmax of an index range is the shallowest tree node inside it,
so the structure keeps the node depths and a sparse table of argmin-depth.
"""
import typing
from collections import deque

import numpy

from app.codec import ByteReader, ByteWriter
from app.exceptions import BoundsError, ConstructionError
from app.gaplist import GapList


def _cartesian_depths(values: list[int]) -> numpy.ndarray:
    size = len(values)
    parent = [-1] * size
    stack: list[int] = []
    for i, value in enumerate(values):
        last = -1
        while stack and values[stack[-1]] < value:
            last = stack.pop()
        if stack:
            parent[i] = stack[-1]
        if last != -1:
            parent[last] = i
        stack.append(i)

    children: list[list[int]] = [[] for _ in range(size)]
    root = -1
    for node, up in enumerate(parent):
        if up == -1:
            root = node
        else:
            children[up].append(node)

    depths = numpy.zeros(size, dtype=numpy.int32)
    queue = deque([root])
    while queue:
        node = queue.popleft()
        for child in children[node]:
            depths[child] = depths[node] + 1
            queue.append(child)
    return depths


def _sparse_table(depths: numpy.ndarray) -> list[numpy.ndarray]:
    size = len(depths)
    levels = [numpy.arange(size, dtype=numpy.int32)]
    width = 1
    while 2 * width <= size:
        previous = levels[-1]
        left = previous[:size - 2 * width + 1]
        right = previous[width:width + size - 2 * width + 1]
        levels.append(numpy.where(depths[left] <= depths[right], left, right).astype(numpy.int32))
        width *= 2
    return levels


class RangeMaxIndex:

    def __init__(self, depths: numpy.ndarray) -> None:
        self._depths = depths
        self._levels = _sparse_table(depths)

    @classmethod
    def build(cls, values: list[int]) -> "RangeMaxIndex":
        if len(values) == 0:
            raise ConstructionError("range-maximum index needs at least one value")
        return cls(_cartesian_depths([int(value) for value in values]))

    def __len__(self) -> int:
        return len(self._depths)

    @property
    def nbytes(self) -> int:
        return self._depths.nbytes + sum(level.nbytes for level in self._levels)

    def query(self, left: int, right: int) -> int:
        """1-based index of the maximum in [left, right]; smallest index on ties."""
        if not 1 <= left <= right <= len(self._depths):
            raise BoundsError(f"range [{left}, {right}] outside [1, {len(self._depths)}]")
        level = (right - left + 1).bit_length() - 1
        table = self._levels[level]
        first = int(table[left - 1])
        second = int(table[right - (1 << level)])
        winner = first if self._depths[first] <= self._depths[second] else second
        return winner + 1

    def write(self, writer: ByteWriter) -> None:
        writer.array(self._depths, dtype="<i4")

    @classmethod
    def read(cls, reader: ByteReader) -> "RangeMaxIndex":
        return cls(reader.array(dtype="<i4"))


def report_two_sided(starts: GapList, ends: RangeMaxIndex, end_of: typing.Callable[[int], int],
                     left: int, right: int) -> list[int]:
    """Ranks of all entries with start <= left and end >= right.

    ``starts`` is sorted; the entries before the predecessor of ``left`` are split
    recursively around their range-maximum end until the maximum falls below ``right``.
    """
    found = starts.predecessor(left)
    if found is None:
        return []
    reported: list[int] = []
    pending = [(1, found[0])]
    while pending:
        low, high = pending.pop()
        if low > high:
            continue
        best = ends.query(low, high)
        if end_of(best) < right:
            continue
        reported.append(best)
        pending.append((low, best - 1))
        pending.append((best + 1, high))
    reported.sort()
    return reported
