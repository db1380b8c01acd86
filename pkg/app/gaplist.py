"""Gap-encoded sorted integer lists with a table of samples for access and binary search."""
import typing

import numpy

from app.codec import ByteReader, ByteWriter, decode_varint, encode_varint
from app.constants import DEFAULT_GAP_SAMPLE_RATE
from app.exceptions import BoundsError, ConstructionError


class GapList:
    """Sorted positive integers stored as varint gaps.

    Every ``sample_rate``-th entry keeps its absolute value and the byte offset of the
    following gap, so ``access`` decodes fewer than ``sample_rate`` gaps and
    ``successor``/``predecessor`` binary-search the samples first. With ``strict=False``
    the list may repeat values (zero gaps).
    """

    def __init__(self, deltas: bytes, sample_values: numpy.ndarray, sample_offsets: numpy.ndarray,
                 count: int, sample_rate: int, strict: bool) -> None:
        self._deltas = deltas
        self._sample_values = sample_values
        self._sample_offsets = sample_offsets
        self._count = count
        self._sample_rate = sample_rate
        self._strict = strict

    @classmethod
    def build(cls, values: typing.Iterable[int], sample_rate: int = DEFAULT_GAP_SAMPLE_RATE,
              strict: bool = True) -> "GapList":
        if sample_rate < 1:
            raise ConstructionError(f"sample rate must be positive, got {sample_rate}")
        deltas = bytearray()
        sample_values: list[int] = []
        sample_offsets: list[int] = []
        previous = 0
        count = 0
        for value in values:
            gap = value - previous
            if value < 1 or gap < 0 or (strict and gap == 0):
                raise ConstructionError(
                    f"values must be positive and {'strictly increasing' if strict else 'non-decreasing'}; "
                    f"got {value} after {previous}"
                )
            encode_varint(gap, deltas)
            if count % sample_rate == 0:
                sample_values.append(value)
                sample_offsets.append(len(deltas))
            previous = value
            count += 1
        return cls(
            deltas=bytes(deltas),
            sample_values=numpy.asarray(sample_values, dtype=numpy.int64),
            sample_offsets=numpy.asarray(sample_offsets, dtype=numpy.int64),
            count=count,
            sample_rate=sample_rate,
            strict=strict,
        )

    def __len__(self) -> int:
        return self._count

    @property
    def nbytes(self) -> int:
        return len(self._deltas) + self._sample_values.nbytes + self._sample_offsets.nbytes

    def gaps(self) -> list[int]:
        result = []
        pos = 0
        while pos < len(self._deltas):
            gap, pos = decode_varint(self._deltas, pos)
            result.append(gap)
        return result

    def __iter__(self) -> typing.Iterator[int]:
        value = 0
        pos = 0
        while pos < len(self._deltas):
            gap, pos = decode_varint(self._deltas, pos)
            value += gap
            yield value

    def access(self, rank: int) -> int:
        if not 1 <= rank <= self._count:
            raise BoundsError(f"rank {rank} outside [1, {self._count}]")
        index = rank - 1
        sample = index // self._sample_rate
        value = int(self._sample_values[sample])
        pos = int(self._sample_offsets[sample])
        for _ in range(index - sample * self._sample_rate):
            gap, pos = decode_varint(self._deltas, pos)
            value += gap
        return value

    def successor(self, x: int) -> tuple[int, int] | None:
        """Smallest stored value >= x with its 1-based rank."""
        if self._count == 0:
            return None
        sample = int(numpy.searchsorted(self._sample_values, x, side="left")) - 1
        if sample < 0:
            return 1, int(self._sample_values[0])
        index = sample * self._sample_rate
        value = int(self._sample_values[sample])
        pos = int(self._sample_offsets[sample])
        while value < x:
            if index + 1 >= self._count:
                return None
            gap, pos = decode_varint(self._deltas, pos)
            value += gap
            index += 1
        return index + 1, value

    def predecessor(self, x: int) -> tuple[int, int] | None:
        """Largest stored value <= x with its 1-based rank; the last one among equals."""
        if self._count == 0:
            return None
        sample = int(numpy.searchsorted(self._sample_values, x, side="right")) - 1
        if sample < 0:
            return None
        index = sample * self._sample_rate
        value = int(self._sample_values[sample])
        pos = int(self._sample_offsets[sample])
        while index + 1 < self._count:
            gap, next_pos = decode_varint(self._deltas, pos)
            if value + gap > x:
                break
            value += gap
            pos = next_pos
            index += 1
        return index + 1, value

    def write(self, writer: ByteWriter) -> None:
        writer.u64(self._count)
        writer.u32(self._sample_rate)
        writer.u8(int(self._strict))
        writer.blob(self._deltas)
        writer.array(self._sample_values)
        writer.array(self._sample_offsets)

    @classmethod
    def read(cls, reader: ByteReader) -> "GapList":
        count = reader.u64()
        sample_rate = reader.u32()
        strict = bool(reader.u8())
        deltas = reader.blob()
        sample_values = reader.array()
        sample_offsets = reader.array()
        return cls(deltas, sample_values, sample_offsets, count, sample_rate, strict)
