"""FM-index over a byte string: count, locate, extract and bounded-edit search."""
import numpy

from app.codec import ByteReader, ByteWriter
from app.constants import DEFAULT_LOCATE_SAMPLE_RATE, RANK_BLOCK_SIZE, SEPARATOR
from app.exceptions import BoundsError, ParameterError, ReservedByteError
from app.logging import get_logger


Match = tuple[int, int, int]


def suffix_array(data: bytes) -> numpy.ndarray:
    """0-based suffix start positions in lexicographic order (prefix doubling)."""
    size = len(data)
    if size == 0:
        return numpy.zeros(0, dtype=numpy.int64)
    rank = numpy.frombuffer(data, dtype=numpy.uint8).astype(numpy.int64)
    width = 1
    while True:
        second = numpy.full(size, -1, dtype=numpy.int64)
        if width < size:
            second[:size - width] = rank[width:]
        order = numpy.lexsort((second, rank))
        first_sorted = rank[order]
        second_sorted = second[order]
        changed = numpy.zeros(size, dtype=numpy.int64)
        changed[1:] = (first_sorted[1:] != first_sorted[:-1]) | (second_sorted[1:] != second_sorted[:-1])
        rank = numpy.empty(size, dtype=numpy.int64)
        rank[order] = numpy.cumsum(changed)
        if rank[order[-1]] == size - 1:
            return order
        width *= 2


def check_pattern(pattern: bytes) -> None:
    if not pattern:
        raise ParameterError("pattern must not be empty")
    if SEPARATOR in pattern:
        raise ReservedByteError("pattern", pattern.index(SEPARATOR) + 1)


class SelfIndex:
    """BWT of ``text + $`` with block rank checkpoints and sampled suffix-array values.

    Rows are 0-based; text positions handed out by the public methods are 1-based.
    """
    __logger = get_logger("self_index")

    def __init__(self, bwt: bytes, dollar_row: int, alphabet: bytes, less_than: numpy.ndarray,
                 checkpoints: numpy.ndarray, sample_rows: numpy.ndarray, sample_values: numpy.ndarray,
                 inverse_samples: numpy.ndarray, sample_rate: int) -> None:
        self._bwt = bwt
        self._dollar_row = dollar_row
        self._alphabet = alphabet
        self._less_than = less_than
        self._checkpoints = checkpoints
        self._sample_rows = sample_rows
        self._sample_values = sample_values
        self._inverse_samples = inverse_samples
        self._sample_rate = sample_rate

        self._column = {symbol: column for column, symbol in enumerate(alphabet)}
        self._sampled = dict(zip(sample_rows.tolist(), sample_values.tolist()))

    @classmethod
    def build(cls, text: bytes, sample_rate: int = DEFAULT_LOCATE_SAMPLE_RATE) -> "SelfIndex":
        if not text:
            raise ParameterError("cannot index an empty string")
        if sample_rate < 1:
            raise ParameterError(f"locate sample rate must be positive, got {sample_rate}")
        size = len(text)
        rows = numpy.concatenate(([size], suffix_array(text))).astype(numpy.int64)
        symbols = numpy.frombuffer(text, dtype=numpy.uint8)
        bwt_array = symbols[rows - 1].copy()
        dollar_row = int(numpy.flatnonzero(rows == 0)[0])
        bwt_array[dollar_row] = 0

        alphabet = bytes(sorted(set(text)))
        counts = numpy.array([text.count(bytes([symbol])) for symbol in alphabet], dtype=numpy.int64)
        less_than = 1 + numpy.concatenate(([0], numpy.cumsum(counts)[:-1]))

        boundaries = numpy.arange(0, size + 1 + RANK_BLOCK_SIZE, RANK_BLOCK_SIZE)
        boundaries = boundaries[boundaries <= size + 1]
        checkpoints = numpy.zeros((len(boundaries), len(alphabet)), dtype=numpy.int64)
        real = numpy.ones(size + 1, dtype=bool)
        real[dollar_row] = False
        for column, symbol in enumerate(alphabet):
            running = numpy.concatenate(([0], numpy.cumsum((bwt_array == symbol) & real)))
            checkpoints[:, column] = running[boundaries]

        sampled = rows % sample_rate == 0
        sample_rows = numpy.flatnonzero(sampled).astype(numpy.int64)
        sample_values = rows[sample_rows]
        inverse_samples = numpy.zeros(size // sample_rate + 1, dtype=numpy.int64)
        inverse_samples[sample_values // sample_rate] = sample_rows

        index = cls(bwt_array.tobytes(), dollar_row, alphabet, less_than, checkpoints,
                    sample_rows, sample_values, inverse_samples, sample_rate)
        cls.__logger.debug("Built self-index.", length=size, alphabet=len(alphabet), samples=len(sample_rows))
        return index

    @property
    def n(self) -> int:
        return len(self._bwt) - 1

    @property
    def alphabet(self) -> bytes:
        return self._alphabet

    @property
    def nbytes(self) -> int:
        return (len(self._bwt) + len(self._alphabet) + self._less_than.nbytes + self._checkpoints.nbytes
                + self._sample_rows.nbytes + self._sample_values.nbytes + self._inverse_samples.nbytes)

    def _rank(self, symbol: int, row: int) -> int:
        column = self._column[symbol]
        block = row // RANK_BLOCK_SIZE
        block_start = block * RANK_BLOCK_SIZE
        result = int(self._checkpoints[block, column]) + self._bwt.count(symbol, block_start, row)
        if symbol == 0 and block_start <= self._dollar_row < row:
            result -= 1
        return result

    def _step(self, symbol: int, start: int, stop: int) -> tuple[int, int]:
        base = int(self._less_than[self._column[symbol]])
        return base + self._rank(symbol, start), base + self._rank(symbol, stop)

    def _lf(self, row: int) -> int:
        symbol = self._bwt[row]
        return int(self._less_than[self._column[symbol]]) + self._rank(symbol, row)

    def _row_range(self, pattern: bytes) -> tuple[int, int]:
        start, stop = 0, len(self._bwt)
        for symbol in reversed(pattern):
            if symbol not in self._column:
                return 0, 0
            start, stop = self._step(symbol, start, stop)
            if start >= stop:
                return 0, 0
        return start, stop

    def _position(self, row: int) -> int:
        steps = 0
        while row not in self._sampled:
            row = self._lf(row)
            steps += 1
        return self._sampled[row] + steps

    def count(self, pattern: bytes) -> int:
        check_pattern(pattern)
        start, stop = self._row_range(pattern)
        return stop - start

    def locate(self, pattern: bytes) -> list[int]:
        check_pattern(pattern)
        start, stop = self._row_range(pattern)
        return sorted(self._position(row) + 1 for row in range(start, stop))

    def extract(self, start: int, end: int) -> bytes:
        """Bytes at 1-based positions [start, end] of the indexed string."""
        if not 1 <= start <= end <= self.n:
            raise BoundsError(f"range [{start}, {end}] outside [1, {self.n}]")
        anchor = min(-(-end // self._sample_rate) * self._sample_rate, self.n)
        row = 0 if anchor == self.n else int(self._inverse_samples[anchor // self._sample_rate])
        collected = bytearray()
        for position in range(anchor, start - 1, -1):
            symbol = self._bwt[row]
            if position <= end:
                collected.append(symbol)
            row = self._lf(row)
        collected.reverse()
        return bytes(collected)

    def bounded_edit_search(self, pattern: bytes, k: int, max_edits: int | None = None,
                            max_pattern_length: int | None = None) -> list[Match]:
        """Every interval (start, end, distance) whose edit distance to ``pattern`` is at most k.

        Backtracks over backward search, carrying one dynamic-programming column per
        extension. Intervals never contain the separator byte.
        """
        check_pattern(pattern)
        if k < 0 or (max_edits is not None and k > max_edits):
            raise ParameterError(f"edit distance {k} outside [0, {max_edits}]")
        if max_pattern_length is not None and len(pattern) > max_pattern_length:
            raise ParameterError(f"pattern length {len(pattern)} exceeds {max_pattern_length}")
        if k == 0:
            size = len(pattern)
            return [(start, start + size - 1, 0) for start in self.locate(pattern)]

        reversed_pattern = pattern[::-1]
        size = len(pattern)
        limit = size + k
        symbols = [symbol for symbol in self._alphabet if symbol != SEPARATOR]
        matches: list[Match] = []
        stack = [(0, len(self._bwt), list(range(size + 1)), 0)]
        while stack:
            start, stop, column, depth = stack.pop()
            for symbol in symbols:
                next_start, next_stop = self._step(symbol, start, stop)
                if next_start >= next_stop:
                    continue
                next_column = [depth + 1]
                for i in range(1, size + 1):
                    next_column.append(min(
                        column[i] + 1,
                        next_column[i - 1] + 1,
                        column[i - 1] + (symbol != reversed_pattern[i - 1]),
                    ))
                if min(next_column) > k:
                    continue
                length = depth + 1
                if next_column[size] <= k:
                    for row in range(next_start, next_stop):
                        begin = self._position(row) + 1
                        matches.append((begin, begin + length - 1, next_column[size]))
                if length < limit:
                    stack.append((next_start, next_stop, next_column, length))
        matches.sort()
        return matches

    def write(self, writer: ByteWriter) -> None:
        writer.blob(self._bwt)
        writer.u64(self._dollar_row)
        writer.u32(self._sample_rate)
        writer.blob(self._alphabet)
        writer.array(self._less_than)
        writer.u64(self._checkpoints.shape[0])
        writer.array(self._checkpoints.reshape(-1))
        writer.array(self._sample_rows)
        writer.array(self._sample_values)
        writer.array(self._inverse_samples)

    @classmethod
    def read(cls, reader: ByteReader) -> "SelfIndex":
        bwt = reader.blob()
        dollar_row = reader.u64()
        sample_rate = reader.u32()
        alphabet = reader.blob()
        less_than = reader.array()
        blocks = reader.u64()
        checkpoints = reader.array().reshape(blocks, len(alphabet))
        sample_rows = reader.array()
        sample_values = reader.array()
        inverse_samples = reader.array()
        return cls(bwt, dollar_row, alphabet, less_than, checkpoints, sample_rows, sample_values,
                   inverse_samples, sample_rate)
