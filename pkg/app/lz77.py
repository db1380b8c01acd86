"""LZ77 variant with literal first occurrences and leftmost sources."""
import bisect

import numpy

from app.entities import ConcatenatedText, Lz77Parse, Phrase
from app.exceptions import ParameterError, StructuralError
from app.logging import get_logger
from app.selfindex import suffix_array


_logger = get_logger("lz77")


def _as_bytes(text: ConcatenatedText | bytes) -> bytes:
    data = text.data if isinstance(text, ConcatenatedText) else bytes(text)
    if not data:
        raise ParameterError("cannot parse an empty text")
    return data


def _min_table(values: numpy.ndarray) -> list[numpy.ndarray]:
    levels = [values.astype(numpy.int32)]
    width = 1
    while 2 * width <= len(values):
        previous = levels[-1]
        levels.append(numpy.minimum(previous[:len(previous) - width], previous[width:]))
        width *= 2
    return levels


def _range_min(levels: list[numpy.ndarray], low: int, high: int) -> int:
    """Minimum of the values at 0-based rows [low, high)."""
    level = (high - low).bit_length() - 1
    table = levels[level]
    return int(min(table[low], table[high - (1 << level)]))


def parse(text: ConcatenatedText | bytes) -> Lz77Parse:
    """Greedy parse driven by the suffix array.

    The suffix-array interval of the current phrase prefix always contains position i
    itself; its smallest suffix start (a range-minimum) is the leftmost occurrence and
    the phrase grows while that start is < i. Between narrowings the phrase is extended
    straight from the leftmost source, which stays leftmost as long as it keeps matching.
    """
    data = _as_bytes(text)
    size = len(data)
    order = suffix_array(data)
    suffixes = order.tolist()
    levels = _min_table(order)

    phrases: list[Phrase] = []
    i = 0
    while i < size:
        low, high = 0, size
        length = 0
        source = -1
        while i + length < size:
            width = length + 1
            target = data[i:i + width]

            def key(start: int) -> bytes:
                return data[start:start + width]

            new_low = bisect.bisect_left(suffixes, target, low, high, key=key)
            new_high = bisect.bisect_right(suffixes, target, new_low, high, key=key)
            candidate = _range_min(levels, new_low, new_high)
            if candidate >= i:
                break
            low, high, source = new_low, new_high, candidate
            length = width
            while i + length < size and data[source + length] == data[i + length]:
                length += 1
        if length == 0:
            phrases.append(Phrase.make_literal(i + 1, data[i]))
            i += 1
        else:
            phrases.append(Phrase.make_copy(i + 1, length, source + 1))
            i += length
    _logger.info("Computed LZ77 parse.", n=size, z=len(phrases))
    return Lz77Parse(phrases=tuple(phrases))


def brute_force_parse(text: ConcatenatedText | bytes) -> Lz77Parse:
    data = _as_bytes(text)
    phrases: list[Phrase] = []
    i = 0
    while i < len(data):
        length = 0
        source = -1
        while i + length < len(data):
            found = data.find(data[i:i + length + 1], 0, i + length)
            if found == -1:
                break
            length += 1
            source = found
        if length == 0:
            phrases.append(Phrase.make_literal(i + 1, data[i]))
            i += 1
        else:
            phrases.append(Phrase.make_copy(i + 1, length, source + 1))
            i += length
    return Lz77Parse(phrases=tuple(phrases))


def decode(lz_parse: Lz77Parse) -> bytes:
    out = bytearray()
    for phrase in lz_parse.phrases:
        if phrase.start != len(out) + 1 or phrase.length < 1:
            raise StructuralError(f"phrase at {phrase.start} does not continue the tiling at {len(out) + 1}")
        if not phrase.is_copy:
            if phrase.length != 1 or phrase.literal is None:
                raise StructuralError(f"literal phrase at {phrase.start} must hold exactly one byte")
            out.append(phrase.literal)
            continue
        if phrase.source is None or not 1 <= phrase.source < phrase.start:
            raise StructuralError(f"copy phrase at {phrase.start} has source {phrase.source}")
        for offset in range(phrase.length):
            out.append(out[phrase.source - 1 + offset])
    return bytes(out)


def dump_parse(lz_parse: Lz77Parse) -> str:
    return "".join(phrase.display + "\n" for phrase in lz_parse.phrases)
