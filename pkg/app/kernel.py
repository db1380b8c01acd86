"""The filtered kernel text: characters near phrase cuts, segments joined by separator blocks."""
import dataclasses

from app.constants import DEFAULT_GAP_SAMPLE_RATE, SEPARATOR, SEPARATOR_BYTE
from app.entities import ConcatenatedText, Lz77Parse, Phrase
from app.exceptions import ParameterError, StructuralError
from app.gaplist import GapList
from app.logging import get_logger
from app.selfindex import check_pattern


_logger = get_logger("kernel")


@dataclasses.dataclass(frozen=True)
class KernelSegment:
    text_start: int
    length: int
    kernel_start: int

    @property
    def text_end(self) -> int:
        return self.text_start + self.length - 1

    @property
    def kernel_end(self) -> int:
        return self.kernel_start + self.length - 1


@dataclasses.dataclass(frozen=True)
class KernelText:
    data: bytes
    cuts_in_text: GapList
    cuts_in_kernel: GapList
    max_pattern_length: int
    max_edits: int
    segments: tuple[KernelSegment, ...]
    removed: tuple[Phrase, ...] = ()

    @property
    def reach(self) -> int:
        return keep_reach(self.max_pattern_length, self.max_edits)


def keep_reach(max_pattern_length: int, max_edits: int) -> int:
    """How far from a cut characters are kept; at least the two characters touching it."""
    return max(max_pattern_length + max_edits - 1, 1)


def check_parameters(max_pattern_length: int, max_edits: int) -> None:
    if max_pattern_length < 1:
        raise ParameterError(f"M must be at least 1, got {max_pattern_length}")
    if max_edits < 0:
        raise ParameterError(f"K must be non-negative, got {max_edits}")


def check_query(pattern: bytes, k: int, max_pattern_length: int, max_edits: int) -> None:
    check_pattern(pattern)
    if len(pattern) > max_pattern_length:
        raise ParameterError(f"pattern length {len(pattern)} exceeds M={max_pattern_length} stored in the index")
    if not 0 <= k <= max_edits:
        raise ParameterError(f"edit distance {k} outside [0, K={max_edits}] stored in the index")


def _assemble(text: bytes, windows: list[tuple[int, int]], cuts: list[int], max_pattern_length: int,
              max_edits: int, gap_sample_rate: int, removed: tuple[Phrase, ...] = ()) -> KernelText:
    separator_block = SEPARATOR_BYTE * (max_edits + 1)
    pieces: list[bytes] = []
    segments: list[KernelSegment] = []
    kernel_position = 1
    for text_start, text_end in windows:
        if pieces:
            pieces.append(separator_block)
            kernel_position += len(separator_block)
        segments.append(KernelSegment(text_start, text_end - text_start + 1, kernel_position))
        pieces.append(text[text_start - 1:text_end])
        kernel_position += text_end - text_start + 1

    cuts_in_text: list[int] = []
    cuts_in_kernel: list[int] = []
    slot = 0
    for cut in cuts:
        while slot < len(segments) and segments[slot].text_end < cut:
            slot += 1
        if slot == len(segments) or segments[slot].text_start > cut:
            continue
        cuts_in_text.append(cut)
        cuts_in_kernel.append(segments[slot].kernel_start + cut - segments[slot].text_start)

    return KernelText(
        data=b"".join(pieces),
        cuts_in_text=GapList.build(cuts_in_text, gap_sample_rate),
        cuts_in_kernel=GapList.build(cuts_in_kernel, gap_sample_rate),
        max_pattern_length=max_pattern_length,
        max_edits=max_edits,
        segments=tuple(segments),
        removed=removed,
    )


def build_kernel(text: ConcatenatedText, lz_parse: Lz77Parse, max_pattern_length: int, max_edits: int,
                 gap_sample_rate: int = DEFAULT_GAP_SAMPLE_RATE) -> KernelText:
    check_parameters(max_pattern_length, max_edits)
    reach = keep_reach(max_pattern_length, max_edits)
    windows: list[tuple[int, int]] = []
    for cut in lz_parse.cuts:
        low, high = max(1, cut - reach + 1), min(text.n, cut + reach)
        if windows and low <= windows[-1][1] + 1:
            windows[-1] = (windows[-1][0], max(windows[-1][1], high))
        else:
            windows.append((low, high))
    kernel = _assemble(text.data, windows, lz_parse.cuts, max_pattern_length, max_edits, gap_sample_rate)
    _logger.info("Built kernel.", n=text.n, kernel_length=len(kernel.data), segments=len(kernel.segments),
                 cuts=len(kernel.cuts_in_text))
    return kernel


def map_kernel_match(kernel: KernelText, start: int, end: int) -> tuple[int, int] | None:
    """T interval of a kernel match crossing a cut, or None for a non-primary match."""
    if SEPARATOR in kernel.data[start - 1:end]:
        raise StructuralError(f"kernel match [{start}, {end}] contains a separator")
    found = kernel.cuts_in_kernel.successor(start)
    if found is None:
        return None
    rank, kernel_cut = found
    if kernel_cut > end - 1:
        return None
    text_start = kernel.cuts_in_text.access(rank) - (kernel_cut - start)
    return text_start, text_start + (end - start)


def dedup_kernel(kernel: KernelText, text: ConcatenatedText, lz_parse: Lz77Parse,
                 gap_sample_rate: int = DEFAULT_GAP_SAMPLE_RATE) -> tuple[KernelText, Lz77Parse]:
    """Drop segments that repeat an earlier segment byte for byte.

    Each dropped segment becomes a dummy copy phrase whose source is the first segment
    with the same content, so its matches come back as secondary occurrences.
    """
    first_seen: dict[bytes, KernelSegment] = {}
    kept: list[tuple[int, int]] = []
    dummies: list[Phrase] = []
    for segment in kernel.segments:
        content = text.data[segment.text_start - 1:segment.text_end]
        original = first_seen.get(content)
        if original is None:
            first_seen[content] = segment
            kept.append((segment.text_start, segment.text_end))
        else:
            dummies.append(Phrase.make_copy(segment.text_start, segment.length, original.text_start))
    if not dummies:
        return kernel, lz_parse

    deduped = _assemble(text.data, kept, lz_parse.cuts, kernel.max_pattern_length, kernel.max_edits,
                        gap_sample_rate, removed=kernel.removed + tuple(dummies))
    _logger.info("Removed duplicate kernel segments.", removed=len(dummies), kernel_length=len(deduped.data),
                 previous_length=len(kernel.data))
    return deduped, dataclasses.replace(lz_parse, dummies=lz_parse.dummies + tuple(dummies))
