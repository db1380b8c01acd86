"""LZ77 hybrid index: kernel self-index for primary matches, source grid for secondary ones."""
import dataclasses

import numpy

from app import lz77
from app.codec import ByteReader, ByteWriter
from app.constants import DEFAULT_GAP_SAMPLE_RATE, DEFAULT_LOCATE_SAMPLE_RATE, SEPARATOR
from app.entities import ConcatenatedText, GenomeLayout, Lz77Parse, Occurrence, Phrase
from app.enums import IndexKind, Section
from app.gaplist import GapList
from app.kernel import (
    KernelSegment, KernelText, build_kernel, check_parameters, check_query, dedup_kernel, map_kernel_match
)
from app.logging import get_logger
from app.rmq import RangeMaxIndex, report_two_sided
from app.selfindex import SelfIndex


@dataclasses.dataclass(frozen=True)
class HybridParams:
    max_pattern_length: int
    max_edits: int
    dedup: bool
    gap_sample_rate: int
    locate_sample_rate: int
    n: int
    z: int


@dataclasses.dataclass(frozen=True)
class Expansion:
    occurrences: list[Occurrence]
    repeats: int
    steps: int


class SourceGrid:
    """Markers (source start, source end) of every copy phrase, sorted by source start.

    Ends are never stored: an entry points at the cut before its phrase, and the phrase
    length is the gap to the next cut. Dummy phrases added by kernel dedup carry their
    start and length in a side table and are addressed by negative pointers.
    """

    def __init__(self, source_starts: GapList, phrase_ptrs: numpy.ndarray, boundaries: GapList, n: int,
                 dummy_starts: numpy.ndarray, dummy_lengths: numpy.ndarray,
                 end_rmq: RangeMaxIndex | None) -> None:
        self.source_starts = source_starts
        self.phrase_ptrs = phrase_ptrs
        self.boundaries = boundaries
        self.n = n
        self.dummy_starts = dummy_starts
        self.dummy_lengths = dummy_lengths
        self.end_rmq = end_rmq

    @classmethod
    def build(cls, lz_parse: Lz77Parse, boundaries: GapList, n: int,
              gap_sample_rate: int = DEFAULT_GAP_SAMPLE_RATE) -> "SourceGrid":
        entries: list[tuple[int, int, int, int]] = []
        for cut_rank, phrase in enumerate(lz_parse.phrases):
            if phrase.is_copy:
                entries.append((phrase.source, phrase.start, phrase.length, cut_rank))
        for slot, dummy in enumerate(lz_parse.dummies):
            entries.append((dummy.source, dummy.start, dummy.length, -(slot + 1)))
        entries.sort()

        ends = [source + length - 1 for source, _, length, _ in entries]
        return cls(
            source_starts=GapList.build((entry[0] for entry in entries), gap_sample_rate, strict=False),
            phrase_ptrs=numpy.asarray([entry[3] for entry in entries], dtype=numpy.int64),
            boundaries=boundaries,
            n=n,
            dummy_starts=numpy.asarray([dummy.start for dummy in lz_parse.dummies], dtype=numpy.int64),
            dummy_lengths=numpy.asarray([dummy.length for dummy in lz_parse.dummies], dtype=numpy.int64),
            end_rmq=RangeMaxIndex.build(ends) if ends else None,
        )

    def __len__(self) -> int:
        return len(self.source_starts)

    @property
    def nbytes(self) -> int:
        rmq_bytes = self.end_rmq.nbytes if self.end_rmq is not None else 0
        return (self.source_starts.nbytes + self.phrase_ptrs.nbytes + self.dummy_starts.nbytes
                + self.dummy_lengths.nbytes + rmq_bytes)

    def phrase_of(self, rank: int) -> tuple[int, int]:
        """(phrase start, phrase length) of the entry with the given 1-based rank."""
        pointer = int(self.phrase_ptrs[rank - 1])
        if pointer < 0:
            slot = -pointer - 1
            return int(self.dummy_starts[slot]), int(self.dummy_lengths[slot])
        start = self.boundaries.access(pointer) + 1
        end = self.boundaries.access(pointer + 1) if pointer < len(self.boundaries) else self.n
        return start, end - start + 1

    def source_start(self, rank: int) -> int:
        return self.source_starts.access(rank)

    def source_end(self, rank: int) -> int:
        return self.source_start(rank) + self.phrase_of(rank)[1] - 1

    def report_covering_sources(self, left: int, right: int) -> list[int]:
        if self.end_rmq is None:
            return []
        return report_two_sided(self.source_starts, self.end_rmq, self.source_end, left, right)

    def copy_of(self, rank: int, occurrence: Occurrence) -> Occurrence:
        phrase_start, _ = self.phrase_of(rank)
        shifted = phrase_start + occurrence.global_start - self.source_start(rank)
        return dataclasses.replace(occurrence, global_start=shifted)


class HybridIndex:
    __logger = get_logger("hybrid_index")
    kind = IndexKind.HYBRID

    def __init__(self, kernel: KernelText, kernel_index: SelfIndex | None, grid: SourceGrid,
                 literals: tuple[tuple[int, int], ...], layout: GenomeLayout, params: HybridParams) -> None:
        self.kernel = kernel
        self.kernel_index = kernel_index
        self.grid = grid
        self.literals = literals
        self.layout = layout
        self.params = params

    @property
    def n(self) -> int:
        return self.params.n

    def find_primary(self, pattern: bytes, k: int = 0) -> list[Occurrence]:
        check_query(pattern, k, self.params.max_pattern_length, self.params.max_edits)
        primaries: list[Occurrence] = []
        if self.kernel_index is not None:
            for start, end, distance in self.kernel_index.bounded_edit_search(pattern, k):
                mapped = map_kernel_match(self.kernel, start, end)
                if mapped is not None:
                    primaries.append(Occurrence(mapped[0], end - start + 1, distance))
        for position, symbol in self.literals:
            distance = len(pattern) - (1 if symbol in pattern else 0)
            if distance <= k:
                primaries.append(Occurrence(position, 1, distance))
        primaries.sort()
        self.__logger.debug("Found primary occurrences.", pattern=pattern, k=k, primaries=len(primaries))
        return primaries

    def expand(self, primaries: list[Occurrence]) -> Expansion:
        """Walk the occurrence list from its head, appending each new copy to its tail."""
        worklist = list(primaries)
        seen = {occurrence.interval for occurrence in worklist}
        repeats = 0
        head = 0
        while head < len(worklist):
            occurrence = worklist[head]
            head += 1
            for rank in self.grid.report_covering_sources(occurrence.global_start, occurrence.end):
                copy = self.grid.copy_of(rank, occurrence)
                if copy.interval in seen:
                    repeats += 1
                    continue
                seen.add(copy.interval)
                worklist.append(copy)
        worklist.sort()
        return Expansion(occurrences=worklist, repeats=repeats, steps=head)

    def find_all(self, pattern: bytes, k: int = 0) -> list[Occurrence]:
        expansion = self.expand(self.find_primary(pattern, k))
        if expansion.repeats:
            self.__logger.debug("Suppressed repeated secondary occurrences.", pattern=pattern,
                                repeats=expansion.repeats)
        return expansion.occurrences

    def project(self, occurrence: Occurrence) -> tuple[str, int]:
        return self.layout.project(occurrence.global_start, occurrence.length)

    def summary(self) -> dict[str, int]:
        return {
            "n": self.params.n,
            "z": self.params.z,
            "kernel_length": len(self.kernel.data),
            "kernel_segments": len(self.kernel.segments),
            "removed_segments": len(self.kernel.removed),
            "kernel_length_without_dedup": len(self.kernel.data) + sum(
                phrase.length + self.params.max_edits + 1 for phrase in self.kernel.removed
            ),
            "grid_entries": len(self.grid),
            "self_index_bytes": self.kernel_index.nbytes if self.kernel_index is not None else 0,
            "grid_bytes": self.grid.nbytes,
            "cut_list_bytes": self.kernel.cuts_in_text.nbytes + self.kernel.cuts_in_kernel.nbytes,
        }

    def to_sections(self) -> dict[Section, bytes]:
        params = ByteWriter()
        for value in dataclasses.astuple(self.params):
            params.u64(int(value))

        genomes = ByteWriter()
        self.layout.write(genomes)

        kernel = ByteWriter()
        kernel.blob(self.kernel.data)
        kernel.array(numpy.asarray([[s.text_start, s.length, s.kernel_start] for s in self.kernel.segments],
                                   dtype=numpy.int64).reshape(-1))
        kernel.array(numpy.asarray([[p.start, p.length, p.source] for p in self.kernel.removed],
                                   dtype=numpy.int64).reshape(-1))

        cuts = ByteWriter()
        self.kernel.cuts_in_text.write(cuts)
        self.kernel.cuts_in_kernel.write(cuts)
        shared = self.grid.boundaries is self.kernel.cuts_in_text
        cuts.u8(int(shared))
        if not shared:
            self.grid.boundaries.write(cuts)
        cuts.array(numpy.asarray([position for position, _ in self.literals], dtype=numpy.int64))
        cuts.blob(bytes(symbol for _, symbol in self.literals))

        self_index = ByteWriter()
        self_index.u8(int(self.kernel_index is not None))
        if self.kernel_index is not None:
            self.kernel_index.write(self_index)

        grid = ByteWriter()
        self.grid.source_starts.write(grid)
        grid.array(self.grid.phrase_ptrs)
        grid.array(self.grid.dummy_starts)
        grid.array(self.grid.dummy_lengths)
        grid.u8(int(self.grid.end_rmq is not None))
        if self.grid.end_rmq is not None:
            self.grid.end_rmq.write(grid)

        return {
            Section.PARAMS: params.getvalue(),
            Section.GENOMES: genomes.getvalue(),
            Section.KERNEL: kernel.getvalue(),
            Section.CUTS: cuts.getvalue(),
            Section.SELF_INDEX: self_index.getvalue(),
            Section.GRID: grid.getvalue(),
        }

    @classmethod
    def from_sections(cls, readers: dict[Section, ByteReader]) -> "HybridIndex":
        params_reader = readers[Section.PARAMS]
        params = HybridParams(*(params_reader.u64() for _ in dataclasses.fields(HybridParams)))
        params = dataclasses.replace(params, dedup=bool(params.dedup))
        params_reader.expect_end()

        layout = GenomeLayout.read(readers[Section.GENOMES])
        readers[Section.GENOMES].expect_end()

        kernel_reader = readers[Section.KERNEL]
        data = kernel_reader.blob()
        segments = tuple(KernelSegment(*map(int, row)) for row in kernel_reader.array().reshape(-1, 3))
        removed = tuple(Phrase.make_copy(int(start), int(length), int(source))
                        for start, length, source in kernel_reader.array().reshape(-1, 3))
        kernel_reader.expect_end()

        cuts_reader = readers[Section.CUTS]
        cuts_in_text = GapList.read(cuts_reader)
        cuts_in_kernel = GapList.read(cuts_reader)
        boundaries = cuts_in_text if cuts_reader.u8() else GapList.read(cuts_reader)
        literal_positions = cuts_reader.array()
        literal_symbols = cuts_reader.blob()
        cuts_reader.expect_end()

        index_reader = readers[Section.SELF_INDEX]
        kernel_index = SelfIndex.read(index_reader) if index_reader.u8() else None
        index_reader.expect_end()

        grid_reader = readers[Section.GRID]
        source_starts = GapList.read(grid_reader)
        phrase_ptrs = grid_reader.array()
        dummy_starts = grid_reader.array()
        dummy_lengths = grid_reader.array()
        end_rmq = RangeMaxIndex.read(grid_reader) if grid_reader.u8() else None
        grid_reader.expect_end()

        kernel = KernelText(data, cuts_in_text, cuts_in_kernel, params.max_pattern_length, params.max_edits,
                            segments, removed)
        grid = SourceGrid(source_starts, phrase_ptrs, boundaries, params.n, dummy_starts, dummy_lengths, end_rmq)
        literals = tuple(zip(literal_positions.tolist(), literal_symbols))
        return cls(kernel, kernel_index, grid, literals, layout, params)


def build_hybrid(text: ConcatenatedText, max_pattern_length: int, max_edits: int, dedup: bool = False,
                 gap_sample_rate: int = DEFAULT_GAP_SAMPLE_RATE,
                 locate_sample_rate: int = DEFAULT_LOCATE_SAMPLE_RATE) -> HybridIndex:
    check_parameters(max_pattern_length, max_edits)
    lz_parse = lz77.parse(text)
    kernel = build_kernel(text, lz_parse, max_pattern_length, max_edits, gap_sample_rate)
    boundaries = kernel.cuts_in_text
    if dedup:
        boundaries = GapList.build(lz_parse.cuts, gap_sample_rate)
        kernel, lz_parse = dedup_kernel(kernel, text, lz_parse, gap_sample_rate)
    grid = SourceGrid.build(lz_parse, boundaries, text.n, gap_sample_rate)
    kernel_index = SelfIndex.build(kernel.data, locate_sample_rate) if kernel.data else None
    literals = tuple((phrase.start, phrase.literal) for phrase in lz_parse.literals if phrase.literal != SEPARATOR)
    params = HybridParams(
        max_pattern_length=max_pattern_length,
        max_edits=max_edits,
        dedup=dedup,
        gap_sample_rate=gap_sample_rate,
        locate_sample_rate=locate_sample_rate,
        n=text.n,
        z=lz_parse.z,
    )
    index = HybridIndex(kernel, kernel_index, grid, literals, text.layout, params)
    get_logger("hybrid_index").info("Built LZ77 hybrid index.", **index.summary())
    return index
