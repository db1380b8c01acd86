"""Alignment-based index: marked substrings plus a reference-bounded grid of unmarked regions.

Every aligned genome is split into characters near an alignment difference (marked)
and runs that copy the reference. Distinct marked substrings go into the kernel after
the reference; runs become grid markers over reference coordinates, so every secondary
occurrence is one reference hit shifted by a region offset.
"""
import bisect
import dataclasses
import functools

import numpy

from app.codec import ByteReader, ByteWriter, decode_varint, encode_varint, zigzag_decode, zigzag_encode
from app.constants import DEFAULT_GAP_SAMPLE_RATE, DEFAULT_LOCATE_SAMPLE_RATE, SEPARATOR_BYTE
from app.entities import AlignmentScript, GenomeLayout, Occurrence
from app.enums import EditKind, IndexKind, Section
from app.exceptions import BoundsError, StructuralError, ValidationError
from app.gaplist import GapList
from app.kernel import check_parameters, check_query
from app.logging import get_logger
from app.rmq import RangeMaxIndex, report_two_sided
from app.selfindex import SelfIndex
from app.sequences import Genome, apply_alignment, concatenate


Pointer = tuple[int, int, int]


@dataclasses.dataclass(frozen=True)
class MarkedInterval:
    genome_start: int
    genome_end: int
    ref_projected_start: int

    @property
    def length(self) -> int:
        return self.genome_end - self.genome_start + 1


@dataclasses.dataclass(frozen=True)
class UnmarkedRegion:
    """Genome positions [genome_start, genome_end] equal reference positions from ref_start on.

    ``run_start``/``run_end`` bound the matched run the region lives in; extension never
    leaves it.
    """
    genome_start: int
    genome_end: int
    ref_start: int
    run_start: int
    run_end: int

    @property
    def length(self) -> int:
        return self.genome_end - self.genome_start + 1

    @property
    def ref_end(self) -> int:
        return self.ref_start + self.length - 1

    @property
    def offset(self) -> int:
        return self.genome_start - self.ref_start


@dataclasses.dataclass(frozen=True)
class MarkedRegions:
    genome_id: str
    genome_length: int
    marked: tuple[MarkedInterval, ...]
    regions: tuple[UnmarkedRegion, ...]


def marking_reach(max_pattern_length: int, max_edits: int) -> int:
    return max_pattern_length + max_edits - 1


def mark(reference: bytes, script: AlignmentScript, max_pattern_length: int, max_edits: int) -> MarkedRegions:
    """Mark genome characters within M+K-1 of a difference; the rest of each matched run is unmarked.

    Substituted and inserted characters are differences. A deletion after genome
    position x counts like a phrase cut: x and x+1 are both at distance 1.
    """
    check_parameters(max_pattern_length, max_edits)
    genome_length = len(apply_alignment(reference, script))
    reach = marking_reach(max_pattern_length, max_edits)

    runs: list[tuple[int, int, int]] = []
    hot: list[tuple[int, int]] = []
    anchors: list[tuple[int, int, bool]] = []
    genome_pos, ref_pos = 1, 1
    for token in script.tokens:
        match token.kind:
            case EditKind.MATCH:
                last_start, last_end, last_ref = runs[-1] if runs else (0, -1, 0)
                if runs and last_end + 1 == genome_pos and last_ref + last_end - last_start + 1 == ref_pos:
                    runs[-1] = (last_start, genome_pos + token.length - 1, last_ref)
                else:
                    runs.append((genome_pos, genome_pos + token.length - 1, ref_pos))
            case EditKind.SUBST | EditKind.INS:
                hot.append((genome_pos - reach, genome_pos + token.length - 1 + reach))
            case EditKind.DEL:
                hot.append((genome_pos - reach, genome_pos - 1 + reach))
        if token.kind.consumes_genome:
            anchors.append((genome_pos, ref_pos, token.kind.consumes_reference))
            genome_pos += token.length
        if token.kind.consumes_reference:
            ref_pos += token.length

    mask = numpy.zeros(genome_length + 2, dtype=bool)
    for low, high in hot:
        low, high = max(low, 1), min(high, genome_length)
        if low <= high:
            mask[low:high + 1] = True
    edges = numpy.flatnonzero(numpy.diff(mask.astype(numpy.int8)))
    anchor_starts = [anchor[0] for anchor in anchors]

    def projected(position: int) -> int:
        start, ref_start, advances = anchors[bisect.bisect_right(anchor_starts, position) - 1]
        return ref_start + (position - start if advances else 0)

    marked = tuple(
        MarkedInterval(int(low) + 1, int(high), projected(int(low) + 1))
        for low, high in zip(edges[::2], edges[1::2])
    )

    regions: list[UnmarkedRegion] = []
    for run_start, run_end, run_ref in runs:
        free = numpy.flatnonzero(~mask[run_start:run_end + 1])
        if free.size == 0:
            continue
        start, end = run_start + int(free[0]), run_start + int(free[-1])
        regions.append(UnmarkedRegion(start, end, run_ref + start - run_start, run_start, run_end))
    return MarkedRegions(script.genome_id, genome_length, marked, tuple(regions))


def extend_unmarked(marked_regions: MarkedRegions, max_pattern_length: int, max_edits: int) -> MarkedRegions:
    """Grow every unmarked region by M+K-1 on both sides, staying inside its matched run."""
    reach = marking_reach(max_pattern_length, max_edits)
    extended = []
    for region in marked_regions.regions:
        start = max(region.run_start, region.genome_start - reach)
        end = min(region.run_end, region.genome_end + reach)
        extended.append(dataclasses.replace(
            region, genome_start=start, genome_end=end, ref_start=region.ref_start - (region.genome_start - start)
        ))
    return dataclasses.replace(marked_regions, regions=tuple(extended))


def compress_pointers(pointers: list[Pointer]) -> bytes:
    """Encode (genome slot, genome start, reference-projected start) triples sorted by slot."""
    out = bytearray()
    previous_slot, previous_ref = 0, 0
    for slot, genome_start, ref_start in pointers:
        encode_varint(slot - previous_slot, out)
        encode_varint(zigzag_encode(ref_start - previous_ref), out)
        encode_varint(zigzag_encode(genome_start - ref_start), out)
        previous_slot, previous_ref = slot, ref_start
    return bytes(out)


def decompress_pointers(block: bytes) -> list[Pointer]:
    pointers: list[Pointer] = []
    slot, ref_start, pos = 0, 0, 0
    while pos < len(block):
        gap, pos = decode_varint(block, pos)
        ref_delta, pos = decode_varint(block, pos)
        offset, pos = decode_varint(block, pos)
        slot += gap
        ref_start += zigzag_decode(ref_delta)
        pointers.append((slot, ref_start + zigzag_decode(offset), ref_start))
    return pointers


class MarkedCatalog:
    """Distinct marked substrings in kernel order with their compressed occurrence pointers.

    Entry i starts at ``entry_starts[i]`` in the kernel; its length follows from the
    next entry start and the separator block width.
    """

    def __init__(self, entry_starts: GapList, pointer_offsets: numpy.ndarray, pointer_blob: bytes,
                 separator_width: int, kernel_length: int) -> None:
        self.entry_starts = entry_starts
        self.pointer_offsets = pointer_offsets
        self.pointer_blob = pointer_blob
        self.separator_width = separator_width
        self.kernel_length = kernel_length

    def __len__(self) -> int:
        return len(self.entry_starts)

    @property
    def nbytes(self) -> int:
        return self.entry_starts.nbytes + self.pointer_offsets.nbytes + len(self.pointer_blob)

    def entry_length(self, rank: int) -> int:
        start = self.entry_starts.access(rank)
        if rank < len(self.entry_starts):
            return self.entry_starts.access(rank + 1) - self.separator_width - start
        return self.kernel_length - start + 1

    def pointers(self, rank: int) -> list[Pointer]:
        low, high = int(self.pointer_offsets[rank - 1]), int(self.pointer_offsets[rank])
        return decompress_pointers(self.pointer_blob[low:high])

    def locate_entry(self, kernel_start: int) -> tuple[int, int]:
        found = self.entry_starts.predecessor(kernel_start)
        if found is None:
            raise StructuralError(f"kernel position {kernel_start} precedes every marked substring")
        return found

    def write(self, writer: ByteWriter) -> None:
        self.entry_starts.write(writer)
        writer.array(self.pointer_offsets)
        writer.blob(self.pointer_blob)

    @classmethod
    def read(cls, reader: ByteReader, separator_width: int, kernel_length: int) -> "MarkedCatalog":
        entry_starts = GapList.read(reader)
        pointer_offsets = reader.array()
        return cls(entry_starts, pointer_offsets, reader.blob(), separator_width, kernel_length)


class RegionGrid:
    """Markers (a, b) over reference coordinates, sorted by a, one per extended unmarked region."""

    def __init__(self, starts: GapList, lengths: numpy.ndarray, slots: numpy.ndarray, offsets: numpy.ndarray,
                 end_rmq: RangeMaxIndex | None) -> None:
        self.starts = starts
        self.lengths = lengths
        self.slots = slots
        self.offsets = offsets
        self.end_rmq = end_rmq

    @classmethod
    def build(cls, markers: list[tuple[int, int, int, int]],
              gap_sample_rate: int = DEFAULT_GAP_SAMPLE_RATE) -> "RegionGrid":
        """``markers`` holds (a, b, genome slot, offset) rows."""
        markers = sorted(markers)
        return cls(
            starts=GapList.build((a for a, _, _, _ in markers), gap_sample_rate, strict=False),
            lengths=numpy.asarray([b - a + 1 for a, b, _, _ in markers], dtype=numpy.int64),
            slots=numpy.asarray([slot for _, _, slot, _ in markers], dtype=numpy.int64),
            offsets=numpy.asarray([offset for _, _, _, offset in markers], dtype=numpy.int64),
            end_rmq=RangeMaxIndex.build([b for _, b, _, _ in markers]) if markers else None,
        )

    def __len__(self) -> int:
        return len(self.starts)

    @property
    def nbytes(self) -> int:
        rmq_bytes = self.end_rmq.nbytes if self.end_rmq is not None else 0
        return self.starts.nbytes + self.lengths.nbytes + self.slots.nbytes + self.offsets.nbytes + rmq_bytes

    def marker(self, rank: int) -> tuple[int, int, int, int]:
        a = self.starts.access(rank)
        return a, a + int(self.lengths[rank - 1]) - 1, int(self.slots[rank - 1]), int(self.offsets[rank - 1])

    def end_of(self, rank: int) -> int:
        return self.starts.access(rank) + int(self.lengths[rank - 1]) - 1

    def report(self, left: int, right: int) -> list[int]:
        if self.end_rmq is None:
            return []
        return report_two_sided(self.starts, self.end_rmq, self.end_of, left, right)

    def write(self, writer: ByteWriter) -> None:
        self.starts.write(writer)
        writer.array(self.lengths)
        writer.array(self.slots)
        writer.array(self.offsets)
        writer.u8(int(self.end_rmq is not None))
        if self.end_rmq is not None:
            self.end_rmq.write(writer)

    @classmethod
    def read(cls, reader: ByteReader) -> "RegionGrid":
        starts = GapList.read(reader)
        lengths = reader.array()
        slots = reader.array()
        offsets = reader.array()
        end_rmq = RangeMaxIndex.read(reader) if reader.u8() else None
        return cls(starts, lengths, slots, offsets, end_rmq)


@dataclasses.dataclass(frozen=True)
class AlibiParams:
    max_pattern_length: int
    max_edits: int
    include_reference: bool
    gap_sample_rate: int
    locate_sample_rate: int
    reference_length: int


class AlibiIndex:
    __logger = get_logger("alibi_index")
    kind = IndexKind.ALIBI

    def __init__(self, catalog: MarkedCatalog, kernel_index: SelfIndex, grid: RegionGrid, layout: GenomeLayout,
                 reference_id: str, params: AlibiParams) -> None:
        self.catalog = catalog
        self.kernel_index = kernel_index
        self.grid = grid
        self.layout = layout
        self.reference_id = reference_id
        self.params = params

    @property
    def n(self) -> int:
        return self.layout.n

    @property
    def reach(self) -> int:
        return marking_reach(self.params.max_pattern_length, self.params.max_edits)

    @functools.cached_property
    def _reference_slot(self) -> int | None:
        return next((slot for slot, span in enumerate(self.layout.spans) if span.genome_id == self.reference_id),
                    None)

    def _kernel_hits(self, pattern: bytes, k: int) -> tuple[list[Occurrence], list[tuple[int, int, int]]]:
        """Primary occurrences in aligned genomes, and raw hits (l, r, dist) inside the reference."""
        check_query(pattern, k, self.params.max_pattern_length, self.params.max_edits)
        primaries: list[Occurrence] = []
        reference_hits: list[tuple[int, int, int]] = []
        for start, end, distance in self.kernel_index.bounded_edit_search(pattern, k):
            if end <= self.params.reference_length:
                reference_hits.append((start, end, distance))
                continue
            rank, entry_start = self.catalog.locate_entry(start)
            entry_length = self.catalog.entry_length(rank)
            first, last = start - entry_start, end - entry_start
            for slot, genome_start, _ in self.catalog.pointers(rank):
                span = self.layout.spans[slot]
                left_margin = genome_start > 1
                right_margin = genome_start + entry_length - 1 < span.length
                if (left_margin and last <= self.reach - 1) or (right_margin and first >= entry_length - self.reach):
                    continue
                primaries.append(Occurrence(span.start + genome_start - 1 + first, end - start + 1, distance))
        return primaries, reference_hits

    def _reference_occurrences(self, reference_hits: list[tuple[int, int, int]]) -> list[Occurrence]:
        if not self.params.include_reference or self._reference_slot is None:
            return []
        span = self.layout.spans[self._reference_slot]
        return [Occurrence(span.start + start - 1, end - start + 1, distance)
                for start, end, distance in reference_hits]

    def find_primary(self, pattern: bytes, k: int = 0) -> list[Occurrence]:
        primaries, reference_hits = self._kernel_hits(pattern, k)
        return sorted(primaries + self._reference_occurrences(reference_hits))

    def find_all(self, pattern: bytes, k: int = 0) -> list[Occurrence]:
        primaries, reference_hits = self._kernel_hits(pattern, k)
        occurrences = primaries + self._reference_occurrences(reference_hits)
        secondaries = 0
        for start, end, distance in reference_hits:
            for rank in self.grid.report(start, end):
                _, _, slot, offset = self.grid.marker(rank)
                occurrences.append(Occurrence(self.layout.spans[slot].start + start + offset - 1,
                                              end - start + 1, distance))
                secondaries += 1
        self.__logger.debug("Found occurrences.", pattern=pattern, k=k, primary=len(primaries),
                            reference=len(reference_hits), secondary=secondaries)
        return sorted(occurrences)

    def project(self, occurrence: Occurrence) -> tuple[str, int]:
        return self.layout.project(occurrence.global_start, occurrence.length)

    @functools.cached_property
    def _tiles(self) -> dict[int, list[tuple[int, int, int]]]:
        """Per genome slot: (genome start, genome end, kernel start) pieces covering the genome."""
        tiles: dict[int, list[tuple[int, int, int]]] = {}
        for rank in range(1, len(self.grid) + 1):
            a, b, slot, offset = self.grid.marker(rank)
            tiles.setdefault(slot, []).append((a + offset, b + offset, a))
        for rank in range(1, len(self.catalog) + 1):
            entry_start = self.catalog.entry_starts.access(rank)
            length = self.catalog.entry_length(rank)
            for slot, genome_start, _ in self.catalog.pointers(rank):
                tiles.setdefault(slot, []).append((genome_start, genome_start + length - 1, entry_start))
        for pieces in tiles.values():
            pieces.sort()
        return tiles

    def extract(self, genome_id: str, local_start: int, length: int) -> bytes:
        """Bytes of a genome read back from the kernel, without storing the genome itself."""
        if genome_id == self.reference_id:
            genome_length, slot = self.params.reference_length, None
        else:
            span = self.layout.span_of(genome_id)
            genome_length, slot = span.length, self.layout.spans.index(span)
        end = local_start + length - 1
        if length < 1 or local_start < 1 or end > genome_length:
            raise BoundsError(f"range [{local_start}, {end}] outside genome {genome_id!r} of length {genome_length}")
        if slot is None:
            return self.kernel_index.extract(local_start, end)

        pieces: list[bytes] = []
        position = local_start
        for genome_start, genome_end, kernel_start in self._tiles.get(slot, []):
            if genome_end < position:
                continue
            if genome_start > position:
                break
            stop = min(genome_end, end)
            pieces.append(self.kernel_index.extract(kernel_start + position - genome_start,
                                                    kernel_start + stop - genome_start))
            position = stop + 1
            if position > end:
                break
        if position <= end:
            raise StructuralError(f"genome {genome_id!r} position {position} is covered by no region")
        return b"".join(pieces)

    def marked_substrings(self) -> list[bytes]:
        substrings = []
        for rank in range(1, len(self.catalog) + 1):
            start = self.catalog.entry_starts.access(rank)
            substrings.append(self.kernel_index.extract(start, start + self.catalog.entry_length(rank) - 1))
        return substrings

    def summary(self) -> dict[str, int]:
        return {
            "n": self.n,
            "reference_length": self.params.reference_length,
            "kernel_length": self.kernel_index.n,
            "marked_substrings": len(self.catalog),
            "regions": len(self.grid),
            "self_index_bytes": self.kernel_index.nbytes,
            "catalog_bytes": self.catalog.nbytes,
            "grid_bytes": self.grid.nbytes,
        }

    def to_sections(self) -> dict[Section, bytes]:
        params = ByteWriter()
        for value in dataclasses.astuple(self.params):
            params.u64(int(value))

        genomes = ByteWriter()
        self.layout.write(genomes)
        genomes.text(self.reference_id)

        self_index = ByteWriter()
        self.kernel_index.write(self_index)

        catalog = ByteWriter()
        self.catalog.write(catalog)

        regions = ByteWriter()
        self.grid.write(regions)

        return {
            Section.PARAMS: params.getvalue(),
            Section.GENOMES: genomes.getvalue(),
            Section.SELF_INDEX: self_index.getvalue(),
            Section.CATALOG: catalog.getvalue(),
            Section.REGIONS: regions.getvalue(),
        }

    @classmethod
    def from_sections(cls, readers: dict[Section, ByteReader]) -> "AlibiIndex":
        params_reader = readers[Section.PARAMS]
        params = AlibiParams(*(params_reader.u64() for _ in dataclasses.fields(AlibiParams)))
        params = dataclasses.replace(params, include_reference=bool(params.include_reference))
        params_reader.expect_end()

        genomes_reader = readers[Section.GENOMES]
        layout = GenomeLayout.read(genomes_reader)
        reference_id = genomes_reader.text()
        genomes_reader.expect_end()

        kernel_index = SelfIndex.read(readers[Section.SELF_INDEX])
        readers[Section.SELF_INDEX].expect_end()

        catalog = MarkedCatalog.read(readers[Section.CATALOG], params.max_edits + 1, kernel_index.n)
        readers[Section.CATALOG].expect_end()

        grid = RegionGrid.read(readers[Section.REGIONS])
        readers[Section.REGIONS].expect_end()
        return cls(catalog, kernel_index, grid, layout, reference_id, params)


def _validate(reference_id: str, genomes: list[Genome], scripts: dict[str, AlignmentScript]) -> bytes:
    sequences = dict(genomes)
    if reference_id not in sequences:
        raise ValidationError("reference genome is missing from the collection", reference_id)
    reference = sequences[reference_id]
    if not reference:
        raise ValidationError("reference genome is empty", reference_id)
    for genome_id, sequence in genomes:
        if genome_id == reference_id:
            continue
        if genome_id not in scripts:
            raise ValidationError("no alignment script", genome_id)
        if apply_alignment(reference, scripts[genome_id]) != sequence:
            raise ValidationError("alignment script does not reproduce the genome", genome_id)
    return reference


def build_alibi(reference_id: str, genomes: list[Genome], scripts: dict[str, AlignmentScript],
                max_pattern_length: int, max_edits: int, include_reference: bool = True,
                gap_sample_rate: int = DEFAULT_GAP_SAMPLE_RATE,
                locate_sample_rate: int = DEFAULT_LOCATE_SAMPLE_RATE) -> AlibiIndex:
    check_parameters(max_pattern_length, max_edits)
    reference = _validate(reference_id, genomes, scripts)
    reported = [genome for genome in genomes if include_reference or genome[0] != reference_id]
    layout = concatenate(reported).layout
    slots = {genome_id: slot for slot, (genome_id, _) in enumerate(reported)}

    entries: dict[bytes, list[Pointer]] = {}
    markers: list[tuple[int, int, int, int]] = []
    for genome_id, sequence in reported:
        if genome_id == reference_id:
            continue
        regions = extend_unmarked(mark(reference, scripts[genome_id], max_pattern_length, max_edits),
                                  max_pattern_length, max_edits)
        slot = slots[genome_id]
        for interval in regions.marked:
            content = sequence[interval.genome_start - 1:interval.genome_end]
            entries.setdefault(content, []).append((slot, interval.genome_start, interval.ref_projected_start))
        for region in regions.regions:
            markers.append((region.ref_start, region.ref_end, slot, region.offset))

    separator_block = SEPARATOR_BYTE * (max_edits + 1)
    kernel = separator_block.join([reference, *entries])
    entry_starts: list[int] = []
    pointer_offsets = [0]
    pointer_blob = bytearray()
    position = len(reference) + len(separator_block) + 1
    for content, pointers in entries.items():
        entry_starts.append(position)
        position += len(content) + len(separator_block)
        pointer_blob += compress_pointers(pointers)
        pointer_offsets.append(len(pointer_blob))

    catalog = MarkedCatalog(GapList.build(entry_starts, gap_sample_rate),
                            numpy.asarray(pointer_offsets, dtype=numpy.int64), bytes(pointer_blob),
                            len(separator_block), len(kernel))
    params = AlibiParams(
        max_pattern_length=max_pattern_length,
        max_edits=max_edits,
        include_reference=include_reference,
        gap_sample_rate=gap_sample_rate,
        locate_sample_rate=locate_sample_rate,
        reference_length=len(reference),
    )
    index = AlibiIndex(catalog, SelfIndex.build(kernel, locate_sample_rate), RegionGrid.build(markers, gap_sample_rate),
                       layout, reference_id, params)
    get_logger("alibi_index").info("Built alignment index.", **index.summary())
    return index
