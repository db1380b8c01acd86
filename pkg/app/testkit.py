"""Brute-force oracles and the synthetic aligned-collection generator."""
import bisect

import numpy

from app.alibi import MarkedRegions
from app.constants import SEPARATOR
from app.entities import AlignmentScript, EditToken, Lz77Parse, SyntheticSpec
from app.enums import EditKind
from app.selfindex import check_pattern
from app.sequences import apply_alignment, format_fasta, format_scripts


Match = tuple[int, int, int]

DNA = b"ACGT"


def naive_find_all(text: bytes, pattern: bytes, k: int) -> list[Match]:
    """Every separator-free interval (start, end, minimal distance) within edit distance k.

    One dynamic-programming column per text offset, advanced for all start positions at
    once.
    """
    check_pattern(pattern)
    size, width = len(text), len(pattern)
    if k == 0:
        matches = []
        found = text.find(pattern)
        while found != -1:
            matches.append((found + 1, found + width, 0))
            found = text.find(pattern, found + 1)
        return matches

    symbols = numpy.frombuffer(text, dtype=numpy.uint8)
    wanted = numpy.frombuffer(pattern, dtype=numpy.uint8)
    starts = numpy.arange(size)
    alive = symbols != SEPARATOR
    column = numpy.tile(numpy.arange(width + 1, dtype=numpy.int32), (size, 1))
    matches: list[Match] = []
    for offset in range(width + k):
        positions = starts + offset
        alive &= positions < size
        if not alive.any():
            break
        current = symbols[numpy.minimum(positions, size - 1)]
        alive &= current != SEPARATOR
        previous = column
        column = numpy.empty_like(previous)
        column[:, 0] = offset + 1
        for j in range(1, width + 1):
            column[:, j] = numpy.minimum(
                numpy.minimum(previous[:, j] + 1, column[:, j - 1] + 1),
                previous[:, j - 1] + (current != wanted[j - 1]),
            )
        hits = numpy.flatnonzero(alive & (column[:, width] <= k))
        matches.extend((int(start) + 1, int(start) + offset + 1, int(column[start, width])) for start in hits)
    matches.sort()
    return matches


def naive_covering_sources(sources: list[tuple[int, int]], left: int, right: int) -> list[tuple[int, int]]:
    return [source for source in sources if source[0] <= left and right <= source[1]]


def classify_occurrences(text: bytes, partition: Lz77Parse | MarkedRegions, pattern: bytes,
                         k: int) -> tuple[list[Match], list[Match]]:
    """Split ``naive_find_all`` into (primary, secondary).

    With an LZ77 parse an occurrence is primary when it crosses a cut or sits on a
    literal phrase. With the marked regions of one aligned genome (``text`` is that
    genome) it is secondary when an extended unmarked region contains it.
    """
    primary: list[Match] = []
    secondary: list[Match] = []
    if isinstance(partition, Lz77Parse):
        cuts = partition.cuts
        literals = {phrase.start for phrase in partition.literals}
        for match in naive_find_all(text, pattern, k):
            start, end, _ = match
            slot = bisect.bisect_left(cuts, start)
            crosses = slot < len(cuts) and cuts[slot] < end
            if crosses or (start == end and start in literals):
                primary.append(match)
            else:
                secondary.append(match)
        return primary, secondary

    for match in naive_find_all(text, pattern, k):
        start, end, _ = match
        if any(region.genome_start <= start and end <= region.genome_end for region in partition.regions):
            secondary.append(match)
        else:
            primary.append(match)
    return primary, secondary


def _push(tokens: list[EditToken], kind: EditKind, length: int, bases: bytes = b"") -> None:
    if tokens and tokens[-1].kind == kind:
        last = tokens.pop()
        tokens.append(EditToken(kind, last.length + length, last.bases + bases))
    else:
        tokens.append(EditToken(kind, length, bases))


def _mutate(reference: bytes, genome_id: str, spec: SyntheticSpec, rng: numpy.random.Generator) -> AlignmentScript:
    tokens: list[EditToken] = []
    rolls = rng.random(len(reference))
    position = 0
    while position < len(reference):
        roll = rolls[position]
        if roll < spec.indel_rate:
            length = min(int(rng.geometric(0.5)), spec.max_indel_len)
            if rng.random() < 0.5:
                _push(tokens, EditKind.INS, length, bytes(rng.choice(list(DNA), size=length).tolist()))
                _push(tokens, EditKind.MATCH, 1)
                position += 1
            else:
                length = min(length, len(reference) - position)
                _push(tokens, EditKind.DEL, length)
                position += length
        elif roll < spec.indel_rate + spec.snp_rate:
            options = [base for base in DNA if base != reference[position]]
            _push(tokens, EditKind.SUBST, 1, bytes([options[int(rng.integers(len(options)))]]))
            position += 1
        else:
            _push(tokens, EditKind.MATCH, 1)
            position += 1
    return AlignmentScript(genome_id=genome_id, tokens=tuple(tokens))


def gen_synthetic(spec: SyntheticSpec) -> tuple[str, str]:
    """FASTA text and alignment-script text for a reference ``g1`` and mutated copies."""
    rng = numpy.random.default_rng(spec.seed)
    reference = bytes(rng.choice(list(DNA), size=spec.base_length).tolist())
    genomes = [("g1", reference)]
    scripts = [AlignmentScript("g1", (EditToken(EditKind.MATCH, len(reference)),))]
    for number in range(2, spec.genome_count + 1):
        script = _mutate(reference, f"g{number}", spec, rng)
        genomes.append((script.genome_id, apply_alignment(reference, script)))
        scripts.append(script)
    return format_fasta(genomes), format_scripts(scripts)
