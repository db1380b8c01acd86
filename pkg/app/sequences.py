"""FASTA and alignment-script ingestion, and the concatenated text T."""
import os
import re

from app.constants import SEPARATOR, SEPARATOR_BYTE
from app.entities import AlignmentScript, ConcatenatedText, EditToken, GenomeLayout, GenomeSpan
from app.enums import EditKind
from app.exceptions import EmptyCollectionError, FastaParseError, ReservedByteError, ScriptError
from app.logging import get_logger


_logger = get_logger("sequences")

_TOKEN_RE = re.compile(r"^(\d+)([=XID])([A-Za-z]*)$")

Genome = tuple[str, bytes]


def parse_fasta(text: str | bytes) -> list[Genome]:
    if isinstance(text, str):
        text = text.encode("latin-1")
    genomes: list[Genome] = []
    genome_id: str | None = None
    parts: list[bytes] = []

    def flush() -> None:
        if genome_id is not None:
            genomes.append((genome_id, b"".join(parts)))

    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith(b">"):
            flush()
            fields = line[1:].decode("latin-1").split()
            if not fields:
                raise FastaParseError("header without an identifier", line_number)
            genome_id, parts = fields[0], []
            continue
        if genome_id is None:
            raise FastaParseError("sequence line before the first header", line_number)
        chunk = line.upper()
        if SEPARATOR in chunk:
            raise ReservedByteError(f"FASTA sequence line {line_number}", chunk.index(SEPARATOR) + 1)
        parts.append(chunk)
    flush()
    return genomes


def load_fasta(path: str | os.PathLike) -> list[Genome]:
    with open(path, "rb") as fasta_file:
        genomes = parse_fasta(fasta_file.read())
    _logger.info("Loaded FASTA.", path=str(path), genomes=len(genomes))
    return genomes


def format_fasta(genomes: list[Genome], width: int = 60) -> str:
    lines: list[str] = []
    for genome_id, sequence in genomes:
        lines.append(f">{genome_id}")
        text = sequence.decode("ascii")
        lines.extend(text[i:i + width] for i in range(0, len(text), width))
    return "\n".join(lines) + "\n"


def concatenate(genomes: list[Genome]) -> ConcatenatedText:
    if not genomes:
        raise EmptyCollectionError("cannot concatenate an empty collection")
    spans: list[GenomeSpan] = []
    position = 1
    for genome_id, sequence in genomes:
        if SEPARATOR in sequence:
            raise ReservedByteError(f"genome {genome_id}", sequence.index(SEPARATOR) + 1)
        spans.append(GenomeSpan(genome_id=genome_id, start=position, length=len(sequence)))
        position += len(sequence) + 1
    data = SEPARATOR_BYTE.join(sequence for _, sequence in genomes)
    return ConcatenatedText(data=data, layout=GenomeLayout(spans=tuple(spans)))


def project(text: ConcatenatedText, global_start: int, length: int) -> tuple[str, int]:
    return text.layout.project(global_start, length)


def inverse_project(text: ConcatenatedText, genome_id: str, local_start: int) -> int:
    return text.layout.to_global(genome_id, local_start)


def parse_script_line(line: str, line_number: int = 0) -> AlignmentScript:
    genome_id, sep, body = line.rstrip("\n").partition("\t")
    if not sep or not genome_id.strip():
        raise ScriptError(f"line {line_number}: expected 'genome_id<TAB>tokens'")
    tokens: list[EditToken] = []
    for raw_token in body.split():
        match = _TOKEN_RE.match(raw_token)
        if match is None:
            raise ScriptError(f"line {line_number}: malformed token {raw_token!r}")
        length, kind, bases = int(match.group(1)), EditKind(match.group(2)), match.group(3).encode("ascii")
        if length < 1:
            raise ScriptError(f"line {line_number}: token {raw_token!r} has zero length")
        if kind.carries_bases and len(bases) != length:
            raise ScriptError(f"line {line_number}: token {raw_token!r} carries {len(bases)} bases, expected {length}")
        if not kind.carries_bases and bases:
            raise ScriptError(f"line {line_number}: token {raw_token!r} must not carry bases")
        if SEPARATOR in bases:
            raise ReservedByteError(f"alignment token {raw_token!r}")
        tokens.append(EditToken(kind=kind, length=length, bases=bases))
    return AlignmentScript(genome_id=genome_id.strip(), tokens=tuple(tokens))


def parse_scripts(text: str) -> dict[str, AlignmentScript]:
    scripts: dict[str, AlignmentScript] = {}
    for line_number, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        script = parse_script_line(line, line_number)
        if script.genome_id in scripts:
            raise ScriptError(f"line {line_number}: duplicate alignment for genome {script.genome_id!r}")
        scripts[script.genome_id] = script
    return scripts


def load_alignments(path: str | os.PathLike) -> dict[str, AlignmentScript]:
    with open(path, encoding="ascii") as alignment_file:
        scripts = parse_scripts(alignment_file.read())
    _logger.info("Loaded alignment scripts.", path=str(path), scripts=len(scripts))
    return scripts


def format_scripts(scripts: list[AlignmentScript]) -> str:
    return "".join(script.display + "\n" for script in scripts)


def apply_alignment(reference: bytes, script: AlignmentScript) -> bytes:
    if script.reference_length != len(reference):
        raise ScriptError(
            f"script for {script.genome_id!r} covers {script.reference_length} reference bases, "
            f"reference has {len(reference)}"
        )
    pieces: list[bytes] = []
    cursor = 0
    for token in script.tokens:
        match token.kind:
            case EditKind.MATCH:
                pieces.append(reference[cursor:cursor + token.length])
            case EditKind.SUBST | EditKind.INS:
                pieces.append(token.bases)
        if token.kind.consumes_reference:
            cursor += token.length
    return b"".join(pieces)
