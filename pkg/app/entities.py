import bisect
import dataclasses
import functools

from app.codec import ByteReader, ByteWriter
from app.constants import SEPARATOR
from app.enums import EditKind, PhraseKind
from app.exceptions import ParameterError, ProjectionError


@dataclasses.dataclass(frozen=True)
class GenomeSpan:
    genome_id: str
    start: int
    length: int

    @property
    def end(self) -> int:
        return self.start + self.length - 1


@dataclasses.dataclass(frozen=True)
class GenomeLayout:
    """Where each genome sits inside the concatenated text (1-based, inclusive)."""
    spans: tuple[GenomeSpan, ...]

    @property
    def n(self) -> int:
        return self.spans[-1].end if self.spans else 0

    @functools.cached_property
    def _starts(self) -> list[int]:
        return [span.start for span in self.spans]

    @functools.cached_property
    def _by_id(self) -> dict[str, GenomeSpan]:
        return {span.genome_id: span for span in self.spans}

    def span_of(self, genome_id: str) -> GenomeSpan:
        try:
            return self._by_id[genome_id]
        except KeyError:
            raise ProjectionError(f"unknown genome {genome_id!r}") from None

    def project(self, global_start: int, length: int) -> tuple[str, int]:
        if length < 1 or global_start < 1 or global_start + length - 1 > self.n:
            raise ProjectionError(f"interval [{global_start}, {global_start + length - 1}] is outside the text")
        slot = bisect.bisect_right(self._starts, global_start) - 1
        span = self.spans[slot] if slot >= 0 else None
        if span is None or global_start + length - 1 > span.end:
            raise ProjectionError(f"interval [{global_start}, {global_start + length - 1}] crosses a separator")
        return span.genome_id, global_start - span.start + 1

    def to_global(self, genome_id: str, local_start: int) -> int:
        span = self.span_of(genome_id)
        if not 1 <= local_start <= span.length:
            raise ProjectionError(f"position {local_start} is outside genome {genome_id!r}")
        return span.start + local_start - 1

    def write(self, writer: ByteWriter) -> None:
        writer.u64(len(self.spans))
        for span in self.spans:
            writer.text(span.genome_id)
            writer.u64(span.start)
            writer.u64(span.length)

    @classmethod
    def read(cls, reader: ByteReader) -> "GenomeLayout":
        spans = []
        for _ in range(reader.u64()):
            genome_id = reader.text()
            start = reader.u64()
            spans.append(GenomeSpan(genome_id=genome_id, start=start, length=reader.u64()))
        return cls(spans=tuple(spans))


@dataclasses.dataclass(frozen=True)
class ConcatenatedText:
    data: bytes
    layout: GenomeLayout
    separator: int = SEPARATOR

    @property
    def n(self) -> int:
        return len(self.data)

    def genome(self, genome_id: str) -> bytes:
        span = self.layout.span_of(genome_id)
        return self.data[span.start - 1:span.end]

    def project(self, global_start: int, length: int) -> tuple[str, int]:
        return self.layout.project(global_start, length)


@dataclasses.dataclass(frozen=True)
class EditToken:
    kind: EditKind
    length: int
    bases: bytes = b""

    @property
    def display(self) -> str:
        return f"{self.length}{self.kind.value}{self.bases.decode('ascii')}"


@dataclasses.dataclass(frozen=True)
class AlignmentScript:
    genome_id: str
    tokens: tuple[EditToken, ...]

    @property
    def reference_length(self) -> int:
        return sum(token.length for token in self.tokens if token.kind.consumes_reference)

    @property
    def genome_length(self) -> int:
        return sum(token.length for token in self.tokens if token.kind.consumes_genome)

    @property
    def display(self) -> str:
        return f"{self.genome_id}\t" + " ".join(token.display for token in self.tokens)


@dataclasses.dataclass(frozen=True, order=True)
class Occurrence:
    global_start: int
    length: int
    edit_distance: int = 0

    @property
    def end(self) -> int:
        return self.global_start + self.length - 1

    @property
    def interval(self) -> tuple[int, int]:
        return self.global_start, self.end


@dataclasses.dataclass(frozen=True)
class Phrase:
    start: int
    length: int
    kind: PhraseKind
    literal: int | None = None
    source: int | None = None

    @classmethod
    def make_literal(cls, start: int, byte: int) -> "Phrase":
        return cls(start=start, length=1, kind=PhraseKind.LITERAL, literal=byte)

    @classmethod
    def make_copy(cls, start: int, length: int, source: int) -> "Phrase":
        return cls(start=start, length=length, kind=PhraseKind.COPY, source=source)

    @property
    def end(self) -> int:
        return self.start + self.length - 1

    @property
    def is_copy(self) -> bool:
        return self.kind == PhraseKind.COPY

    @property
    def display(self) -> str:
        value = self.source if self.is_copy else chr(self.literal)
        return f"{self.start}\t{self.length}\t{self.kind.dump_tag} {value}"


@dataclasses.dataclass(frozen=True)
class Lz77Parse:
    phrases: tuple[Phrase, ...]
    dummies: tuple[Phrase, ...] = ()

    @property
    def z(self) -> int:
        return len(self.phrases)

    @property
    def n(self) -> int:
        return self.phrases[-1].end if self.phrases else 0

    @functools.cached_property
    def cuts(self) -> list[int]:
        return [phrase.end for phrase in self.phrases[:-1]]

    @property
    def literals(self) -> list[Phrase]:
        return [phrase for phrase in self.phrases if not phrase.is_copy]


@dataclasses.dataclass(frozen=True)
class SyntheticSpec:
    base_length: int = 5000
    genome_count: int = 10
    snp_rate: float = 0.005
    indel_rate: float = 0.0005
    max_indel_len: int = 5
    seed: int = 42

    def __post_init__(self) -> None:
        if self.base_length < 1 or self.genome_count < 1:
            raise ParameterError("base_length and genome_count must be positive")
        for name in ("snp_rate", "indel_rate"):
            rate = getattr(self, name)
            if not 0.0 <= rate <= 1.0:
                raise ParameterError(f"{name} must lie in [0, 1], got {rate}")
        if self.max_indel_len < 1:
            raise ParameterError("max_indel_len must be positive")
