"""Index size and query time over a growing synthetic collection."""
import csv
import dataclasses
import os
import time

import numpy

from app.alibi import build_alibi
from app.codec import ByteWriter
from app.constants import (
    BENCH_MAX_PATTERN_LENGTH, BENCH_MIN_OCCURRENCES, BENCH_PATTERN_LENGTH, BENCH_QUERY_COUNT, BENCH_SIZES,
    DEFAULT_MAX_EDIT_DISTANCE, SEPARATOR
)
from app.entities import ConcatenatedText, SyntheticSpec
from app.hybrid import HybridIndex, build_hybrid
from app.logging import get_logger
from app.selfindex import SelfIndex
from app.sequences import concatenate, parse_fasta, parse_scripts
from app.testkit import gen_synthetic


_logger = get_logger("bench")

SIZE_COLUMNS = ("collection_size", "baseline_index_bytes", "hybrid_bytes", "alibi_bytes")
TIMING_COLUMNS = ("collection_size", "mean_query_time_per_occurrence", "baseline_query_time_per_occurrence")


@dataclasses.dataclass(frozen=True)
class BenchRow:
    collection_size: int
    baseline_index_bytes: int
    hybrid_bytes: int
    alibi_bytes: int
    mean_query_time_per_occurrence: float
    baseline_query_time_per_occurrence: float


def serialized_size(index) -> int:
    if isinstance(index, SelfIndex):
        writer = ByteWriter()
        index.write(writer)
        return len(writer.getvalue())
    return sum(len(payload) for payload in index.to_sections().values())


def sample_patterns(text: ConcatenatedText, length: int, count: int, seed: int) -> list[bytes]:
    rng = numpy.random.default_rng(seed)
    patterns: list[bytes] = []
    for _ in range(count * 20):
        if len(patterns) == count:
            break
        start = int(rng.integers(0, text.n - length + 1))
        pattern = text.data[start:start + length]
        if SEPARATOR not in pattern:
            patterns.append(pattern)
    return patterns


def time_per_occurrence(query, patterns: list[bytes]) -> float:
    occurrences = 0
    started = time.perf_counter()
    for pattern in patterns:
        occurrences += len(query(pattern))
    elapsed = time.perf_counter() - started
    return elapsed / occurrences if occurrences else 0.0


def measure(spec: SyntheticSpec, max_pattern_length: int = BENCH_MAX_PATTERN_LENGTH,
            max_edits: int = DEFAULT_MAX_EDIT_DISTANCE, pattern_length: int = BENCH_PATTERN_LENGTH,
            query_count: int = BENCH_QUERY_COUNT) -> BenchRow:
    fasta_text, scripts_text = gen_synthetic(spec)
    genomes = parse_fasta(fasta_text)
    scripts = parse_scripts(scripts_text)
    text = concatenate(genomes)

    baseline = SelfIndex.build(text.data)
    hybrid: HybridIndex = build_hybrid(text, max_pattern_length, max_edits)
    alibi = build_alibi(genomes[0][0], genomes, scripts, max_pattern_length, max_edits)

    patterns = sample_patterns(text, min(pattern_length, max_pattern_length), query_count, spec.seed)
    frequent = [pattern for pattern in patterns if baseline.count(pattern) >= BENCH_MIN_OCCURRENCES]
    patterns = frequent or patterns
    row = BenchRow(
        collection_size=spec.genome_count,
        baseline_index_bytes=serialized_size(baseline),
        hybrid_bytes=serialized_size(hybrid),
        alibi_bytes=serialized_size(alibi),
        mean_query_time_per_occurrence=time_per_occurrence(hybrid.find_all, patterns),
        baseline_query_time_per_occurrence=time_per_occurrence(baseline.locate, patterns),
    )
    _logger.info("Measured collection.", **dataclasses.asdict(row))
    if row.mean_query_time_per_occurrence > row.baseline_query_time_per_occurrence:
        _logger.warning(
            "Hybrid index is slower per occurrence than the baseline self-index.",
            collection_size=row.collection_size,
            hybrid=row.mean_query_time_per_occurrence,
            baseline=row.baseline_query_time_per_occurrence
        )
    return row


def run_benchmark(spec: SyntheticSpec, sizes: tuple[int, ...] = BENCH_SIZES,
                  max_pattern_length: int = BENCH_MAX_PATTERN_LENGTH,
                  max_edits: int = DEFAULT_MAX_EDIT_DISTANCE) -> list[BenchRow]:
    return [measure(dataclasses.replace(spec, genome_count=size), max_pattern_length, max_edits) for size in sizes]


def csv_records(rows: list[BenchRow], columns: tuple[str, ...] = SIZE_COLUMNS) -> list[tuple]:
    return [tuple(getattr(row, column) for column in columns) for row in rows]


def write_csv(rows: list[BenchRow], path: str | os.PathLike, columns: tuple[str, ...] = SIZE_COLUMNS) -> None:
    """One header row of ``columns``, then one record per collection size."""
    with open(path, "w", newline="") as csv_file:
        writer = csv.writer(csv_file)
        writer.writerow(columns)
        writer.writerows(csv_records(rows, columns))
