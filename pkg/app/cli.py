import argparse
import dataclasses
import os
import sys
import typing
from concurrent.futures import ThreadPoolExecutor

from app import lz77
from app.alibi import AlibiIndex, build_alibi
from app.bench import SIZE_COLUMNS, TIMING_COLUMNS, csv_records, run_benchmark, write_csv
from app.constants import (
    BENCH_BASE_LENGTH, BENCH_INDEL_RATE, BENCH_MAX_PATTERN_LENGTH, BENCH_SIZES, BENCH_SNP_RATE,
    DEFAULT_GAP_SAMPLE_RATE, DEFAULT_LOCATE_SAMPLE_RATE, DEFAULT_MAX_EDIT_DISTANCE
)
from app.entities import SyntheticSpec
from app.enums import Commands
from app.exceptions import AlibiError, ParameterError
from app.hybrid import build_hybrid
from app.logging import get_logger, setup_logging, verbosity_to_level
from app.repositories import IndexRepository
from app.sequences import concatenate, load_alignments, load_fasta
from app.testkit import gen_synthetic


@dataclasses.dataclass(frozen=True)
class CommandConfig:
    command: Commands
    verbosity: int = 0
    fasta: str | None = None
    aln: str | None = None
    reference_id: str | None = None
    index: str | None = None
    out: str | None = None
    max_pattern_length: int | None = None
    max_edits: int = DEFAULT_MAX_EDIT_DISTANCE
    dedup: bool = False
    include_reference: bool = True
    gap_sample_rate: int = DEFAULT_GAP_SAMPLE_RATE
    locate_sample_rate: int = DEFAULT_LOCATE_SAMPLE_RATE
    pattern: str | None = None
    patterns: str | None = None
    k: int = 0
    count: bool = False
    threads: int = 1
    spec: SyntheticSpec | None = None
    out_prefix: str | None = None
    sizes: tuple[int, ...] = BENCH_SIZES
    timings: str | None = None
    genome: str | None = None
    start: int | None = None
    length: int | None = None

    def __post_init__(self) -> None:
        if self.max_pattern_length is not None and self.max_pattern_length < 1:
            raise ParameterError(f"--M must be at least 1, got {self.max_pattern_length}")
        if self.max_edits < 0 or self.k < 0:
            raise ParameterError("--K and --k must be non-negative")
        if self.threads < 1:
            raise ParameterError(f"--threads must be positive, got {self.threads}")

    @classmethod
    def from_namespace(cls, namespace: argparse.Namespace) -> "CommandConfig":
        command = Commands(namespace.command)
        values = {field.name: getattr(namespace, field.name) for field in dataclasses.fields(cls)
                  if hasattr(namespace, field.name)}
        values["command"] = command
        if command in (Commands.GEN, Commands.BENCH):
            values["spec"] = SyntheticSpec(
                base_length=namespace.length_bases,
                genome_count=namespace.genomes,
                snp_rate=namespace.snp,
                indel_rate=namespace.indel,
                max_indel_len=namespace.max_indel_len,
                seed=namespace.seed,
            )
        if command == Commands.BENCH:
            values["sizes"] = _parse_sizes(namespace.sizes)
        return cls(**values)


def _parse_sizes(raw: str) -> tuple[int, ...]:
    try:
        sizes = tuple(int(part) for part in raw.split(",") if part.strip())
    except ValueError:
        raise ParameterError(f"--sizes expects comma-separated integers, got {raw!r}") from None
    if not sizes or min(sizes) < 1:
        raise ParameterError(f"--sizes expects positive integers, got {raw!r}")
    return sizes


def _flag(parser: argparse.ArgumentParser, command: Commands, flag: str, **kwargs) -> None:
    parser.add_argument(flag, required=flag in command.args, **kwargs)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="alibi",
        description="Hybrid LZ77 and alignment-based genome indexes",
        epilog="commands:\n" + "\n".join(f"  {command.display}" for command in Commands),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("-v", "--verbose", dest="verbosity", action="count", default=0,
                        help="-v for info logging, -vv for debug logging (standard error)")
    subparsers = parser.add_subparsers(dest="command", required=True)

    def subparser(command: Commands) -> argparse.ArgumentParser:
        return subparsers.add_parser(command.value, help=command.description, description=command.description)

    for command, defaults in ((Commands.GEN, SyntheticSpec()),
                              (Commands.BENCH, SyntheticSpec(BENCH_BASE_LENGTH, BENCH_SIZES[-1], BENCH_SNP_RATE,
                                                             BENCH_INDEL_RATE))):
        sub = subparser(command)
        _flag(sub, command, "--len", dest="length_bases", type=int, default=defaults.base_length)
        _flag(sub, command, "--genomes", type=int, default=defaults.genome_count)
        _flag(sub, command, "--snp", type=float, default=defaults.snp_rate)
        _flag(sub, command, "--indel", type=float, default=defaults.indel_rate)
        _flag(sub, command, "--max-indel-len", dest="max_indel_len", type=int, default=defaults.max_indel_len)
        _flag(sub, command, "--seed", type=int, default=defaults.seed)
        if command == Commands.GEN:
            _flag(sub, command, "--out-prefix", dest="out_prefix")
        else:
            _flag(sub, command, "--sizes", default=",".join(map(str, BENCH_SIZES)))
            _flag(sub, command, "--M", dest="max_pattern_length", type=int, default=BENCH_MAX_PATTERN_LENGTH)
            _flag(sub, command, "--K", dest="max_edits", type=int, default=DEFAULT_MAX_EDIT_DISTANCE)
            _flag(sub, command, "--out")
            _flag(sub, command, "--timings")

    for command in (Commands.BUILD_LZ, Commands.BUILD_ALIBI):
        sub = subparser(command)
        _flag(sub, command, "--fasta")
        _flag(sub, command, "--M", dest="max_pattern_length", type=int)
        _flag(sub, command, "--K", dest="max_edits", type=int, default=DEFAULT_MAX_EDIT_DISTANCE)
        _flag(sub, command, "--out")
        _flag(sub, command, "--gap-sample-rate", dest="gap_sample_rate", type=int, default=DEFAULT_GAP_SAMPLE_RATE)
        _flag(sub, command, "--locate-sample-rate", dest="locate_sample_rate", type=int,
              default=DEFAULT_LOCATE_SAMPLE_RATE)
        if command == Commands.BUILD_LZ:
            _flag(sub, command, "--dedup", action="store_true")
        else:
            _flag(sub, command, "--aln")
            _flag(sub, command, "--ref", dest="reference_id")
            sub.add_argument("--exclude-ref", dest="include_reference", action="store_false")

    sub = subparser(Commands.QUERY)
    _flag(sub, Commands.QUERY, "--index")
    source = sub.add_mutually_exclusive_group(required=True)
    source.add_argument("--pattern")
    source.add_argument("--patterns")
    _flag(sub, Commands.QUERY, "--k", type=int, default=0)
    _flag(sub, Commands.QUERY, "--count", action="store_true")
    _flag(sub, Commands.QUERY, "--threads", type=int, default=1)

    sub = subparser(Commands.STATS)
    _flag(sub, Commands.STATS, "--index")

    sub = subparser(Commands.PARSE)
    _flag(sub, Commands.PARSE, "--fasta")
    _flag(sub, Commands.PARSE, "--out")

    sub = subparser(Commands.EXTRACT)
    _flag(sub, Commands.EXTRACT, "--index")
    _flag(sub, Commands.EXTRACT, "--genome")
    _flag(sub, Commands.EXTRACT, "--start", type=int)
    _flag(sub, Commands.EXTRACT, "--len", dest="length", type=int)
    return parser


class Cli:

    def __init__(self, stdout: typing.TextIO | None = None, stderr: typing.TextIO | None = None) -> None:
        self._logger = get_logger("app.cli")
        self.__stdout = stdout or sys.stdout
        self.__stderr = stderr or sys.stderr
        self.__repository = IndexRepository()
        self.__commands: dict[Commands, typing.Callable[[CommandConfig], int]] = {
            Commands.GEN: self.__execute_gen_command,
            Commands.BUILD_LZ: self.__execute_build_lz_command,
            Commands.BUILD_ALIBI: self.__execute_build_alibi_command,
            Commands.QUERY: self.__execute_query_command,
            Commands.STATS: self.__execute_stats_command,
            Commands.BENCH: self.__execute_bench_command,
            Commands.PARSE: self.__execute_parse_command,
            Commands.EXTRACT: self.__execute_extract_command,
        }

    def run(self, argv: list[str] | None = None) -> int:
        try:
            namespace = build_parser().parse_args(argv)
        except SystemExit as error:
            return int(error.code or 0)
        setup_logging(verbosity_to_level(namespace.verbosity))

        try:
            config = CommandConfig.from_namespace(namespace)
            handler = self.__commands[config.command]
            self._logger.debug("Handler received for the command", handler=handler.__name__, command=config.command)
            return handler(config)
        except ParameterError as error:
            return self.__fail(namespace.command, error, 2)
        except (AlibiError, OSError) as error:
            return self.__fail(namespace.command, error, 1)

    def __fail(self, command: str, error: Exception, status: int) -> int:
        self._logger.error("Command failed.", command=command, error_type=type(error).__name__)
        print(f"alibi {command}: error: {error}", file=self.__stderr)
        return status

    def __emit(self, line: str = "") -> None:
        print(line, file=self.__stdout)

    def __emit_summary(self, summary: dict[str, typing.Any]) -> None:
        for key, value in summary.items():
            self.__emit(f"{key}={value}")

    def __execute_gen_command(self, config: CommandConfig) -> int:
        fasta_text, scripts_text = gen_synthetic(config.spec)
        fasta_path, aln_path = f"{config.out_prefix}.fa", f"{config.out_prefix}.aln"
        with open(fasta_path, "w", encoding="ascii") as fasta_file:
            fasta_file.write(fasta_text)
        with open(aln_path, "w", encoding="ascii") as aln_file:
            aln_file.write(scripts_text)
        self.__emit_summary({"fasta": fasta_path, "alignments": aln_path, "genomes": config.spec.genome_count})
        return 0

    def __execute_build_lz_command(self, config: CommandConfig) -> int:
        text = concatenate(load_fasta(config.fasta))
        index = build_hybrid(text, config.max_pattern_length, config.max_edits, dedup=config.dedup,
                             gap_sample_rate=config.gap_sample_rate, locate_sample_rate=config.locate_sample_rate)
        size = self.__repository.save(index, config.out)
        self.__emit_summary(index.summary() | {"file_bytes": size})
        return 0

    def __execute_build_alibi_command(self, config: CommandConfig) -> int:
        genomes = load_fasta(config.fasta)
        scripts = load_alignments(config.aln)
        reference_id = config.reference_id or (genomes[0][0] if genomes else "")
        index = build_alibi(reference_id, genomes, scripts, config.max_pattern_length, config.max_edits,
                            include_reference=config.include_reference, gap_sample_rate=config.gap_sample_rate,
                            locate_sample_rate=config.locate_sample_rate)
        size = self.__repository.save(index, config.out)
        for substring in index.marked_substrings():
            self._logger.info("Marked substring.", content=substring.decode("latin-1"))
        self.__emit_summary(index.summary() | {"file_bytes": size})
        return 0

    def __read_patterns(self, config: CommandConfig) -> list[bytes]:
        if config.pattern is not None:
            raw = [config.pattern]
        else:
            with open(config.patterns, encoding="latin-1") as pattern_file:
                raw = [line.strip() for line in pattern_file]
        return [pattern.encode("latin-1").upper() for pattern in raw if pattern]

    def __execute_query_command(self, config: CommandConfig) -> int:
        index = self.__repository.load(config.index)
        patterns = self.__read_patterns(config)

        def query(pattern: bytes) -> list:
            return index.find_all(pattern, config.k)

        if config.threads > 1:
            with ThreadPoolExecutor(max_workers=config.threads) as executor:
                results = list(executor.map(query, patterns))
        else:
            results = [query(pattern) for pattern in patterns]

        for pattern, occurrences in zip(patterns, results):
            if config.count:
                self.__emit(f"{pattern.decode('latin-1')}\t{len(occurrences)}")
                continue
            for occurrence in occurrences:
                genome_id, local_start = index.project(occurrence)
                self.__emit(f"{genome_id}\t{local_start}\t{occurrence.length}\t{occurrence.edit_distance}")
        self._logger.info("Answered queries.", patterns=len(patterns),
                          occurrences=sum(len(occurrences) for occurrences in results))
        return 0

    def __execute_stats_command(self, config: CommandConfig) -> int:
        kind, sizes = self.__repository.section_sizes(config.index)
        index = self.__repository.load(config.index)
        self.__emit(f"kind={kind.label}")
        for section, size in sizes.items():
            self.__emit(f"section.{section.value}={size}")
        self.__emit(f"sections_total={sum(sizes.values())}")
        self.__emit(f"file_bytes={os.path.getsize(config.index)}")
        self.__emit_summary(index.summary())
        return 0

    def __execute_bench_command(self, config: CommandConfig) -> int:
        rows = run_benchmark(config.spec, config.sizes, config.max_pattern_length, config.max_edits)
        if config.out:
            write_csv(rows, config.out)
        else:
            self.__emit(",".join(SIZE_COLUMNS))
            for record in csv_records(rows):
                self.__emit(",".join(map(str, record)))
        if config.timings:
            write_csv(rows, config.timings, TIMING_COLUMNS)
        return 0

    def __execute_parse_command(self, config: CommandConfig) -> int:
        dump = lz77.dump_parse(lz77.parse(concatenate(load_fasta(config.fasta))))
        if config.out:
            with open(config.out, "w", encoding="latin-1") as dump_file:
                dump_file.write(dump)
        else:
            self.__stdout.write(dump)
        return 0

    def __execute_extract_command(self, config: CommandConfig) -> int:
        index = self.__repository.load(config.index)
        if not isinstance(index, AlibiIndex):
            raise ParameterError(f"extract needs an alignment index, {config.index} is {index.kind.label}")
        self.__emit(index.extract(config.genome, config.start, config.length).decode("latin-1"))
        return 0


def main(argv: list[str] | None = None) -> int:
    return Cli().run(argv)


def main_exit() -> None:
    setup_logging()
    sys.exit(main())
