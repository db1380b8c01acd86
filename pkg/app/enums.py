import enum


class Commands(str, enum.Enum):
    GEN = "gen", ["--out-prefix"], "Generate a synthetic aligned collection"
    BUILD_LZ = "build-lz", ["--fasta", "--M", "--out"], "Build the LZ77 hybrid index"
    BUILD_ALIBI = "build-alibi", ["--fasta", "--aln", "--M", "--out"], "Build the alignment-based index"
    QUERY = "query", ["--index"], "Report occurrences of patterns"
    STATS = "stats", ["--index"], "Print per-section sizes of an index"
    BENCH = "bench", [], "Run the index size and query time benchmark"
    PARSE = "parse", ["--fasta"], "Dump the LZ77 parse of a collection"
    EXTRACT = "extract", ["--index", "--genome", "--start", "--len"], "Extract a genome substring from an alignment index"

    def __new__(cls, value: str, args: list[str] = None, description: str = None):
        member = str.__new__(cls, value)
        member._value_ = value
        member._args_ = args or []
        member._description_ = description or value
        return member

    @property
    def args(self) -> list:
        return self._args_

    @property
    def description(self) -> str:
        return self._description_

    @property
    def display(self) -> str:
        args = " " + " ".join(self._args_) if self._args_ else ""
        return f"{self._value_}{args} - {self._description_}"


class PhraseKind(int, enum.Enum):
    LITERAL = enum.auto()
    COPY = enum.auto()

    @property
    def dump_tag(self) -> str:
        return "LIT" if self == PhraseKind.LITERAL else "CPY"


class EditKind(str, enum.Enum):
    MATCH = "=", False, True
    SUBST = "X", True, True
    INS = "I", True, False
    DEL = "D", False, True

    def __new__(cls, value: str, carries_bases: bool = False, consumes_reference: bool = True):
        member = str.__new__(cls, value)
        member._value_ = value
        member._carries_bases_ = carries_bases
        member._consumes_reference_ = consumes_reference
        return member

    @property
    def carries_bases(self) -> bool:
        return self._carries_bases_

    @property
    def consumes_reference(self) -> bool:
        return self._consumes_reference_

    @property
    def consumes_genome(self) -> bool:
        return self != EditKind.DEL


class IndexKind(int, enum.Enum):
    HYBRID = 1
    ALIBI = 2

    @property
    def label(self) -> str:
        return "lz77-hybrid" if self == IndexKind.HYBRID else "alibi"


class Section(str, enum.Enum):
    PARAMS = "PARM"
    GENOMES = "GNMS"
    KERNEL = "KRNL"
    CUTS = "CUTS"
    SELF_INDEX = "SIDX"
    GRID = "GRID"
    CATALOG = "CTLG"
    REGIONS = "RGNS"

    @property
    def tag(self) -> bytes:
        return self.value.encode("ascii")
