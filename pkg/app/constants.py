SEPARATOR = 0x23
SEPARATOR_BYTE = bytes([SEPARATOR])

DEFAULT_MAX_PATTERN_LENGTH = 100
DEFAULT_MAX_EDIT_DISTANCE = 0
DEFAULT_GAP_SAMPLE_RATE = 64
DEFAULT_LOCATE_SAMPLE_RATE = 32
RANK_BLOCK_SIZE = 64

CONTAINER_MAGIC = b"ALBI"
CONTAINER_VERSION = 1

BENCH_SIZES = (10, 20, 30, 40)
BENCH_BASE_LENGTH = 20_000
BENCH_SNP_RATE = 0.001
BENCH_INDEL_RATE = 0.0001
BENCH_MAX_PATTERN_LENGTH = 32
BENCH_PATTERN_LENGTH = 8
BENCH_QUERY_COUNT = 20
BENCH_MIN_OCCURRENCES = 50
