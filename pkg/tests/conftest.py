import random

import pytest

from app.entities import ConcatenatedText, SyntheticSpec
from app.sequences import concatenate, parse_fasta, parse_script_line, parse_scripts
from app.testkit import gen_synthetic


SAMPLE_TEXT = b"abaabab"

FRAGMENT_REFERENCE = b"GATACATTGAATCAATCGACGGTTATGACGGCATATCGCCACATGATA"
FRAGMENT_GENOME = b"GATACATTGACACATCAATCGACGGTTTTGACGGCATACCACATGATA"
FRAGMENT_SCRIPT = "g2\t10= 3ICAC 14= 1XT 10= 3D 10="

SMALL_SPEC = SyntheticSpec(base_length=400, genome_count=6, snp_rate=0.01, indel_rate=0.004, max_indel_len=3, seed=7)


@pytest.fixture
def running_text() -> ConcatenatedText:
    return concatenate([("g1", SAMPLE_TEXT)])


@pytest.fixture
def fragment_script():
    return parse_script_line(FRAGMENT_SCRIPT)


@pytest.fixture
def fragment_genomes() -> list[tuple[str, bytes]]:
    return [("ref", FRAGMENT_REFERENCE), ("g2", FRAGMENT_GENOME)]


@pytest.fixture
def fragment_scripts(fragment_script) -> dict:
    return {"g2": fragment_script}


@pytest.fixture(scope="session")
def small_collection() -> tuple[list[tuple[str, bytes]], dict]:
    fasta_text, scripts_text = gen_synthetic(SMALL_SPEC)
    return parse_fasta(fasta_text), parse_scripts(scripts_text)


def sample_patterns(text: bytes, lengths: tuple[int, ...], count: int, seed: int) -> list[bytes]:
    """Substrings of ``text`` (mostly) and a few random strings, none containing '#'."""
    rng = random.Random(seed)
    alphabet = sorted(set(text) - {ord("#")})
    patterns = []
    while len(patterns) < count:
        length = rng.choice(lengths)
        if rng.random() < 0.8:
            start = rng.randrange(0, len(text) - length + 1)
            pattern = text[start:start + length]
            if b"#" in pattern:
                continue
        else:
            pattern = bytes(rng.choice(alphabet) for _ in range(length))
        patterns.append(pattern)
    return patterns


@pytest.fixture
def pattern_sampler():
    return sample_patterns
