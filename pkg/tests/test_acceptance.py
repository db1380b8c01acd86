import pytest

from app.alibi import build_alibi
from app.entities import SyntheticSpec
from app.hybrid import build_hybrid
from app.sequences import concatenate, parse_fasta, parse_scripts
from app.testkit import gen_synthetic, naive_find_all


pytestmark = pytest.mark.slow

BASE_LENGTHS = (5000, 6000, 8000, 12000, 20000)
PATTERN_LENGTHS = (4, 8, 16, 32)


def collection_spec(seed: int) -> SyntheticSpec:
    """Seeded collections spread over 5-20 KB bases, 10-50 genomes and 0.1-1% SNPs."""
    base_length = BASE_LENGTHS[seed % len(BASE_LENGTHS)]
    most_genomes = max(10, min(50, 250_000 // base_length))
    return SyntheticSpec(
        base_length=base_length,
        genome_count=10 + (seed * 7) % (most_genomes - 9),
        snp_rate=round(0.001 + (seed // 5 % 4) * 0.003, 4),
        indel_rate=round((seed % 3) * 0.0005, 4),
        seed=seed,
    )


def as_matches(occurrences):
    return [(occurrence.global_start, occurrence.end, occurrence.edit_distance) for occurrence in occurrences]


def build_both(spec: SyntheticSpec, max_pattern_length: int, max_edits: int):
    fasta_text, scripts_text = gen_synthetic(spec)
    genomes = parse_fasta(fasta_text)
    text = concatenate(genomes)
    hybrid = build_hybrid(text, max_pattern_length, max_edits)
    alibi = build_alibi("g1", genomes, parse_scripts(scripts_text), max_pattern_length, max_edits)
    return text, hybrid, alibi


def check_pattern_against_oracle(text, hybrid, alibi, pattern: bytes, k: int) -> None:
    expected = naive_find_all(text.data, pattern, k)
    expansion = hybrid.expand(hybrid.find_primary(pattern, k))
    assert as_matches(expansion.occurrences) == expected
    assert expansion.repeats == 0
    assert expansion.steps == len(expansion.occurrences)
    alibi_matches = as_matches(alibi.find_all(pattern, k))
    assert alibi_matches == expected
    assert len({match[:2] for match in alibi_matches}) == len(alibi_matches)


def test_collection_specs_cover_the_requested_ranges():
    specs = [collection_spec(seed) for seed in range(20)]
    assert {spec.base_length for spec in specs} == set(BASE_LENGTHS)
    assert min(spec.genome_count for spec in specs) == 10
    assert max(spec.genome_count for spec in specs) >= 40
    assert all(0.001 <= spec.snp_rate <= 0.01 and spec.indel_rate <= 0.001 for spec in specs)


@pytest.mark.parametrize("seed", range(3))
def test_both_indexes_match_the_oracle_on_small_collections(seed, pattern_sampler):
    spec = SyntheticSpec(base_length=5000, genome_count=10, snp_rate=0.01, indel_rate=0.001, seed=seed)
    text, hybrid, alibi = build_both(spec, max_pattern_length=32, max_edits=1)
    for pattern in pattern_sampler(text.data, PATTERN_LENGTHS, 12, seed=seed):
        for k in (0, 1):
            check_pattern_against_oracle(text, hybrid, alibi, pattern, k)


@pytest.mark.parametrize("seed", range(20))
def test_both_indexes_match_the_oracle(seed, pattern_sampler):
    spec = collection_spec(seed)
    text, hybrid, alibi = build_both(spec, max_pattern_length=32, max_edits=1)
    for pattern in pattern_sampler(text.data, PATTERN_LENGTHS, 500, seed=seed):
        for k in (0, 1):
            check_pattern_against_oracle(text, hybrid, alibi, pattern, k)


def test_dedup_on_a_twenty_copy_collection(pattern_sampler):
    spec = SyntheticSpec(base_length=3000, genome_count=20, snp_rate=0.002, indel_rate=0.0002, seed=5)
    genomes = parse_fasta(gen_synthetic(spec)[0])
    text = concatenate(genomes)
    plain = build_hybrid(text, max_pattern_length=16, max_edits=0)
    deduped = build_hybrid(text, max_pattern_length=16, max_edits=0, dedup=True)
    if deduped.summary()["removed_segments"]:
        assert len(deduped.kernel.data) < len(plain.kernel.data)
    for pattern in pattern_sampler(text.data, (4, 8, 16), 200, seed=5):
        assert set(deduped.find_all(pattern)) == set(plain.find_all(pattern))
        assert plain.expand(plain.find_primary(pattern)).repeats == 0
