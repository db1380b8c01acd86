import pytest

from app.entities import SyntheticSpec
from app.enums import EditKind
from app.exceptions import ParameterError
from app.sequences import apply_alignment, parse_fasta, parse_scripts
from app.testkit import gen_synthetic, naive_covering_sources, naive_find_all


def test_naive_find_all_exact():
    assert naive_find_all(b"abaabab", b"ab", 0) == [(1, 2, 0), (4, 5, 0), (6, 7, 0)]
    assert naive_find_all(b"aaaa", b"aa", 0) == [(1, 2, 0), (2, 3, 0), (3, 4, 0)]


def test_naive_find_all_with_edits():
    assert naive_find_all(b"AC#GT", b"AG", 1) == [(1, 1, 1), (1, 2, 1), (4, 4, 1)]


def test_naive_find_all_reports_minimal_distance():
    matches = naive_find_all(b"ACGT", b"ACT", 2)
    assert (1, 4, 1) in matches
    assert (1, 2, 1) in matches
    assert (1, 3, 1) in matches


def test_naive_covering_sources():
    sources = [(1, 3), (2, 2), (2, 9)]
    assert naive_covering_sources(sources, 2, 3) == [(1, 3), (2, 9)]
    assert naive_covering_sources(sources, 4, 4) == [(2, 9)]


def test_gen_synthetic_scripts_reproduce_genomes():
    spec = SyntheticSpec(base_length=300, genome_count=5, snp_rate=0.02, indel_rate=0.01, max_indel_len=4, seed=1)
    fasta_text, scripts_text = gen_synthetic(spec)
    genomes = parse_fasta(fasta_text)
    scripts = parse_scripts(scripts_text)
    assert [genome_id for genome_id, _ in genomes] == ["g1", "g2", "g3", "g4", "g5"]
    reference = genomes[0][1]
    assert len(reference) == 300
    assert set(reference) <= set(b"ACGT")
    for genome_id, sequence in genomes:
        script = scripts[genome_id]
        assert apply_alignment(reference, script) == sequence
        kinds = [token.kind for token in script.tokens]
        assert all(first != second for first, second in zip(kinds, kinds[1:]))
        for token in script.tokens:
            if token.kind in (EditKind.INS, EditKind.DEL):
                assert token.length <= 4 or token.kind == EditKind.DEL


def test_gen_synthetic_is_deterministic():
    spec = SyntheticSpec(base_length=100, genome_count=3, seed=9)
    assert gen_synthetic(spec) == gen_synthetic(spec)
    assert gen_synthetic(spec) != gen_synthetic(SyntheticSpec(base_length=100, genome_count=3, seed=10))


@pytest.mark.parametrize("kwargs", [
    {"base_length": 0},
    {"genome_count": 0},
    {"snp_rate": 1.5},
    {"indel_rate": -0.1},
    {"max_indel_len": 0},
])
def test_synthetic_spec_validation(kwargs):
    with pytest.raises(ParameterError):
        SyntheticSpec(**kwargs)
