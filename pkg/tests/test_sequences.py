import pytest

from app.entities import AlignmentScript, EditToken
from app.enums import EditKind
from app.exceptions import (
    EmptyCollectionError, FastaParseError, ProjectionError, ReservedByteError, ScriptError
)
from app.sequences import (
    apply_alignment, concatenate, format_fasta, format_scripts, inverse_project, load_alignments, load_fasta,
    parse_fasta, parse_script_line, parse_scripts, project
)
from tests.conftest import FRAGMENT_GENOME, FRAGMENT_REFERENCE, FRAGMENT_SCRIPT


def test_parse_fasta_joins_lines_and_uppercases():
    genomes = parse_fasta(">g1 first genome\nacgt\nAC\n\n>g2\nTT\n")
    assert genomes == [("g1", b"ACGTAC"), ("g2", b"TT")]


@pytest.mark.parametrize("text, line_number", [
    ("ACGT\n>g1\nAC\n", 1),
    (">g1\nAC\n>\nAC\n", 3),
])
def test_parse_fasta_rejects_malformed_input(text, line_number):
    with pytest.raises(FastaParseError) as error:
        parse_fasta(text)
    assert error.value.line_number == line_number


def test_parse_fasta_rejects_separator():
    with pytest.raises(ReservedByteError):
        parse_fasta(">g1\nAC#T\n")


def test_format_fasta_wraps_lines():
    text = format_fasta([("g1", b"ACGTACGT")], width=3)
    assert text == ">g1\nACG\nTAC\nGT\n"
    assert parse_fasta(text) == [("g1", b"ACGTACGT")]


def test_load_fasta(tmp_path):
    path = tmp_path / "collection.fa"
    path.write_text(">a\nAC\n>b\nGT\n")
    assert load_fasta(path) == [("a", b"AC"), ("b", b"GT")]


def test_concatenate_places_separators():
    text = concatenate([("a", b"ACG"), ("b", b"T"), ("c", b"GG")])
    assert text.data == b"ACG#T#GG"
    assert text.n == 8
    assert [(span.genome_id, span.start, span.length) for span in text.layout.spans] == [
        ("a", 1, 3), ("b", 5, 1), ("c", 7, 2)
    ]
    assert text.genome("c") == b"GG"


def test_concatenate_rejects_empty_collection_and_separator():
    with pytest.raises(EmptyCollectionError):
        concatenate([])
    with pytest.raises(ReservedByteError):
        concatenate([("a", b"A#C")])


def test_project_and_inverse_project():
    text = concatenate([("a", b"ACG"), ("b", b"TTTT")])
    assert project(text, 1, 3) == ("a", 1)
    assert project(text, 6, 2) == ("b", 2)
    assert inverse_project(text, "b", 2) == 6
    assert inverse_project(text, "a", 3) == 3


@pytest.mark.parametrize("start, length", [(3, 2), (4, 1), (0, 1), (8, 2)])
def test_project_rejects_intervals_off_one_genome(start, length):
    text = concatenate([("a", b"ACG"), ("b", b"TTTT")])
    with pytest.raises(ProjectionError):
        project(text, start, length)


def test_inverse_project_rejects_unknown_genome_and_position():
    text = concatenate([("a", b"ACG")])
    with pytest.raises(ProjectionError):
        inverse_project(text, "z", 1)
    with pytest.raises(ProjectionError):
        inverse_project(text, "a", 4)


def test_parse_script_line():
    script = parse_script_line(FRAGMENT_SCRIPT)
    assert script.genome_id == "g2"
    assert [token.kind for token in script.tokens] == [
        EditKind.MATCH, EditKind.INS, EditKind.MATCH, EditKind.SUBST, EditKind.MATCH, EditKind.DEL, EditKind.MATCH
    ]
    assert script.tokens[1].bases == b"CAC"
    assert script.reference_length == len(FRAGMENT_REFERENCE)
    assert script.genome_length == len(FRAGMENT_GENOME)
    assert script.display == FRAGMENT_SCRIPT


def test_apply_alignment_reproduces_fragment(fragment_script):
    assert apply_alignment(FRAGMENT_REFERENCE, fragment_script) == FRAGMENT_GENOME


def test_apply_alignment_rejects_wrong_reference_length(fragment_script):
    with pytest.raises(ScriptError):
        apply_alignment(FRAGMENT_REFERENCE[:-1], fragment_script)


@pytest.mark.parametrize("line", [
    "g2 10=",
    "g2\t10Q",
    "g2\t0=",
    "g2\t2XA",
    "g2\t2=AC",
    "\t10=",
])
def test_parse_script_line_rejects_malformed_tokens(line):
    with pytest.raises(ScriptError):
        parse_script_line(line)


def test_parse_scripts_rejects_duplicates():
    with pytest.raises(ScriptError):
        parse_scripts("g2\t4=\ng2\t4=\n")


def test_scripts_text_round_trip(tmp_path):
    scripts = [
        AlignmentScript("g1", (EditToken(EditKind.MATCH, 4),)),
        AlignmentScript("g2", (EditToken(EditKind.MATCH, 2), EditToken(EditKind.SUBST, 1, b"A"),
                               EditToken(EditKind.DEL, 1))),
    ]
    path = tmp_path / "collection.aln"
    path.write_text(format_scripts(scripts))
    assert list(load_alignments(path).values()) == scripts
