import itertools
import struct

import pytest

from app.alibi import AlibiIndex, build_alibi
from app.enums import IndexKind, Section
from app.exceptions import FormatError
from app.hybrid import HybridIndex, build_hybrid
from app.repositories import IndexRepository


def every_pattern(alphabet: bytes, max_length: int) -> list[bytes]:
    return [bytes(letters) for length in range(1, max_length + 1)
            for letters in itertools.product(alphabet, repeat=length)]


@pytest.fixture
def repository() -> IndexRepository:
    return IndexRepository()


@pytest.fixture
def hybrid_index(running_text) -> HybridIndex:
    return build_hybrid(running_text, max_pattern_length=2, max_edits=0)


@pytest.fixture
def alibi_index(fragment_genomes, fragment_scripts) -> AlibiIndex:
    return build_alibi("ref", fragment_genomes, fragment_scripts, max_pattern_length=2, max_edits=1)


def test_hybrid_round_trip(repository, hybrid_index, tmp_path):
    path = tmp_path / "running.idx"
    size = repository.save(hybrid_index, path)
    assert size == path.stat().st_size
    restored = repository.load(path)
    assert isinstance(restored, HybridIndex)
    for pattern in every_pattern(b"ab", 2):
        assert restored.find_all(pattern) == hybrid_index.find_all(pattern)
    assert restored.summary() == hybrid_index.summary()


def test_alibi_round_trip(repository, alibi_index, tmp_path):
    path = tmp_path / "fragment.idx"
    repository.save(alibi_index, path)
    restored = repository.load(path)
    assert isinstance(restored, AlibiIndex)
    for pattern in every_pattern(b"ACGT", 2):
        for k in (0, 1):
            assert restored.find_all(pattern, k) == alibi_index.find_all(pattern, k)
    assert restored.marked_substrings() == [b"GACACAT", b"TTTTG", b"TACC"]


def test_section_sizes_account_for_the_whole_file(repository, alibi_index, tmp_path):
    path = tmp_path / "fragment.idx"
    size = repository.save(alibi_index, path)
    kind, sizes = repository.section_sizes(path)
    assert kind == IndexKind.ALIBI
    assert list(sizes) == [Section.PARAMS, Section.GENOMES, Section.SELF_INDEX, Section.CATALOG, Section.REGIONS]
    assert size == 9 + 12 * len(sizes) + sum(sizes.values())


def test_hybrid_sections(repository, hybrid_index, tmp_path):
    path = tmp_path / "running.idx"
    repository.save(hybrid_index, path)
    kind, sizes = repository.section_sizes(path)
    assert kind == IndexKind.HYBRID
    assert set(sizes) == {Section.PARAMS, Section.GENOMES, Section.KERNEL, Section.CUTS, Section.SELF_INDEX,
                          Section.GRID}


def test_bad_magic(repository, hybrid_index, tmp_path):
    path = tmp_path / "running.idx"
    repository.save(hybrid_index, path)
    data = path.read_bytes()
    path.write_bytes(b"NOPE" + data[4:])
    with pytest.raises(FormatError) as error:
        repository.load(path)
    assert error.value.section == "header"


def test_unsupported_version(repository, hybrid_index, tmp_path):
    path = tmp_path / "running.idx"
    repository.save(hybrid_index, path)
    data = path.read_bytes()
    path.write_bytes(data[:4] + struct.pack("<I", 7) + data[8:])
    with pytest.raises(FormatError) as error:
        repository.load(path)
    assert (error.value.expected, error.value.found) == (1, 7)


def test_unknown_kind_and_short_header(repository, tmp_path):
    path = tmp_path / "broken.idx"
    path.write_bytes(b"ALBI" + struct.pack("<IB", 1, 9))
    with pytest.raises(FormatError, match="kind"):
        repository.load(path)
    path.write_bytes(b"ALB")
    with pytest.raises(FormatError, match="header"):
        repository.load(path)


def test_truncated_file_names_the_section(repository, hybrid_index, tmp_path):
    path = tmp_path / "running.idx"
    repository.save(hybrid_index, path)
    path.write_bytes(path.read_bytes()[:-3])
    with pytest.raises(FormatError) as error:
        repository.load(path)
    assert error.value.section == Section.GRID.value
    assert "GRID" in str(error.value)


def test_missing_section(repository, hybrid_index, tmp_path):
    path = tmp_path / "running.idx"
    repository.save(hybrid_index, path)
    data = path.read_bytes()
    header = 9
    tag, length = struct.unpack_from("<4sQ", data, header)
    assert tag == b"PARM"
    path.write_bytes(data[:header] + data[header + 12 + length:])
    with pytest.raises(FormatError) as error:
        repository.load(path)
    assert error.value.section == Section.PARAMS.value


def test_unknown_section_tag(repository, hybrid_index, tmp_path):
    path = tmp_path / "running.idx"
    repository.save(hybrid_index, path)
    data = bytearray(path.read_bytes())
    data[9:13] = b"ZZZZ"
    path.write_bytes(bytes(data))
    with pytest.raises(FormatError, match="unknown section"):
        repository.load(path)
