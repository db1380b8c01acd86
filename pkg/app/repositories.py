import os
import struct

from app.alibi import AlibiIndex
from app.codec import ByteReader
from app.constants import CONTAINER_MAGIC, CONTAINER_VERSION
from app.enums import IndexKind, Section
from app.exceptions import FormatError
from app.hybrid import HybridIndex
from app.logging import get_logger


Index = HybridIndex | AlibiIndex

_HEADER = struct.Struct("<4sIB")
_SECTION_HEADER = struct.Struct("<4sQ")
_INDEX_TYPES: dict[IndexKind, type[HybridIndex] | type[AlibiIndex]] = {
    IndexKind.HYBRID: HybridIndex,
    IndexKind.ALIBI: AlibiIndex,
}


class IndexRepository:
    """Index container files: a header, then tagged, length-prefixed sections."""
    __logger = get_logger("index_repository")

    def save(self, index: Index, path: str | os.PathLike) -> int:
        sections = index.to_sections()
        with open(path, "wb") as index_file:
            index_file.write(_HEADER.pack(CONTAINER_MAGIC, CONTAINER_VERSION, index.kind.value))
            for section, payload in sections.items():
                index_file.write(_SECTION_HEADER.pack(section.tag, len(payload)))
                index_file.write(payload)
            size = index_file.tell()
        self.__logger.info(
            "Saved index.",
            path=str(path),
            kind=index.kind.label,
            bytes=size
        )
        return size

    def load(self, path: str | os.PathLike) -> Index:
        kind, sections = self._read(path)
        readers = {section: ByteReader(payload, section.value) for section, payload in sections.items()}
        index = _INDEX_TYPES[kind].from_sections(_Sections(readers))
        self.__logger.info("Loaded index.", path=str(path), kind=kind.label)
        return index

    def section_sizes(self, path: str | os.PathLike) -> tuple[IndexKind, dict[Section, int]]:
        kind, sections = self._read(path)
        return kind, {section: len(payload) for section, payload in sections.items()}

    def _read(self, path: str | os.PathLike) -> tuple[IndexKind, dict[Section, bytes]]:
        with open(path, "rb") as index_file:
            data = index_file.read()
        if len(data) < _HEADER.size:
            raise FormatError(f"file holds {len(data)} bytes, header needs {_HEADER.size}", "header")
        magic, version, kind_value = _HEADER.unpack_from(data)
        if magic != CONTAINER_MAGIC:
            raise FormatError(f"bad magic {magic!r}", "header")
        if version != CONTAINER_VERSION:
            raise FormatError(f"unsupported version {version}", "header", expected=CONTAINER_VERSION, found=version)
        try:
            kind = IndexKind(kind_value)
        except ValueError:
            raise FormatError(f"unknown index kind {kind_value}", "header") from None

        sections: dict[Section, bytes] = {}
        pos = _HEADER.size
        while pos < len(data):
            if pos + _SECTION_HEADER.size > len(data):
                raise FormatError("truncated section header", "header")
            tag, length = _SECTION_HEADER.unpack_from(data, pos)
            try:
                section = Section(tag.decode("ascii", errors="replace"))
            except ValueError:
                raise FormatError(f"unknown section tag {tag!r}", "header") from None
            pos += _SECTION_HEADER.size
            if pos + length > len(data):
                raise FormatError(f"truncated: declared {length} bytes, {len(data) - pos} left", section.value)
            sections[section] = data[pos:pos + length]
            pos += length
        self.__logger.debug("Read index container.", path=str(path), kind=kind.label, sections=len(sections))
        return kind, sections


class _Sections(dict):

    def __missing__(self, section: Section) -> ByteReader:
        raise FormatError("section is missing", section.value)
