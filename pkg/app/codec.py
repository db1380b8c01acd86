"""Little-endian byte codecs shared by the succinct structures and the index container."""
import struct

import numpy

from app.exceptions import FormatError


def encode_varint(value: int, out: bytearray) -> None:
    if value < 0:
        raise ValueError(f"varint cannot encode negative value {value}")
    while value >= 0x80:
        out.append((value & 0x7F) | 0x80)
        value >>= 7
    out.append(value)


def decode_varint(data: bytes, pos: int) -> tuple[int, int]:
    result = 0
    shift = 0
    while True:
        byte = data[pos]
        pos += 1
        result |= (byte & 0x7F) << shift
        if byte < 0x80:
            return result, pos
        shift += 7


def zigzag_encode(value: int) -> int:
    return value << 1 if value >= 0 else ((-value) << 1) - 1


def zigzag_decode(value: int) -> int:
    return value >> 1 if value & 1 == 0 else -((value + 1) >> 1)


class ByteWriter:

    def __init__(self) -> None:
        self._buffer = bytearray()

    def u8(self, value: int) -> None:
        self._buffer += struct.pack("<B", value)

    def u32(self, value: int) -> None:
        self._buffer += struct.pack("<I", value)

    def u64(self, value: int) -> None:
        self._buffer += struct.pack("<Q", value)

    def blob(self, data: bytes) -> None:
        self.u64(len(data))
        self._buffer += data

    def text(self, value: str) -> None:
        self.blob(value.encode("utf-8"))

    def array(self, values: numpy.ndarray, dtype: str = "<i8") -> None:
        converted = numpy.ascontiguousarray(values, dtype=dtype)
        self.u64(converted.size)
        self._buffer += converted.tobytes()

    def getvalue(self) -> bytes:
        return bytes(self._buffer)


class ByteReader:

    def __init__(self, data: bytes, section: str) -> None:
        self._data = data
        self._pos = 0
        self.section = section

    def _take(self, size: int) -> bytes:
        if self._pos + size > len(self._data):
            raise FormatError(
                f"truncated: needed {size} bytes at offset {self._pos}, {len(self._data) - self._pos} left",
                self.section
            )
        chunk = self._data[self._pos:self._pos + size]
        self._pos += size
        return chunk

    def u8(self) -> int:
        return struct.unpack("<B", self._take(1))[0]

    def u32(self) -> int:
        return struct.unpack("<I", self._take(4))[0]

    def u64(self) -> int:
        return struct.unpack("<Q", self._take(8))[0]

    def blob(self) -> bytes:
        return self._take(self.u64())

    def text(self) -> str:
        return self.blob().decode("utf-8")

    def array(self, dtype: str = "<i8") -> numpy.ndarray:
        count = self.u64()
        item_size = numpy.dtype(dtype).itemsize
        return numpy.frombuffer(self._take(count * item_size), dtype=dtype).copy()

    def expect_end(self) -> None:
        if self._pos != len(self._data):
            raise FormatError(f"{len(self._data) - self._pos} trailing bytes", self.section)
