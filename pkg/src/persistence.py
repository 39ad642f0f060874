"""
persistence.py

Versioned little-endian binary model format.

    magic          8 bytes  b"LBOWKIT\\0"
    version        u32      1
    m, n, |D|      u32 x 3
    flags          u32      bit 0 = has hidden layer, bit 1 = reduced softmax
    labels         m   x (u32 length + UTF-8 bytes)
    vocabulary     |D| x (u32 length + UTF-8 bytes), index order
    X              |D| * n float64, row-major
    B              m * n float64, row-major (only with a hidden layer)
"""

import io
import struct
from pathlib import Path

import numpy as np
from loguru import logger

from src.errors import BadMagic, CorruptDimensions, TruncatedFile, UnsupportedVersion
from src.model import LBoWModel, SoftmaxVariant

MAGIC = b"LBOWKIT\0"
FORMAT_VERSION = 1
FLAG_HIDDEN = 1 << 0
FLAG_REDUCED = 1 << 1

_HEADER = struct.Struct("<8sIIIII")
_LENGTH = struct.Struct("<I")
_FLOAT = np.dtype("<f8")


def _write_string(buffer: io.BytesIO, text: str) -> None:
    data = text.encode("utf-8")
    buffer.write(_LENGTH.pack(len(data)))
    buffer.write(data)


def model_to_bytes(model: LBoWModel) -> bytes:
    flags = 0
    if model.hidden is not None:
        flags |= FLAG_HIDDEN
    if model.variant is SoftmaxVariant.REDUCED:
        flags |= FLAG_REDUCED

    buffer = io.BytesIO()
    buffer.write(_HEADER.pack(MAGIC, FORMAT_VERSION, model.m, model.n, model.vocab_size, flags))
    for label in model.labels:
        _write_string(buffer, label)
    for word in model.vocabulary:
        _write_string(buffer, word)
    buffer.write(np.ascontiguousarray(model.embeddings, dtype=_FLOAT).tobytes())
    if model.hidden is not None:
        buffer.write(np.ascontiguousarray(model.hidden, dtype=_FLOAT).tobytes())
    return buffer.getvalue()


def save_model(model: LBoWModel, path: str | Path) -> None:
    Path(path).write_bytes(model_to_bytes(model))
    logger.debug(f"Saved model m={model.m} n={model.n} |D|={model.vocab_size} to {path}")


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.offset = 0

    @property
    def remaining(self) -> int:
        return len(self.data) - self.offset

    def take(self, size: int) -> bytes:
        if size > self.remaining:
            raise TruncatedFile(f"need {size} bytes at offset {self.offset}, {self.remaining} left")
        chunk = self.data[self.offset : self.offset + size]
        self.offset += size
        return chunk

    def string(self) -> str:
        (length,) = _LENGTH.unpack(self.take(_LENGTH.size))
        try:
            return self.take(length).decode("utf-8")
        except UnicodeDecodeError as err:
            raise CorruptDimensions(f"string at offset {self.offset} is not UTF-8") from err


def _check_dimensions(m: int, n: int, flags: int) -> None:
    if flags & ~(FLAG_HIDDEN | FLAG_REDUCED):
        raise CorruptDimensions(f"unknown flag bits {flags:#x}")
    if flags & FLAG_HIDDEN and flags & FLAG_REDUCED:
        raise CorruptDimensions("hidden-layer and reduced-softmax flags are mutually exclusive")
    if m < 2:
        raise CorruptDimensions(f"label count must be at least 2, got {m}")
    if flags & FLAG_REDUCED and n != m - 1:
        raise CorruptDimensions(f"reduced model needs n = m - 1 = {m - 1}, got {n}")
    if not flags & (FLAG_HIDDEN | FLAG_REDUCED) and n != m:
        raise CorruptDimensions(f"flat model needs n = m = {m}, got {n}")
    if n < 1:
        raise CorruptDimensions("word dimension must be at least 1")


def model_from_bytes(data: bytes) -> LBoWModel:
    """
    Decode a model, validating the header before any matrix is allocated.

    Raises:
        BadMagic, UnsupportedVersion, CorruptDimensions, TruncatedFile
    """
    reader = _Reader(data)
    if reader.remaining < _HEADER.size:
        if not MAGIC.startswith(data[: len(MAGIC)]):
            raise BadMagic("not an LBoW model file")
        raise TruncatedFile(f"header needs {_HEADER.size} bytes, file has {len(data)}")

    magic, version, m, n, vocab_size, flags = _HEADER.unpack(reader.take(_HEADER.size))
    if magic != MAGIC:
        raise BadMagic(f"bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise UnsupportedVersion(f"format version {version}, this build reads {FORMAT_VERSION}")
    _check_dimensions(m, n, flags)

    labels = tuple(reader.string() for _ in range(m))
    vocabulary = tuple(reader.string() for _ in range(vocab_size))

    has_hidden = bool(flags & FLAG_HIDDEN)
    expected = (vocab_size * n + (m * n if has_hidden else 0)) * _FLOAT.itemsize
    if reader.remaining < expected:
        raise TruncatedFile(f"matrix blocks need {expected} bytes, {reader.remaining} left")
    if reader.remaining > expected:
        raise CorruptDimensions(f"{reader.remaining - expected} trailing bytes after the matrices")

    embeddings = np.frombuffer(reader.take(vocab_size * n * _FLOAT.itemsize), dtype=_FLOAT)
    hidden = None
    if has_hidden:
        hidden = np.frombuffer(reader.take(m * n * _FLOAT.itemsize), dtype=_FLOAT).reshape(m, n)

    variant = SoftmaxVariant.REDUCED if flags & FLAG_REDUCED else SoftmaxVariant.FULL
    return LBoWModel(embeddings.reshape(vocab_size, n), labels, vocabulary, hidden, variant)


def load_model(path: str | Path) -> LBoWModel:
    model = model_from_bytes(Path(path).read_bytes())
    logger.debug(f"Loaded model m={model.m} n={model.n} |D|={model.vocab_size} from {path}")
    return model
