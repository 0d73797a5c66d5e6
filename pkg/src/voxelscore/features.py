"""Per-word feature matrices and their binary container format.

Layout (little-endian):

    magic   4 bytes  b"FEAT"
    version u32      1
    M       u64      number of rows (words)
    d       u64      feature dimension
    layer   i32      source layer index
    context i32      context length used at extraction
    tag     u16 length-prefixed UTF-8 model tag
    data    M*d float32, row-major

Row i corresponds to token i of the transcript the features were extracted
from; validate_pair checks that correspondence before any alignment.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import InputError

MAGIC = b"FEAT"
VERSION = 1
_HEAD = struct.Struct("<4sIQQii")


@dataclass
class FeatureMatrix:
    values: np.ndarray  # (M, d) float32
    layer_id: int
    model_tag: str
    context_length: int

    def __post_init__(self):
        arr = np.ascontiguousarray(np.asarray(self.values, dtype=np.float32))
        if arr.ndim != 2:
            raise InputError(f"feature values must be 2-D, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise InputError(f"feature matrix has empty shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InputError("feature matrix contains non-finite values")
        self.values = arr

    @property
    def n_words(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.shape[1]


def write_features(fm: FeatureMatrix) -> bytes:
    tag = fm.model_tag.encode("utf-8")
    if len(tag) > 0xFFFF:
        raise InputError("model tag too long")
    head = _HEAD.pack(
        MAGIC, VERSION, fm.n_words, fm.dim, fm.layer_id, fm.context_length
    )
    return head + struct.pack("<H", len(tag)) + tag + fm.values.tobytes()


def read_features(data: bytes) -> FeatureMatrix:
    if len(data) < _HEAD.size:
        raise InputError("feature file truncated in header")
    magic, version, m, d, layer_id, context = _HEAD.unpack_from(data, 0)
    if magic != MAGIC:
        raise InputError(f"bad feature magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise InputError(f"unsupported feature version {version}")
    off = _HEAD.size
    if len(data) < off + 2:
        raise InputError("feature file truncated before model tag")
    (taglen,) = struct.unpack_from("<H", data, off)
    off += 2
    if len(data) < off + taglen:
        raise InputError("feature file truncated in model tag")
    try:
        tag = data[off : off + taglen].decode("utf-8")
    except UnicodeDecodeError:
        raise InputError("model tag is not valid UTF-8") from None
    off += taglen
    if m < 1 or d < 1:
        raise InputError(f"feature file declares empty shape ({m}, {d})")
    need = m * d * 4
    if len(data) - off != need:
        raise InputError(
            f"feature payload is {len(data) - off} bytes, expected {need} "
            f"for shape ({m}, {d})"
        )
    arr = np.frombuffer(data, dtype="<f4", count=m * d, offset=off)
    arr = arr.reshape(m, d).copy()
    if not np.all(np.isfinite(arr)):
        raise InputError("feature payload contains non-finite values")
    return FeatureMatrix(arr, layer_id, tag, context)


def load_features(path) -> FeatureMatrix:
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read features {path}: {exc}") from None
    return read_features(data)


def save_features(fm: FeatureMatrix, path):
    with open(path, "wb") as fh:
        fh.write(write_features(fm))


def validate_pair(fm: FeatureMatrix, transcript) -> None:
    """Check row count against token count; raise InputError on mismatch."""
    if fm.n_words != len(transcript.tokens):
        raise InputError(
            f"feature rows ({fm.n_words}) do not match transcript tokens "
            f"({len(transcript.tokens)}); features must be extracted from "
            f"this exact transcript"
        )
