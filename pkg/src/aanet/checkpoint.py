"""Binary checkpoint format.

Layout (all integers big-endian u32)::

    b"AANET1\\n"
    count
    count x (name_len, name utf-8, rank, dims[rank], big-endian float64 data)

Batch-norm running statistics are stored as ordinary named records next to
the trainable parameters.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import DataFormatError

MAGIC = b"AANET1\n"


def dumps(tensors: dict[str, np.ndarray]) -> bytes:
    out = [MAGIC, struct.pack(">I", len(tensors))]
    for name in sorted(tensors):
        arr = np.asarray(tensors[name], dtype=np.float64)
        encoded = name.encode("utf-8")
        out.append(struct.pack(">I", len(encoded)))
        out.append(encoded)
        out.append(struct.pack(">I", arr.ndim))
        out.append(struct.pack(f">{arr.ndim}I", *arr.shape))
        out.append(arr.astype(">f8").tobytes())
    return b"".join(out)


def loads(blob: bytes) -> dict[str, np.ndarray]:
    if not blob.startswith(MAGIC):
        raise DataFormatError("not an AANET1 checkpoint (bad magic)")
    pos = len(MAGIC)

    def take(n):
        nonlocal pos
        if pos + n > len(blob):
            raise DataFormatError("truncated checkpoint")
        chunk = blob[pos : pos + n]
        pos += n
        return chunk

    (count,) = struct.unpack(">I", take(4))
    tensors = {}
    for _ in range(count):
        (name_len,) = struct.unpack(">I", take(4))
        name = take(name_len).decode("utf-8")
        (rank,) = struct.unpack(">I", take(4))
        dims = struct.unpack(f">{rank}I", take(4 * rank))
        size = int(np.prod(dims, dtype=np.int64))
        data = np.frombuffer(take(8 * size), dtype=">f8").astype(np.float64)
        tensors[name] = data.reshape(dims)
    if pos != len(blob):
        raise DataFormatError(f"{len(blob) - pos} trailing bytes after checkpoint records")
    return tensors


def save(path, tensors: dict[str, np.ndarray]) -> None:
    Path(path).write_bytes(dumps(tensors))


def load(path) -> dict[str, np.ndarray]:
    return loads(Path(path).read_bytes())
