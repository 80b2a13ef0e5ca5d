"""Writer for the harness's EMB1 embedding file format.

Layout (little-endian): magic "EMB1", u32 record count, u32 dimension,
then per record a u16 id byte-length, the UTF-8 id, and dimension
float32 values. The same invariants the harness enforces at load time
are enforced here at write time, so every file we emit validates.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

MAGIC = b"EMB1"
_HEADER = struct.Struct("<4sII")
_ID_LEN = struct.Struct("<H")


class Emb1Error(Exception):
    pass


def write_emb1(records: list[tuple[str, np.ndarray]], dim: int, destination) -> None:
    """Write (id, vector) records; `dim` also covers the empty-file case."""
    if dim < 1:
        raise Emb1Error(f"dimension must be >= 1, got {dim}")
    seen: set[str] = set()
    encoded: list[tuple[bytes, np.ndarray]] = []
    for id_, vector in records:
        if not id_:
            raise Emb1Error("record with an empty id")
        if id_ in seen:
            raise Emb1Error(f"duplicate record id {id_!r}")
        seen.add(id_)
        raw = id_.encode("utf-8")
        if len(raw) > 0xFFFF:
            raise Emb1Error(f"id {id_!r} exceeds 65535 bytes in UTF-8")
        values = np.asarray(vector, dtype="<f4")
        if values.shape != (dim,):
            raise Emb1Error(f"record {id_!r} has shape {values.shape}, expected ({dim},)")
        if not np.isfinite(values).all():
            raise Emb1Error(f"record {id_!r} contains a non-finite value")
        if not values.any():
            raise Emb1Error(f"record {id_!r} is the all-zero vector")
        encoded.append((raw, values))
    data = [_HEADER.pack(MAGIC, len(encoded), dim)]
    for raw, values in encoded:
        data.append(_ID_LEN.pack(len(raw)))
        data.append(raw)
        data.append(values.tobytes())
    blob = b"".join(data)
    if isinstance(destination, (str, Path)):
        Path(destination).write_bytes(blob)
    else:
        destination.write(blob)
