"""Embedding and label persistence: the EMB1 binary format and label CSV.

EMB1 layout (little-endian throughout):

    bytes 0-3   ASCII magic "EMB1"
    bytes 4-7   u32 record count n
    bytes 8-11  u32 dimension F (>= 1)
    records     n times: u16 id byte-length L, L bytes UTF-8 id,
                F float32 values

Values are stored as float32; after loading, all analysis runs on
float64 copies so metric computation does not depend on storage width.
Zero vectors, non-finite values and duplicate ids are rejected at load:
every set that exists in memory is safe to feed to cosine similarity.
"""

from __future__ import annotations

import csv
import struct
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Iterator, Mapping

import numpy as np

from .errors import FormatError, ValidationError

MAGIC = b"EMB1"
_HEADER = struct.Struct("<4sII")
_ID_LEN = struct.Struct("<H")
LABEL_CSV_HEADER = ("id", "label")


@dataclass(frozen=True)
class EmbeddingSet:
    """A named collection of fixed-dimension vectors, one row per id.

    Immutable after construction; the matrix is a read-only float64
    array of shape (len(ids), dim).
    """

    ids: tuple[str, ...]
    matrix: np.ndarray
    _index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        ids = tuple(self.ids)
        try:
            matrix = np.ascontiguousarray(self.matrix, dtype=np.float64)
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"embedding matrix is not a numeric 2-d array: {exc}") from None
        if matrix.ndim != 2:
            raise ValidationError(f"embedding matrix must be 2-d, got shape {matrix.shape}")
        n, dim = matrix.shape
        if dim < 1:
            raise ValidationError("embedding dimension must be >= 1")
        if len(ids) != n:
            raise ValidationError(f"{len(ids)} ids for {n} matrix rows")
        seen: set[str] = set()
        for id_ in ids:
            if not isinstance(id_, str) or not id_:
                raise ValidationError("embedding ids must be non-empty strings")
            if id_ in seen:
                raise ValidationError(f"duplicate id {id_!r}")
            seen.add(id_)
        finite = np.isfinite(matrix).all(axis=1)
        if not finite.all():
            bad = ids[int(np.flatnonzero(~finite)[0])]
            raise ValidationError(f"non-finite value in embedding {bad!r}")
        nonzero = matrix.any(axis=1)
        if not nonzero.all():
            bad = ids[int(np.flatnonzero(~nonzero)[0])]
            raise ValidationError(f"embedding {bad!r} is the all-zero vector")
        matrix.setflags(write=False)
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "_index", {id_: i for i, id_ in enumerate(ids)})

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[1])

    def __len__(self) -> int:
        return len(self.ids)

    def __contains__(self, id_: str) -> bool:
        return id_ in self._index

    def row(self, id_: str) -> np.ndarray:
        try:
            return self.matrix[self._index[id_]]
        except KeyError:
            raise ValidationError(f"no embedding with id {id_!r}") from None


# Label embeddings are ordinary embedding sets whose ids are class labels.
LabelEmbeddings = EmbeddingSet


@dataclass(frozen=True)
class LabeledAudio:
    """An audio EmbeddingSet paired with one class label per row."""

    audio: EmbeddingSet
    labels: tuple[str, ...]
    warnings: tuple[str, ...] = ()

    @property
    def classes(self) -> tuple[str, ...]:
        return tuple(sorted(set(self.labels)))

    def truth(self) -> dict[str, str]:
        return dict(zip(self.audio.ids, self.labels))


@contextmanager
def _binary(target, mode: str) -> Iterator[IO[bytes]]:
    if isinstance(target, (str, Path)):
        with open(target, mode) as fh:
            yield fh
    else:
        yield target


def write_embeddings(embeddings: EmbeddingSet, destination) -> None:
    """Write an EmbeddingSet to `destination` (path or binary file) as EMB1."""
    with np.errstate(over="ignore"):
        values = embeddings.matrix.astype("<f4")
    # Narrowing to float32 may overflow to inf or flush a row to zero;
    # catch it here so every file written is loadable.
    finite = np.isfinite(values).all(axis=1)
    if not finite.all():
        bad = embeddings.ids[int(np.flatnonzero(~finite)[0])]
        raise ValidationError(f"embedding {bad!r} is not finite in float32")
    nonzero = values.any(axis=1) if len(embeddings) else np.ones(0, dtype=bool)
    if not nonzero.all():
        bad = embeddings.ids[int(np.flatnonzero(~nonzero)[0])]
        raise ValidationError(f"embedding {bad!r} becomes the zero vector in float32")
    encoded = []
    for id_ in embeddings.ids:
        raw = id_.encode("utf-8")
        if len(raw) > 0xFFFF:
            raise ValidationError(f"id {id_!r} exceeds 65535 bytes in UTF-8")
        encoded.append(raw)
    with _binary(destination, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, len(embeddings), embeddings.dim))
        for raw, row in zip(encoded, values):
            fh.write(_ID_LEN.pack(len(raw)))
            fh.write(raw)
            fh.write(row.tobytes())


def read_embeddings(source) -> EmbeddingSet:
    """Read an EMB1 file (path or binary stream) into an EmbeddingSet."""
    with _binary(source, "rb") as fh:
        header = fh.read(_HEADER.size)
        if len(header) < _HEADER.size:
            raise FormatError(f"truncated header: got {len(header)} of {_HEADER.size} bytes")
        magic, count, dim = _HEADER.unpack(header)
        if magic != MAGIC:
            raise FormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
        if dim < 1:
            raise FormatError("declared dimension is 0")
        ids: list[str] = []
        matrix = np.empty((count, dim), dtype="<f4")
        row_bytes = 4 * dim
        for k in range(count):
            raw_len = fh.read(_ID_LEN.size)
            if len(raw_len) < _ID_LEN.size:
                raise FormatError(f"truncated stream at record {k} of {count}")
            (id_len,) = _ID_LEN.unpack(raw_len)
            if id_len == 0:
                raise FormatError(f"record {k} has an empty id")
            raw_id = fh.read(id_len)
            if len(raw_id) < id_len:
                raise FormatError(f"truncated id in record {k}")
            try:
                id_ = raw_id.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise FormatError(f"record {k} id is not valid UTF-8: {exc}") from None
            payload = fh.read(row_bytes)
            if len(payload) < row_bytes:
                raise FormatError(f"truncated values in record {k} ({id_!r})")
            matrix[k] = np.frombuffer(payload, dtype="<f4")
            ids.append(id_)
        if fh.read(1):
            raise FormatError(
                f"trailing bytes after {count} declared records (count/dimension inconsistent)"
            )
    return EmbeddingSet(tuple(ids), matrix)


def read_label_map(source) -> dict[str, str]:
    """Read a two-column `id,label` CSV into an ordered id -> label mapping."""
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8", newline="") as fh:
            return read_label_map(fh)
    reader = csv.reader(source)
    try:
        header = next(reader)
    except StopIteration:
        raise FormatError("label CSV is empty, expected header 'id,label'") from None
    if tuple(header) != LABEL_CSV_HEADER:
        raise FormatError(f"label CSV header is {header!r}, expected ['id', 'label']")
    entries: dict[str, str] = {}
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 2:
            raise FormatError(f"label CSV line {lineno}: expected 2 columns, got {len(row)}")
        id_, label = row
        if not id_:
            raise FormatError(f"label CSV line {lineno}: empty id")
        if not label:
            raise FormatError(f"label CSV line {lineno}: empty label for id {id_!r}")
        if id_ in entries:
            raise FormatError(f"label CSV line {lineno}: duplicate id {id_!r}")
        entries[id_] = label
    return entries


def write_label_map(entries: Mapping[str, str], destination) -> None:
    if isinstance(destination, (str, Path)):
        with open(destination, "w", encoding="utf-8", newline="") as fh:
            return write_label_map(entries, fh)
    writer = csv.writer(destination)
    writer.writerow(LABEL_CSV_HEADER)
    for id_, label in entries.items():
        writer.writerow([id_, label])


def align(audio: EmbeddingSet, labels: Mapping[str, str]) -> LabeledAudio:
    """Pair audio embeddings with their ground-truth labels.

    Every audio id must appear in `labels`; label entries for unknown ids
    are tolerated and reported back as warnings.
    """
    if audio.dim < 1:  # unreachable for sets built through EmbeddingSet
        raise ValidationError("audio embedding dimension is 0")
    missing = [id_ for id_ in audio.ids if id_ not in labels]
    if missing:
        raise ValidationError(f"audio id {missing[0]!r} has no label ({len(missing)} unlabeled)")
    assigned = []
    for id_ in audio.ids:
        label = labels[id_]
        if not label:
            raise ValidationError(f"empty label for audio id {id_!r}")
        assigned.append(label)
    extra = [id_ for id_ in labels if id_ not in audio]
    warnings = tuple(f"label for unknown audio id {id_!r} ignored" for id_ in extra)
    return LabeledAudio(audio=audio, labels=tuple(assigned), warnings=warnings)
