"""Batch extraction: audio files or prompt manifests in, EMB1 out."""

from __future__ import annotations

import csv
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .emb1 import write_emb1
from .encoders import EncoderSpec, ExtractError, resolve_encoder

MANIFEST_HEADER = ("class", "prompt", "provenance")


@dataclass(frozen=True)
class ExtractResult:
    written: int
    dim: int
    failures: tuple[tuple[str, str], ...]  # (path, reason)

    @property
    def ok(self) -> bool:
        return not self.failures


def collect_audio_paths(inputs: Sequence[str | Path], list_file: str | Path | None = None) -> list[Path]:
    """Expand files, directories (recursive, sorted) and an optional list
    file into one ordered path list."""
    paths: list[Path] = []
    sources = [Path(p) for p in inputs]
    if list_file is not None:
        with open(list_file, "r", encoding="utf-8") as fh:
            sources.extend(Path(line.strip()) for line in fh if line.strip())
    for source in sources:
        if source.is_dir():
            paths.extend(sorted(p for p in source.rglob("*") if p.is_file()))
        else:
            paths.append(source)
    if not paths:
        raise ExtractError("no input audio files")
    return paths


def embed_audio(paths: Iterable[str | Path], spec: EncoderSpec, out) -> ExtractResult:
    """Encode each file's content; record ids are file stems.

    Unreadable files are reported per file and skipped, the rest are still
    written. Stem collisions across directories are a hard error.
    """
    if spec.modality != "audio":
        raise ExtractError(f"embed_audio needs modality 'audio', spec says {spec.modality!r}")
    encoder = resolve_encoder(spec)
    paths = [Path(p) for p in paths]
    stems: dict[str, Path] = {}
    for path in paths:
        stem = path.stem
        if not stem:
            raise ExtractError(f"cannot derive an id from {path}")
        if stem in stems:
            raise ExtractError(f"id collision: {stems[stem]} and {path} share the stem {stem!r}")
        stems[stem] = path

    records: list[tuple[str, np.ndarray]] = []
    failures: list[tuple[str, str]] = []
    for path in paths:
        try:
            content = path.read_bytes()
        except OSError as exc:
            failures.append((str(path), str(exc)))
            continue
        records.append((path.stem, encoder.encode(content)))
    write_emb1(records, encoder.dim, out)
    return ExtractResult(written=len(records), dim=encoder.dim, failures=tuple(failures))


def read_manifest(source) -> list[tuple[str, str]]:
    """Prompt manifest CSV (class, prompt, provenance) -> (class, prompt) pairs."""
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8", newline="") as fh:
            return read_manifest(fh)
    reader = csv.reader(source)
    try:
        header = next(reader)
    except StopIteration:
        raise ExtractError("prompt manifest is empty, expected header 'class,prompt,provenance'") from None
    if tuple(header) != MANIFEST_HEADER:
        raise ExtractError(f"manifest header is {header!r}, expected ['class', 'prompt', 'provenance']")
    entries: list[tuple[str, str]] = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 3 or not row[0] or not row[1]:
            raise ExtractError(f"manifest line {lineno}: expected class, prompt, provenance")
        entries.append((row[0], row[1]))
    return entries


def embed_text(manifest: str | Path, spec: EncoderSpec, out) -> ExtractResult:
    """Encode one prompt per manifest entry; record ids are class labels.

    A class appearing twice means the manifest mixes templates; that is
    rejected so each output file stays one-prompt-per-class.
    """
    if spec.modality != "text":
        raise ExtractError(f"embed_text needs modality 'text', spec says {spec.modality!r}")
    encoder = resolve_encoder(spec)
    entries = read_manifest(manifest)
    seen: set[str] = set()
    for label, _ in entries:
        if label in seen:
            raise ExtractError(
                f"class {label!r} has more than one prompt in {manifest}; "
                "emit one manifest (and one embedding file) per template"
            )
        seen.add(label)
    if not entries:
        print(f"warning: {manifest} has no entries; writing an empty embedding file", file=sys.stderr)
    records = [(label, encoder.encode(prompt)) for label, prompt in entries]
    write_emb1(records, encoder.dim, out)
    return ExtractResult(written=len(records), dim=encoder.dim, failures=())
