"""Prompt manifest generation for zero-shot evaluation.

Templates carry a `{label}` placeholder. Transforms: strip_label removes
the label words from a prompt (to probe context-only behaviour) and
random_context pads a label with seeded random filler words.
"""

from __future__ import annotations

import csv
import random
import re
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .errors import FormatError, ValidationError

PLACEHOLDER = "{label}"
MANIFEST_CSV_HEADER = ("class", "prompt", "provenance")


@dataclass(frozen=True)
class ManifestEntry:
    label: str
    prompt: str
    provenance: str


def expand(template: str, classes: Sequence[str], provenance: str | None = None) -> list[ManifestEntry]:
    """Substitute every class into every {label} occurrence of the template."""
    if not template:
        raise ValidationError("empty prompt template")
    if not classes:
        raise ValidationError("no classes to expand the template over")
    if PLACEHOLDER not in template:
        warnings.warn(f"template {template!r} has no {PLACEHOLDER} placeholder; prompts equal the template")
    tag = provenance if provenance is not None else f"template:{template}"
    entries = []
    for label in classes:
        if not label:
            raise ValidationError("empty class label")
        entries.append(ManifestEntry(label=label, prompt=template.replace(PLACEHOLDER, label), provenance=tag))
    return entries


def strip_label(text: str, label: str) -> str:
    """Remove each word of the label from the prompt, whole-word and
    case-insensitive, then collapse runs of whitespace and trim."""
    stripped = text
    for word in label.split():
        stripped = re.sub(rf"\b{re.escape(word)}\b", "", stripped, flags=re.IGNORECASE)
    if stripped == text:
        warnings.warn(f"label {label!r} does not occur in prompt {text!r}")
    return " ".join(stripped.split())


def random_context(label: str, word_pool: Sequence[str], count: int, seed: int) -> str:
    """Label followed by `count` words drawn uniformly (with replacement)
    from the pool; deterministic for a given seed."""
    if not word_pool:
        raise ValidationError("empty word pool")
    if count < 1:
        raise ValidationError(f"word count must be >= 1, got {count}")
    rng = random.Random(seed)
    return label + " " + " ".join(rng.choice(word_pool) for _ in range(count))


def read_templates(source) -> list[str]:
    """One template per line; blank lines are skipped."""
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            return read_templates(fh)
    templates = [line.strip() for line in source]
    templates = [t for t in templates if t]
    if not templates:
        raise FormatError("template file contains no templates")
    return templates


def read_definitions(source) -> dict[str, str]:
    """CSV `label,definition` with one definition per class."""
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8", newline="") as fh:
            return read_definitions(fh)
    reader = csv.reader(source)
    try:
        header = next(reader)
    except StopIteration:
        raise FormatError("definitions CSV is empty, expected header 'label,definition'") from None
    if tuple(header) != ("label", "definition"):
        raise FormatError(f"definitions CSV header is {header!r}, expected ['label', 'definition']")
    definitions: dict[str, str] = {}
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 2 or not row[0] or not row[1]:
            raise FormatError(f"definitions CSV line {lineno}: expected non-empty label and definition")
        if row[0] in definitions:
            raise FormatError(f"definitions CSV line {lineno}: duplicate label {row[0]!r}")
        definitions[row[0]] = row[1]
    return definitions


def read_word_pool(source) -> list[str]:
    """Whitespace-separated plain-text word pool."""
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            return read_word_pool(fh)
    words = source.read().split()
    if not words:
        raise FormatError("word pool file is empty")
    return words


def write_manifest(entries: Iterable[ManifestEntry], destination) -> None:
    if isinstance(destination, (str, Path)):
        with open(destination, "w", encoding="utf-8", newline="") as fh:
            return write_manifest(entries, fh)
    writer = csv.writer(destination)
    writer.writerow(MANIFEST_CSV_HEADER)
    for e in entries:
        if not e.prompt:
            raise ValidationError(f"empty prompt for class {e.label!r}")
        writer.writerow([e.label, e.prompt, e.provenance])


def read_manifest(source) -> list[ManifestEntry]:
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8", newline="") as fh:
            return read_manifest(fh)
    reader = csv.reader(source)
    try:
        header = next(reader)
    except StopIteration:
        raise FormatError("prompt manifest is empty, expected header 'class,prompt,provenance'") from None
    if tuple(header) != MANIFEST_CSV_HEADER:
        raise FormatError(f"manifest header is {header!r}, expected ['class', 'prompt', 'provenance']")
    entries = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 3 or not row[0] or not row[1]:
            raise FormatError(f"manifest line {lineno}: expected class, prompt, provenance")
        entries.append(ManifestEntry(label=row[0], prompt=row[1], provenance=row[2]))
    return entries
