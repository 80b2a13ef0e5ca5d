"""embedaudit: audits joint audio-text embedding spaces for zero-shot
instrument recognition.

Everything operates on EMB1 embedding files and label CSVs, so the same
commands compare prompt embeddings, audio-centroid labels, and joint vs
pre-joint spaces by pure input substitution.
"""

__version__ = "0.1.0"

from .errors import AuditError, FormatError, ValidationError
from .store import (
    EmbeddingSet,
    LabelEmbeddings,
    LabeledAudio,
    align,
    read_embeddings,
    read_label_map,
    write_embeddings,
)

__all__ = [
    "AuditError",
    "FormatError",
    "ValidationError",
    "EmbeddingSet",
    "LabelEmbeddings",
    "LabeledAudio",
    "align",
    "read_embeddings",
    "read_label_map",
    "write_embeddings",
    "__version__",
]
