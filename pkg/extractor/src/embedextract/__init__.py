"""embedextract: encodes audio files and prompt manifests into EMB1
embedding files for the audit harness.

Ships a deterministic mock encoder so the whole pipeline runs without
model downloads; real pretrained checkpoints plug in behind the same
interface.
"""

__version__ = "0.1.0"

from .encoders import EncoderSpec, EncoderUnavailable, mock_encode, resolve_encoder
from .extract import embed_audio, embed_text

__all__ = [
    "EncoderSpec",
    "EncoderUnavailable",
    "mock_encode",
    "resolve_encoder",
    "embed_audio",
    "embed_text",
    "__version__",
]
