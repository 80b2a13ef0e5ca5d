"""Encoder specifications and the deterministic mock encoder.

The mock maps content through a counter-expanded SHA-256 digest to a
vector in [-1, 1], so identical input bytes always give identical
embeddings and the whole pipeline is reproducible without checkpoints.
Pre-joint output is modelled as a wider, independent projection (twice
the joint dimension) so both spaces can be exercised end to end.

Named pretrained checkpoints are resolved through ENCODER_REGISTRY;
requesting one that is not installed is a hard error, never a silent
fallback to the mock.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

MODALITIES = ("audio", "text")
SPACES = ("joint", "prejoint")
DEFAULT_DIM = 64


class ExtractError(Exception):
    pass


class EncoderUnavailable(ExtractError):
    pass


@dataclass(frozen=True)
class EncoderSpec:
    """What to encode with: encoder id, modality, embedding space, and
    the audio sample rate the encoder expects (None = encoder default)."""

    encoder: str
    modality: str
    space: str
    sample_rate: int | None = None
    dim: int | None = None  # mock only

    def __post_init__(self) -> None:
        if self.modality not in MODALITIES:
            raise ExtractError(f"unknown modality {self.modality!r}")
        if self.space not in SPACES:
            raise ExtractError(f"unknown space {self.space!r}")


def mock_encode(content: bytes | str, dim: int, modality: str = "text") -> np.ndarray:
    """Deterministic float32 vector in [-1, 1] derived from a SHA-256
    digest of the content; modality-tagged so identical audio bytes and
    text bytes do not collide."""
    if dim < 1:
        raise ExtractError(f"dimension must be >= 1, got {dim}")
    if isinstance(content, str):
        content = content.encode("utf-8")
    seed = hashlib.sha256(f"mock:{modality}:{dim}:".encode("utf-8") + content).digest()
    words: list[int] = []
    block = 0
    while len(words) < dim:
        digest = hashlib.sha256(seed + block.to_bytes(4, "little")).digest()
        words.extend(int.from_bytes(digest[i : i + 4], "little") for i in range(0, 32, 4))
        block += 1
    values = np.array(words[:dim], dtype=np.float64) / 4294967295.0 * 2.0 - 1.0
    vector = values.astype(np.float32)
    if not vector.any():  # astronomically unlikely, but the contract says never
        vector[0] = 1.0
    return vector


class MockEncoder:
    """Checkpoint-free test double; encodes raw bytes, no audio decoding."""

    name = "mock"

    def __init__(self, spec: EncoderSpec):
        self.spec = spec
        joint_dim = spec.dim if spec.dim is not None else DEFAULT_DIM
        if joint_dim < 1:
            raise ExtractError(f"--dim must be >= 1, got {joint_dim}")
        # pre-joint spaces are wider than the joint projection
        self.dim = joint_dim if spec.space == "joint" else 2 * joint_dim

    def encode(self, content: bytes | str) -> np.ndarray:
        tag = f"{self.spec.modality}:{self.spec.space}"
        return mock_encode(content, self.dim, modality=tag)


def _unavailable(name: str):
    def loader(spec: EncoderSpec):
        raise EncoderUnavailable(
            f"encoder {name!r} needs its pretrained checkpoint, which is not installed; "
            "install the optional model dependencies and checkpoint files first "
            "(the mock encoder is never substituted silently)"
        )

    return loader


ENCODER_REGISTRY = {
    "mock": MockEncoder,
    # real two-tower checkpoints: resolvable only when their weights and
    # runtime dependencies are present
    "clap-music": _unavailable("clap-music"),
    "clap-music-speech": _unavailable("clap-music-speech"),
    "muscall": _unavailable("muscall"),
}


def resolve_encoder(spec: EncoderSpec):
    try:
        factory = ENCODER_REGISTRY[spec.encoder]
    except KeyError:
        raise EncoderUnavailable(
            f"unknown encoder {spec.encoder!r}; available: {', '.join(sorted(ENCODER_REGISTRY))}"
        ) from None
    return factory(spec)
