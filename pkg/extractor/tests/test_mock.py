from __future__ import annotations

import numpy as np
import pytest

from embedextract.encoders import (
    EncoderSpec,
    EncoderUnavailable,
    ExtractError,
    MockEncoder,
    mock_encode,
    resolve_encoder,
)


class TestMockEncode:
    def test_identical_content_identical_vector(self):
        a = mock_encode("a violin track", 16)
        b = mock_encode("a violin track", 16)
        assert np.array_equal(a, b)

    def test_one_character_difference_changes_vector(self):
        a = mock_encode("a violin track", 16)
        b = mock_encode("a violin trick", 16)
        assert not np.array_equal(a, b)

    def test_modality_tag_separates_identical_bytes(self):
        text = mock_encode(b"same bytes", 16, modality="text")
        audio = mock_encode(b"same bytes", 16, modality="audio")
        assert not np.array_equal(text, audio)

    def test_nonzero_norm_and_range(self):
        for payload in (b"", b"x", b"y" * 1000):
            v = mock_encode(payload, 24, modality="audio")
            assert np.linalg.norm(v) > 0
            assert v.dtype == np.float32
            assert (v >= -1.0).all() and (v <= 1.0).all()

    def test_dimension_beyond_one_digest_block(self):
        v = mock_encode("long", 100)
        assert v.shape == (100,)
        assert len(set(np.round(v, 6))) > 50  # expansion keeps varying

    def test_bad_dim(self):
        with pytest.raises(ExtractError, match="dimension"):
            mock_encode("x", 0)


class TestResolution:
    def test_mock_joint_and_prejoint_dims_differ(self):
        joint = resolve_encoder(EncoderSpec("mock", "audio", "joint", dim=16))
        prejoint = resolve_encoder(EncoderSpec("mock", "audio", "prejoint", dim=16))
        assert joint.dim == 16
        assert prejoint.dim == 32
        content = b"clip bytes"
        assert not np.array_equal(joint.encode(content)[:16], prejoint.encode(content)[:16])

    def test_named_checkpoint_unavailable_is_a_named_error(self):
        with pytest.raises(EncoderUnavailable, match="clap-music"):
            resolve_encoder(EncoderSpec("clap-music", "audio", "joint"))

    def test_unknown_encoder(self):
        with pytest.raises(EncoderUnavailable, match="unknown encoder"):
            resolve_encoder(EncoderSpec("nonesuch", "audio", "joint"))

    def test_bad_modality_and_space(self):
        with pytest.raises(ExtractError, match="modality"):
            EncoderSpec("mock", "video", "joint")
        with pytest.raises(ExtractError, match="space"):
            EncoderSpec("mock", "audio", "latent")
