"""Embedding-space diagnostics.

Positive/negative pair similarity histograms with separation statistics,
per-class centroid labels (the "audio-only" upper bound for text labels),
and top-2 confidence margins.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import ValidationError
from .store import EmbeddingSet, LabelEmbeddings
from .zeroshot import SimilarityMatrix, pair_auc

DEFAULT_BINS = 50


def _edges(values: np.ndarray, bins: int) -> np.ndarray:
    lo = float(values.min())
    hi = float(values.max())
    if lo == hi:  # degenerate range: pad so everything lands in one real bin
        lo -= 0.5
        hi += 0.5
    return np.linspace(lo, hi, bins + 1)


@dataclass(frozen=True)
class PairHistogram:
    """Histograms of positive vs negative pair similarities on shared edges."""

    bin_edges: np.ndarray
    positive_counts: np.ndarray
    negative_counts: np.ndarray
    overlap_coefficient: float
    pooled_pair_auc: float

    @property
    def positive_total(self) -> int:
        return int(self.positive_counts.sum())

    @property
    def negative_total(self) -> int:
        return int(self.negative_counts.sum())


def pair_histogram(
    sim: SimilarityMatrix, truth: Mapping[str, str], bins: int = DEFAULT_BINS
) -> PairHistogram:
    """Split all (recording, label) similarities into positive pairs (label
    matches the recording) and negative pairs (all others).

    overlap_coefficient sums the bin-wise minima of the two normalized
    histograms; pooled_pair_auc is the probability (ties at half weight)
    that a random positive pair scores above a random negative pair.
    """
    if bins < 1:
        raise ValidationError(f"bins must be >= 1, got {bins}")
    if sim.n_recordings == 0:
        raise ValidationError("empty similarity matrix")
    if sim.n_labels < 2:
        raise ValidationError("need at least 2 candidate labels, otherwise there are no negative pairs")
    column = {label: k for k, label in enumerate(sim.label_ids)}
    truth_col = np.empty(sim.n_recordings, dtype=np.intp)
    for i, id_ in enumerate(sim.audio_ids):
        if id_ not in truth:
            raise ValidationError(f"recording {id_!r} has no truth label")
        label = truth[id_]
        if label not in column:
            raise ValidationError(f"truth label {label!r} (recording {id_!r}) is not a candidate label")
        truth_col[i] = column[label]

    positive_mask = np.zeros(sim.values.shape, dtype=bool)
    positive_mask[np.arange(sim.n_recordings), truth_col] = True
    positives = sim.values[positive_mask]
    negatives = sim.values[~positive_mask]

    edges = _edges(sim.values.ravel(), bins)
    pos_counts, _ = np.histogram(positives, bins=edges)
    neg_counts, _ = np.histogram(negatives, bins=edges)
    overlap = float(
        np.minimum(pos_counts / positives.size, neg_counts / negatives.size).sum()
    )
    return PairHistogram(
        bin_edges=edges,
        positive_counts=pos_counts,
        negative_counts=neg_counts,
        overlap_coefficient=overlap,
        pooled_pair_auc=pair_auc(positives, negatives),
    )


def class_centroids(audio: EmbeddingSet, truth: Mapping[str, str]) -> LabelEmbeddings:
    """Mean embedding per class, usable anywhere label embeddings are.

    Classes are emitted in lexicographic order. A class whose members
    cancel out to the zero vector is rejected: it cannot enter cosine.
    """
    members: dict[str, list[int]] = {}
    for i, id_ in enumerate(audio.ids):
        if id_ not in truth:
            raise ValidationError(f"audio id {id_!r} has no label")
        label = truth[id_]
        if not label:
            raise ValidationError(f"empty label for audio id {id_!r}")
        members.setdefault(label, []).append(i)
    if not members:
        raise ValidationError("no recordings to average")
    classes = sorted(members)
    centroids = np.empty((len(classes), audio.dim), dtype=np.float64)
    for k, label in enumerate(classes):
        centroids[k] = audio.matrix[members[label]].mean(axis=0)
        if not centroids[k].any():
            raise ValidationError(f"centroid for class {label!r} is the zero vector")
    return EmbeddingSet(tuple(classes), centroids)


@dataclass(frozen=True)
class MarginReport:
    """Difference between each recording's top-2 label similarities."""

    recording_ids: tuple[str, ...]
    margins: np.ndarray
    bin_edges: np.ndarray
    counts: np.ndarray
    median_margin: float


def margins(sim: SimilarityMatrix, bins: int = DEFAULT_BINS) -> MarginReport:
    """Per-recording confidence margin: best similarity minus second best."""
    if bins < 1:
        raise ValidationError(f"bins must be >= 1, got {bins}")
    if sim.n_labels < 2:
        raise ValidationError(f"margins need at least 2 candidate labels, got {sim.n_labels}")
    if sim.n_recordings == 0:
        raise ValidationError("empty similarity matrix")
    top2 = np.partition(sim.values, sim.n_labels - 2, axis=1)[:, -2:]
    margin = top2[:, 1] - top2[:, 0]
    edges = _edges(margin, bins)
    counts, _ = np.histogram(margin, bins=edges)
    margin.setflags(write=False)
    return MarginReport(
        recording_ids=sim.audio_ids,
        margins=margin,
        bin_edges=edges,
        counts=counts,
        median_margin=float(np.median(margin)),
    )
