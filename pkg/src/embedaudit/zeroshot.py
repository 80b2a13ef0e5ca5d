"""Zero-shot classification by cosine similarity, plus ranking metrics.

A recording is assigned the candidate label whose embedding has the
highest cosine similarity to the recording's embedding. Reported
metrics: top-k accuracy, one-vs-rest ROC-AUC (Mann-Whitney with tie
correction) and PR-AUC (average precision), macro-averaged over classes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ValidationError
from .store import EmbeddingSet, LabelEmbeddings

_RANGE_SLACK = 1e-9  # tolerated drift outside [-1, 1] before values are clipped


def cosine(a, b) -> float:
    """Cosine similarity a.b / (|a||b|), always within [-1, 1]."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValidationError(f"cosine needs two vectors of equal length, got {a.shape} and {b.shape}")
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        raise ValidationError("cosine is undefined for zero-norm vectors")
    return float(np.clip(np.dot(a, b) / (na * nb), -1.0, 1.0))


@dataclass(frozen=True)
class SimilarityMatrix:
    """Pairwise cosine similarities: rows follow audio_ids, columns label_ids."""

    audio_ids: tuple[str, ...]
    label_ids: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        if values.shape != (len(self.audio_ids), len(self.label_ids)):
            raise ValidationError(
                f"similarity values shape {values.shape} does not match "
                f"{len(self.audio_ids)} recordings x {len(self.label_ids)} labels"
            )
        if values.size and (values.min() < -1.0 - _RANGE_SLACK or values.max() > 1.0 + _RANGE_SLACK):
            raise ValidationError("similarity values outside the cosine range [-1, 1]")
        values = np.clip(values, -1.0, 1.0)
        values.setflags(write=False)
        object.__setattr__(self, "audio_ids", tuple(self.audio_ids))
        object.__setattr__(self, "label_ids", tuple(self.label_ids))
        object.__setattr__(self, "values", values)

    @property
    def n_recordings(self) -> int:
        return len(self.audio_ids)

    @property
    def n_labels(self) -> int:
        return len(self.label_ids)


def similarity_matrix(audio: EmbeddingSet, labels: LabelEmbeddings) -> SimilarityMatrix:
    """Cosine similarity of every audio row against every label row."""
    if len(labels) == 0:
        raise ValidationError("empty label set")
    if audio.dim != labels.dim:
        raise ValidationError(f"dimension mismatch: audio is {audio.dim}-d, labels are {labels.dim}-d")
    a = audio.matrix / np.linalg.norm(audio.matrix, axis=1, keepdims=True)
    b = labels.matrix / np.linalg.norm(labels.matrix, axis=1, keepdims=True)
    return SimilarityMatrix(audio.ids, labels.ids, a @ b.T)


def _ranking_positions(sim: SimilarityMatrix) -> np.ndarray:
    """Column order per recording: descending similarity, ties by label text."""
    lex_rank = np.argsort(np.argsort(np.asarray(sim.label_ids)))
    keys = np.broadcast_to(lex_rank, sim.values.shape)
    return np.lexsort((keys, -sim.values), axis=-1)


def classify(sim: SimilarityMatrix) -> list[tuple[str, ...]]:
    """Per-recording label rankings, most similar first.

    The predicted class of recording i is the first entry of ranking i.
    Ties are broken lexicographically so output is deterministic.
    """
    if sim.n_labels < 1:
        raise ValidationError("cannot classify with an empty label set")
    order = _ranking_positions(sim)
    labels = np.asarray(sim.label_ids, dtype=object)
    return [tuple(labels[row]) for row in order]


def _truth_columns(sim: SimilarityMatrix, truth: Mapping[str, str]) -> np.ndarray:
    column = {label: k for k, label in enumerate(sim.label_ids)}
    out = np.empty(sim.n_recordings, dtype=np.intp)
    for i, id_ in enumerate(sim.audio_ids):
        if id_ not in truth:
            raise ValidationError(f"recording {id_!r} has no truth label")
        label = truth[id_]
        if label not in column:
            raise ValidationError(f"truth label {label!r} (recording {id_!r}) is not a candidate label")
        out[i] = column[label]
    return out


def top_k_accuracy(
    sim: SimilarityMatrix, truth: Mapping[str, str], ks: Iterable[int]
) -> dict[int, float]:
    """Fraction of recordings whose true label ranks within the first k."""
    ks = sorted(set(int(k) for k in ks))
    for k in ks:
        if k < 1 or k > sim.n_labels:
            raise ValidationError(f"k={k} out of range [1, {sim.n_labels}]")
    if sim.n_recordings == 0:
        raise ValidationError("empty similarity matrix")
    truth_col = _truth_columns(sim, truth)
    order = _ranking_positions(sim)
    # position of the true label within each ranking
    rank_of_col = np.empty_like(order)
    rows = np.arange(sim.n_recordings)[:, None]
    rank_of_col[rows, order] = np.arange(sim.n_labels)[None, :]
    true_rank = rank_of_col[np.arange(sim.n_recordings), truth_col]
    return {k: int((true_rank < k).sum()) / sim.n_recordings for k in ks}


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks with ties assigned the mean rank of their block."""
    order = np.argsort(values, kind="stable")
    sorted_values = values[order]
    new_block = np.concatenate(([True], sorted_values[1:] != sorted_values[:-1]))
    starts = np.flatnonzero(new_block)
    ends = np.append(starts[1:], values.size)
    block_rank = (starts + ends - 1) / 2.0 + 1.0
    ranks = np.empty(values.size, dtype=np.float64)
    ranks[order] = block_rank[np.cumsum(new_block) - 1]
    return ranks


def pair_auc(positive_scores, negative_scores) -> float:
    """P(pos > neg) + 0.5 P(pos == neg) over all positive x negative pairs.

    Computed from average ranks (Mann-Whitney U with tie correction).
    """
    pos = np.asarray(positive_scores, dtype=np.float64)
    neg = np.asarray(negative_scores, dtype=np.float64)
    if pos.size == 0 or neg.size == 0:
        raise ValidationError("pair AUC needs at least one positive and one negative score")
    ranks = _average_ranks(np.concatenate([pos, neg]))
    u = ranks[: pos.size].sum() - pos.size * (pos.size + 1) / 2.0
    return float(u / (pos.size * neg.size))


def average_precision(scores, positive_mask) -> float:
    """Step-wise average precision: sum of precision x recall increments
    over distinct score thresholds, descending."""
    scores = np.asarray(scores, dtype=np.float64)
    positive = np.asarray(positive_mask, dtype=bool)
    total_pos = int(positive.sum())
    if total_pos == 0 or total_pos == scores.size:
        raise ValidationError("average precision needs both positive and negative scores")
    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    tp = np.cumsum(positive[order])
    # last index of each tie block = one point per distinct threshold
    idx = np.append(np.flatnonzero(np.diff(sorted_scores)), scores.size - 1)
    precision = tp[idx] / (idx + 1.0)
    recall = tp[idx] / total_pos
    prev_recall = np.concatenate(([0.0], recall[:-1]))
    return float(np.sum((recall - prev_recall) * precision))


@dataclass(frozen=True)
class AucReport:
    roc_auc: float
    pr_auc: float
    per_class: dict[str, tuple[float, float]]  # label -> (roc, pr)
    skipped: tuple[str, ...]


def roc_pr_auc(sim: SimilarityMatrix, truth: Mapping[str, str]) -> AucReport:
    """One-vs-rest ROC-AUC and PR-AUC per class, macro averaged.

    The score for class c is the similarity column of c. Classes without
    both a positive and a negative recording are skipped and reported.
    """
    truth_col = _truth_columns(sim, truth)
    per_class: dict[str, tuple[float, float]] = {}
    skipped: list[str] = []
    for k, label in enumerate(sim.label_ids):
        positive = truth_col == k
        n_pos = int(positive.sum())
        if n_pos == 0 or n_pos == sim.n_recordings:
            skipped.append(label)
            continue
        scores = sim.values[:, k]
        roc = pair_auc(scores[positive], scores[~positive])
        pr = average_precision(scores, positive)
        per_class[label] = (roc, pr)
    if not per_class:
        raise ValidationError("no class has both positive and negative recordings")
    rocs = [v[0] for v in per_class.values()]
    prs = [v[1] for v in per_class.values()]
    return AucReport(
        roc_auc=float(np.mean(rocs)),
        pr_auc=float(np.mean(prs)),
        per_class=per_class,
        skipped=tuple(skipped),
    )


@dataclass(frozen=True)
class ClassificationReport:
    audio_ids: tuple[str, ...]
    rankings: tuple[tuple[str, ...], ...]
    predicted: tuple[str, ...]
    top_k: dict[int, float]
    roc_auc: float
    pr_auc: float
    per_class: dict[str, tuple[float, float]]
    skipped: tuple[str, ...]


def evaluate(
    audio: EmbeddingSet,
    truth: Mapping[str, str],
    labels: LabelEmbeddings,
    ks: Sequence[int] = (1, 2, 3),
) -> ClassificationReport:
    """Run the full zero-shot evaluation of one audio set against one label set."""
    sim = similarity_matrix(audio, labels)
    rankings = classify(sim)
    auc = roc_pr_auc(sim, truth)
    return ClassificationReport(
        audio_ids=sim.audio_ids,
        rankings=tuple(rankings),
        predicted=tuple(r[0] for r in rankings),
        top_k=top_k_accuracy(sim, truth, ks),
        roc_auc=auc.roc_auc,
        pr_auc=auc.pr_auc,
        per_class=auc.per_class,
        skipped=auc.skipped,
    )
