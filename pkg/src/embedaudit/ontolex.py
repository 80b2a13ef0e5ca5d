"""Instrument ontology trees and semantic-similarity triplets.

Trees are rooted, names are unique case-insensitively, and similarity
between two names is their path distance in edges (smaller = closer).
From every 3-subset of candidate names whose closest pair is unique,
a (anchor, positive, negative) triplet is formed; pairs related only
through the root are dropped because they carry no family information.
Triplet accuracy then checks whether an embedding space reproduces the
ontology ordering: cosine(anchor, positive) must strictly exceed
cosine(anchor, negative).
"""

from __future__ import annotations

import csv
import itertools
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

from .errors import FormatError, ValidationError
from .store import LabelEmbeddings
from .zeroshot import cosine


@dataclass
class OntologyNode:
    name: str  # original casing, for display
    key: str  # lowercase, for matching
    parent: Optional["OntologyNode"]
    depth: int
    children: list["OntologyNode"]

    def __repr__(self) -> str:  # keep recursive structures printable
        return f"OntologyNode({self.name!r}, depth={self.depth}, children={len(self.children)})"


class OntologyTree:
    """Rooted tree of named nodes with case-insensitive lookup."""

    def __init__(self, root: OntologyNode, nodes: dict[str, OntologyNode]):
        self.root = root
        self._nodes = nodes

    def __len__(self) -> int:
        return len(self._nodes)

    def __contains__(self, name: str) -> bool:
        return name.lower() in self._nodes

    def node(self, name: str) -> OntologyNode:
        try:
            return self._nodes[name.lower()]
        except KeyError:
            raise ValidationError(f"unknown ontology name {name!r}") from None

    def names(self) -> list[str]:
        return [n.name for n in self._nodes.values()]

    def leaves(self) -> list[OntologyNode]:
        return [n for n in self._nodes.values() if not n.children]

    def non_root_nodes(self) -> list[OntologyNode]:
        return [n for n in self._nodes.values() if n is not self.root]


def parse_ontology(source) -> OntologyTree:
    """Parse a recursive JSON tree: objects with "name" and optional "children"."""
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            return parse_ontology(fh)
    try:
        data = json.load(source)
    except json.JSONDecodeError as exc:
        raise FormatError(f"ontology is not valid JSON: {exc}") from None

    nodes: dict[str, OntologyNode] = {}

    def build(obj, parent: Optional[OntologyNode], depth: int) -> OntologyNode:
        if not isinstance(obj, dict):
            raise FormatError(f"ontology node must be an object, got {type(obj).__name__}")
        name = obj.get("name")
        if not isinstance(name, str) or not name.strip():
            raise FormatError("ontology node without a non-empty 'name'")
        key = name.lower()
        if key in nodes:
            raise FormatError(f"duplicate ontology name {name!r} (names are case-insensitive)")
        node = OntologyNode(name=name, key=key, parent=parent, depth=depth, children=[])
        nodes[key] = node
        children = obj.get("children", [])
        if not isinstance(children, list):
            raise FormatError(f"'children' of {name!r} must be an array")
        for child in children:
            node.children.append(build(child, node, depth + 1))
        return node

    root = build(data, None, 0)
    return OntologyTree(root, nodes)


def _lca(a: OntologyNode, b: OntologyNode) -> OntologyNode:
    while a.depth > b.depth:
        a = a.parent  # type: ignore[assignment]
    while b.depth > a.depth:
        b = b.parent  # type: ignore[assignment]
    while a is not b:
        a = a.parent  # type: ignore[assignment]
        b = b.parent  # type: ignore[assignment]
    return a


def tree_distance(tree: OntologyTree, a: str, b: str) -> int:
    """Number of edges on the unique path between two named nodes."""
    na = tree.node(a)
    nb = tree.node(b)
    ancestor = _lca(na, nb)
    return na.depth + nb.depth - 2 * ancestor.depth


@dataclass(frozen=True)
class Triplet:
    anchor: str
    positive: str
    negative: str

    def names(self) -> tuple[str, str, str]:
        return (self.anchor, self.positive, self.negative)


@dataclass(frozen=True)
class TripletStats:
    candidate_names: int
    candidate_subsets: int
    ambiguous_discarded: int
    root_excluded: int
    retained: int


def generate_triplets(
    tree: OntologyTree,
    restrict: Optional[Iterable[str]] = None,
    include_internal: bool = False,
) -> tuple[list[Triplet], TripletStats]:
    """Enumerate every triplet implied by the tree over the candidate names.

    Candidates are `restrict` when given, else all leaves, else every
    non-root node with include_internal. For each 3-subset the unique
    closest pair (by path distance) becomes (anchor, positive) with the
    anchor lexicographically smaller; subsets whose smallest distance is
    tied are discarded as ambiguous, and triplets whose closest pair
    meets only at the root are excluded. Output is sorted by
    (anchor, positive, negative); stats account for every subset.
    """
    if restrict is not None:
        candidates = []
        seen: set[str] = set()
        for name in restrict:
            node = tree.node(name)
            if node.key in seen:
                raise ValidationError(f"duplicate candidate name {name!r}")
            seen.add(node.key)
            candidates.append(node)
    elif include_internal:
        candidates = tree.non_root_nodes()
    else:
        candidates = tree.leaves()
    if len(candidates) < 3:
        raise ValidationError(f"need at least 3 candidate names, got {len(candidates)}")

    candidates.sort(key=lambda n: n.key)
    distance: dict[tuple[str, str], int] = {}
    for x, y in itertools.combinations(candidates, 2):
        ancestor = _lca(x, y)
        distance[(x.key, y.key)] = x.depth + y.depth - 2 * ancestor.depth

    triplets: list[Triplet] = []
    ambiguous = 0
    root_excluded = 0
    for a, b, c in itertools.combinations(candidates, 3):
        pairs = (
            (distance[(a.key, b.key)], a, b, c),
            (distance[(a.key, c.key)], a, c, b),
            (distance[(b.key, c.key)], b, c, a),
        )
        smallest = min(p[0] for p in pairs)
        closest = [p for p in pairs if p[0] == smallest]
        if len(closest) > 1:
            ambiguous += 1
            continue
        _, first, second, negative = closest[0]
        if _lca(first, second) is tree.root:
            root_excluded += 1
            continue
        triplets.append(Triplet(first.name, second.name, negative.name))

    triplets.sort(key=lambda t: (t.anchor.lower(), t.positive.lower(), t.negative.lower()))
    m = len(candidates)
    stats = TripletStats(
        candidate_names=m,
        candidate_subsets=m * (m - 1) * (m - 2) // 6,
        ambiguous_discarded=ambiguous,
        root_excluded=root_excluded,
        retained=len(triplets),
    )
    assert stats.retained + stats.ambiguous_discarded + stats.root_excluded == stats.candidate_subsets
    return triplets, stats


TRIPLET_CSV_HEADER = ("anchor", "positive", "negative")


def write_triplets(triplets: Iterable[Triplet], destination) -> None:
    if isinstance(destination, (str, Path)):
        with open(destination, "w", encoding="utf-8", newline="") as fh:
            return write_triplets(triplets, fh)
    writer = csv.writer(destination)
    writer.writerow(TRIPLET_CSV_HEADER)
    for t in triplets:
        writer.writerow([t.anchor, t.positive, t.negative])


def read_triplets(source) -> list[Triplet]:
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8", newline="") as fh:
            return read_triplets(fh)
    reader = csv.reader(source)
    try:
        header = next(reader)
    except StopIteration:
        raise FormatError("triplet CSV is empty, expected header 'anchor,positive,negative'") from None
    if tuple(header) != TRIPLET_CSV_HEADER:
        raise FormatError(f"triplet CSV header is {header!r}, expected ['anchor', 'positive', 'negative']")
    triplets = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 3 or not all(row):
            raise FormatError(f"triplet CSV line {lineno}: expected 3 non-empty columns")
        triplets.append(Triplet(*row))
    return triplets


@dataclass(frozen=True)
class TripletVerdict:
    triplet: Triplet
    anchor_positive: float
    anchor_negative: float
    correct: bool


@dataclass(frozen=True)
class TripletScore:
    accuracy: float
    correct: int
    total: int
    verdicts: tuple[TripletVerdict, ...]


def triplet_accuracy(triplets: Iterable[Triplet], embeddings: LabelEmbeddings) -> TripletScore:
    """Fraction of triplets where cosine(anchor, positive) strictly exceeds
    cosine(anchor, negative); ties count as incorrect.

    Embedding ids are matched to triplet names case-insensitively.
    """
    rows: dict[str, int] = {}
    for i, id_ in enumerate(embeddings.ids):
        key = id_.lower()
        if key in rows:
            raise ValidationError(f"embedding ids {embeddings.ids[rows[key]]!r} and {id_!r} collide case-insensitively")
        rows[key] = i

    def vector(name: str):
        try:
            return embeddings.matrix[rows[name.lower()]]
        except KeyError:
            raise ValidationError(f"no embedding for triplet name {name!r}") from None

    verdicts = []
    correct = 0
    triplets = list(triplets)
    if not triplets:
        raise ValidationError("no triplets to score")
    for t in triplets:
        sim_ap = cosine(vector(t.anchor), vector(t.positive))
        sim_an = cosine(vector(t.anchor), vector(t.negative))
        ok = sim_ap > sim_an
        correct += ok
        verdicts.append(TripletVerdict(t, sim_ap, sim_an, ok))
    return TripletScore(
        accuracy=correct / len(triplets),
        correct=correct,
        total=len(triplets),
        verdicts=tuple(verdicts),
    )
