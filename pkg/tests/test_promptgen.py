from __future__ import annotations

import io
import random
import re
import warnings

import pytest

from embedaudit.errors import FormatError, ValidationError
from embedaudit.promptgen import (
    ManifestEntry,
    expand,
    random_context,
    read_definitions,
    read_manifest,
    read_templates,
    read_word_pool,
    strip_label,
    write_manifest,
)


class TestExpand:
    def test_track_template(self):
        entries = expand("A {label} track", ["violin"])
        assert entries == [ManifestEntry("violin", "A violin track", "template:A {label} track")]

    def test_bare_label_template(self):
        assert expand("{label}", ["flute"])[0].prompt == "flute"

    def test_template_without_placeholder_warns(self):
        with pytest.warns(UserWarning, match="placeholder"):
            entries = expand("just noise", ["violin"])
        assert entries[0].prompt == "just noise"

    def test_entry_count_and_order(self):
        classes = ["oboe", "cello", "tuba"]
        entries = expand("This is a recording of a {label}", classes)
        assert [e.label for e in entries] == classes
        assert all(e.prompt for e in entries)

    def test_empty_classes(self):
        with pytest.raises(ValidationError, match="classes"):
            expand("A {label} track", [])


class TestStripLabel:
    def test_definition_sentence(self):
        got = strip_label("The violin is a bowed string instrument", "violin")
        assert got == "The is a bowed string instrument"

    def test_absent_label_warns_and_is_noop(self):
        with pytest.warns(UserWarning, match="not occur"):
            assert strip_label("A flute track", "violin") == "A flute track"

    def test_case_insensitive_with_punctuation(self):
        assert strip_label("Violin, the violin!", "violin") == ", the !"

    def test_multi_word_label_removes_each_word(self):
        got = strip_label("The french horn is a brass horn", "french horn")
        assert got == "The is a brass"

    def test_whole_word_only(self):
        with pytest.warns(UserWarning, match="not occur"):
            assert strip_label("a violinist plays", "violin") == "a violinist plays"

    def test_property_no_label_and_no_double_spaces(self):
        rng = random.Random(4242)
        vocabulary = ["the", "a", "sound", "of", "music", "track", "solo", "deep", "bright"]
        labels = ["violin", "french horn", "viola", "tuba", "alto saxophone"]
        for _ in range(1000):
            label = rng.choice(labels)
            words = [rng.choice(vocabulary + label.split() + [label]) for _ in range(rng.randint(0, 12))]
            text = " ".join(words)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")  # absence of the label is fine here
                got = strip_label(text, label)
            assert "  " not in got
            assert got == got.strip()
            for word in label.split():
                assert not re.search(rf"\b{re.escape(word)}\b", got, re.IGNORECASE)


class TestRandomContext:
    def test_single_word_pool(self):
        assert random_context("violin", ["lorem"], 3, seed=9) == "violin lorem lorem lorem"

    def test_deterministic_per_seed(self):
        pool = [f"w{i}" for i in range(10)]
        a = random_context("flute", pool, 5, seed=7)
        b = random_context("flute", pool, 5, seed=7)
        assert a == b

    def test_tail_words_belong_to_pool(self):
        pool = [f"w{i}" for i in range(10)]
        prompt = random_context("flute", pool, 5, seed=7)
        head, *tail = prompt.split(" ")
        assert head == "flute"
        assert len(tail) == 5
        assert all(w in pool for w in tail)

    def test_varies_across_seeds(self):
        pool = ["alpha", "beta", "gamma"]
        outputs = {random_context("oboe", pool, 6, seed=s) for s in range(100)}
        assert len(outputs) > 50

    def test_empty_pool(self):
        with pytest.raises(ValidationError, match="pool"):
            random_context("violin", [], 3, seed=1)

    def test_bad_count(self):
        with pytest.raises(ValidationError, match="count"):
            random_context("violin", ["x"], 0, seed=1)


class TestFiles:
    def test_templates_file(self):
        got = read_templates(io.StringIO("A {label} track\n\nSolo musical instrument sound of a {label}\n"))
        assert len(got) == 2

    def test_empty_templates_file(self):
        with pytest.raises(FormatError, match="no templates"):
            read_templates(io.StringIO("\n\n"))

    def test_definitions_file(self):
        got = read_definitions(io.StringIO("label,definition\nviolin,The violin is a bowed instrument\n"))
        assert got == {"violin": "The violin is a bowed instrument"}

    def test_definitions_duplicate_label(self):
        with pytest.raises(FormatError, match="duplicate"):
            read_definitions(io.StringIO("label,definition\nviolin,x\nviolin,y\n"))

    def test_word_pool(self):
        assert read_word_pool(io.StringIO("lorem ipsum\ndolor\n")) == ["lorem", "ipsum", "dolor"]

    def test_manifest_round_trip(self):
        entries = [
            ManifestEntry("violin", "A violin track", "template:A {label} track"),
            ManifestEntry("flute", "flute lorem lorem", "random_context(count=2,seed=3)"),
        ]
        sink = io.StringIO()
        write_manifest(entries, sink)
        assert read_manifest(io.StringIO(sink.getvalue())) == entries
