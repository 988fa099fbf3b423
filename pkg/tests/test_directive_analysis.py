from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from martial.directive_analysis import (
    DirectiveVector,
    DirectiveVocabulary,
    build_vocabulary,
    directive_counts,
    directive_similarity,
    encode_directives,
)
from martial.errors import ConfigError, StaleVocabularyError
from martial.ingest import CommentCorpus, DirectiveRecord


def _corpus(*keys: str) -> CommentCorpus:
    return CommentCorpus(
        human_comments=[],
        directives=[DirectiveRecord(key=k, file="f.go", line=i + 1) for i, k in enumerate(keys)],
    )


def test_build_vocabulary_union_sorted():
    vocab = build_vocabulary([_corpus("x"), _corpus("x", "y")])
    assert vocab.entries == ("x", "y")
    assert vocab.index == {"x": 0, "y": 1}


def test_build_vocabulary_empty():
    assert build_vocabulary([]).entries == ()
    assert build_vocabulary([_corpus()]).entries == ()


def test_build_vocabulary_fixture_hand_count():
    # seven distinct keys spread over five corpora, hand-counted
    corpora = [
        _corpus("nolint:errcheck", "go:generate a"),
        _corpus("nolint:errcheck", "nolint:gosec"),
        _corpus("lint:ignore X", "go:build linux"),
        _corpus("nolint:dupl"),
        _corpus("go:noinline", "nolint:gosec"),
    ]
    vocab = build_vocabulary(corpora)
    assert len(vocab) == 7


def test_vocabulary_rejects_unsorted():
    with pytest.raises(ConfigError):
        DirectiveVocabulary(entries=("b", "a"))


def test_encode_presence_bits():
    vocab = DirectiveVocabulary(entries=("x", "y"))
    assert encode_directives(_corpus("x"), vocab).bits == (1, 0)
    assert encode_directives(_corpus(), vocab).bits == (0, 0)
    assert encode_directives(_corpus("x", "y", "x"), vocab).bits == (1, 1)


def test_encode_stale_vocabulary():
    vocab = DirectiveVocabulary(entries=("x",))
    with pytest.raises(StaleVocabularyError, match="stale vocabulary"):
        encode_directives(_corpus("unseen"), vocab)


def test_directive_counts_auxiliary():
    assert directive_counts(_corpus("x", "x", "y")) == {"x": 2, "y": 1}


def test_similarity_identity():
    u = DirectiveVector(bits=(1, 0, 1))
    assert directive_similarity(u, u) == 1.0
    assert directive_similarity(u, u, metric="manhattan") == 1.0


def test_similarity_manhattan_analytic():
    u, v = DirectiveVector(bits=(1, 0)), DirectiveVector(bits=(0, 1))
    assert directive_similarity(u, v, metric="manhattan") == pytest.approx(1 / 3)


def test_similarity_euclidean_analytic():
    u, v = DirectiveVector(bits=(1, 0)), DirectiveVector(bits=(0, 1))
    assert directive_similarity(u, v) == pytest.approx(1 / (1 + math.sqrt(2)))


def test_similarity_not_applicable_when_both_zero():
    u, v = DirectiveVector(bits=(0, 0)), DirectiveVector(bits=(0, 0))
    assert directive_similarity(u, v) is None


def test_similarity_length_mismatch():
    with pytest.raises(ConfigError, match="length mismatch"):
        directive_similarity(DirectiveVector(bits=(1,)), DirectiveVector(bits=(1, 0)))


def test_similarity_unknown_metric():
    u = DirectiveVector(bits=(1,))
    with pytest.raises(ConfigError, match="unknown metric"):
        directive_similarity(u, u, metric="cosine")


_BITS = st.lists(st.integers(min_value=0, max_value=1), min_size=1, max_size=12)


@given(_BITS, st.sampled_from(["euclidean", "manhattan"]))
@settings(max_examples=200, deadline=None)
def test_similarity_symmetric(bits, metric):
    u = DirectiveVector(bits=tuple(bits))
    v = DirectiveVector(bits=tuple(reversed(bits)))
    assert directive_similarity(u, v, metric=metric) == directive_similarity(v, u, metric=metric)


@given(st.integers(min_value=1, max_value=10), st.sampled_from(["euclidean", "manhattan"]))
@settings(max_examples=100, deadline=None)
def test_similarity_strictly_decreases_with_hamming_distance(size, metric):
    base = DirectiveVector(bits=(1,) * size + (0,) * size)
    previous = None
    for flips in range(0, size + 1):
        bits = (1,) * (size - flips) + (0,) * flips + (0,) * (size - flips) + (1,) * flips
        score = directive_similarity(base, DirectiveVector(bits=bits), metric=metric)
        if previous is not None:
            assert score < previous
        previous = score


def test_vocabulary_determinism_identical_corpora():
    corpora = [_corpus("b", "a"), _corpus("c")]
    v1 = build_vocabulary(corpora)
    v2 = build_vocabulary(list(corpora))
    assert v1 == v2
    assert encode_directives(corpora[0], v1) == encode_directives(corpora[0], v2)
