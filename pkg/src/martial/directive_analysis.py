"""Directive analyser: one-hot encode machine-readable comments against a
corpus-wide vocabulary and score pairs by distance in that space.

Which lint suppressions an author reaches for, and with which arguments,
is a surprisingly stable authorial fingerprint.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable

from .errors import ConfigError, StaleVocabularyError
from .ingest import CommentCorpus

METRICS = ("euclidean", "manhattan")


@dataclass(frozen=True)
class DirectiveVocabulary:
    entries: tuple[str, ...]  # distinct keys, sorted

    def __post_init__(self) -> None:
        if list(self.entries) != sorted(set(self.entries)):
            raise ConfigError("vocabulary entries must be sorted and distinct")

    @property
    def index(self) -> dict[str, int]:
        return {key: i for i, key in enumerate(self.entries)}

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class DirectiveVector:
    bits: tuple[int, ...]  # bit i set iff vocabulary entry i occurs
    submission_id: str = ""


def build_vocabulary(corpora: Iterable[CommentCorpus]) -> DirectiveVocabulary:
    keys = {d.key for corpus in corpora for d in corpus.directives}
    return DirectiveVocabulary(entries=tuple(sorted(keys)))


def encode_directives(
    corpus: CommentCorpus, vocab: DirectiveVocabulary, submission_id: str = ""
) -> DirectiveVector:
    index = vocab.index
    bits = [0] * len(vocab)
    for d in corpus.directives:
        if d.key not in index:
            raise StaleVocabularyError(f"stale vocabulary: key {d.key!r} not present")
        bits[index[d.key]] = 1
    return DirectiveVector(bits=tuple(bits), submission_id=submission_id)


def directive_counts(corpus: CommentCorpus) -> dict[str, int]:
    """Occurrence counts, kept in reports as auxiliary evidence only."""
    return dict(Counter(d.key for d in corpus.directives))


def directive_similarity(
    u: DirectiveVector, v: DirectiveVector, metric: str = "euclidean"
) -> float | None:
    """1 / (1 + distance); None when neither submission uses directives."""
    if len(u.bits) != len(v.bits):
        raise ConfigError(f"vector length mismatch: {len(u.bits)} vs {len(v.bits)}")
    if metric not in METRICS:
        raise ConfigError(f"unknown metric {metric!r}; choose from {METRICS}")
    if not any(u.bits) and not any(v.bits):
        return None
    if metric == "manhattan":
        d: float = sum(abs(a - b) for a, b in zip(u.bits, v.bits))
    else:
        d = math.sqrt(sum((a - b) ** 2 for a, b in zip(u.bits, v.bits)))
    return 1.0 / (1.0 + d)
