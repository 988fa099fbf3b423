"""Comment-semantics analyser: embed human comments, pair them across
submissions by cosine similarity, and score the pair by mutual coverage.

The builtin embedder is deterministic feature hashing over word unigrams
and bigrams; transformer-quality embeddings plug in through the HTTP
provider contract instead of being bundled.
"""
from __future__ import annotations

import hashlib
import math
import re
import threading
from dataclasses import dataclass
from typing import Protocol, Sequence

import httpx

from .errors import ConfigError, ProviderError, ProviderMismatchError
from .ingest import CommentCorpus, CommentRecord

DEFAULT_DIMENSION = 256
DEFAULT_TAU = 0.8
MIN_COMMENT_WORDS = 3  # shorter comments are noise, excluded from matching

_WORD_RE = re.compile(r"[a-z0-9]+")


@dataclass(frozen=True)
class EmbeddingVector:
    values: tuple[float, ...]
    provider_id: str
    empty: bool = False  # whitespace-only input: zero vector, never matches


class EmbeddingProvider(Protocol):
    provider_id: str
    dimension: int

    def embed_batch(self, texts: Sequence[str]) -> list[EmbeddingVector]: ...


def _words(text: str) -> list[str]:
    return _WORD_RE.findall(text.lower())


def _feature_hash(feature: str) -> int:
    digest = hashlib.blake2b(feature.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big")


class HashingEmbedder:
    """Deterministic builtin provider: word unigrams and bigrams are
    feature-hashed into D buckets with a hash-derived sign, L2-normalized."""

    def __init__(self, dimension: int = DEFAULT_DIMENSION):
        self.dimension = dimension
        self.provider_id = f"builtin-hashing-{dimension}"

    def embed(self, text: str) -> EmbeddingVector:
        words = _words(text)
        if not words:
            return EmbeddingVector(
                values=(0.0,) * self.dimension, provider_id=self.provider_id, empty=True
            )
        values = [0.0] * self.dimension
        features = words + [f"{a} {b}" for a, b in zip(words, words[1:])]
        for feature in features:
            h = _feature_hash(feature)
            sign = 1.0 if (h >> 63) & 1 == 0 else -1.0
            values[h % self.dimension] += sign
        norm = math.sqrt(sum(v * v for v in values))
        if norm == 0.0:
            # sign cancellation; keep a deterministic non-matching vector
            return EmbeddingVector(
                values=(0.0,) * self.dimension, provider_id=self.provider_id, empty=True
            )
        return EmbeddingVector(
            values=tuple(v / norm for v in values), provider_id=self.provider_id
        )

    def embed_batch(self, texts: Sequence[str]) -> list[EmbeddingVector]:
        return [self.embed(t) for t in texts]


class HttpEmbeddingProvider:
    """Client for the external provider: POST {endpoint}/embed with
    {"texts": [...]}, expecting {"vectors", "dimension", "provider_id"}.

    Safe for concurrent use; in-flight requests are capped.
    """

    def __init__(
        self,
        endpoint: str,
        timeout: float = 10.0,
        max_in_flight: int = 4,
        dimension: int | None = None,
    ):
        self.endpoint = endpoint.rstrip("/")
        self.provider_id = f"http:{self.endpoint}"
        self.dimension = dimension or 0  # learned from the first response
        self._client = httpx.Client(timeout=timeout)
        self._slots = threading.Semaphore(max_in_flight)

    def embed_batch(self, texts: Sequence[str]) -> list[EmbeddingVector]:
        with self._slots:
            try:
                resp = self._client.post(f"{self.endpoint}/embed", json={"texts": list(texts)})
                resp.raise_for_status()
                payload = resp.json()
                vectors = payload["vectors"]
                dimension = int(payload["dimension"])
                provider_id = str(payload["provider_id"])
            except (httpx.HTTPError, KeyError, ValueError, TypeError) as exc:
                raise ProviderError(f"provider unavailable: {exc}") from exc
        if len(vectors) != len(texts):
            raise ProviderError(
                f"provider unavailable: expected {len(texts)} vectors, got {len(vectors)}"
            )
        self.dimension = dimension
        self.provider_id = provider_id
        out = []
        for text, vec in zip(texts, vectors):
            if len(vec) != dimension:
                raise ProviderError("provider unavailable: inconsistent vector dimension")
            norm = math.sqrt(sum(float(v) ** 2 for v in vec))
            out.append(
                EmbeddingVector(
                    values=tuple(float(v) for v in vec),
                    provider_id=provider_id,
                    empty=norm == 0.0 or not text.strip(),
                )
            )
        return out

    def close(self) -> None:
        self._client.close()


def cosine_similarity(u: EmbeddingVector, v: EmbeddingVector) -> float:
    """dot(u, v) / (|u| |v|); 0.0 when either norm is zero (undefined)."""
    if u.provider_id != v.provider_id or len(u.values) != len(v.values):
        raise ProviderMismatchError(
            f"provider mismatch: {u.provider_id}/{len(u.values)} vs {v.provider_id}/{len(v.values)}"
        )
    dot = sum(a * b for a, b in zip(u.values, v.values))
    nu = math.sqrt(sum(a * a for a in u.values))
    nv = math.sqrt(sum(b * b for b in v.values))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return dot / (nu * nv)


@dataclass(frozen=True)
class CommentMatch:
    comment_a: CommentRecord
    comment_b: CommentRecord
    cosine: float


def eligible_comments(corpus: CommentCorpus) -> list[CommentRecord]:
    """Comments long enough to carry a matchable thought (>= 3 words)."""
    return [c for c in corpus.human_comments if len(_words(c.text)) >= MIN_COMMENT_WORDS]


def comment_pair_matrix(
    a: CommentCorpus,
    b: CommentCorpus,
    provider: EmbeddingProvider,
    tau: float = DEFAULT_TAU,
) -> list[CommentMatch]:
    """All cross-submission comment pairs with cosine >= tau, best first.

    Empty-flagged vectors never match. Raises ProviderError if the external
    provider is unreachable; callers mark the analyser unavailable.
    """
    if not 0.0 < tau <= 1.0:
        raise ConfigError(f"tau out of range (0, 1]: {tau}")
    comments_a = eligible_comments(a)
    comments_b = eligible_comments(b)
    if not comments_a or not comments_b:
        return []
    vecs_a = provider.embed_batch([c.text for c in comments_a])
    vecs_b = provider.embed_batch([c.text for c in comments_b])
    matches: list[tuple[float, int, int]] = []
    for i, (ca, va) in enumerate(zip(comments_a, vecs_a)):
        if va.empty:
            continue
        for j, (cb, vb) in enumerate(zip(comments_b, vecs_b)):
            if vb.empty:
                continue
            cos = cosine_similarity(va, vb)
            if cos >= tau:
                matches.append((cos, i, j))
    matches.sort(key=lambda m: (-m[0], m[1], m[2]))
    return [CommentMatch(comments_a[i], comments_b[j], cos) for cos, i, j in matches]


def comment_file_score(
    matches: Sequence[CommentMatch], count_a: int, count_b: int
) -> float | None:
    """Harmonic mean of the two matched-comment coverages; None when either
    side has no eligible comments (analyser not applicable)."""
    if count_a < 0 or count_b < 0:
        raise ValueError("comment counts must be >= 0")
    if count_a == 0 or count_b == 0:
        return None
    matched_a = len({(m.comment_a.file, m.comment_a.start_line, m.comment_a.text) for m in matches})
    matched_b = len({(m.comment_b.file, m.comment_b.start_line, m.comment_b.text) for m in matches})
    coverage_a = min(matched_a / count_a, 1.0)
    coverage_b = min(matched_b / count_b, 1.0)
    if coverage_a == 0.0 or coverage_b == 0.0:
        return 0.0
    return 2.0 * coverage_a * coverage_b / (coverage_a + coverage_b)
