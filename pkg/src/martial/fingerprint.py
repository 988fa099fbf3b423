"""Winnowing fingerprints over normalized token streams.

Hashes every k-gram of lexemes with a polynomial rolling hash, then keeps
the minimum hash of each sliding window of w grams (robust selection:
a selection is kept while it stays minimal inside the window; fresh picks
break ties to the right). Constants are fixed so fingerprints are
reproducible across runs, machines and stored reports.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ConfigError
from .ingest import TokenStream

HASH_BASE = 257
HASH_MODULUS = (1 << 61) - 1  # Mersenne prime
_SEPARATOR = b"\x1f"

Span = tuple[tuple[int, int], tuple[int, int]]  # ((line, col), (end_line, end_col))


@dataclass(frozen=True)
class FingerprintConfig:
    k: int = 5  # gram size in tokens
    w: int = 4  # window size in grams
    hash_base: int = HASH_BASE
    hash_modulus: int = HASH_MODULUS

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k}")
        if self.w < 1:
            raise ConfigError(f"w must be >= 1, got {self.w}")

    @property
    def guarantee_threshold(self) -> int:
        """Matches of at least t = w + k - 1 tokens are always detected."""
        return self.w + self.k - 1


@dataclass(frozen=True)
class KGram:
    hash: int
    gram_index: int  # 0-based
    span: Span  # source span of the k tokens


@dataclass
class FingerprintSet:
    entries: list[KGram]  # gram_index strictly increasing
    source_id: str = ""
    path: str = ""
    config: FingerprintConfig = field(default_factory=FingerprintConfig)

    def hashes(self) -> set[int]:
        return {e.hash for e in self.entries}


@dataclass(frozen=True)
class SimilarityScores:
    jaccard: float
    containment_ab: float
    containment_ba: float
    insufficient_data: bool = False


@dataclass(frozen=True)
class MatchRegion:
    span_a: Span
    span_b: Span
    shared_fingerprints: int
    gram_range_a: tuple[int, int]
    gram_range_b: tuple[int, int]


def hash_kgrams(
    stream: TokenStream,
    k: int,
    base: int = HASH_BASE,
    modulus: int = HASH_MODULUS,
) -> list[KGram]:
    """Hash every contiguous k-token window of the stream's lexemes.

    The hash is a polynomial hash over the bytes of the k lexemes joined
    with a separator; it is updated incrementally as the window slides,
    giving identical values to hashing each gram from scratch.
    """
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}")
    tokens = stream.tokens
    n = len(tokens)
    if n < k:
        return []

    units = [t.lexeme.encode("utf-8") + _SEPARATOR for t in tokens]
    unit_hashes = []
    for unit in units:
        h = 0
        for b in unit:
            h = (h * base + b) % modulus
        unit_hashes.append(h)

    pow_cache: dict[int, int] = {}

    def shift(length: int) -> int:
        if length not in pow_cache:
            pow_cache[length] = pow(base, length, modulus)
        return pow_cache[length]

    def span_for(i: int) -> Span:
        first, last = tokens[i], tokens[i + k - 1]
        return ((first.line, first.col), (last.end_line, last.end_col))

    gram_hash = 0
    gram_len = 0
    for j in range(k):
        gram_hash = (gram_hash * shift(len(units[j])) + unit_hashes[j]) % modulus
        gram_len += len(units[j])

    out = [KGram(hash=gram_hash, gram_index=0, span=span_for(0))]
    for i in range(1, n - k + 1):
        out_unit = units[i - 1]
        in_unit = units[i + k - 1]
        gram_hash = (gram_hash - unit_hashes[i - 1] * shift(gram_len - len(out_unit))) % modulus
        gram_hash = (gram_hash * shift(len(in_unit)) + unit_hashes[i + k - 1]) % modulus
        gram_len += len(in_unit) - len(out_unit)
        out.append(KGram(hash=gram_hash, gram_index=i, span=span_for(i)))
    return out


def _rightmost_min(grams: list[KGram], lo: int, hi: int) -> int:
    """Index of the rightmost minimum hash in grams[lo:hi]."""
    best = lo
    for i in range(lo + 1, hi):
        if grams[i].hash <= grams[best].hash:
            best = i
    return best


def winnow(
    grams: list[KGram],
    w: int,
    source_id: str = "",
    path: str = "",
    config: FingerprintConfig | None = None,
) -> FingerprintSet:
    """Select fingerprints: the minimum hash of every window of w grams.

    A selection persists while it remains minimal inside the sliding
    window; when it drops out, or a strictly smaller hash enters, a new
    selection is made (rightmost minimum on ties). Every window of w
    consecutive grams therefore contains at least one selection. Fewer
    than w grams: the single global minimum is selected.
    """
    if w < 1:
        raise ConfigError(f"w must be >= 1, got {w}")
    cfg = config or FingerprintConfig(k=1, w=w)
    entries: list[KGram] = []
    n = len(grams)
    if n == 0:
        return FingerprintSet(entries=[], source_id=source_id, path=path, config=cfg)
    if n < w:
        entries.append(grams[_rightmost_min(grams, 0, n)])
        return FingerprintSet(entries=entries, source_id=source_id, path=path, config=cfg)

    sel = _rightmost_min(grams, 0, w)
    entries.append(grams[sel])
    for i in range(w, n):
        lo = i - w + 1
        if sel < lo:
            sel = _rightmost_min(grams, lo, i + 1)
            entries.append(grams[sel])
        elif grams[i].hash < grams[sel].hash:
            sel = i
            entries.append(grams[sel])
    return FingerprintSet(entries=entries, source_id=source_id, path=path, config=cfg)


def fingerprint_stream(
    normalized: TokenStream,
    config: FingerprintConfig,
    source_id: str = "",
    path: str = "",
) -> FingerprintSet:
    grams = hash_kgrams(normalized, config.k, config.hash_base, config.hash_modulus)
    return winnow(grams, config.w, source_id=source_id, path=path, config=config)


def fingerprint_similarity(a: FingerprintSet, b: FingerprintSet) -> SimilarityScores:
    """Jaccard and directed containments over the distinct hash sets."""
    ha, hb = a.hashes(), b.hashes()
    if not ha and not hb:
        return SimilarityScores(0.0, 0.0, 0.0, insufficient_data=True)
    inter = len(ha & hb)
    union = len(ha | hb)
    return SimilarityScores(
        jaccard=inter / union if union else 0.0,
        containment_ab=inter / len(ha) if ha else 0.0,
        containment_ba=inter / len(hb) if hb else 0.0,
        insufficient_data=not ha or not hb,
    )


def match_regions(a: FingerprintSet, b: FingerprintSet, merge_gap: int | None = None) -> list[MatchRegion]:
    """Group shared fingerprints into contiguous matched regions.

    Each shared hash contributes once, anchored at its first occurrence in
    each file; anchor pairs whose gram indices lie within ``merge_gap`` in
    both files are merged (default gap: 2w).
    """
    if merge_gap is None:
        merge_gap = 2 * a.config.w
    first_a: dict[int, KGram] = {}
    for e in a.entries:
        first_a.setdefault(e.hash, e)
    first_b: dict[int, KGram] = {}
    for e in b.entries:
        first_b.setdefault(e.hash, e)

    shared = sorted(
        ((first_a[h], first_b[h]) for h in first_a.keys() & first_b.keys()),
        key=lambda pair: (pair[0].gram_index, pair[1].gram_index),
    )
    regions: list[MatchRegion] = []
    for ga, gb in shared:
        if regions:
            r = regions[-1]
            if (
                ga.gram_index - r.gram_range_a[1] <= merge_gap
                and r.gram_range_b[0] - merge_gap <= gb.gram_index <= r.gram_range_b[1] + merge_gap
            ):
                regions[-1] = MatchRegion(
                    span_a=(min(r.span_a[0], ga.span[0]), max(r.span_a[1], ga.span[1])),
                    span_b=(min(r.span_b[0], gb.span[0]), max(r.span_b[1], gb.span[1])),
                    shared_fingerprints=r.shared_fingerprints + 1,
                    gram_range_a=(r.gram_range_a[0], ga.gram_index),
                    gram_range_b=(min(r.gram_range_b[0], gb.gram_index), max(r.gram_range_b[1], gb.gram_index)),
                )
                continue
        regions.append(
            MatchRegion(
                span_a=ga.span,
                span_b=gb.span,
                shared_fingerprints=1,
                gram_range_a=(ga.gram_index, ga.gram_index),
                gram_range_b=(gb.gram_index, gb.gram_index),
            )
        )
    regions.sort(key=lambda r: r.span_a)
    return regions


def dump_fingerprints(fps: FingerprintSet) -> str:
    """Cache format: a config header line, then one record per entry."""
    lines = [
        f"# martial-fingerprints/1 k={fps.config.k} w={fps.config.w} "
        f"base={fps.config.hash_base} modulus={fps.config.hash_modulus} "
        f"source={fps.source_id} path={fps.path}"
    ]
    for e in fps.entries:
        (l0, c0), (l1, c1) = e.span
        lines.append(f"{e.hash} {e.gram_index} {l0}:{c0}-{l1}:{c1}")
    return "\n".join(lines) + "\n"
