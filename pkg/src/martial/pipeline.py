"""Analysis orchestration: problem classes, the technique applicability
matrix, per-pair analyser dispatch, score aggregation and report assembly.

A report is deterministic for a given corpus and config snapshot: pair
ordering is canonical, every collection is sorted, and a fixed-clock test
mode removes the only nondeterministic field.
"""
from __future__ import annotations

import enum
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone

from . import __version__
from .birthmark import (
    MIN_COMMON_COUNTERS,
    SIMILARITY_METHODS,
    TelemetryRecord,
    birthmark_similarity,
    build_birthmark,
    common_counters,
    parse_telemetry,
    per_input_similarity,
)
from .comment_semantics import (
    DEFAULT_DIMENSION,
    DEFAULT_TAU,
    CommentMatch,
    EmbeddingProvider,
    HashingEmbedder,
    HttpEmbeddingProvider,
    comment_file_score,
    comment_pair_matrix,
    eligible_comments,
)
from .directive_analysis import (
    METRICS,
    DirectiveVocabulary,
    build_vocabulary,
    directive_counts,
    directive_similarity,
    encode_directives,
)
from .errors import ConfigError, CorpusError, MartialError, ProviderError
from .fingerprint import FingerprintConfig, FingerprintSet, fingerprint_similarity, fingerprint_stream, match_regions
from .ingest import Availability, CommentCorpus, SubmissionUnit, extract_comments, normalize_tokens, tokenize
from .profiles import LanguageProfile

REPORT_SCHEMA = "martial-report/1"


class ProblemClass(str, enum.Enum):
    SC_S = "SC.S"  # source available, static analysis
    SC_D = "SC.D"  # source available, dynamic analysis
    BIN_S = "BIN.S"  # binary only, static
    BIN_D = "BIN.D"  # binary only, dynamic

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


class TechniqueKind(str, enum.Enum):
    CODE_ANALYSIS = "code_analysis"
    API_BASED = "api_based"
    PROFILING = "profiling"
    FINGERPRINT = "fingerprint"
    SOFTWARE_BIRTHMARKS = "software_birthmarks"
    CODE_EMBEDDINGS = "code_embeddings"
    LLM_BASED = "llm_based"


# Technique x problem-class applicability matrix.
_APPLICABILITY: dict[ProblemClass, frozenset[TechniqueKind]] = {
    ProblemClass.SC_S: frozenset(
        {
            TechniqueKind.CODE_ANALYSIS,
            TechniqueKind.API_BASED,
            TechniqueKind.FINGERPRINT,
            TechniqueKind.SOFTWARE_BIRTHMARKS,
            TechniqueKind.CODE_EMBEDDINGS,
            TechniqueKind.LLM_BASED,
        }
    ),
    ProblemClass.SC_D: frozenset(
        {
            TechniqueKind.PROFILING,
            TechniqueKind.FINGERPRINT,
            TechniqueKind.SOFTWARE_BIRTHMARKS,
            TechniqueKind.CODE_EMBEDDINGS,
        }
    ),
    ProblemClass.BIN_S: frozenset(
        {
            TechniqueKind.API_BASED,
            TechniqueKind.FINGERPRINT,
            TechniqueKind.SOFTWARE_BIRTHMARKS,
            TechniqueKind.CODE_EMBEDDINGS,
        }
    ),
    ProblemClass.BIN_D: frozenset(
        {
            TechniqueKind.PROFILING,
            TechniqueKind.FINGERPRINT,
            TechniqueKind.SOFTWARE_BIRTHMARKS,
            TechniqueKind.CODE_EMBEDDINGS,
        }
    ),
}

ANALYSERS = ("fingerprint", "comments", "directives", "birthmark")

# Analyser -> technique row it implements, and the problem classes whose
# artifacts it actually consumes. The fingerprint/comment/directive
# analysers read source; the birthmark analyser is fed by profiling data.
ANALYSER_TECHNIQUE: dict[str, TechniqueKind] = {
    "fingerprint": TechniqueKind.FINGERPRINT,
    "comments": TechniqueKind.CODE_EMBEDDINGS,
    "directives": TechniqueKind.CODE_ANALYSIS,
    "birthmark": TechniqueKind.SOFTWARE_BIRTHMARKS,
}
_ANALYSER_CLASSES: dict[str, frozenset[ProblemClass]] = {
    "fingerprint": frozenset({ProblemClass.SC_S}),
    "comments": frozenset({ProblemClass.SC_S}),
    "directives": frozenset({ProblemClass.SC_S}),
    "birthmark": frozenset({ProblemClass.SC_D, ProblemClass.BIN_D}),
}

STATUS_OK = "ok"
STATUS_NOT_APPLICABLE = "not_applicable"
STATUS_UNAVAILABLE = "unavailable"


def classify_problem(availability: Availability) -> frozenset[ProblemClass]:
    """Problem classes a submission's artifacts admit. Source access implies
    binary access (the code can always be built)."""
    if not (
        availability.has_source
        or availability.has_binary
        or availability.has_execution_telemetry
    ):
        raise CorpusError("no artifacts")
    classes: set[ProblemClass] = set()
    if availability.has_source:
        classes |= {ProblemClass.SC_S, ProblemClass.BIN_S}
        if availability.has_execution_telemetry:
            classes |= {ProblemClass.SC_D, ProblemClass.BIN_D}
    elif availability.has_binary:
        classes.add(ProblemClass.BIN_S)
        if availability.has_execution_telemetry:
            classes.add(ProblemClass.BIN_D)
    else:
        # telemetry alone still supports dynamic binary-side comparison
        classes.add(ProblemClass.BIN_D)
    return frozenset(classes)


def applicable_techniques(problem_class: ProblemClass) -> frozenset[TechniqueKind]:
    return _APPLICABILITY[problem_class]


@dataclass(frozen=True)
class AnalysisConfig:
    k: int = 5
    w: int = 4
    tau: float = DEFAULT_TAU
    directive_metric: str = "euclidean"
    birthmark_method: str = "cosine"
    embedding_dimension: int = DEFAULT_DIMENSION
    weights: dict[str, float] = field(
        default_factory=lambda: {name: 1.0 for name in ANALYSERS}
    )
    merge_gap: int | None = None  # default 2w
    embed_endpoint: str | None = None
    provider_timeout: float = 10.0
    workers: int = 4
    fixed_clock: str | None = None  # test mode: pins report timestamps

    def validate(self) -> None:
        if self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k}")
        if self.w < 1:
            raise ConfigError(f"w must be >= 1, got {self.w}")
        if not 0.0 < self.tau <= 1.0:
            raise ConfigError(f"tau out of range (0, 1]: {self.tau}")
        if self.directive_metric not in METRICS:
            raise ConfigError(f"metric must be one of {METRICS}, got {self.directive_metric!r}")
        if self.birthmark_method not in SIMILARITY_METHODS:
            raise ConfigError(
                f"birthmark method must be one of {SIMILARITY_METHODS}, got {self.birthmark_method!r}"
            )
        if self.embedding_dimension < 1:
            raise ConfigError(f"embedding dimension must be >= 1, got {self.embedding_dimension}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        unknown = set(self.weights) - set(ANALYSERS)
        if unknown:
            raise ConfigError(f"weights name unknown analysers: {sorted(unknown)}")
        missing = set(ANALYSERS) - set(self.weights)
        if missing:
            raise ConfigError(f"weights missing analysers: {sorted(missing)}")
        if any(wgt < 0 for wgt in self.weights.values()):
            raise ConfigError("weights must be nonnegative")
        if sum(self.weights.values()) == 0:
            raise ConfigError("degenerate weights: all zero")

    def fingerprint_config(self) -> FingerprintConfig:
        return FingerprintConfig(k=self.k, w=self.w)

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "w": self.w,
            "tau": self.tau,
            "directive_metric": self.directive_metric,
            "birthmark_method": self.birthmark_method,
            "embedding_dimension": self.embedding_dimension,
            "weights": dict(sorted(self.weights.items())),
            "merge_gap": self.merge_gap,
            "embed_endpoint": self.embed_endpoint,
            "workers": self.workers,
            "fixed_clock": self.fixed_clock,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "AnalysisConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(raw) - known - {"provider_timeout"}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        config = cls(**{k: v for k, v in raw.items() if k in known})
        if raw.get("weights") is not None:
            config = replace(config, weights={**{n: 1.0 for n in ANALYSERS}, **raw["weights"]})
        config.validate()
        return config


@dataclass
class AnalyserResult:
    status: str
    score: float | None = None
    reason: str | None = None

    @classmethod
    def ok(cls, score: float) -> "AnalyserResult":
        return cls(status=STATUS_OK, score=score)

    @classmethod
    def not_applicable(cls, reason: str) -> "AnalyserResult":
        return cls(status=STATUS_NOT_APPLICABLE, reason=reason)

    @classmethod
    def unavailable(cls, reason: str) -> "AnalyserResult":
        return cls(status=STATUS_UNAVAILABLE, reason=reason)

    def to_dict(self) -> dict:
        return {"status": self.status, "score": self.score, "reason": self.reason}


@dataclass
class SubmissionArtifacts:
    """Everything the analysers need, computed once per submission."""

    unit: SubmissionUnit
    classes: frozenset[ProblemClass]
    fingerprints: dict[str, FingerprintSet]
    comments: CommentCorpus
    telemetry: list[TelemetryRecord] | None
    telemetry_error: str | None = None

    @property
    def id(self) -> str:
        return self.unit.id

    def hash_union(self) -> set[int]:
        union: set[int] = set()
        for fps in self.fingerprints.values():
            union |= fps.hashes()
        return union


def prepare_submission(
    unit: SubmissionUnit, config: AnalysisConfig, profile: LanguageProfile
) -> SubmissionArtifacts:
    fp_config = config.fingerprint_config()
    fingerprints: dict[str, FingerprintSet] = {}
    humans = []
    directives = []
    warnings = []
    for path, text in unit.files:
        stream = normalize_tokens(tokenize(text, profile, source_file=path), profile)
        fingerprints[path] = fingerprint_stream(stream, fp_config, source_id=unit.id, path=path)
        corpus = extract_comments(text, profile, source_file=path)
        humans.extend(corpus.human_comments)
        directives.extend(corpus.directives)
        warnings.extend(corpus.warnings)
    telemetry: list[TelemetryRecord] | None = None
    telemetry_error: str | None = None
    if unit.telemetry_path is not None:
        try:
            telemetry = [r for r in parse_telemetry(unit.telemetry_path) if r.program_id == unit.id] or None
            if telemetry is None:
                telemetry_error = f"telemetry file has no records for program {unit.id!r}"
        except MartialError as exc:
            telemetry_error = str(exc)
    return SubmissionArtifacts(
        unit=unit,
        classes=classify_problem(unit.availability),
        fingerprints=fingerprints,
        comments=CommentCorpus(human_comments=humans, directives=directives, warnings=warnings),
        telemetry=telemetry,
        telemetry_error=telemetry_error,
    )


@dataclass
class PairScore:
    a: str
    b: str
    scores: dict[str, AnalyserResult]
    aggregate: float | None
    evidence: dict

    @property
    def pair_id(self) -> str:
        return f"{self.a}::{self.b}"

    def to_dict(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "scores": {name: r.to_dict() for name, r in sorted(self.scores.items())},
            "aggregate": self.aggregate,
            "evidence": self.evidence,
        }


def _analyser_applies(name: str, shared: frozenset[ProblemClass]) -> bool:
    technique = ANALYSER_TECHNIQUE[name]
    if not any(technique in applicable_techniques(c) for c in shared):
        return False
    return bool(_ANALYSER_CLASSES[name] & shared)


def _span_json(span) -> list[list[int]]:
    return [list(span[0]), list(span[1])]


def _comment_json(record) -> dict:
    return {
        "file": record.file,
        "line_start": record.start_line,
        "line_end": record.end_line,
        "text": record.text,
    }


def run_pair_analysis(
    arts_a: SubmissionArtifacts,
    arts_b: SubmissionArtifacts,
    config: AnalysisConfig,
    provider: EmbeddingProvider,
    vocabulary: DirectiveVocabulary,
) -> PairScore:
    """Run every enabled analyser that is applicable to a problem class the
    two submissions share. Analyser failures are recorded, never raised."""
    if arts_b.id < arts_a.id:
        arts_a, arts_b = arts_b, arts_a
    shared = arts_a.classes & arts_b.classes
    scores: dict[str, AnalyserResult] = {}
    evidence: dict = {}

    if _analyser_applies("fingerprint", shared):
        scores["fingerprint"], evidence["match_regions"] = _fingerprint_pair(arts_a, arts_b, config)
    else:
        scores["fingerprint"] = AnalyserResult.not_applicable("requires shared source access")

    if _analyser_applies("comments", shared):
        scores["comments"], matches = _comment_pair(arts_a, arts_b, config, provider)
        evidence["comment_matches"] = [
            {"a": _comment_json(m.comment_a), "b": _comment_json(m.comment_b), "cosine": m.cosine}
            for m in matches
        ]
        evidence["comment_counts"] = {
            "eligible_a": len(eligible_comments(arts_a.comments)),
            "eligible_b": len(eligible_comments(arts_b.comments)),
            "excluded_a": len(arts_a.comments.human_comments) - len(eligible_comments(arts_a.comments)),
            "excluded_b": len(arts_b.comments.human_comments) - len(eligible_comments(arts_b.comments)),
        }
    else:
        scores["comments"] = AnalyserResult.not_applicable("requires shared source access")

    if _analyser_applies("directives", shared):
        scores["directives"] = _directive_pair(arts_a, arts_b, config, vocabulary)
        evidence["directives"] = {
            "counts_a": dict(sorted(directive_counts(arts_a.comments).items())),
            "counts_b": dict(sorted(directive_counts(arts_b.comments).items())),
        }
    else:
        scores["directives"] = AnalyserResult.not_applicable("requires shared source access")

    if _analyser_applies("birthmark", shared):
        scores["birthmark"], evidence["birthmark"] = _birthmark_pair(arts_a, arts_b, config)
    else:
        scores["birthmark"] = AnalyserResult.not_applicable("requires execution telemetry on both sides")

    aggregate = aggregate_scores(scores, config.weights)
    return PairScore(a=arts_a.id, b=arts_b.id, scores=scores, aggregate=aggregate, evidence=evidence)


def _fingerprint_pair(arts_a, arts_b, config) -> tuple[AnalyserResult, list]:
    union_a = FingerprintSet(
        entries=[e for path in sorted(arts_a.fingerprints) for e in arts_a.fingerprints[path].entries],
        source_id=arts_a.id,
        config=config.fingerprint_config(),
    )
    union_b = FingerprintSet(
        entries=[e for path in sorted(arts_b.fingerprints) for e in arts_b.fingerprints[path].entries],
        source_id=arts_b.id,
        config=config.fingerprint_config(),
    )
    sim = fingerprint_similarity(union_a, union_b)
    regions_json = []
    for path_a in sorted(arts_a.fingerprints):
        for path_b in sorted(arts_b.fingerprints):
            for region in match_regions(
                arts_a.fingerprints[path_a], arts_b.fingerprints[path_b], merge_gap=config.merge_gap
            ):
                regions_json.append(
                    {
                        "file_a": path_a,
                        "file_b": path_b,
                        "span_a": _span_json(region.span_a),
                        "span_b": _span_json(region.span_b),
                        "shared_fingerprints": region.shared_fingerprints,
                    }
                )
    if sim.insufficient_data and not union_a.entries and not union_b.entries:
        return AnalyserResult.not_applicable("no fingerprintable content"), regions_json
    result = AnalyserResult.ok(sim.jaccard)
    return result, regions_json


def _comment_pair(arts_a, arts_b, config, provider) -> tuple[AnalyserResult, list[CommentMatch]]:
    try:
        matches = comment_pair_matrix(arts_a.comments, arts_b.comments, provider, tau=config.tau)
    except ProviderError as exc:
        return AnalyserResult.unavailable(str(exc)), []
    score = comment_file_score(
        matches,
        len(eligible_comments(arts_a.comments)),
        len(eligible_comments(arts_b.comments)),
    )
    if score is None:
        return AnalyserResult.not_applicable("no eligible comments on one side"), matches
    return AnalyserResult.ok(score), matches


def _directive_pair(arts_a, arts_b, config, vocabulary) -> AnalyserResult:
    u = encode_directives(arts_a.comments, vocabulary, submission_id=arts_a.id)
    v = encode_directives(arts_b.comments, vocabulary, submission_id=arts_b.id)
    if len(vocabulary) == 0:
        return AnalyserResult.not_applicable("no directives anywhere in the corpus")
    score = directive_similarity(u, v, metric=config.directive_metric)
    if score is None:
        return AnalyserResult.not_applicable("neither submission uses directives")
    return AnalyserResult.ok(score)


def _birthmark_pair(arts_a, arts_b, config) -> tuple[AnalyserResult, dict | None]:
    for arts in (arts_a, arts_b):
        if arts.telemetry_error:
            return AnalyserResult.unavailable(f"{arts.id}: {arts.telemetry_error}"), None
        if not arts.telemetry:
            return AnalyserResult.unavailable(f"{arts.id}: no telemetry records"), None
    counters = common_counters(arts_a.telemetry, arts_b.telemetry)
    if len(counters) < MIN_COMMON_COUNTERS:
        return (
            AnalyserResult.unavailable(
                f"insufficient metrics: {len(counters)} common counters, need >= {MIN_COMMON_COUNTERS}"
            ),
            None,
        )
    bm_a = build_birthmark(arts_a.telemetry, counters)
    bm_b = build_birthmark(arts_b.telemetry, counters)
    score = birthmark_similarity(bm_a, bm_b, method=config.birthmark_method)
    detail = {
        "common_counters": list(counters),
        "method": config.birthmark_method,
        "per_input": [
            {"input_id": input_id, "similarity": value}
            for input_id, value in per_input_similarity(bm_a, bm_b, method=config.birthmark_method)
        ],
    }
    if score is None:
        return AnalyserResult.not_applicable("no shared telemetry inputs"), detail
    return AnalyserResult.ok(score), detail


def aggregate_scores(scores: dict[str, AnalyserResult], weights: dict[str, float]) -> float | None:
    """Weighted mean over the analysers that produced a numeric score, with
    weights renormalized over that subset. None when no analyser (or none
    with positive weight) produced a number."""
    numeric = {name: r.score for name, r in scores.items() if r.status == STATUS_OK}
    if not numeric:
        return None
    missing = set(numeric) - set(weights)
    if missing:
        raise ConfigError(f"weights missing analysers: {sorted(missing)}")
    total = sum(weights[name] for name in numeric)
    if total == 0:
        return None
    return sum(weights[name] * score for name, score in numeric.items()) / total


@dataclass
class AnalysisReport:
    corpus_root: str | None
    language: str
    config: AnalysisConfig
    submissions: list[SubmissionArtifacts]
    pairs: list[PairScore]
    created_at: str
    completed_at: str

    def to_dict(self) -> dict:
        return {
            "schema": REPORT_SCHEMA,
            "corpus": {
                "root": self.corpus_root,
                "language": self.language,
                "submission_count": len(self.submissions),
            },
            "config": self.config.to_dict(),
            "submissions": [
                {
                    "id": arts.id,
                    "files": [path for path, _ in arts.unit.files],
                    "availability": {
                        "has_source": arts.unit.availability.has_source,
                        "has_binary": arts.unit.availability.has_binary,
                        "has_execution_telemetry": arts.unit.availability.has_execution_telemetry,
                    },
                    "problem_classes": sorted(c.value for c in arts.classes),
                    "warnings": list(arts.unit.warnings),
                }
                for arts in self.submissions
            ],
            "pairs": [pair.to_dict() for pair in self.pairs],
            "tool_version": __version__,
            "created_at": self.created_at,
            "completed_at": self.completed_at,
        }


def canonical_json(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def make_provider(config: AnalysisConfig) -> EmbeddingProvider:
    if config.embed_endpoint:
        return HttpEmbeddingProvider(config.embed_endpoint, timeout=config.provider_timeout)
    return HashingEmbedder(dimension=config.embedding_dimension)


def _now(config: AnalysisConfig) -> str:
    if config.fixed_clock is not None:
        return config.fixed_clock
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def analyze_corpus(
    units: list[SubmissionUnit],
    config: AnalysisConfig,
    profile: LanguageProfile,
    provider: EmbeddingProvider | None = None,
    corpus_root: str | None = None,
) -> AnalysisReport:
    """Analyse all unordered submission pairs. Pair analyses run on a worker
    pool; results are independent of scheduling order."""
    config.validate()
    created = _now(config)
    if provider is None:
        provider = make_provider(config)
    units = sorted(units, key=lambda u: u.id)
    ids = [u.id for u in units]
    if len(set(ids)) != len(ids):
        raise CorpusError(f"duplicate submission ids: {sorted({i for i in ids if ids.count(i) > 1})}")

    artifacts = [prepare_submission(unit, config, profile) for unit in units]
    vocabulary = build_vocabulary([arts.comments for arts in artifacts])

    pairs_todo = [
        (artifacts[i], artifacts[j])
        for i in range(len(artifacts))
        for j in range(i + 1, len(artifacts))
    ]
    if config.workers > 1 and len(pairs_todo) > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            pairs = list(
                pool.map(
                    lambda ab: run_pair_analysis(ab[0], ab[1], config, provider, vocabulary),
                    pairs_todo,
                )
            )
    else:
        pairs = [run_pair_analysis(a, b, config, provider, vocabulary) for a, b in pairs_todo]
    pairs.sort(key=lambda p: (p.a, p.b))
    return AnalysisReport(
        corpus_root=corpus_root,
        language=profile.name,
        config=config,
        submissions=artifacts,
        pairs=pairs,
        created_at=created,
        completed_at=_now(config),
    )


def ranked_pairs(report_dict: dict) -> list[dict]:
    """Pairs sorted by aggregate descending; undefined aggregates sort last."""
    return sorted(
        report_dict["pairs"],
        key=lambda p: (p["aggregate"] is None, -(p["aggregate"] or 0.0), p["a"], p["b"]),
    )
