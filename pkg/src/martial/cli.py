"""Command-line interface: analyze, compare, mutate, serve.

Exit codes: 0 success, 2 configuration error, 3 input/corpus error.
Config precedence: flag > config file > environment > built-in default.
Reports are written atomically (temp file + rename).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

from . import __version__
from .errors import ConfigError, CorpusError, MartialError
from .ingest import Availability, SubmissionUnit, load_corpus
from .mutate import MutationSpec, apply_mutations
from .pipeline import (
    ANALYSERS,
    AnalysisConfig,
    analyze_corpus,
    canonical_json,
    make_provider,
)
from .profiles import resolve_profile

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INPUT = 3

ENV_EMBED_ENDPOINT = "MARTIAL_EMBED_ENDPOINT"


def _fail(code: int, message: str) -> int:
    print(f"martial: error: {message}", file=sys.stderr)
    return code


def atomic_write(path: Path, data: str) -> None:
    """Write via a sibling temp file + rename so crashes never leave a
    truncated report behind."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _parse_weights(raw: str) -> dict[str, float]:
    weights: dict[str, float] = {}
    for item in raw.split(","):
        if not item.strip():
            continue
        name, _, value = item.partition("=")
        name = name.strip()
        if name not in ANALYSERS:
            raise ConfigError(f"--weights names unknown analyser {name!r}; choose from {ANALYSERS}")
        try:
            weights[name] = float(value)
        except ValueError:
            raise ConfigError(f"--weights entry {item!r} is not name=number") from None
    if not weights:
        raise ConfigError("--weights parsed to nothing")
    return weights


def build_config(args: argparse.Namespace) -> AnalysisConfig:
    """Merge flag > config file > environment > default into one config."""
    merged: dict = {}
    endpoint = os.environ.get(ENV_EMBED_ENDPOINT)
    if endpoint:
        merged["embed_endpoint"] = endpoint
    config_path = getattr(args, "config", None)
    if config_path:
        try:
            file_values = json.loads(Path(config_path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"--config {config_path}: {exc}") from exc
        if not isinstance(file_values, dict):
            raise ConfigError(f"--config {config_path}: expected a JSON object")
        merged.update(file_values)

    flag_map = {
        "k": "k",
        "w": "w",
        "tau": "tau",
        "metric": "directive_metric",
        "birthmark_method": "birthmark_method",
        "workers": "workers",
        "embed_endpoint": "embed_endpoint",
        "merge_gap": "merge_gap",
        "fixed_clock": "fixed_clock",
    }
    for flag, key in flag_map.items():
        value = getattr(args, flag, None)
        if value is not None:
            merged[key] = value
    if getattr(args, "weights", None) is not None:
        merged["weights"] = _parse_weights(args.weights)
    return AnalysisConfig.from_dict(merged)


def cmd_analyze(args: argparse.Namespace) -> int:
    try:
        config = build_config(args)
        profile = resolve_profile(args.lang)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, str(exc))
    try:
        units = load_corpus(args.corpus, profile)
    except CorpusError as exc:
        return _fail(EXIT_INPUT, str(exc))
    try:
        report = analyze_corpus(units, config, profile, corpus_root=str(args.corpus))
    except MartialError as exc:
        return _fail(EXIT_INPUT, str(exc))

    payload = report.to_dict()
    out = Path(args.out)
    atomic_write(out, canonical_json(payload))
    print(f"report written to {out} ({len(payload['pairs'])} pairs)", file=sys.stderr)
    if args.html:
        from .htmlreport import render_html

        corpus_texts = {
            arts.id: {path: text for path, text in arts.unit.files}
            for arts in report.submissions
        }
        atomic_write(Path(args.html), render_html(payload, corpus_texts))
        print(f"html written to {args.html}", file=sys.stderr)
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    try:
        config = build_config(args)
        profile = resolve_profile(args.lang)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, str(exc))
    units = []
    for label, filename in (("a", args.file_a), ("b", args.file_b)):
        path = Path(filename)
        try:
            text = path.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            return _fail(EXIT_INPUT, f"cannot read {path}: {exc}")
        units.append(
            SubmissionUnit(
                id=f"{label}:{path.name}",
                files=[(path.name, text)],
                language=profile.name,
                availability=Availability(has_source=bool(text)),
            )
        )
    try:
        report = analyze_corpus(units, config, profile)
    except MartialError as exc:
        return _fail(EXIT_INPUT, str(exc))
    print(canonical_json(report.pairs[0].to_dict()), end="")
    return EXIT_OK


def cmd_mutate(args: argparse.Namespace) -> int:
    try:
        spec = MutationSpec(
            ops=tuple(op.strip() for op in args.ops.split(",") if op.strip()),
            seed=args.seed,
            unroll_factor=args.factor,
        )
        profile = resolve_profile(args.lang)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, str(exc))
    source = Path(args.input)
    try:
        text = source.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        return _fail(EXIT_INPUT, f"cannot read {source}: {exc}")

    result = apply_mutations(text, profile, spec)
    out = Path(args.out) if args.out else source.with_suffix(".mut" + source.suffix)
    atomic_write(out, result.mutated_text)
    manifest = {
        "source_path": str(source),
        "spec": {"ops": list(spec.canonical_ops()), "seed": spec.seed, "unroll_factor": spec.unroll_factor},
        "applied": [{"op": op, "count": count} for op, count in result.applied],
        "unapplicable": [{"op": op, "reason": reason} for op, reason in result.unapplicable],
    }
    atomic_write(out.with_name(out.name + ".manifest.json"), canonical_json(manifest))
    if not any(count for _, count in result.applied):
        print("warning: no op applied any transformation", file=sys.stderr)
    print(f"mutant written to {out}", file=sys.stderr)
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    try:
        config = build_config(args)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, str(exc))
    try:
        import uvicorn

        from .service import create_app

        app = create_app(
            store_dir=args.store,
            default_config=config,
            static_dir=args.static,
            auth_token=args.token,
        )
        uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    except MartialError as exc:
        return _fail(EXIT_INPUT, str(exc))
    return EXIT_OK


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file (flags take precedence)")
    parser.add_argument("--lang", default="go-like", help="language profile name or profile file")
    parser.add_argument("--k", type=int, help="fingerprint gram size in tokens")
    parser.add_argument("--w", type=int, help="winnowing window size in grams")
    parser.add_argument("--tau", type=float, help="comment-match cosine threshold in (0, 1]")
    parser.add_argument("--metric", choices=["euclidean", "manhattan"], help="directive distance metric")
    parser.add_argument("--birthmark-method", dest="birthmark_method", choices=["cosine", "euclidean"])
    parser.add_argument("--weights", help="aggregate weights, e.g. fingerprint=2,comments=1")
    parser.add_argument("--embed-endpoint", dest="embed_endpoint", help="external embedding provider URL")
    parser.add_argument("--workers", type=int, help="pair-analysis worker cap")
    parser.add_argument("--merge-gap", dest="merge_gap", type=int, help="match-region merge gap in grams")
    parser.add_argument(
        "--fixed-clock",
        dest="fixed_clock",
        help="test mode: pin report timestamps to this value for reproducible output",
    )


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="martial", description=__doc__)
    parser.add_argument("--version", action="version", version=f"martial {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_analyze = sub.add_parser("analyze", help="analyse a corpus directory and write a report")
    p_analyze.add_argument("--corpus", required=True, help="directory with one submission per subdirectory")
    p_analyze.add_argument("--out", required=True, help="report JSON output path")
    p_analyze.add_argument("--html", help="optional self-contained HTML report path")
    _add_config_flags(p_analyze)
    p_analyze.set_defaults(func=cmd_analyze)

    p_compare = sub.add_parser("compare", help="compare two files, pair report on stdout")
    p_compare.add_argument("file_a")
    p_compare.add_argument("file_b")
    _add_config_flags(p_compare)
    p_compare.set_defaults(func=cmd_compare)

    p_mutate = sub.add_parser("mutate", help="write an obfuscated mutant of a source file")
    p_mutate.add_argument("input")
    p_mutate.add_argument("--ops", required=True, help="comma-separated ops, e.g. rename,strip,unroll")
    p_mutate.add_argument("--seed", type=int, default=0)
    p_mutate.add_argument("--factor", type=int, default=2, help="loop unroll factor (>= 2)")
    p_mutate.add_argument("--out", help="mutant output path (default: <input>.mut<ext>)")
    p_mutate.add_argument("--lang", default="go-like")
    p_mutate.set_defaults(func=cmd_mutate)

    p_serve = sub.add_parser("serve", help="run the review service")
    p_serve.add_argument("--port", type=int, default=8800)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--store", required=True, help="on-disk store directory")
    p_serve.add_argument("--static", help="directory of built review-UI assets to host at /")
    p_serve.add_argument("--token", help="shared auth token required in X-Martial-Token")
    _add_config_flags(p_serve)
    p_serve.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags, matching the config-error contract
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, str(exc))
    except MartialError as exc:
        return _fail(EXIT_INPUT, str(exc))


if __name__ == "__main__":
    raise SystemExit(main())
