"""Review service: HTTP API over analyses, ranked pairs and human verdicts.

Persistence is an on-disk document store keyed by analysis id with an
append-only verdict log, so classroom-scale deployments need no external
database. Analyses are immutable once done; a changed configuration means
a new analysis, which keeps the audit trail intact.
"""
from __future__ import annotations

import json
import threading
import uuid
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import JSONResponse, Response
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import __version__
from .errors import ConfigError, MartialError
from .ingest import Availability, SubmissionUnit, load_corpus
from .pipeline import AnalysisConfig, analyze_corpus, canonical_json, ranked_pairs
from .profiles import resolve_profile

JUDGEMENTS = ("confirmed", "dismissed", "inconclusive")
STATUSES = ("pending", "running", "done", "failed")


class CreateAnalysisRequest(BaseModel):
    corpus_path: str | None = None
    corpus: dict[str, dict[str, str]] | None = None  # inline upload: id -> {path: text}
    config: dict = {}
    language: str = "go-like"


class VerdictRequest(BaseModel):
    judgement: str
    reviewer: str
    note: str = ""


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


class AnalysisStore:
    """Documents on disk:

    analyses/{id}/meta.json      status and config
    analyses/{id}/corpus.json    snapshot of submission file texts
    analyses/{id}/report.json    canonical report, written once when done
    analyses/{id}/verdicts.jsonl append-only verdict log
    """

    def __init__(self, root: str | Path):
        self.root = Path(root)
        (self.root / "analyses").mkdir(parents=True, exist_ok=True)
        self._verdict_locks: dict[str, threading.Lock] = defaultdict(threading.Lock)
        self._locks_guard = threading.Lock()

    def _dir(self, analysis_id: str) -> Path:
        return self.root / "analyses" / analysis_id

    def exists(self, analysis_id: str) -> bool:
        return (self._dir(analysis_id) / "meta.json").is_file()

    def list_ids(self) -> list[str]:
        return sorted(p.name for p in (self.root / "analyses").iterdir() if p.is_dir())

    def create(self, snapshot: dict, config: AnalysisConfig, language: str, source: str | None) -> str:
        analysis_id = uuid.uuid4().hex
        directory = self._dir(analysis_id)
        directory.mkdir(parents=True)
        (directory / "corpus.json").write_text(
            json.dumps(snapshot, sort_keys=True), encoding="utf-8"
        )
        self._write_meta(
            analysis_id,
            {
                "analysis_id": analysis_id,
                "status": "pending",
                "created_at": _now(),
                "config": config.to_dict(),
                "language": language,
                "source": source,
                "reason": None,
            },
        )
        return analysis_id

    def _write_meta(self, analysis_id: str, meta: dict) -> None:
        path = self._dir(analysis_id) / "meta.json"
        tmp = path.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(meta, sort_keys=True), encoding="utf-8")
        tmp.replace(path)

    def meta(self, analysis_id: str) -> dict:
        return json.loads((self._dir(analysis_id) / "meta.json").read_text(encoding="utf-8"))

    def set_status(self, analysis_id: str, status: str, reason: str | None = None) -> None:
        meta = self.meta(analysis_id)
        meta["status"] = status
        meta["reason"] = reason
        self._write_meta(analysis_id, meta)

    def snapshot(self, analysis_id: str) -> dict:
        return json.loads((self._dir(analysis_id) / "corpus.json").read_text(encoding="utf-8"))

    def write_report(self, analysis_id: str, payload: dict) -> None:
        (self._dir(analysis_id) / "report.json").write_text(
            canonical_json(payload), encoding="utf-8"
        )

    def report_bytes(self, analysis_id: str) -> bytes:
        return (self._dir(analysis_id) / "report.json").read_bytes()

    def report(self, analysis_id: str) -> dict:
        return json.loads(self.report_bytes(analysis_id))

    def append_verdict(self, analysis_id: str, record: dict) -> None:
        with self._locks_guard:
            lock = self._verdict_locks[analysis_id]
        with lock:
            path = self._dir(analysis_id) / "verdicts.jsonl"
            with path.open("a", encoding="utf-8") as handle:
                handle.write(json.dumps(record, sort_keys=True) + "\n")

    def verdicts(self, analysis_id: str) -> list[dict]:
        path = self._dir(analysis_id) / "verdicts.jsonl"
        if not path.is_file():
            return []
        return [
            json.loads(line)
            for line in path.read_text(encoding="utf-8").splitlines()
            if line.strip()
        ]


def snapshot_from_path(corpus_path: str, language: str) -> dict:
    """Freeze a server-side corpus directory into a store snapshot, so a
    later re-read of the analysis never depends on the live filesystem."""
    profile = resolve_profile(language)
    units = load_corpus(corpus_path, profile)
    snapshot: dict = {}
    for unit in units:
        telemetry_text = None
        if unit.telemetry_path:
            telemetry_text = Path(unit.telemetry_path).read_text(encoding="utf-8")
        snapshot[unit.id] = {
            "files": {path: text for path, text in unit.files},
            "telemetry": telemetry_text,
            "has_binary": unit.availability.has_binary,
        }
    return snapshot


def units_from_snapshot(snapshot: dict, language: str, store_dir: Path) -> list[SubmissionUnit]:
    units = []
    telemetry_dir = store_dir / "telemetry"
    for submission_id in sorted(snapshot):
        entry = snapshot[submission_id]
        files = sorted(entry.get("files", {}).items())
        telemetry_text = entry.get("telemetry")
        telemetry_path = None
        if telemetry_text:
            telemetry_dir.mkdir(parents=True, exist_ok=True)
            target = telemetry_dir / f"{submission_id}.jsonl"
            target.write_text(telemetry_text, encoding="utf-8")
            telemetry_path = str(target)
        units.append(
            SubmissionUnit(
                id=submission_id,
                files=files,
                language=language,
                availability=Availability(
                    has_source=any(text for _, text in files),
                    has_binary=bool(entry.get("has_binary")),
                    has_execution_telemetry=telemetry_path is not None,
                ),
                telemetry_path=telemetry_path,
            )
        )
    return units


def _validation_error(field: str, message: str) -> HTTPException:
    return HTTPException(status_code=400, detail=[{"field": field, "message": message}])


def create_app(
    store_dir: str | Path,
    default_config: AnalysisConfig | None = None,
    static_dir: str | Path | None = None,
    auth_token: str | None = None,
    workers: int = 2,
) -> FastAPI:
    store = AnalysisStore(store_dir)
    base_config = default_config or AnalysisConfig()
    executor = ThreadPoolExecutor(max_workers=workers)
    app = FastAPI(title="martial review service", version=__version__)
    app.state.store = store

    if auth_token:

        @app.middleware("http")
        async def require_token(request: Request, call_next):
            path = request.url.path
            if path.startswith("/api/") and path != "/api/health":
                if request.headers.get("X-Martial-Token") != auth_token:
                    return JSONResponse(status_code=401, content={"detail": "missing or bad token"})
            return await call_next(request)

    def run_analysis(analysis_id: str) -> None:
        meta = store.meta(analysis_id)
        store.set_status(analysis_id, "running")
        try:
            config = AnalysisConfig.from_dict(meta["config"])
            profile = resolve_profile(meta["language"])
            units = units_from_snapshot(
                store.snapshot(analysis_id), meta["language"], store._dir(analysis_id)
            )
            report = analyze_corpus(
                units, config, profile, corpus_root=meta.get("source")
            )
            store.write_report(analysis_id, report.to_dict())
            store.set_status(analysis_id, "done")
        except Exception as exc:  # failure lands in the status payload
            store.set_status(analysis_id, "failed", reason=str(exc))

    def get_meta_or_404(analysis_id: str) -> dict:
        if not store.exists(analysis_id):
            raise HTTPException(status_code=404, detail=f"unknown analysis {analysis_id}")
        return store.meta(analysis_id)

    def current_verdicts(analysis_id: str) -> dict[str, dict[str, dict]]:
        """pair_id -> reviewer -> latest verdict record."""
        latest: dict[str, dict[str, dict]] = defaultdict(dict)
        for record in store.verdicts(analysis_id):
            latest[record["pair_id"]][record["reviewer"]] = record
        return latest

    def verdict_summary(latest: dict[str, dict], pair_id: str) -> dict:
        per_reviewer = latest.get(pair_id, {})
        judgements = {record["judgement"] for record in per_reviewer.values()}
        return {
            "current": sorted(per_reviewer.values(), key=lambda r: r["reviewer"]),
            "disputed": len(judgements) > 1,
        }

    @app.get("/api/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/api/analyses", status_code=202)
    def create_analysis(request: CreateAnalysisRequest) -> dict:
        if (request.corpus_path is None) == (request.corpus is None):
            raise _validation_error("corpus", "provide exactly one of corpus_path or corpus")
        try:
            config = AnalysisConfig.from_dict({**base_config.to_dict(), **request.config})
        except ConfigError as exc:
            field = next((k for k in request.config if k in str(exc)), "config")
            raise _validation_error(field, str(exc)) from exc
        try:
            if request.corpus_path is not None:
                snapshot = snapshot_from_path(request.corpus_path, request.language)
            else:
                snapshot = {}
                for sid, files in request.corpus.items():
                    files = dict(files)
                    telemetry_text = files.pop("telemetry.jsonl", None)
                    snapshot[sid] = {"files": files, "telemetry": telemetry_text}
        except MartialError as exc:
            raise _validation_error("corpus", str(exc)) from exc
        analysis_id = store.create(snapshot, config, request.language, request.corpus_path)
        executor.submit(run_analysis, analysis_id)
        return {"analysis_id": analysis_id, "status": "pending"}

    @app.get("/api/analyses")
    def list_analyses() -> dict:
        out = []
        for analysis_id in store.list_ids():
            meta = store.meta(analysis_id)
            out.append(
                {
                    "analysis_id": analysis_id,
                    "status": meta["status"],
                    "created_at": meta["created_at"],
                    "source": meta.get("source"),
                }
            )
        return {"analyses": out}

    @app.get("/api/analyses/{analysis_id}")
    def get_analysis(analysis_id: str) -> dict:
        meta = get_meta_or_404(analysis_id)
        payload = {
            "analysis_id": analysis_id,
            "status": meta["status"],
            "created_at": meta["created_at"],
            "config": meta["config"],
            "reason": meta.get("reason"),
        }
        if meta["status"] == "done":
            report = store.report(analysis_id)
            payload["submission_count"] = report["corpus"]["submission_count"]
            payload["pair_count"] = len(report["pairs"])
        return payload

    @app.get("/api/analyses/{analysis_id}/report")
    def get_report(analysis_id: str) -> Response:
        meta = get_meta_or_404(analysis_id)
        if meta["status"] != "done":
            raise HTTPException(
                status_code=409, detail={"status": meta["status"], "reason": meta.get("reason")}
            )
        return Response(content=store.report_bytes(analysis_id), media_type="application/json")

    @app.get("/api/analyses/{analysis_id}/pairs")
    def get_pairs(
        analysis_id: str, min_score: float = 0.0, page: int = 1, page_size: int = 50
    ) -> dict:
        meta = get_meta_or_404(analysis_id)
        if meta["status"] != "done":
            raise HTTPException(
                status_code=409, detail={"status": meta["status"], "reason": meta.get("reason")}
            )
        if page < 1:
            raise _validation_error("page", "page must be >= 1")
        if not 1 <= page_size <= 500:
            raise _validation_error("page_size", "page_size must be in [1, 500]")
        report = store.report(analysis_id)
        rows = ranked_pairs(report)
        if min_score > 0.0:
            rows = [p for p in rows if p["aggregate"] is not None and p["aggregate"] >= min_score]
        latest = current_verdicts(analysis_id)
        total = len(rows)
        start = (page - 1) * page_size
        page_rows = rows[start : start + page_size]
        return {
            "pairs": [
                {
                    "pair_id": f"{p['a']}::{p['b']}",
                    "a": p["a"],
                    "b": p["b"],
                    "aggregate": p["aggregate"],
                    "scores": p["scores"],
                    "verdicts": verdict_summary(latest, f"{p['a']}::{p['b']}"),
                }
                for p in page_rows
            ],
            "total": total,
            "page": page,
            "page_size": page_size,
            "pages": (total + page_size - 1) // page_size if total else 0,
        }

    @app.get("/api/analyses/{analysis_id}/pairs/{pair_id}")
    def get_pair_detail(analysis_id: str, pair_id: str) -> dict:
        meta = get_meta_or_404(analysis_id)
        if meta["status"] != "done":
            raise HTTPException(
                status_code=409, detail={"status": meta["status"], "reason": meta.get("reason")}
            )
        report = store.report(analysis_id)
        pair = next((p for p in report["pairs"] if f"{p['a']}::{p['b']}" == pair_id), None)
        if pair is None:
            raise HTTPException(status_code=404, detail=f"unknown pair {pair_id}")
        snapshot = store.snapshot(analysis_id)
        latest = current_verdicts(analysis_id)
        history = [r for r in store.verdicts(analysis_id) if r["pair_id"] == pair_id]
        return {
            "pair_id": pair_id,
            "a": pair["a"],
            "b": pair["b"],
            "aggregate": pair["aggregate"],
            "scores": pair["scores"],
            "evidence": pair["evidence"],
            "files_a": snapshot.get(pair["a"], {}).get("files", {}),
            "files_b": snapshot.get(pair["b"], {}).get("files", {}),
            "verdicts": {**verdict_summary(latest, pair_id), "history": history},
        }

    @app.post("/api/analyses/{analysis_id}/pairs/{pair_id}/verdicts", status_code=201)
    def post_verdict(analysis_id: str, pair_id: str, verdict: VerdictRequest) -> dict:
        meta = get_meta_or_404(analysis_id)
        if meta["status"] != "done":
            raise HTTPException(
                status_code=409, detail={"status": meta["status"], "reason": meta.get("reason")}
            )
        if verdict.judgement not in JUDGEMENTS:
            raise _validation_error("judgement", f"judgement must be one of {list(JUDGEMENTS)}")
        if not verdict.reviewer.strip():
            raise _validation_error("reviewer", "reviewer must be a non-empty string")
        report = store.report(analysis_id)
        if not any(f"{p['a']}::{p['b']}" == pair_id for p in report["pairs"]):
            raise HTTPException(status_code=404, detail=f"unknown pair {pair_id}")
        record = {
            "pair_id": pair_id,
            "judgement": verdict.judgement,
            "reviewer": verdict.reviewer.strip(),
            "note": verdict.note,
            "decided_at": _now(),
        }
        store.append_verdict(analysis_id, record)
        latest = current_verdicts(analysis_id)
        return {"verdict": record, **verdict_summary(latest, pair_id)}

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
