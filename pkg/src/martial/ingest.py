"""Corpus loading and tokenization.

Lexing is total: student submissions frequently do not compile, so every
input produces a token stream. Unknown characters degrade to single-char
operator tokens and malformed constructs are recorded as warnings, never
raised.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import CorpusError
from .profiles import (
    NORMALIZED_IDENTIFIER,
    NORMALIZED_NUMBER,
    NORMALIZED_STRING,
    LanguageProfile,
)

TELEMETRY_FILENAME = "telemetry.jsonl"
BINARY_EXTENSION = ".bin"

_IDENT_START = re.compile(r"[A-Za-z_]")
_IDENT_CONT = re.compile(r"[A-Za-z0-9_]")
_WS_RUN = re.compile(r"\s+")


@dataclass(frozen=True)
class Token:
    kind: str  # keyword | identifier | literal | operator | punct
    lexeme: str
    line: int  # 1-based
    col: int  # 1-based
    end_line: int
    end_col: int  # exclusive


@dataclass
class TokenStream:
    tokens: list[Token]
    source_file: str = "<memory>"
    warnings: list[str] = field(default_factory=list)

    def lexemes(self) -> list[str]:
        return [t.lexeme for t in self.tokens]

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class CommentRecord:
    text: str  # inner text, surrounding whitespace stripped
    file: str
    start_line: int
    end_line: int
    # full source span including the comment markers, for text surgery
    start_col: int = 1
    end_col: int = 1


@dataclass(frozen=True)
class DirectiveRecord:
    key: str  # matched pattern + remaining text, whitespace collapsed
    file: str
    line: int
    start_col: int = 1
    end_line: int = 1
    end_col: int = 1


@dataclass
class CommentCorpus:
    human_comments: list[CommentRecord]
    directives: list[DirectiveRecord]
    warnings: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class Availability:
    has_source: bool = False
    has_binary: bool = False
    has_execution_telemetry: bool = False


@dataclass
class SubmissionUnit:
    id: str
    files: list[tuple[str, str]]  # (relative path, raw text), sorted by path
    language: str
    availability: Availability
    telemetry_path: str | None = None
    warnings: list[str] = field(default_factory=list)


class _Scanner:
    """Single pass over the text producing tokens and comments together."""

    def __init__(self, text: str, profile: LanguageProfile, source_file: str):
        self.text = text
        self.profile = profile
        self.source_file = source_file
        self.pos = 0
        self.line = 1
        self.col = 1
        self.tokens: list[Token] = []
        self.comments: list[tuple[str, int, int, int, int]] = []  # raw inner, span
        self.warnings: list[str] = []
        self._ops = sorted(profile.operators, key=len, reverse=True)

    def _advance(self, n: int) -> None:
        for _ in range(n):
            if self.pos < len(self.text) and self.text[self.pos] == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
            self.pos += 1

    def _emit(self, kind: str, start: tuple[int, int, int]) -> None:
        pos0, line0, col0 = start
        self.tokens.append(
            Token(kind, self.text[pos0 : self.pos], line0, col0, self.line, self.col)
        )

    def scan(self) -> None:
        text, n = self.text, len(self.text)
        while self.pos < n:
            ch = text[self.pos]
            if ch in " \t\r\n\f\v":
                self._advance(1)
                continue
            if text.startswith(self.profile.line_comment, self.pos):
                self._line_comment()
                continue
            if text.startswith(self.profile.block_comment[0], self.pos):
                self._block_comment()
                continue
            start = (self.pos, self.line, self.col)
            if _IDENT_START.match(ch):
                self._advance(1)
                while self.pos < n and _IDENT_CONT.match(text[self.pos]):
                    self._advance(1)
                lexeme = text[start[0] : self.pos]
                kind = "keyword" if lexeme in self.profile.keywords else "identifier"
                self._emit(kind, start)
                continue
            if ch.isdigit():
                self._advance(1)
                while self.pos < n and (text[self.pos].isalnum() or text[self.pos] in "._"):
                    # one loose rule covers ints, floats, hex, exponents
                    if text[self.pos] == "." and not (
                        self.pos + 1 < n and text[self.pos + 1].isdigit()
                    ):
                        break
                    self._advance(1)
                self._emit("literal", start)
                continue
            if ch in "\"'":
                self._quoted(ch, start)
                continue
            if ch == "`":
                self._raw_string(start)
                continue
            op = next((o for o in self._ops if text.startswith(o, self.pos)), None)
            if op is not None:
                self._advance(len(op))
                self._emit("operator", start)
                continue
            if ch in "()[]{},;:.":
                self._advance(1)
                self._emit("punct", start)
                continue
            # anything else: single-char operator so lexing never fails
            self._advance(1)
            self._emit("operator", start)

    def _line_comment(self) -> None:
        start = (self.pos, self.line, self.col)
        self._advance(len(self.profile.line_comment))
        inner_start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] != "\n":
            self._advance(1)
        inner = self.text[inner_start : self.pos]
        self.comments.append((inner, start[1], start[2], self.line, self.col))

    def _block_comment(self) -> None:
        opener, closer = self.profile.block_comment
        start = (self.pos, self.line, self.col)
        self._advance(len(opener))
        inner_start = self.pos
        end = self.text.find(closer, self.pos)
        if end == -1:
            self.warnings.append(
                f"{self.source_file}:{start[1]}: unterminated block comment runs to end of file"
            )
            while self.pos < len(self.text):
                self._advance(1)
            inner = self.text[inner_start:]
        else:
            while self.pos < end:
                self._advance(1)
            inner = self.text[inner_start : self.pos]
            self._advance(len(closer))
        self.comments.append((inner, start[1], start[2], self.line, self.col))

    def _quoted(self, quote: str, start: tuple[int, int, int]) -> None:
        self._advance(1)
        text, n = self.text, len(self.text)
        while self.pos < n:
            ch = text[self.pos]
            if ch == "\\" and self.pos + 1 < n:
                self._advance(2)
                continue
            if ch == quote:
                self._advance(1)
                break
            if ch == "\n":  # unterminated on this line: recover
                break
            self._advance(1)
        self._emit("literal", start)

    def _raw_string(self, start: tuple[int, int, int]) -> None:
        self._advance(1)
        while self.pos < len(self.text) and self.text[self.pos] != "`":
            self._advance(1)
        if self.pos < len(self.text):
            self._advance(1)
        self._emit("literal", start)


def _scan(text: str, profile: LanguageProfile, source_file: str) -> _Scanner:
    scanner = _Scanner(text, profile, source_file)
    scanner.scan()
    return scanner


def tokenize(text: str, profile: LanguageProfile, source_file: str = "<memory>") -> TokenStream:
    """Lex ``text`` into a comment-free token stream. Total: never raises."""
    s = _scan(text, profile, source_file)
    return TokenStream(tokens=s.tokens, source_file=source_file, warnings=s.warnings)


def extract_comments(
    text: str, profile: LanguageProfile, source_file: str = "<memory>"
) -> CommentCorpus:
    """Split comments into the human-readable and machine-readable channels.

    A comment whose inner text begins with any directive pattern is a
    directive, never a human comment. The directive key is the matched
    pattern plus the remaining text with whitespace collapsed.
    """
    s = _scan(text, profile, source_file)
    humans: list[CommentRecord] = []
    directives: list[DirectiveRecord] = []
    for inner, line0, col0, line1, col1 in s.comments:
        pattern = next((p for p in profile.directive_patterns if inner.startswith(p)), None)
        if pattern is not None:
            key = _WS_RUN.sub(" ", inner).strip()
            directives.append(
                DirectiveRecord(
                    key=key, file=source_file, line=line0,
                    start_col=col0, end_line=line1, end_col=col1,
                )
            )
        else:
            humans.append(
                CommentRecord(
                    text=inner.strip(), file=source_file,
                    start_line=line0, end_line=line1,
                    start_col=col0, end_col=col1,
                )
            )
    return CommentCorpus(human_comments=humans, directives=directives, warnings=list(s.warnings))


def normalize_tokens(stream: TokenStream, profile: LanguageProfile) -> TokenStream:
    """Abstract away authorial naming: identifiers -> ID, numbers -> NUM,
    strings -> STR. Keywords, operators and punctuation pass through;
    positions are preserved, so the operation is idempotent."""
    out: list[Token] = []
    for t in stream.tokens:
        if t.kind == "identifier":
            lexeme = NORMALIZED_IDENTIFIER
        elif t.kind == "literal":
            lexeme = NORMALIZED_STRING if t.lexeme[:1] in "\"'`" else NORMALIZED_NUMBER
        else:
            out.append(t)
            continue
        out.append(Token(t.kind, lexeme, t.line, t.col, t.end_line, t.end_col))
    return TokenStream(tokens=out, source_file=stream.source_file, warnings=list(stream.warnings))


def load_corpus(root_path: str | Path, profile: LanguageProfile) -> list[SubmissionUnit]:
    """Load one submission per immediate subdirectory of ``root_path``.

    Files are filtered by the profile's extension list and ordered by path.
    Unreadable files are kept as per-submission warnings. A submission also
    advertises a binary (any ``*.bin`` file) and execution telemetry (a
    ``telemetry.jsonl`` file) when present.
    """
    root = Path(root_path)
    if not root.is_dir():
        raise CorpusError(f"corpus root {root} is not a directory")
    subdirs = sorted(p for p in root.iterdir() if p.is_dir())
    if not subdirs:
        raise CorpusError("empty corpus")

    units: list[SubmissionUnit] = []
    for sub in subdirs:
        files: list[tuple[str, str]] = []
        warnings: list[str] = []
        has_binary = False
        telemetry_path: str | None = None
        for path in sorted(p for p in sub.rglob("*") if p.is_file()):
            rel = path.relative_to(sub).as_posix()
            if path.name == TELEMETRY_FILENAME:
                telemetry_path = str(path)
                continue
            if path.suffix == BINARY_EXTENSION:
                has_binary = True
                continue
            if path.suffix not in profile.extensions:
                continue
            try:
                files.append((rel, path.read_text(encoding="utf-8")))
            except (OSError, UnicodeDecodeError) as exc:
                warnings.append(f"unreadable file {rel}: {exc}")
        if not files:
            warnings.append("no source files matched the profile extensions")
        availability = Availability(
            has_source=any(text for _, text in files),
            has_binary=has_binary,
            has_execution_telemetry=telemetry_path is not None,
        )
        units.append(
            SubmissionUnit(
                id=sub.name,
                files=files,
                language=profile.name,
                availability=availability,
                telemetry_path=telemetry_path,
                warnings=warnings,
            )
        )
    return units
