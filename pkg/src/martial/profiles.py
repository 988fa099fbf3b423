"""Language profiles: the lexing vocabulary a corpus is tokenized with.

Profiles are data, not code. The built-in "go-like" profile matches the
syntax of the bundled fixtures; new languages are added by loading a JSON
document with the same keys, no rebuild required.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError

# Lexeme placeholders produced by token normalization. Keywords of any
# profile must stay disjoint from these.
NORMALIZED_IDENTIFIER = "ID"
NORMALIZED_NUMBER = "NUM"
NORMALIZED_STRING = "STR"


@dataclass(frozen=True)
class LanguageProfile:
    """Lexing rules for one language family.

    ``keywords`` holds the reserved words plus predeclared names (builtin
    functions, type names, constants). Predeclared names are included so
    normalization and identifier renaming leave them alone.
    ``directive_patterns`` are comment prefixes that mark a comment as
    machine-readable; they are matched only inside comments.
    """

    name: str
    extensions: tuple[str, ...]
    keywords: frozenset[str]
    line_comment: str
    block_comment: tuple[str, str]
    directive_patterns: tuple[str, ...] = ()
    operators: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        placeholders = {NORMALIZED_IDENTIFIER, NORMALIZED_NUMBER, NORMALIZED_STRING}
        clash = placeholders & set(self.keywords)
        if clash:
            raise ConfigError(f"profile {self.name!r}: keywords collide with normalization placeholders {sorted(clash)}")


# Multi-character operators, longest first so the lexer can greedy-match.
_GO_OPERATORS = (
    "<<=", ">>=", "&^=", "...",
    ":=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=",
    "==", "!=", "<=", ">=", "&&", "||", "<-", "<<", ">>", "&^", "++", "--",
)

_GO_KEYWORDS = frozenset(
    # reserved words
    "break case chan const continue default defer else fallthrough for func "
    "go goto if import interface map package range return select struct "
    "switch type var".split()
    # predeclared identifiers: types, constants, builtins. Kept out of the
    # identifier space so renaming and normalization never touch them.
    # "input" and "print" are the I/O channel of the bundled mini dialect.
    + "append bool byte cap copy delete error false float32 float64 input "
    "int int8 int16 int32 int64 len make new nil print println rune string "
    "true uint uint8 uint16 uint32 uint64".split()
)

GO_LIKE = LanguageProfile(
    name="go-like",
    extensions=(".go",),
    keywords=_GO_KEYWORDS,
    line_comment="//",
    block_comment=("/*", "*/"),
    directive_patterns=("nolint", "go:", "lint:"),
    operators=_GO_OPERATORS,
)

_BUILTIN = {GO_LIKE.name: GO_LIKE}


def builtin_profile(name: str) -> LanguageProfile:
    try:
        return _BUILTIN[name]
    except KeyError:
        raise ConfigError(f"unknown language profile {name!r}; built-ins: {sorted(_BUILTIN)}") from None


def load_profile(path: str | Path) -> LanguageProfile:
    """Load a profile document: {name, extensions[], keywords[], line_comment,
    block_comment: [open, close], directive_patterns[]}."""
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    try:
        block = raw.get("block_comment", ["/*", "*/"])
        return LanguageProfile(
            name=raw["name"],
            extensions=tuple(raw["extensions"]),
            keywords=frozenset(raw["keywords"]),
            line_comment=raw["line_comment"],
            block_comment=(block[0], block[1]),
            directive_patterns=tuple(raw.get("directive_patterns", ())),
            operators=tuple(raw.get("operators", _GO_OPERATORS)),
        )
    except (KeyError, IndexError, TypeError) as exc:
        raise ConfigError(f"malformed profile document {path}: {exc}") from exc


def resolve_profile(name_or_path: str) -> LanguageProfile:
    """Built-in profile by name, or a profile document by path."""
    if name_or_path in _BUILTIN:
        return _BUILTIN[name_or_path]
    if Path(name_or_path).is_file():
        return load_profile(name_or_path)
    raise ConfigError(f"no such language profile: {name_or_path!r}")
