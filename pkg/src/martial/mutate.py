"""Semantic-preserving obfuscation transforms for robustness testing.

Transforms are pattern-based over the token stream of the go-like
profile, restricted to shapes whose behavior preservation is checkable
at desk scale: identifier renaming, comment stripping/paraphrasing,
unrolling of counted loops, early-return guard inversion, and extraction
of straight-line blocks into a dedicated function.
"""
from __future__ import annotations

import random
import re
from dataclasses import dataclass, field

from .errors import ConfigError
from .ingest import Token, extract_comments, tokenize
from .profiles import LanguageProfile

OPS = (
    "rename_identifiers",
    "strip_comments",
    "rewrite_comments",
    "unroll_loops",
    "invert_branches",
    "extract_block",
)
OP_ALIASES = {
    "rename": "rename_identifiers",
    "strip": "strip_comments",
    "rewrite": "rewrite_comments",
    "unroll": "unroll_loops",
    "invert": "invert_branches",
    "extract": "extract_block",
}

_ASSIGN_OPS = {":=", "=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>="}
_MUTATING_OPS = _ASSIGN_OPS | {"++", "--"}
_CONTROL_KEYWORDS = {
    "if", "else", "for", "return", "break", "continue", "goto", "func",
    "switch", "case", "default", "select", "go", "defer", "var", "const",
    "type", "range", "fallthrough",
}

# Paraphrase table for comment rewriting; deliberately word-for-word so the
# rewrite is deterministic and reviewable.
SYNONYMS = {
    "sum": "total",
    "compute": "calculate",
    "computes": "calculates",
    "computing": "calculating",
    "array": "list",
    "slice": "sequence",
    "loop": "iteration",
    "index": "position",
    "value": "item",
    "values": "items",
    "check": "verify",
    "checks": "verifies",
    "result": "outcome",
    "count": "tally",
    "number": "figure",
    "running": "cumulative",
    "average": "mean",
    "maximum": "largest",
    "minimum": "smallest",
    "element": "entry",
    "elements": "entries",
    "final": "resulting",
    "returns": "yields",
    "return": "yield",
}


@dataclass(frozen=True)
class MutationSpec:
    ops: tuple[str, ...]
    seed: int = 0
    unroll_factor: int = 2

    def __post_init__(self) -> None:
        if not self.ops:
            raise ConfigError("mutation spec needs at least one op")
        for op in self.ops:
            if OP_ALIASES.get(op, op) not in OPS:
                raise ConfigError(f"unknown mutation op {op!r}; choose from {OPS} (or short aliases)")
        if self.unroll_factor < 2:
            raise ConfigError(f"unroll factor must be >= 2, got {self.unroll_factor}")

    def canonical_ops(self) -> tuple[str, ...]:
        return tuple(OP_ALIASES.get(op, op) for op in self.ops)


@dataclass
class MutationResult:
    mutated_text: str
    applied: list[tuple[str, int]] = field(default_factory=list)
    unapplicable: list[tuple[str, str]] = field(default_factory=list)


def apply_mutations(text: str, profile: LanguageProfile, spec: MutationSpec) -> MutationResult:
    """Apply the spec's ops in order; the seed fixes every random choice."""
    result = MutationResult(mutated_text=text)
    for op in spec.canonical_ops():
        if op == "rename_identifiers":
            step = rename_identifiers(result.mutated_text, profile, spec.seed)
        elif op == "strip_comments":
            step = strip_comments(result.mutated_text, profile)
        elif op == "rewrite_comments":
            step = rewrite_comments(result.mutated_text, profile)
        elif op == "unroll_loops":
            step = unroll_loops(result.mutated_text, profile, spec.unroll_factor)
        elif op == "invert_branches":
            step = invert_branches(result.mutated_text, profile)
        else:
            step = extract_block(result.mutated_text, profile, spec.seed)
        result.mutated_text = step.mutated_text
        result.applied.extend(step.applied)
        result.unapplicable.extend(step.unapplicable)
    return result


def _splice_line(lines: list[str], line: int, col: int, end_col: int, new: str) -> None:
    """Replace a single-line [col, end_col) span; positions are 1-based."""
    text = lines[line - 1]
    lines[line - 1] = text[: col - 1] + new + text[end_col - 1 :]


def rename_identifiers(text: str, profile: LanguageProfile, seed: int) -> MutationResult:
    """Rename every identifier through a seed-determined bijection onto
    fresh names; keywords and literals are untouched."""
    stream = tokenize(text, profile)
    order: list[str] = []
    seen: set[str] = set()
    for t in stream.tokens:
        if t.kind == "identifier" and t.lexeme not in seen:
            seen.add(t.lexeme)
            order.append(t.lexeme)
    if not order:
        return MutationResult(mutated_text=text, applied=[("rename_identifiers", 0)])

    fresh: list[str] = []
    i = 0
    while len(fresh) < len(order):
        name = f"v{i}"
        i += 1
        if name in seen or name in profile.keywords:
            continue
        fresh.append(name)
    rng = random.Random(seed)
    rng.shuffle(fresh)
    mapping = dict(zip(order, fresh))

    lines = text.split("\n")
    count = 0
    for t in reversed(stream.tokens):
        if t.kind == "identifier":
            _splice_line(lines, t.line, t.col, t.end_col, mapping[t.lexeme])
            count += 1
    return MutationResult(mutated_text="\n".join(lines), applied=[("rename_identifiers", count)])


def strip_comments(text: str, profile: LanguageProfile) -> MutationResult:
    """Remove every comment; the token stream is unchanged."""
    corpus = extract_comments(text, profile)
    spans = sorted(
        [
            (c.start_line, c.start_col, c.end_line, c.end_col)
            for c in corpus.human_comments
        ]
        + [(d.line, d.start_col, d.end_line, d.end_col) for d in corpus.directives],
        reverse=True,
    )
    # edits never change the line count: emptied lines become None and are
    # filtered at the end, so span positions stay valid throughout
    lines: list[str | None] = list(text.split("\n"))
    for line0, col0, line1, col1 in spans:
        before = (lines[line0 - 1] or "")[: col0 - 1]
        after = (lines[line1 - 1] or "")[col1 - 1 :]
        if not before.strip() and not after.strip():
            for line in range(line0, line1 + 1):
                lines[line - 1] = None
            continue
        glue = " " if before.strip() and after.strip() else ""
        lines[line0 - 1] = (before + glue + after).rstrip()
        for line in range(line0 + 1, line1 + 1):
            lines[line - 1] = None
    out = [line for line in lines if line is not None]
    return MutationResult(
        mutated_text="\n".join(out), applied=[("strip_comments", len(spans))]
    )


def rewrite_comments(text: str, profile: LanguageProfile) -> MutationResult:
    """Paraphrase human comments by synonym substitution; directives are a
    separate signal channel and stay byte-identical."""
    corpus = extract_comments(text, profile)
    lines = text.split("\n")
    changed = 0

    def substitute(match: re.Match[str]) -> str:
        word = match.group(0)
        replacement = SYNONYMS.get(word.lower())
        if replacement is None:
            return word
        if word[0].isupper():
            replacement = replacement.capitalize()
        return replacement

    for c in sorted(corpus.human_comments, key=lambda c: (c.start_line, c.start_col), reverse=True):
        touched = False
        for line in range(c.end_line, c.start_line - 1, -1):
            col0 = c.start_col if line == c.start_line else 1
            col1 = c.end_col if line == c.end_line else len(lines[line - 1]) + 1
            region = lines[line - 1][col0 - 1 : col1 - 1]
            rewritten = re.sub(r"[A-Za-z]+", substitute, region)
            if rewritten != region:
                _splice_line(lines, line, col0, col1, rewritten)
                touched = True
        changed += touched
    return MutationResult(mutated_text="\n".join(lines), applied=[("rewrite_comments", changed)])


def _matching_brace(tokens: list[Token], open_index: int) -> int | None:
    depth = 0
    for i in range(open_index, len(tokens)):
        if tokens[i].kind == "punct" and tokens[i].lexeme == "{":
            depth += 1
        elif tokens[i].kind == "punct" and tokens[i].lexeme == "}":
            depth -= 1
            if depth == 0:
                return i
    return None


def _find_unroll_site(
    tokens: list[Token], factor: int, reasons: list[tuple[str, str]] | None
) -> tuple | None:
    """Last matching counted loop, or None. Rejection reasons are collected
    only when ``reasons`` is given (the first scan of the original text)."""
    found = None
    for t, tok in enumerate(tokens):
        if not (tok.kind == "keyword" and tok.lexeme == "for"):
            continue
        where = f"loop at line {tok.line}"

        def reject(why: str) -> None:
            if reasons is not None:
                reasons.append(("unroll_loops", f"{where}: {why}"))

        shape = tokens[t + 1 : t + 13]
        if len(shape) < 12 or not (
            shape[0].kind == "identifier"
            and shape[1].lexeme == ":="
            and shape[2].kind == "literal"
            and shape[2].lexeme == "0"
            and shape[3].lexeme == ";"
            and shape[4].lexeme == shape[0].lexeme
            and shape[5].lexeme == "<"
            and shape[6].kind == "literal"
            and shape[7].lexeme == ";"
            and shape[8].lexeme == shape[0].lexeme
            and shape[9].lexeme == "+="
            and shape[10].lexeme == "1"
            and shape[11].lexeme == "{"
        ):
            reject("not a unit-step counted loop over a literal bound")
            continue
        loop_var = shape[0].lexeme
        try:
            bound = int(shape[6].lexeme)
        except ValueError:
            reject(f"non-integer bound {shape[6].lexeme!r}")
            continue
        if bound % factor != 0:
            reject(f"bound {bound} not divisible by {factor}")
            continue
        open_index = t + 12
        close_index = _matching_brace(tokens, open_index)
        if close_index is None:
            reject("unbalanced braces")
            continue
        open_tok, close_tok = tokens[open_index], tokens[close_index]
        if open_tok.line != tok.line or close_tok.line <= open_tok.line:
            reject("body is not a multi-line block")
            continue
        body = tokens[open_index + 1 : close_index]
        if any(b.line in (open_tok.line, close_tok.line) for b in body):
            reject("body shares a line with its braces")
            continue
        if any(b.kind == "keyword" and b.lexeme in ("return", "break", "continue", "goto") for b in body):
            reject("body transfers control")
            continue
        if any(
            b.kind == "identifier"
            and b.lexeme == loop_var
            and i + 1 < len(body)
            and body[i + 1].lexeme in _MUTATING_OPS
            for i, b in enumerate(body)
        ):
            reject("body assigns the loop variable")
            continue
        found = (loop_var, shape[10], open_tok, close_tok, body)
    return found


def unroll_loops(text: str, profile: LanguageProfile, factor: int) -> MutationResult:
    """Unroll counted loops of the shape ``for i := 0; i < N; i += 1 {``
    with literal N divisible by ``factor``: the step becomes ``i += factor``
    and the body is repeated with the loop variable offset by +1..+(factor-1).

    One site is transformed per pass, innermost first, re-tokenizing in
    between, so nested counted loops unroll correctly.
    """
    if factor < 2:
        raise ConfigError(f"unroll factor must be >= 2, got {factor}")
    applied = 0
    unapplicable: list[tuple[str, str]] = []
    reasons: list[tuple[str, str]] | None = unapplicable
    while True:
        tokens = tokenize(text, profile).tokens
        site = _find_unroll_site(tokens, factor, reasons)
        reasons = None  # only the original text contributes rejection reasons
        if site is None:
            break
        loop_var, step, open_tok, close_tok, body = site
        lines = text.split("\n")
        body_first, body_last = open_tok.line + 1, close_tok.line - 1
        copies: list[str] = []
        for offset in range(1, factor):
            copy = [lines[i - 1] for i in range(body_first, body_last + 1)]
            for i in range(len(body) - 1, -1, -1):
                b = body[i]
                if b.kind != "identifier" or b.lexeme != loop_var:
                    continue
                prev_lex = body[i - 1].lexeme if i > 0 else ""
                next_lex = body[i + 1].lexeme if i + 1 < len(body) else ""
                repl = (
                    f"{loop_var}+{offset}"
                    if prev_lex == "[" and next_lex == "]"
                    else f"({loop_var}+{offset})"
                )
                row = copy[b.line - body_first]
                copy[b.line - body_first] = row[: b.col - 1] + repl + row[b.end_col - 1 :]
            copies.extend(copy)
        lines[body_last:body_last] = copies  # insert after the original body
        _splice_line(lines, step.line, step.col, step.end_col, str(factor))
        text = "\n".join(lines)
        applied += 1

    return MutationResult(
        mutated_text=text,
        applied=[("unroll_loops", applied)],
        unapplicable=unapplicable,
    )


def _negate_condition(cond: list[Token], lines: list[str]) -> None:
    """Negate an if condition in place: a single top-level == or != flips;
    anything else is wrapped in !( ... )."""
    depth = 0
    flip: Token | None = None
    simple = True
    for tok in cond:
        if tok.lexeme in ("(", "["):
            depth += 1
        elif tok.lexeme in (")", "]"):
            depth -= 1
        elif depth == 0 and tok.lexeme in ("&&", "||", "!"):
            simple = False
        elif depth == 0 and tok.lexeme in ("==", "!="):
            if flip is not None:
                simple = False
            flip = tok
    if simple and flip is not None:
        _splice_line(lines, flip.line, flip.col, flip.end_col, "==" if flip.lexeme == "!=" else "!=")
    else:
        last = cond[-1]
        _splice_line(lines, last.line, last.end_col, last.end_col, ")")
        first = cond[0]
        _splice_line(lines, first.line, first.col, first.col, "!(")


def invert_branches(text: str, profile: LanguageProfile) -> MutationResult:
    """Rewrite early-return guards ``if COND { return R } REST`` into
    ``if !COND { REST } return R``, simplifying ``!=`` <-> ``==``.

    The guard body must be a single one-line return, braces in the usual
    trailing/own-line style, with no attached else.
    """
    stream = tokenize(text, profile)
    tokens = stream.tokens
    lines = text.split("\n")
    applied = 0
    unapplicable: list[tuple[str, str]] = []

    depth_before = []
    depth = 0
    for tok in tokens:
        depth_before.append(depth)
        if tok.kind == "punct" and tok.lexeme == "{":
            depth += 1
        elif tok.kind == "punct" and tok.lexeme == "}":
            depth -= 1

    sites = []
    for t, tok in enumerate(tokens):
        if not (tok.kind == "keyword" and tok.lexeme == "if"):
            continue
        where = f"guard at line {tok.line}"
        open_index = None
        paren = 0
        bad = None
        for j in range(t + 1, len(tokens)):
            lex = tokens[j].lexeme
            if lex in ("(", "["):
                paren += 1
            elif lex in (")", "]"):
                paren -= 1
            elif lex == ";" and paren == 0:
                bad = "guard has an init statement"
                break
            elif lex == "{" and paren == 0:
                open_index = j
                break
        if bad:
            unapplicable.append(("invert_branches", f"{where}: {bad}"))
            continue
        if open_index is None or open_index == t + 1:
            continue
        cond = tokens[t + 1 : open_index]
        if any(c.line != tok.line for c in cond) or tokens[open_index].line != tok.line:
            unapplicable.append(("invert_branches", f"{where}: condition spans lines"))
            continue
        close_index = _matching_brace(tokens, open_index)
        if close_index is None:
            continue
        body = tokens[open_index + 1 : close_index]
        if not body or not (body[0].kind == "keyword" and body[0].lexeme == "return"):
            continue  # not an early-return guard; no diagnostic, just not a site
        if any(b.line != body[0].line for b in body):
            unapplicable.append(("invert_branches", f"{where}: return spans lines"))
            continue
        if tokens[close_index].line <= body[0].line:
            unapplicable.append(("invert_branches", f"{where}: closing brace shares the return line"))
            continue
        if close_index + 1 < len(tokens) and tokens[close_index + 1].lexeme == "else":
            unapplicable.append(("invert_branches", f"{where}: guard has an else branch"))
            continue
        block_close = None
        for j in range(close_index + 1, len(tokens)):
            if (
                tokens[j].kind == "punct"
                and tokens[j].lexeme == "}"
                and depth_before[j] == depth_before[t]
            ):
                block_close = j
                break
        sites.append((t, open_index, close_index, block_close))

    # Sites are rewritten bottom-up. A rewrite only changes the line count
    # when blank lines sit inside the guard, so shifts are tracked and late
    # block ends adjusted for sites whose trailing code was already moved.
    total_lines = len(lines)
    shifts: list[tuple[int, int]] = []  # (region start line, line-count delta)
    for t, open_index, close_index, block_close in reversed(sites):
        if_tok = tokens[t]
        return_tok = tokens[open_index + 1]
        close_tok = tokens[close_index]
        if_line = lines[if_tok.line - 1]
        if_indent = if_line[: len(if_line) - len(if_line.lstrip())]
        body_line = lines[return_tok.line - 1]
        body_indent = body_line[: len(body_line) - len(body_line.lstrip())]
        delta_indent = body_indent[len(if_indent):] if body_indent.startswith(if_indent) else "\t"
        end_line = tokens[block_close].line if block_close is not None else total_lines + 1
        end_line += sum(d for start, d in shifts if close_tok.line < start < end_line)

        rest = lines[close_tok.line : end_line - 1]
        rest_indented = [delta_indent + row if row.strip() else row for row in rest]
        _negate_condition(tokens[t + 1 : open_index], lines)
        region = (
            [lines[if_tok.line - 1]]
            + rest_indented
            + [if_indent + "}", if_indent + body_line.strip()]
        )
        lines[if_tok.line - 1 : end_line - 1] = region
        shifts.append((if_tok.line, len(region) - (end_line - if_tok.line)))
        applied += 1

    return MutationResult(
        mutated_text="\n".join(lines),
        applied=[("invert_branches", applied)],
        unapplicable=unapplicable,
    )


def extract_block(text: str, profile: LanguageProfile, seed: int) -> MutationResult:
    """Move one straight-line block of 2-6 assignments into a fresh
    top-level function over its free variables, replacing it with a call."""
    stream = tokenize(text, profile)
    tokens = stream.tokens
    lines = text.split("\n")

    by_line: dict[int, list[Token]] = {}
    for tok in tokens:
        by_line.setdefault(tok.line, []).append(tok)

    depth_at_line: dict[int, int] = {}
    depth = 0
    for line in range(1, len(lines) + 1):
        depth_at_line[line] = depth
        for tok in by_line.get(line, []):
            if tok.kind == "punct" and tok.lexeme == "{":
                depth += 1
            elif tok.kind == "punct" and tok.lexeme == "}":
                depth -= 1

    def is_simple(line: int) -> bool:
        toks = by_line.get(line, [])
        if len(toks) < 3:
            return False
        if toks[0].kind != "identifier" or toks[1].lexeme not in _ASSIGN_OPS:
            return False
        for tok in toks[2:]:
            if tok.kind == "keyword" and tok.lexeme in _CONTROL_KEYWORDS:
                return False
            if tok.lexeme in ("{", "}", ";"):
                return False
        return True

    runs: list[list[int]] = []
    current: list[int] = []
    for line in range(1, len(lines) + 1):
        if is_simple(line) and (not current or depth_at_line[line] == depth_at_line[current[0]]):
            current.append(line)
        else:
            if len(current) >= 2:
                runs.append(current)
            current = [line] if is_simple(line) else []
    if len(current) >= 2:
        runs.append(current)

    if not runs:
        return MutationResult(
            mutated_text=text,
            applied=[("extract_block", 0)],
            unapplicable=[("extract_block", "no eligible block of 2-6 straight-line statements")],
        )

    rng = random.Random(seed)
    run = runs[rng.randrange(len(runs))][:6]

    inputs: list[str] = []
    written: list[str] = []
    for line in run:
        toks = by_line[line]
        lhs, op = toks[0].lexeme, toks[1].lexeme
        reads = [
            tok.lexeme
            for idx, tok in enumerate(toks[2:], start=2)
            if tok.kind == "identifier"
            # a name followed by "(" is a callee, not a free variable
            and not (idx + 1 < len(toks) and toks[idx + 1].lexeme == "(")
        ]
        if op != ":=" and op != "=":
            reads.append(lhs)  # compound assignment reads its target
        for name in reads:
            if name not in written and name not in inputs:
                inputs.append(name)
        if lhs not in written:
            written.append(lhs)

    declared_inside = set()
    seen_write: set[str] = set()
    for line in run:
        toks = by_line[line]
        lhs, op = toks[0].lexeme, toks[1].lexeme
        if lhs not in seen_write and op == ":=" and lhs not in inputs:
            declared_inside.add(lhs)
        seen_write.add(lhs)

    referenced_after = {
        tok.lexeme
        for tok in tokens
        if tok.kind == "identifier" and tok.line > run[-1]
    }
    outputs = [
        name
        for name in written
        if name in referenced_after or name not in declared_inside
    ]

    existing = {tok.lexeme for tok in tokens} | set(profile.keywords)
    n = 0
    while f"extracted{n}" in existing:
        n += 1
    fname = f"extracted{n}"

    block_indent_line = lines[run[0] - 1]
    indent = block_indent_line[: len(block_indent_line) - len(block_indent_line.lstrip())]
    call = f"{fname}({', '.join(inputs)})"
    if outputs:
        call = f"{', '.join(outputs)} := {call}"
    func_lines = [f"func {fname}({', '.join(inputs)}) {{"]
    func_lines += ["\t" + lines[line - 1].strip() for line in run]
    if outputs:
        func_lines.append(f"\treturn {', '.join(outputs)}")
    func_lines.append("}")

    lines[run[0] - 1 : run[-1]] = [indent + call]
    if lines and lines[-1].strip():
        lines.append("")
    lines.extend(func_lines)
    return MutationResult(mutated_text="\n".join(lines) + "\n", applied=[("extract_block", 1)])
