from __future__ import annotations

import pytest

from martial.errors import ConfigError
from martial.fingerprint import FingerprintConfig, fingerprint_similarity, fingerprint_stream
from martial.ingest import extract_comments, normalize_tokens, tokenize
from martial.mutate import (
    MutationSpec,
    apply_mutations,
    extract_block,
    invert_branches,
    rename_identifiers,
    rewrite_comments,
    strip_comments,
    unroll_loops,
)
from martial.profiles import GO_LIKE
from mini_interp import run_program

# every runnable fixture indexes input[0..2] at most
INPUT_SETS = [[20, 4, 1], [7, 0, 3], [1, 2, 3, 4, 5], [-5, 10, -3, 8], [9, 9, 9]]


def lexemes(text: str) -> list[str]:
    return tokenize(text, GO_LIKE).lexemes()


def normalized(text: str) -> list[str]:
    return normalize_tokens(tokenize(text, GO_LIKE), GO_LIKE).lexemes()


def same_behavior(original: str, mutated: str, compare_globals: bool = True) -> None:
    for inputs in INPUT_SETS:
        a = run_program(original, input_values=inputs)
        b = run_program(mutated, input_values=inputs)
        assert a.prints == b.prints, f"prints diverge on input {inputs}"
        if compare_globals:
            assert a.globals == b.globals, f"globals diverge on input {inputs}"


# --- rename_identifiers -------------------------------------------------


def test_rename_consistent_bijection():
    result = rename_identifiers("sum += s[i]\nsum += s[i]\n", GO_LIKE, seed=1)
    lex = lexemes(result.mutated_text)
    # both statements identical after renaming: consistent reuse
    assert lex[:6] == lex[6:]
    assert lex[0] not in ("sum",) and lex[2] not in ("s",)


def test_rename_deterministic():
    text = "alpha := beta + gamma\n"
    first = rename_identifiers(text, GO_LIKE, seed=42)
    second = rename_identifiers(text, GO_LIKE, seed=42)
    assert first.mutated_text == second.mutated_text
    other_seed = rename_identifiers(text, GO_LIKE, seed=43)
    assert other_seed.mutated_text != first.mutated_text  # seed actually matters


def test_rename_preserves_normalized_stream(fixtures):
    for path in sorted((fixtures / "runnable").glob("*.go")):
        text = path.read_text()
        result = rename_identifiers(text, GO_LIKE, seed=9)
        assert normalized(text) == normalized(result.mutated_text)


def test_rename_keywords_untouched():
    result = rename_identifiers("for x := range input {\n\tprint(x)\n}\n", GO_LIKE, seed=0)
    lex = lexemes(result.mutated_text)
    assert lex[0] == "for" and "range" in lex and "input" in lex and "print" in lex


def test_rename_behavior_preserved(fixtures):
    text = (fixtures / "runnable" / "mixed.go").read_text()
    result = rename_identifiers(text, GO_LIKE, seed=3)
    same_behavior(text, result.mutated_text, compare_globals=False)


# --- strip_comments -------------------------------------------------------


def test_strip_removes_all_comments():
    text = "// one two three\nx := 1 //nolint:gosec\n/* block */ y := 2\n"
    result = strip_comments(text, GO_LIKE)
    corpus = extract_comments(result.mutated_text, GO_LIKE)
    assert corpus.human_comments == [] and corpus.directives == []
    assert result.applied == [("strip_comments", 3)]
    assert lexemes(text) == lexemes(result.mutated_text)


def test_strip_commentfree_identity():
    text = "x := 1\ny := x\n"
    result = strip_comments(text, GO_LIKE)
    assert result.mutated_text == text
    assert result.applied == [("strip_comments", 0)]


def test_strip_keeps_fingerprints_identical(fixtures):
    config = FingerprintConfig()
    for path in sorted((fixtures / "corpus10").rglob("*.go")):
        text = path.read_text()
        stripped = strip_comments(text, GO_LIKE).mutated_text
        fps_a = fingerprint_stream(normalize_tokens(tokenize(text, GO_LIKE), GO_LIKE), config)
        fps_b = fingerprint_stream(normalize_tokens(tokenize(stripped, GO_LIKE), GO_LIKE), config)
        if fps_a.entries:
            assert fingerprint_similarity(fps_a, fps_b).jaccard == 1.0


# --- rewrite_comments ------------------------------------------------------


def test_rewrite_changes_human_comments_only():
    text = "// compute the sum of the array\n//nolint:gosec\nx := 1\n"
    result = rewrite_comments(text, GO_LIKE)
    corpus = extract_comments(result.mutated_text, GO_LIKE)
    assert corpus.human_comments[0].text == "calculate the total of the list"
    assert corpus.directives[0].key == "nolint:gosec"
    assert lexemes(text) == lexemes(result.mutated_text)
    assert result.applied == [("rewrite_comments", 1)]


# --- unroll_loops ----------------------------------------------------------


def test_unroll_matches_bundled_listing(fixtures):
    text = (fixtures / "listings" / "listing_a1.go").read_text()
    expected = (fixtures / "listings" / "listing_a1_unrolled.go").read_text()
    result = unroll_loops(text, GO_LIKE, factor=3)
    assert result.applied == [("unroll_loops", 1)]
    assert lexemes(result.mutated_text) == lexemes(expected)


def test_unroll_divisibility_guard():
    text = "for i := 0; i < 5; i += 1 {\n\tsum += s[i]\n}\n"
    result = unroll_loops(text, GO_LIKE, factor=3)
    assert result.mutated_text == text
    assert result.applied == [("unroll_loops", 0)]
    assert any("not divisible by 3" in reason for _, reason in result.unapplicable)


def test_unroll_rejects_control_transfer():
    text = "for i := 0; i < 6; i += 1 {\n\tif s[i] == 0 {\n\t\tbreak\n\t}\n\tsum += s[i]\n}\n"
    result = unroll_loops(text, GO_LIKE, factor=2)
    assert result.mutated_text == text
    assert any("transfers control" in reason for _, reason in result.unapplicable)


def test_unroll_rejects_loop_var_assignment():
    text = "for i := 0; i < 6; i += 1 {\n\ti = i + 1\n}\n"
    result = unroll_loops(text, GO_LIKE, factor=2)
    assert result.mutated_text == text
    assert any("assigns the loop variable" in reason for _, reason in result.unapplicable)


def test_unroll_factor_validation():
    with pytest.raises(ConfigError, match="factor"):
        unroll_loops("x := 1\n", GO_LIKE, factor=1)


def test_unroll_behavior_preserved(fixtures):
    text = (fixtures / "runnable" / "sum_loop.go").read_text()
    for factor in (2, 3, 6):
        result = unroll_loops(text, GO_LIKE, factor=factor)
        assert result.applied == [("unroll_loops", 1)]
        same_behavior(text, result.mutated_text)


def test_unroll_offsets_non_index_uses_with_parens():
    text = "total := 0\nfor i := 0; i < 4; i += 1 {\n\ttotal += i * 2\n}\nprint(total)\n"
    result = unroll_loops(text, GO_LIKE, factor=2)
    assert "(i+1) * 2" in result.mutated_text
    same_behavior(text, result.mutated_text)


def test_unroll_nested_loops():
    text = (
        "grid := 0\n"
        "for i := 0; i < 4; i += 1 {\n"
        "\tfor j := 0; j < 2; j += 1 {\n"
        "\t\tgrid += i*10 + j\n"
        "\t}\n"
        "}\n"
        "print(grid)\n"
    )
    result = unroll_loops(text, GO_LIKE, factor=2)
    assert result.applied == [("unroll_loops", 2)]
    same_behavior(text, result.mutated_text)


# --- invert_branches --------------------------------------------------------


def test_invert_matches_bundled_listing(fixtures):
    text = (fixtures / "listings" / "listing_a2.go").read_text()
    expected = (fixtures / "listings" / "listing_a2_inverted.go").read_text()
    result = invert_branches(text, GO_LIKE)
    assert result.applied == [("invert_branches", 1)]
    assert lexemes(result.mutated_text) == lexemes(expected)
    # the trailing comment moved inside the inverted branch
    moved = extract_comments(result.mutated_text, GO_LIKE).human_comments
    assert [c.text for c in moved] == ["main logic"]


def test_invert_no_guards_is_identity():
    text = "x := 1\nfor i := 0; i < 3; i += 1 {\n\tx += i\n}\n"
    result = invert_branches(text, GO_LIKE)
    assert result.mutated_text == text
    assert result.applied == [("invert_branches", 0)]


def test_invert_skips_guard_with_else():
    text = "if x == 0 {\n\treturn 1\n} else {\n\treturn 2\n}\n"
    result = invert_branches(text, GO_LIKE)
    assert result.mutated_text == text
    assert any("else branch" in reason for _, reason in result.unapplicable)


def test_invert_behavior_preserved(fixtures):
    text = (fixtures / "runnable" / "early_return.go").read_text()
    result = invert_branches(text, GO_LIKE)
    assert result.applied == [("invert_branches", 2)]
    same_behavior(text, result.mutated_text)


def test_double_inversion_behavior_equivalent(fixtures):
    text = (fixtures / "runnable" / "early_return.go").read_text()
    once = invert_branches(text, GO_LIKE).mutated_text
    twice = invert_branches(once, GO_LIKE).mutated_text
    same_behavior(text, twice)


def test_invert_wraps_complex_conditions():
    text = "func f(a, b) {\n\tif a < b && b > 0 {\n\t\treturn a\n\t}\n\treturn b\n}\nprint(f(input[0], input[1]))\n"
    result = invert_branches(text, GO_LIKE)
    assert "!(a < b && b > 0)" in result.mutated_text
    same_behavior(text, result.mutated_text, compare_globals=False)


# --- extract_block -----------------------------------------------------------


def test_extract_block_structure(fixtures):
    text = (fixtures / "runnable" / "extractable.go").read_text()
    result = extract_block(text, GO_LIKE, seed=7)
    assert result.applied == [("extract_block", 1)]
    mutated = result.mutated_text
    assert "func extracted0(" in mutated
    assert mutated.count("extracted0(") == 2  # definition + call site
    # extraction moves intermediates out of the global scope: prints only
    same_behavior(text, mutated, compare_globals=False)


def test_extract_block_unapplicable():
    text = "func one() {\n\treturn 1\n}\n"
    result = extract_block(text, GO_LIKE, seed=0)
    assert result.mutated_text == text
    assert result.applied == [("extract_block", 0)]
    assert any("no eligible block" in reason for _, reason in result.unapplicable)


def test_extract_block_deterministic_per_seed():
    text = "a := 1\nb := a + 2\nc := b * 3\nprint(c)\n"
    first = extract_block(text, GO_LIKE, seed=5)
    second = extract_block(text, GO_LIKE, seed=5)
    assert first.mutated_text == second.mutated_text


def test_extract_block_outputs_cover_later_reads():
    text = "x := 1\ny := x * 2\nz := y + x\nprint(z)\nprint(y)\n"
    result = extract_block(text, GO_LIKE, seed=0)
    mutated = result.mutated_text
    assert "return" in mutated
    same_behavior(text, mutated, compare_globals=False)


# --- spec orchestration -------------------------------------------------------


def test_spec_validation():
    with pytest.raises(ConfigError):
        MutationSpec(ops=())
    with pytest.raises(ConfigError):
        MutationSpec(ops=("levitate",))
    with pytest.raises(ConfigError):
        MutationSpec(ops=("unroll",), unroll_factor=1)
    assert MutationSpec(ops=("rename", "strip")).canonical_ops() == (
        "rename_identifiers",
        "strip_comments",
    )


def test_apply_mutations_chains_ops(fixtures):
    text = (fixtures / "runnable" / "mixed.go").read_text()
    spec = MutationSpec(ops=("rename", "strip"), seed=21)
    result = apply_mutations(text, GO_LIKE, spec)
    assert extract_comments(result.mutated_text, GO_LIKE).human_comments == []
    assert normalized(text) == normalized(result.mutated_text)
    ops = [op for op, _ in result.applied]
    assert ops == ["rename_identifiers", "strip_comments"]


def test_apply_mutations_deterministic(fixtures):
    text = (fixtures / "runnable" / "mixed.go").read_text()
    spec = MutationSpec(ops=("rename", "rewrite", "unroll", "invert", "extract"), seed=77, unroll_factor=2)
    first = apply_mutations(text, GO_LIKE, spec)
    second = apply_mutations(text, GO_LIKE, spec)
    assert first.mutated_text == second.mutated_text
    assert first.applied == second.applied
    assert first.unapplicable == second.unapplicable


def test_mutants_retokenize_without_warnings(fixtures):
    specs = [
        MutationSpec(ops=("rename",), seed=1),
        MutationSpec(ops=("strip",)),
        MutationSpec(ops=("rewrite",)),
        MutationSpec(ops=("unroll",), unroll_factor=2),
        MutationSpec(ops=("invert",)),
        MutationSpec(ops=("extract",), seed=2),
        MutationSpec(ops=("rename", "strip", "unroll", "invert", "extract"), seed=8, unroll_factor=2),
    ]
    for path in sorted((fixtures / "runnable").glob("*.go")):
        text = path.read_text()
        for spec in specs:
            result = apply_mutations(text, GO_LIKE, spec)
            stream = tokenize(result.mutated_text, GO_LIKE)
            assert stream.warnings == [], (path.name, spec.ops)


def test_all_runnable_mutants_preserve_behavior(fixtures):
    specs = [
        MutationSpec(ops=("strip",)),
        MutationSpec(ops=("rewrite",)),
        MutationSpec(ops=("unroll",), unroll_factor=2),
        MutationSpec(ops=("invert",)),
        MutationSpec(ops=("extract",), seed=13),
        MutationSpec(ops=("strip", "unroll", "invert", "extract"), seed=4, unroll_factor=2),
    ]
    for path in sorted((fixtures / "runnable").glob("*.go")):
        text = path.read_text()
        for spec in specs:
            mutated = apply_mutations(text, GO_LIKE, spec).mutated_text
            keeps_globals = "extract" not in spec.ops
            same_behavior(text, mutated, compare_globals=keeps_globals)
