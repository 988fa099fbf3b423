"""Self-contained HTML rendering of an analysis report for human review."""
from __future__ import annotations

from html import escape

from .pipeline import ranked_pairs

_STYLE = """
body { font-family: system-ui, sans-serif; margin: 2rem; color: #1a1a1a; }
h1 { font-size: 1.4rem; } h2 { font-size: 1.1rem; margin-top: 2rem; }
table { border-collapse: collapse; margin: 1rem 0; }
th, td { border: 1px solid #ccc; padding: 0.35rem 0.7rem; text-align: left; }
th { background: #f2f2f2; }
.score { font-variant-numeric: tabular-nums; }
.na { color: #888; font-style: italic; }
pre { background: #f8f8f8; border: 1px solid #ddd; padding: 0.6rem; overflow-x: auto; }
mark { background: #ffe08a; }
.panes { display: flex; gap: 1rem; } .panes > div { flex: 1; min-width: 0; }
.meta { color: #555; font-size: 0.85rem; }
"""


def _fmt_score(result: dict) -> str:
    if result["status"] == "ok":
        return f'<span class="score">{result["score"]:.4f}</span>'
    return f'<span class="na">{escape(result["status"])}</span>'


def _excerpt(text: str, span: list[list[int]], context: int = 2) -> str:
    """Lines covering the span with the matched region wrapped in <mark>."""
    lines = text.split("\n")
    (l0, _), (l1, _) = span
    lo = max(1, l0 - context)
    hi = min(len(lines), l1 + context)
    out = []
    for n in range(lo, hi + 1):
        row = escape(lines[n - 1])
        if l0 <= n <= l1:
            row = f"<mark>{row}</mark>"
        out.append(f"{n:>4}  {row}")
    return "\n".join(out)


def render_html(report: dict, corpus_texts: dict[str, dict[str, str]] | None = None) -> str:
    """One page: ranked pair table plus per-pair evidence. When the corpus
    file texts are supplied, match regions are shown as highlighted excerpts."""
    corpus_texts = corpus_texts or {}
    rows = []
    for pair in ranked_pairs(report):
        agg = f'{pair["aggregate"]:.4f}' if pair["aggregate"] is not None else "undefined"
        cells = "".join(f"<td>{_fmt_score(pair['scores'][n])}</td>" for n in sorted(pair["scores"]))
        rows.append(
            f'<tr><td><a href="#pair-{escape(pair["a"])}-{escape(pair["b"])}">'
            f'{escape(pair["a"])} / {escape(pair["b"])}</a></td>'
            f'<td class="score">{agg}</td>{cells}</tr>'
        )
    score_names = sorted(report["pairs"][0]["scores"]) if report["pairs"] else []
    header_cells = "".join(f"<th>{escape(n)}</th>" for n in score_names)

    sections = []
    for pair in ranked_pairs(report):
        a, b = pair["a"], pair["b"]
        parts = [f'<h2 id="pair-{escape(a)}-{escape(b)}">{escape(a)} / {escape(b)}</h2>']
        regions = pair["evidence"].get("match_regions", [])
        if regions:
            parts.append(f"<p class='meta'>{len(regions)} matched region(s)</p>")
            for region in regions:
                text_a = corpus_texts.get(a, {}).get(region["file_a"])
                text_b = corpus_texts.get(b, {}).get(region["file_b"])
                caption = (
                    f'{escape(a)}:{escape(region["file_a"])} ⇔ '
                    f'{escape(b)}:{escape(region["file_b"])} '
                    f'({region["shared_fingerprints"]} shared fingerprints)'
                )
                parts.append(f"<p class='meta'>{caption}</p>")
                if text_a is not None and text_b is not None:
                    parts.append(
                        '<div class="panes">'
                        f"<div><pre>{_excerpt(text_a, region['span_a'])}</pre></div>"
                        f"<div><pre>{_excerpt(text_b, region['span_b'])}</pre></div>"
                        "</div>"
                    )
        matches = pair["evidence"].get("comment_matches", [])
        if matches:
            match_rows = "".join(
                f"<tr><td>{escape(m['a']['text'])}</td><td>{escape(m['b']['text'])}</td>"
                f"<td class='score'>{m['cosine']:.4f}</td></tr>"
                for m in matches
            )
            parts.append(
                "<table><tr><th>comment (a)</th><th>comment (b)</th><th>cosine</th></tr>"
                f"{match_rows}</table>"
            )
        birthmark = pair["evidence"].get("birthmark")
        if birthmark:
            per_input = "".join(
                f"<tr><td>{escape(e['input_id'])}</td><td class='score'>{e['similarity']:.4f}</td></tr>"
                for e in birthmark["per_input"]
            )
            parts.append(
                f"<p class='meta'>birthmark over counters: {escape(', '.join(birthmark['common_counters']))}</p>"
                f"<table><tr><th>input</th><th>similarity</th></tr>{per_input}</table>"
            )
        sections.append("\n".join(parts))

    meta = report["corpus"]
    return f"""<!doctype html>
<html><head><meta charset="utf-8"><title>similarity report</title>
<style>{_STYLE}</style></head><body>
<h1>Similarity report — {escape(str(meta.get("root") or "corpus"))}</h1>
<p class="meta">{meta["submission_count"]} submissions · language {escape(meta["language"])}
· generated {escape(report["completed_at"])} · tool {escape(report["tool_version"])}</p>
<table>
<tr><th>pair</th><th>aggregate</th>{header_cells}</tr>
{"".join(rows)}
</table>
{"".join(sections)}
</body></html>
"""
