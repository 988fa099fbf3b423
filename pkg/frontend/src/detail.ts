import type {
  Judgement,
  MatchRegion,
  PairDetail,
  VerdictRecord,
  VerdictSummary,
} from "./types.js";

export interface VerdictSubmit {
  (body: { judgement: Judgement; reviewer: string; note: string }): Promise<
    { verdict: VerdictRecord } & VerdictSummary
  >;
}

interface RegionOnSide {
  index: number;
  file: string;
  startLine: number;
  endLine: number;
}

function regionsForSide(regions: MatchRegion[], side: "a" | "b"): RegionOnSide[] {
  return regions
    .map((region, index) => {
      const span = side === "a" ? region.span_a : region.span_b;
      return {
        index,
        file: side === "a" ? region.file_a : region.file_b,
        startLine: span[0][0],
        endLine: span[1][0],
      };
    })
    .sort((x, y) => x.startLine - y.startLine || x.index - y.index);
}

function renderPane(
  side: "a" | "b",
  submissionId: string,
  files: Record<string, string>,
  regions: MatchRegion[],
): HTMLElement {
  const pane = document.createElement("div");
  pane.className = "pane";
  pane.dataset.side = side;
  const title = document.createElement("h3");
  title.textContent = submissionId;
  pane.appendChild(title);

  const sideRegions = regionsForSide(regions, side);
  for (const filename of Object.keys(files).sort()) {
    const header = document.createElement("div");
    header.className = "file-name";
    header.textContent = filename;
    pane.appendChild(header);

    const pre = document.createElement("pre");
    pre.className = "pane-code";
    const lines = (files[filename] ?? "").split("\n");
    const fileRegions = sideRegions.filter((r) => r.file === filename);
    let regionCursor = 0;
    let line = 1;

    const lineSpan = (n: number): HTMLElement => {
      const span = document.createElement("span");
      span.className = "code-line";
      span.dataset.line = String(n);
      span.textContent = `${String(n).padStart(4, " ")}  ${lines[n - 1] ?? ""}\n`;
      return span;
    };

    while (line <= lines.length || regionCursor < fileRegions.length) {
      const region = fileRegions[regionCursor];
      if (region && line >= region.startLine) {
        // exactly one highlight element per match region on this side
        const mark = document.createElement("mark");
        mark.className = "region-hl";
        mark.dataset.region = String(region.index);
        mark.title = "click to align both panes";
        const end = Math.min(Math.max(region.endLine, line - 1), lines.length);
        while (line <= end) {
          mark.appendChild(lineSpan(line));
          line += 1;
        }
        pre.appendChild(mark);
        regionCursor += 1;
        continue;
      }
      if (line > lines.length) break;
      pre.appendChild(lineSpan(line));
      line += 1;
    }
    pane.appendChild(pre);
  }
  return pane;
}

function alignPanes(container: HTMLElement, regionIndex: string): void {
  for (const mark of container.querySelectorAll<HTMLElement>(
    `mark.region-hl[data-region="${regionIndex}"]`,
  )) {
    mark.scrollIntoView({ block: "center" });
    mark.classList.add("flash");
    setTimeout(() => mark.classList.remove("flash"), 600);
  }
}

function scoreLine(detail: PairDetail): string {
  const parts = Object.entries(detail.scores)
    .sort(([x], [y]) => (x < y ? -1 : 1))
    .map(([name, s]) => `${name}: ${s.status === "ok" && s.score !== null ? s.score.toFixed(4) : s.status}`);
  const aggregate = detail.aggregate === null ? "undefined" : detail.aggregate.toFixed(4);
  return `aggregate ${aggregate} · ${parts.join(" · ")}`;
}

function renderCommentMatches(detail: PairDetail): HTMLElement {
  const box = document.createElement("section");
  box.className = "comment-matches";
  const title = document.createElement("h3");
  const matches = detail.evidence.comment_matches ?? [];
  title.textContent = `comment matches (${matches.length})`;
  box.appendChild(title);
  const table = document.createElement("table");
  for (const match of matches) {
    const tr = document.createElement("tr");
    tr.className = "comment-match";
    for (const text of [match.a.text, match.b.text, match.cosine.toFixed(4)]) {
      const td = document.createElement("td");
      td.textContent = text;
      tr.appendChild(td);
    }
    table.appendChild(tr);
  }
  box.appendChild(table);
  return box;
}

function renderDirectiveDiff(detail: PairDetail): HTMLElement {
  const box = document.createElement("section");
  box.className = "directive-diff";
  const title = document.createElement("h3");
  title.textContent = "directives";
  box.appendChild(title);
  const counts_a = detail.evidence.directives?.counts_a ?? {};
  const counts_b = detail.evidence.directives?.counts_b ?? {};
  const keys = Array.from(new Set([...Object.keys(counts_a), ...Object.keys(counts_b)])).sort();
  const table = document.createElement("table");
  for (const key of keys) {
    const tr = document.createElement("tr");
    tr.className = counts_a[key] && counts_b[key] ? "directive shared" : "directive lone";
    for (const text of [key, String(counts_a[key] ?? 0), String(counts_b[key] ?? 0)]) {
      const td = document.createElement("td");
      td.textContent = text;
      tr.appendChild(td);
    }
    table.appendChild(tr);
  }
  box.appendChild(table);
  return box;
}

function renderBirthmark(detail: PairDetail): HTMLElement {
  const box = document.createElement("section");
  box.className = "birthmark-panel";
  const title = document.createElement("h3");
  title.textContent = "birthmark";
  box.appendChild(title);
  const birthmark = detail.evidence.birthmark;
  if (!birthmark) {
    const note = document.createElement("p");
    note.className = "empty-note";
    note.textContent = detail.scores["birthmark"]?.reason ?? "no shared telemetry";
    box.appendChild(note);
    return box;
  }
  const meta = document.createElement("p");
  meta.textContent = `${birthmark.method} over ${birthmark.common_counters.join(", ")}`;
  box.appendChild(meta);
  const table = document.createElement("table");
  for (const entry of birthmark.per_input) {
    const tr = document.createElement("tr");
    tr.className = "birthmark-input";
    for (const text of [entry.input_id, entry.similarity.toFixed(4)]) {
      const td = document.createElement("td");
      td.textContent = text;
      tr.appendChild(td);
    }
    table.appendChild(tr);
  }
  box.appendChild(table);
  return box;
}

function renderHistory(history: VerdictRecord[]): HTMLElement {
  const list = document.createElement("ul");
  list.className = "verdict-history";
  for (const record of history) {
    const item = document.createElement("li");
    item.textContent = `${record.decided_at} ${record.reviewer}: ${record.judgement}${
      record.note ? ` — ${record.note}` : ""
    }`;
    list.appendChild(item);
  }
  return list;
}

export function renderPairDetail(
  container: HTMLElement,
  detail: PairDetail,
  submit: VerdictSubmit,
  initialReviewer = "",
  onReviewerChange: (name: string) => void = () => {},
): void {
  container.textContent = "";
  const header = document.createElement("h2");
  header.textContent = `${detail.a} / ${detail.b}`;
  container.appendChild(header);

  const verdictBadge = document.createElement("span");
  verdictBadge.className = "verdict-badge";
  const applysummary = (summary: VerdictSummary) => {
    const judgements = summary.current.map((v) => v.judgement);
    verdictBadge.textContent = summary.disputed
      ? "disputed"
      : judgements[judgements.length - 1] ?? "unreviewed";
    verdictBadge.dataset.state = verdictBadge.textContent;
  };
  applysummary(detail.verdicts);
  header.appendChild(verdictBadge);

  const scores = document.createElement("p");
  scores.className = "score-line";
  scores.textContent = scoreLine(detail);
  container.appendChild(scores);

  const regions = detail.evidence.match_regions ?? [];
  const panes = document.createElement("div");
  panes.className = "panes";
  panes.appendChild(renderPane("a", detail.a, detail.files_a, regions));
  panes.appendChild(renderPane("b", detail.b, detail.files_b, regions));
  panes.addEventListener("click", (event) => {
    const mark = (event.target as HTMLElement).closest?.("mark.region-hl") as HTMLElement | null;
    if (mark?.dataset.region !== undefined) alignPanes(panes, mark.dataset.region);
  });
  container.appendChild(panes);

  container.appendChild(renderCommentMatches(detail));
  container.appendChild(renderDirectiveDiff(detail));
  container.appendChild(renderBirthmark(detail));

  // verdict form: constructed only once evidence is on screen
  const form = document.createElement("form");
  form.className = "verdict-form";
  const reviewer = document.createElement("input");
  reviewer.name = "reviewer";
  reviewer.placeholder = "reviewer name";
  reviewer.value = initialReviewer;
  reviewer.addEventListener("change", () => onReviewerChange(reviewer.value.trim()));
  const judgement = document.createElement("select");
  judgement.name = "judgement";
  for (const value of ["confirmed", "dismissed", "inconclusive"]) {
    const option = document.createElement("option");
    option.value = value;
    option.textContent = value;
    judgement.appendChild(option);
  }
  const note = document.createElement("textarea");
  note.name = "note";
  note.placeholder = "note for the record";
  const button = document.createElement("button");
  button.type = "submit";
  button.textContent = "record verdict";
  const formError = document.createElement("p");
  formError.className = "form-error";
  formError.hidden = true;

  const historyBox = document.createElement("section");
  historyBox.className = "history-box";
  const historyTitle = document.createElement("h3");
  historyTitle.textContent = "verdict history";
  historyBox.appendChild(historyTitle);
  let historyList = renderHistory(detail.verdicts.history);
  historyBox.appendChild(historyList);
  const history = detail.verdicts.history.slice();

  let inFlight = false;
  let lastAccepted: string | null =
    history.length > 0
      ? JSON.stringify([history[history.length - 1]!.reviewer, history[history.length - 1]!.judgement, history[history.length - 1]!.note])
      : null;

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const body = {
      judgement: judgement.value as Judgement,
      reviewer: reviewer.value.trim(),
      note: note.value,
    };
    if (!body.reviewer) {
      formError.textContent = "set a reviewer name first";
      formError.hidden = false;
      return;
    }
    const key = JSON.stringify([body.reviewer, body.judgement, body.note]);
    if (inFlight || key === lastAccepted) return; // double-click idempotence
    inFlight = true;
    button.disabled = true;
    submit(body)
      .then((result) => {
        lastAccepted = key;
        formError.hidden = true;
        history.push(result.verdict);
        const fresh = renderHistory(history);
        historyBox.replaceChild(fresh, historyList);
        historyList = fresh;
        applysummary(result); // badge updates without a reload
      })
      .catch((cause: unknown) => {
        // keep the reviewer's input intact on failure
        formError.textContent = cause instanceof Error ? cause.message : String(cause);
        formError.hidden = false;
      })
      .finally(() => {
        inFlight = false;
        button.disabled = false;
      });
  });

  for (const el of [reviewer, judgement, note, button]) form.appendChild(el);
  form.appendChild(formError);
  container.appendChild(form);
  container.appendChild(historyBox);
}
