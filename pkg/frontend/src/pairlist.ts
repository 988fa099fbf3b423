import { verdictBadge } from "./filter.js";
import type { AnalyserScore, PairRow } from "./types.js";

const ANALYSER_ORDER = ["fingerprint", "comments", "directives", "birthmark"];

function scoreBadge(name: string, score: AnalyserScore): HTMLElement {
  const el = document.createElement("span");
  el.className = `score-badge ${score.status}`;
  el.title = score.reason ?? name;
  el.textContent =
    score.status === "ok" && score.score !== null
      ? `${name} ${score.score.toFixed(2)}`
      : `${name} —`;
  return el;
}

export function renderPairList(
  container: HTMLElement,
  rows: PairRow[],
  pairHref: (row: PairRow) => string,
): void {
  container.textContent = "";
  const table = document.createElement("table");
  table.className = "pair-table";
  const head = document.createElement("tr");
  for (const label of ["pair", "aggregate", "analysers", "verdict"]) {
    const th = document.createElement("th");
    th.textContent = label;
    head.appendChild(th);
  }
  table.appendChild(head);

  for (const row of rows) {
    const tr = document.createElement("tr");
    tr.className = "pair-row";
    tr.dataset.pairId = row.pair_id;

    const pairCell = document.createElement("td");
    const link = document.createElement("a");
    link.href = pairHref(row);
    link.textContent = `${row.a} / ${row.b}`;
    pairCell.appendChild(link);
    tr.appendChild(pairCell);

    const aggCell = document.createElement("td");
    aggCell.className = "aggregate";
    aggCell.textContent = row.aggregate === null ? "undefined" : row.aggregate.toFixed(4);
    tr.appendChild(aggCell);

    const scoresCell = document.createElement("td");
    for (const name of ANALYSER_ORDER) {
      const score = row.scores[name];
      if (score) scoresCell.appendChild(scoreBadge(name, score));
    }
    tr.appendChild(scoresCell);

    const verdictCell = document.createElement("td");
    const badge = document.createElement("span");
    badge.className = `verdict-badge ${verdictBadge(row)}`;
    badge.textContent = verdictBadge(row);
    verdictCell.appendChild(badge);
    tr.appendChild(verdictCell);

    table.appendChild(tr);
  }
  container.appendChild(table);

  if (rows.length === 0) {
    const empty = document.createElement("p");
    empty.className = "empty-note";
    empty.textContent = "no pairs at this threshold";
    container.appendChild(empty);
  }
}
