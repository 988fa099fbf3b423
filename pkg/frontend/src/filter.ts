import type { PairRow } from "./types.js";

// Threshold filtering is a pure client-side view over the fetched report:
// moving the slider never refetches or mutates anything, and returning the
// slider to zero restores the full list.

export function filterByThreshold(rows: PairRow[], minScore: number): PairRow[] {
  if (minScore <= 0) return rows.slice();
  return rows.filter((row) => row.aggregate !== null && row.aggregate >= minScore);
}

// Pairs arrive ranked from the backend; re-sorting locally keeps the view
// stable if callers concatenate pages. Undefined aggregates sort last.
export function rankRows(rows: PairRow[]): PairRow[] {
  return rows.slice().sort((x, y) => {
    if (x.aggregate === null && y.aggregate === null) return x.pair_id < y.pair_id ? -1 : 1;
    if (x.aggregate === null) return 1;
    if (y.aggregate === null) return -1;
    if (y.aggregate !== x.aggregate) return y.aggregate - x.aggregate;
    return x.pair_id < y.pair_id ? -1 : 1;
  });
}

export function verdictBadge(row: PairRow): string {
  if (row.verdicts.disputed) return "disputed";
  const current = row.verdicts.current;
  const judgement = current[current.length - 1]?.judgement;
  return judgement ?? "unreviewed";
}
