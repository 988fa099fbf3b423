import { beforeEach, describe, expect, it } from "vitest";
import { filterByThreshold } from "../src/filter.js";
import { renderPairList } from "../src/pairlist.js";
import type { PairsPage } from "../src/types.js";
import page from "./fixtures/pairs_page.json";

const rows = (page as PairsPage).pairs;

describe("pair list rendering", () => {
  let container: HTMLElement;

  beforeEach(() => {
    document.body.innerHTML = '<div id="box"></div>';
    container = document.getElementById("box")!;
  });

  it("renders one row per pair in the fixture report", () => {
    renderPairList(container, rows, (r) => `#/a/x/p/${r.pair_id}`);
    expect(container.querySelectorAll("tr.pair-row")).toHaveLength(6);
  });

  it("shows aggregates verbatim from the payload", () => {
    renderPairList(container, rows, () => "#");
    const cells = Array.from(container.querySelectorAll("td.aggregate")).map(
      (td) => td.textContent,
    );
    const expected = rows.map((r) =>
      r.aggregate === null ? "undefined" : r.aggregate.toFixed(4),
    );
    expect(cells).toEqual(expected);
  });

  it("threshold 0.5 renders exactly the pairs at or above it", () => {
    renderPairList(container, filterByThreshold(rows, 0.5), () => "#");
    const ids = Array.from(container.querySelectorAll("tr.pair-row")).map(
      (tr) => (tr as HTMLElement).dataset.pairId,
    );
    const expected = rows
      .filter((r) => r.aggregate !== null && r.aggregate >= 0.5)
      .map((r) => r.pair_id);
    expect(ids).toEqual(expected);
  });

  it("returning the threshold to zero restores the full list", () => {
    renderPairList(container, filterByThreshold(rows, 0.7), () => "#");
    renderPairList(container, filterByThreshold(rows, 0), () => "#");
    expect(container.querySelectorAll("tr.pair-row")).toHaveLength(6);
  });

  it("links point at the pair route", () => {
    renderPairList(container, rows, (r) => `#/a/abc/p/${r.pair_id}`);
    const href = container.querySelector("tr.pair-row a")!.getAttribute("href");
    expect(href).toBe(`#/a/abc/p/${rows[0]!.pair_id}`);
  });

  it("renders analyser badges with their statuses", () => {
    renderPairList(container, rows.slice(0, 1), () => "#");
    const badges = container.querySelectorAll(".score-badge");
    expect(badges.length).toBe(4);
    expect(container.querySelectorAll(".score-badge.not_applicable").length).toBeGreaterThan(0);
  });

  it("shows an explicit empty state instead of a blank page", () => {
    renderPairList(container, [], () => "#");
    expect(container.querySelector(".empty-note")?.textContent).toMatch(/no pairs/);
  });
});
