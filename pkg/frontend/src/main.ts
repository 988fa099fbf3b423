import { ApiClient, ApiError } from "./api.js";
import { renderPairDetail } from "./detail.js";
import { filterByThreshold, rankRows } from "./filter.js";
import { renderPairList } from "./pairlist.js";
import type { PairRow } from "./types.js";

const api = new ApiClient("");

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function loadReviewer(): string {
  try {
    return window.localStorage.getItem("martial-reviewer") ?? "";
  } catch {
    return "";
  }
}

function storeReviewer(name: string): void {
  try {
    window.localStorage.setItem("martial-reviewer", name);
  } catch {
    // private mode: the session just stays anonymous
  }
}

function errorBanner(root: HTMLElement, message: string, retry: () => void): void {
  root.textContent = "";
  const banner = el("div", "error-banner");
  banner.appendChild(el("p", undefined, message));
  const button = el("button", "retry", "retry");
  button.addEventListener("click", retry);
  banner.appendChild(button);
  root.appendChild(banner);
}

async function showAnalysisList(root: HTMLElement): Promise<void> {
  root.textContent = "";
  root.appendChild(el("p", "loading", "loading analyses…"));
  try {
    const { analyses } = await api.listAnalyses();
    root.textContent = "";
    root.appendChild(el("h2", undefined, "analyses"));
    if (analyses.length === 0) {
      root.appendChild(el("p", "empty-note", "no analyses yet — create one via the API or CLI"));
      return;
    }
    const list = el("ul", "analysis-list");
    for (const entry of analyses) {
      const item = el("li");
      const link = el("a");
      link.href = `#/a/${entry.analysis_id}`;
      link.textContent = `${entry.analysis_id} · ${entry.status} · ${entry.created_at}`;
      item.appendChild(link);
      list.appendChild(item);
    }
    root.appendChild(list);
  } catch (cause) {
    errorBanner(root, describe(cause), () => void showAnalysisList(root));
  }
}

function describe(cause: unknown): string {
  if (cause instanceof ApiError && cause.status === 0) return cause.message;
  return cause instanceof Error ? cause.message : String(cause);
}

async function showPairList(root: HTMLElement, analysisId: string): Promise<void> {
  root.textContent = "";
  root.appendChild(el("p", "loading", "loading report…"));
  try {
    const status = await api.getAnalysis(analysisId);
    if (status.status === "failed") {
      root.textContent = "";
      const banner = el("div", "error-banner");
      banner.appendChild(el("p", undefined, `analysis failed: ${status.reason ?? "unknown reason"}`));
      root.appendChild(banner);
      return;
    }
    if (status.status !== "done") {
      root.textContent = "";
      root.appendChild(el("p", "loading", `analysis ${status.status}… retrying shortly`));
      setTimeout(() => {
        if (currentRoute() === `#/a/${analysisId}`) void showPairList(root, analysisId);
      }, 750);
      return;
    }

    const page = await api.getPairs(analysisId);
    const rows = rankRows(page.pairs);
    root.textContent = "";
    root.appendChild(el("h2", undefined, `ranked pairs (${page.total})`));

    const controls = el("div", "controls");
    const label = el("label", undefined, "aggregate threshold ");
    const slider = document.createElement("input");
    slider.type = "range";
    slider.min = "0";
    slider.max = "1";
    slider.step = "0.01";
    slider.value = "0";
    const valueLabel = el("span", "slider-value", "0.00");
    label.appendChild(slider);
    label.appendChild(valueLabel);
    controls.appendChild(label);
    root.appendChild(controls);

    const listBox = el("div", "pair-list");
    root.appendChild(listBox);

    const apply = () => {
      const threshold = Number(slider.value);
      valueLabel.textContent = threshold.toFixed(2);
      const visible: PairRow[] = filterByThreshold(rows, threshold);
      renderPairList(listBox, visible, (row) => `#/a/${analysisId}/p/${row.pair_id}`);
    };
    slider.addEventListener("input", apply);
    apply();
  } catch (cause) {
    errorBanner(root, describe(cause), () => void showPairList(root, analysisId));
  }
}

async function showPairDetail(root: HTMLElement, analysisId: string, pairId: string): Promise<void> {
  root.textContent = "";
  root.appendChild(el("p", "loading", "loading evidence…"));
  try {
    const detail = await api.getPairDetail(analysisId, pairId);
    root.textContent = "";
    const back = el("a", "back-link", "← all pairs");
    back.href = `#/a/${analysisId}`;
    root.appendChild(back);
    const box = el("div", "detail-box");
    root.appendChild(box);
    renderPairDetail(
      box,
      detail,
      (body) => api.postVerdict(analysisId, pairId, body),
      loadReviewer(),
      storeReviewer,
    );
  } catch (cause) {
    errorBanner(root, describe(cause), () => void showPairDetail(root, analysisId, pairId));
  }
}

function currentRoute(): string {
  return window.location.hash || "#/";
}

export function route(root: HTMLElement): void {
  const hash = currentRoute();
  const detailMatch = hash.match(/^#\/a\/([^/]+)\/p\/(.+)$/);
  if (detailMatch) {
    void showPairDetail(root, detailMatch[1]!, decodeURIComponent(detailMatch[2]!));
    return;
  }
  const listMatch = hash.match(/^#\/a\/([^/]+)$/);
  if (listMatch) {
    void showPairList(root, listMatch[1]!);
    return;
  }
  void showAnalysisList(root);
}

export function boot(): void {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app mount point");
  window.addEventListener("hashchange", () => route(root));
  route(root);
}

// only boot in a real page, not when imported by tests
if (typeof document !== "undefined" && document.getElementById("app")) {
  boot();
}
