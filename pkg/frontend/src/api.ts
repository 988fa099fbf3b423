import type {
  AnalysisListEntry,
  AnalysisStatus,
  Judgement,
  PairDetail,
  PairsPage,
  VerdictRecord,
  VerdictSummary,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
  }
}

async function errorMessage(resp: Response): Promise<string> {
  try {
    const body = await resp.json();
    if (Array.isArray(body.detail)) {
      return body.detail
        .map((d: { field?: string; message?: string }) => `${d.field}: ${d.message}`)
        .join("; ");
    }
    if (typeof body.detail === "string") return body.detail;
    return JSON.stringify(body.detail ?? body);
  } catch {
    return `${resp.status} ${resp.statusText}`;
  }
}

export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly token: string | null = null,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const headers: Record<string, string> = { ...((init?.headers as Record<string, string>) ?? {}) };
    if (this.token) headers["X-Martial-Token"] = this.token;
    let resp: Response;
    try {
      resp = await fetch(this.base + path, { ...init, headers });
    } catch (cause) {
      throw new ApiError(0, `network failure: ${String(cause)}`);
    }
    if (!resp.ok) throw new ApiError(resp.status, await errorMessage(resp));
    return (await resp.json()) as T;
  }

  listAnalyses(): Promise<{ analyses: AnalysisListEntry[] }> {
    return this.request("/api/analyses");
  }

  getAnalysis(analysisId: string): Promise<AnalysisStatus> {
    return this.request(`/api/analyses/${analysisId}`);
  }

  getPairs(analysisId: string, page = 1, pageSize = 200): Promise<PairsPage> {
    const params = new URLSearchParams({ page: String(page), page_size: String(pageSize) });
    return this.request(`/api/analyses/${analysisId}/pairs?${params}`);
  }

  getPairDetail(analysisId: string, pairId: string): Promise<PairDetail> {
    return this.request(`/api/analyses/${analysisId}/pairs/${encodeURIComponent(pairId)}`);
  }

  postVerdict(
    analysisId: string,
    pairId: string,
    body: { judgement: Judgement; reviewer: string; note: string },
  ): Promise<{ verdict: VerdictRecord } & VerdictSummary> {
    return this.request(`/api/analyses/${analysisId}/pairs/${encodeURIComponent(pairId)}/verdicts`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }
}
