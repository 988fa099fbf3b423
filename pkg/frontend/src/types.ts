// Payload shapes of the review-service API. The UI never recomputes or
// mutates scores: everything numeric is displayed verbatim.

export type ScoreStatus = "ok" | "not_applicable" | "unavailable";

export interface AnalyserScore {
  status: ScoreStatus;
  score: number | null;
  reason: string | null;
}

export type Judgement = "confirmed" | "dismissed" | "inconclusive";

export interface VerdictRecord {
  pair_id: string;
  judgement: Judgement;
  reviewer: string;
  note: string;
  decided_at: string;
}

export interface VerdictSummary {
  current: VerdictRecord[];
  disputed: boolean;
}

export interface PairRow {
  pair_id: string;
  a: string;
  b: string;
  aggregate: number | null;
  scores: Record<string, AnalyserScore>;
  verdicts: VerdictSummary;
}

export interface PairsPage {
  pairs: PairRow[];
  total: number;
  page: number;
  page_size: number;
  pages: number;
}

export type Span = [[number, number], [number, number]];

export interface MatchRegion {
  file_a: string;
  file_b: string;
  span_a: Span;
  span_b: Span;
  shared_fingerprints: number;
}

export interface CommentSide {
  file: string;
  line_start: number;
  line_end: number;
  text: string;
}

export interface CommentMatch {
  a: CommentSide;
  b: CommentSide;
  cosine: number;
}

export interface BirthmarkDetail {
  common_counters: string[];
  method: string;
  per_input: { input_id: string; similarity: number }[];
}

export interface PairEvidence {
  match_regions?: MatchRegion[];
  comment_matches?: CommentMatch[];
  comment_counts?: Record<string, number>;
  directives?: { counts_a: Record<string, number>; counts_b: Record<string, number> };
  birthmark?: BirthmarkDetail | null;
}

export interface PairDetail {
  pair_id: string;
  a: string;
  b: string;
  aggregate: number | null;
  scores: Record<string, AnalyserScore>;
  evidence: PairEvidence;
  files_a: Record<string, string>;
  files_b: Record<string, string>;
  verdicts: VerdictSummary & { history: VerdictRecord[] };
}

export interface AnalysisStatus {
  analysis_id: string;
  status: "pending" | "running" | "done" | "failed";
  created_at: string;
  reason: string | null;
  config?: Record<string, unknown>;
  pair_count?: number;
  submission_count?: number;
}

export interface AnalysisListEntry {
  analysis_id: string;
  status: string;
  created_at: string;
  source: string | null;
}
