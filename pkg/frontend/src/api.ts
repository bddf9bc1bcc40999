/**
 * API client: bearer token storage plus typed wrappers for the JSON
 * endpoints. The UI talks only to these; no analytics happen client-side.
 */

const TOKEN_KEY = "codetutor.token";

export interface QueryFields {
  language: string;
  code: string;
  error: string;
  issue: string;
}

export interface QueryResponse {
  query_id: string;
  main_text: string;
  clarification_text: string | null;
}

export interface CategoryRow {
  category: string;
  count: number;
  percent: number;
  kappa: number | null;
}

export interface ScatterPoint {
  user_id: string;
  usage: number;
  performance: number;
}

export interface Report {
  queries: { total: number; users: number };
  dedup: { duplicates_removed: number; kept: number };
  composite: { cronbach_alpha: number };
  categories?: {
    analyzed: number;
    rows: CategoryRow[];
    debugging_subcategories: CategoryRow[];
    overall_kappa: number | null;
    collapsed_kappa: number | null;
  };
  per_user_fractions?: Record<string, Record<string, number>>;
  correlation?: {
    r: number;
    p_two_tailed: number;
    n: number;
    scatter: ScatterPoint[];
  };
}

export interface LogRecord {
  id: string;
  user_id: string;
  timestamp: string;
  language: string;
  code: string;
  error: string;
  issue: string;
  main_text: string | null;
}

export interface QueryPage {
  total: number;
  offset: number;
  limit: number;
  records: LogRecord[];
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

export function getToken(): string | null {
  try {
    return sessionStorage.getItem(TOKEN_KEY);
  } catch {
    return null;
  }
}

export function setToken(token: string) {
  try {
    sessionStorage.setItem(TOKEN_KEY, token);
  } catch {
    // private browsing; requests will still carry the in-memory token
  }
}

export function clearToken() {
  try {
    sessionStorage.removeItem(TOKEN_KEY);
  } catch {
    // ignore
  }
}

async function apiFetch<T>(path: string, init: RequestInit = {}): Promise<T> {
  const headers = new Headers(init.headers || {});
  headers.set("Content-Type", "application/json");
  const token = getToken();
  if (token) headers.set("Authorization", `Bearer ${token}`);
  const resp = await fetch(path, { ...init, headers });
  if (!resp.ok) {
    let code = "error";
    let message = `HTTP ${resp.status}`;
    try {
      const body = await resp.json();
      code = body.code ?? code;
      message = body.message ?? message;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(resp.status, code, message);
  }
  return resp.json() as Promise<T>;
}

/** Submits the four fields exactly as typed; no trimming or rewriting. */
export function submitQuery(fields: QueryFields): Promise<QueryResponse> {
  return apiFetch<QueryResponse>("/api/queries", {
    method: "POST",
    body: JSON.stringify(fields),
  });
}

export function fetchQueries(params: {
  user?: string;
  offset?: number;
  limit?: number;
}): Promise<QueryPage> {
  const search = new URLSearchParams();
  if (params.user) search.set("user", params.user);
  if (params.offset !== undefined) search.set("offset", String(params.offset));
  if (params.limit !== undefined) search.set("limit", String(params.limit));
  const qs = search.toString();
  return apiFetch<QueryPage>(`/api/queries${qs ? "?" + qs : ""}`);
}

export function fetchReport(): Promise<Report> {
  return apiFetch<Report>("/api/analytics/report");
}

export function postLabel(
  queryId: string,
  raterId: string,
  category: string,
): Promise<{ status: string }> {
  return apiFetch("/api/labels", {
    method: "POST",
    body: JSON.stringify({
      query_id: queryId,
      rater_id: raterId,
      category,
    }),
  });
}

export const CATEGORY_VALUES = [
  "debugging:error_only",
  "debugging:outcome_only",
  "debugging:error_and_outcome",
  "implementation",
  "understanding",
  "nothing",
  "off_topic",
];
