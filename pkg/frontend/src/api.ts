import type { SpanRec } from "./render.js";

export interface Parameters {
  windowSizes: Record<string, number>;
  threshold: number | null;
  expandBoundaries: boolean;
}

export interface HighlightRequestBody {
  code: string;
  topics: string[];
  config_overrides?: {
    window_sizes?: Record<string, number>;
    threshold?: number;
    expand_boundaries?: boolean;
  };
}

export interface HighlightResult {
  spans: SpanRec[];
  elapsedMs: number;
}

export class ApiError extends Error {}

/** The outgoing body; parameter overrides appear verbatim. */
export function buildHighlightRequest(
  code: string,
  topics: string[],
  params: Parameters,
): HighlightRequestBody {
  const body: HighlightRequestBody = { code, topics: [...topics] };
  const overrides: NonNullable<HighlightRequestBody["config_overrides"]> = {};
  if (Object.keys(params.windowSizes).length > 0) {
    overrides.window_sizes = { ...params.windowSizes };
  }
  if (params.threshold !== null) {
    overrides.threshold = params.threshold;
  }
  if (!params.expandBoundaries) {
    overrides.expand_boundaries = false;
  }
  if (Object.keys(overrides).length > 0) {
    body.config_overrides = overrides;
  }
  return body;
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export async function fetchTopics(
  baseUrl: string,
  fetchImpl: FetchLike = fetch,
): Promise<string[]> {
  const response = await fetchImpl(`${baseUrl}/api/topics`);
  if (!response.ok) {
    throw new ApiError(`topics request failed (${response.status})`);
  }
  const data = (await response.json()) as { topics: string[] };
  return data.topics;
}

export async function requestHighlight(
  baseUrl: string,
  body: HighlightRequestBody,
  fetchImpl: FetchLike = fetch,
): Promise<HighlightResult> {
  const response = await fetchImpl(`${baseUrl}/api/highlight`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(body),
  });
  const data = await response.json().catch(() => ({}));
  if (!response.ok) {
    const message =
      typeof (data as { error?: string }).error === "string"
        ? (data as { error: string }).error
        : `highlight request failed (${response.status})`;
    throw new ApiError(message);
  }
  const payload = data as { spans: SpanRec[]; elapsed_ms: number };
  return { spans: payload.spans, elapsedMs: payload.elapsed_ms };
}
