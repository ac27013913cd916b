import type { Parameters } from "./api.js";
import type { SpanRec } from "./render.js";

export type RequestStatus =
  | { kind: "idle" }
  | { kind: "pending" }
  | { kind: "error"; message: string };

export interface UiState {
  code: string;
  selectedTopics: Set<string>;
  spans: SpanRec[];
  spansStale: boolean;
  parameters: Parameters;
  status: RequestStatus;
  elapsedMs: number | null;
}

export function initialState(): UiState {
  return {
    code: "",
    selectedTopics: new Set(),
    spans: [],
    spansStale: false,
    parameters: { windowSizes: {}, threshold: null, expandBoundaries: true },
    status: { kind: "idle" },
    elapsedMs: null,
  };
}

/** Editing the code invalidates spans: offsets no longer apply. */
export function editCode(state: UiState, code: string): UiState {
  if (code === state.code) {
    return state;
  }
  return { ...state, code, spans: [], spansStale: false, elapsedMs: null };
}

export function beginRequest(state: UiState): UiState {
  return { ...state, status: { kind: "pending" } };
}

export function applySuccess(
  state: UiState,
  spans: SpanRec[],
  elapsedMs: number,
): UiState {
  return {
    ...state,
    spans,
    spansStale: false,
    status: { kind: "idle" },
    elapsedMs,
  };
}

/** A failed request keeps the previous spans but marks them stale. */
export function applyFailure(state: UiState, message: string): UiState {
  return {
    ...state,
    status: { kind: "error", message },
    spansStale: state.spans.length > 0,
  };
}
