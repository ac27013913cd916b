import {
  ApiError,
  buildHighlightRequest,
  fetchTopics,
  requestHighlight,
} from "./api.js";
import { debounce } from "./debounce.js";
import { renderHighlightsHtml, renderLegendHtml } from "./render.js";
import { ResponseSequencer } from "./sequencer.js";
import {
  UiState,
  applyFailure,
  applySuccess,
  beginRequest,
  editCode,
  initialState,
} from "./state.js";

const BASE_URL = "";
const AUTO_RUN_DELAY_MS = 500;

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

let state: UiState = initialState();
const sequencer = new ResponseSequencer();

const codeInput = $<HTMLTextAreaElement>("code-input");
const topicSelect = $<HTMLSelectElement>("topic-select");
const paramsBody = $<HTMLTableSectionElement>("params-body");
const thresholdInput = $<HTMLInputElement>("threshold-input");
const expandInput = $<HTMLInputElement>("expand-input");
const autoRunInput = $<HTMLInputElement>("auto-run");
const runButton = $<HTMLButtonElement>("run-button");
const statusLine = $<HTMLSpanElement>("status-line");
const errorBanner = $<HTMLDivElement>("error-banner");
const warnBadge = $<HTMLSpanElement>("warn-badge");
const view = $<HTMLPreElement>("code-view");
const legend = $<HTMLDivElement>("legend");

function selectedTopics(): string[] {
  return Array.from(topicSelect.selectedOptions).map((o) => o.value);
}

function readParameters(): UiState["parameters"] {
  const windowSizes: Record<string, number> = {};
  for (const input of paramsBody.querySelectorAll<HTMLInputElement>("input[data-topic]")) {
    const raw = input.value.trim();
    if (raw !== "" && input.dataset.default !== raw) {
      const value = Number(raw);
      if (Number.isFinite(value) && value >= 1) {
        windowSizes[input.dataset.topic as string] = Math.floor(value);
      }
    }
  }
  const thresholdRaw = thresholdInput.value.trim();
  const threshold =
    thresholdRaw === "" || Number(thresholdRaw) === 0.8 ? null : Number(thresholdRaw);
  return { windowSizes, threshold, expandBoundaries: expandInput.checked };
}

function renderState(): void {
  const { html, clamped } = renderHighlightsHtml(state.code, state.spans);
  view.innerHTML = html === "" ? "<span class='placeholder'>paste code above</span>" : html;
  warnBadge.hidden = !clamped;
  if (state.status.kind === "error") {
    errorBanner.textContent = state.status.message;
    errorBanner.hidden = false;
  } else {
    errorBanner.hidden = true;
  }
  const stale = state.spansStale ? " (stale)" : "";
  if (state.status.kind === "pending") {
    statusLine.textContent = "highlighting...";
  } else if (state.elapsedMs !== null) {
    statusLine.textContent = `${state.spans.length} span(s) in ${state.elapsedMs.toFixed(0)} ms${stale}`;
  } else {
    statusLine.textContent = `idle${stale}`;
  }
}

async function run(): Promise<void> {
  const topics = selectedTopics();
  if (state.code.length === 0 || topics.length === 0) {
    return;
  }
  state = { ...state, selectedTopics: new Set(topics), parameters: readParameters() };
  const body = buildHighlightRequest(state.code, topics, state.parameters);
  const requestId = sequencer.next();
  state = beginRequest(state);
  renderState();
  try {
    const result = await requestHighlight(BASE_URL, body);
    if (!sequencer.shouldApply(requestId)) {
      return; // superseded by a newer request
    }
    state = applySuccess(state, result.spans, result.elapsedMs);
  } catch (err) {
    if (!sequencer.shouldApply(requestId)) {
      return;
    }
    const message = err instanceof ApiError ? err.message : `request failed: ${err}`;
    state = applyFailure(state, message);
  }
  renderState();
}

const autoRun = debounce(() => {
  if (autoRunInput.checked) {
    void run();
  }
}, AUTO_RUN_DELAY_MS);

async function init(): Promise<void> {
  let topics: string[];
  try {
    topics = await fetchTopics(BASE_URL);
  } catch (err) {
    state = applyFailure(state, `cannot load topics: ${err}`);
    renderState();
    return;
  }
  for (const topic of topics) {
    const option = document.createElement("option");
    option.value = topic;
    option.textContent = topic;
    topicSelect.append(option);
  }
  topicSelect.options[0].selected = true;
  legend.innerHTML = renderLegendHtml(topics);

  const defaults: Record<string, number> = {
    Classes: 60, Friend: 20, Inheritance: 40, Inline: 20, Namespaces: 25,
    OperatorOverload: 20, Templates: 25, TryCatch: 40, VirtualFunction: 40,
  };
  for (const topic of topics) {
    const row = document.createElement("tr");
    const dflt = defaults[topic] ?? 30;
    row.innerHTML =
      `<td>${topic}</td>` +
      `<td><input type="number" min="1" data-topic="${topic}" data-default="${dflt}" value="${dflt}"></td>`;
    paramsBody.append(row);
  }

  codeInput.addEventListener("input", () => {
    state = editCode(state, codeInput.value);
    renderState();
    autoRun();
  });
  topicSelect.addEventListener("change", () => autoRun());
  runButton.addEventListener("click", () => void run());
  renderState();
}

void init();
