// Highlight rendering core. Pure functions: the DOM layer feeds them into
// innerHTML, the tests check them character by character.
//
// Server offsets count Unicode code points, so all slicing here goes
// through Array.from rather than UTF-16 indices.

export interface SpanRec {
  topic: string;
  start: number;
  end: number;
  confidence: number;
}

export interface Segment {
  start: number;
  end: number;
  text: string;
  layers: SpanRec[];
}

export interface SegmentResult {
  segments: Segment[];
  clamped: boolean;
}

export const TOPIC_COLORS: Record<string, string> = {
  Classes: "#cde7ff",
  Friend: "#ffd9cd",
  Inheritance: "#d9f2cf",
  Inline: "#f3d9ff",
  Namespaces: "#fff3b8",
  OperatorOverload: "#c8f0e8",
  Templates: "#ffd7ee",
  TryCatch: "#e0e0ff",
  VirtualFunction: "#e5ffcf",
};

export function colorFor(topic: string): string {
  return TOPIC_COLORS[topic] ?? "#e8e8e8";
}

/** Split code into maximal runs with a constant set of covering spans.
 * Out-of-range spans are clamped and reported so the UI can show a
 * warning badge (the server contract forbids them). */
export function segmentCode(code: string, spans: SpanRec[]): SegmentResult {
  const chars = Array.from(code);
  const n = chars.length;
  let clamped = false;
  const usable: SpanRec[] = [];
  for (const span of spans) {
    let { start, end } = span;
    if (start < 0 || end > n || start >= end) {
      clamped = true;
      start = Math.max(0, Math.min(start, n));
      end = Math.max(start, Math.min(end, n));
      if (start >= end) continue;
    }
    usable.push({ ...span, start, end });
  }
  const bounds = new Set<number>([0, n]);
  for (const span of usable) {
    bounds.add(span.start);
    bounds.add(span.end);
  }
  const sorted = Array.from(bounds).sort((a, b) => a - b);
  const segments: Segment[] = [];
  for (let i = 0; i + 1 < sorted.length; i++) {
    const [start, end] = [sorted[i], sorted[i + 1]];
    if (start === end) continue;
    const layers = usable.filter((s) => s.start <= start && end <= s.end);
    segments.push({ start, end, text: chars.slice(start, end).join(""), layers });
  }
  return { segments, clamped };
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** HTML for the highlighted code view. Overlapping topics stack: the
 * first topic paints the background, the rest add underlines, and the
 * tooltip lists every layer with its confidence. */
export function renderHighlightsHtml(code: string, spans: SpanRec[]): {
  html: string;
  clamped: boolean;
} {
  const { segments, clamped } = segmentCode(code, spans);
  const parts: string[] = [];
  for (const segment of segments) {
    const escaped = escapeHtml(segment.text);
    if (segment.layers.length === 0) {
      parts.push(escaped);
      continue;
    }
    const title = segment.layers
      .map((s) => `${s.topic} (${s.confidence.toFixed(2)})`)
      .join(", ");
    const background = colorFor(segment.layers[0].topic);
    const underline =
      segment.layers.length > 1
        ? `border-bottom:2px solid ${colorFor(segment.layers[1].topic)};`
        : "";
    const classes = segment.layers.map((s) => `hl-${s.topic}`).join(" ");
    parts.push(
      `<mark class="${classes}" style="background:${background};${underline}" ` +
        `title="${escapeHtml(title)}">${escaped}</mark>`,
    );
  }
  return { html: parts.join(""), clamped };
}

export function renderLegendHtml(topics: string[]): string {
  return topics
    .map(
      (t) =>
        `<span class="legend-item" style="background:${colorFor(t)}">${escapeHtml(t)}</span>`,
    )
    .join(" ");
}
