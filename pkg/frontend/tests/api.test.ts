import { describe, expect, it } from "vitest";

import {
  ApiError,
  buildHighlightRequest,
  fetchTopics,
  requestHighlight,
} from "../src/api.js";

const PARAMS = {
  windowSizes: { OperatorOverload: 25, Friend: 30 },
  threshold: 0.7,
  expandBoundaries: false,
};

describe("buildHighlightRequest", () => {
  it("carries parameter overrides verbatim", () => {
    const body = buildHighlightRequest("int x;", ["Friend"], PARAMS);
    expect(body.config_overrides).toEqual({
      window_sizes: { OperatorOverload: 25, Friend: 30 },
      threshold: 0.7,
      expand_boundaries: false,
    });
    expect(body.code).toBe("int x;");
    expect(body.topics).toEqual(["Friend"]);
  });

  it("omits overrides when everything is default", () => {
    const body = buildHighlightRequest("int x;", ["Inline"], {
      windowSizes: {},
      threshold: null,
      expandBoundaries: true,
    });
    expect(body.config_overrides).toBeUndefined();
  });
});

function fakeFetch(status: number, payload: unknown) {
  const calls: { url: string; init?: RequestInit }[] = [];
  const impl = async (url: string, init?: RequestInit): Promise<Response> => {
    calls.push({ url, init });
    return {
      ok: status >= 200 && status < 300,
      status,
      json: async () => payload,
    } as Response;
  };
  return { impl, calls };
}

describe("requestHighlight", () => {
  it("posts the body and returns spans with elapsed time", async () => {
    const { impl, calls } = fakeFetch(200, {
      spans: [{ topic: "Friend", start: 0, end: 5, confidence: 0.9 }],
      elapsed_ms: 12.5,
    });
    const body = buildHighlightRequest("friend", ["Friend"], PARAMS);
    const result = await requestHighlight("", body, impl);
    expect(result.spans).toHaveLength(1);
    expect(result.elapsedMs).toBe(12.5);
    expect(calls[0].url).toBe("/api/highlight");
    expect(JSON.parse(String(calls[0].init?.body))).toEqual(body);
  });

  it("surfaces the server's error message", async () => {
    const { impl } = fakeFetch(400, { error: "unknown topic 'Bogus'" });
    const body = buildHighlightRequest("x", ["Bogus"], PARAMS);
    await expect(requestHighlight("", body, impl)).rejects.toThrowError(
      /unknown topic 'Bogus'/,
    );
    await expect(requestHighlight("", body, impl)).rejects.toBeInstanceOf(ApiError);
  });
});

describe("fetchTopics", () => {
  it("returns the server's topic list", async () => {
    const { impl } = fakeFetch(200, { topics: ["Classes", "Friend"] });
    expect(await fetchTopics("", impl)).toEqual(["Classes", "Friend"]);
  });

  it("throws on failure", async () => {
    const { impl } = fakeFetch(500, {});
    await expect(fetchTopics("", impl)).rejects.toBeInstanceOf(ApiError);
  });
});
