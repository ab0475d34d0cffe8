/** Client behaviour against a mocked fetch: URLs, bodies, error mapping. */

import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiError, Client } from "../src/api";
import c1Summary from "./fixtures/c1_summary.json";

function mockFetch(handler: (url: string, init?: RequestInit) => [number, unknown]) {
  const calls: Array<{ url: string; init?: RequestInit }> = [];
  vi.stubGlobal("fetch", async (url: string, init?: RequestInit) => {
    calls.push({ url, init });
    const [status, body] = handler(url, init);
    return new Response(JSON.stringify(body), {
      status,
      headers: { "content-type": "application/json" },
    });
  });
  return calls;
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("summary and points", () => {
  it("fetches and validates the summary", async () => {
    mockFetch(() => [200, c1Summary]);
    const s = await new Client().summary();
    expect(s).toEqual(c1Summary);
  });

  it("rejects malformed summaries", async () => {
    mockFetch(() => [200, { nope: true }]);
    await expect(new Client().summary()).rejects.toThrow("malformed");
  });

  it("builds filter query strings", () => {
    const c = new Client();
    expect(c.pointsUrl({ status: "open", gate: "row1*", page: 2, page_size: 25 }))
      .toBe("/api/points?status=open&gate=row1*&page=2&page_size=25");
    expect(c.pointsUrl({})).toBe("/api/points?page=0&page_size=100");
  });
});

describe("mark unreachable", () => {
  it("posts exactly the documented body and returns the new summary", async () => {
    const calls = mockFetch(() => [200, { applied: [], summary: c1Summary }]);
    const req = { gate: "g1", out: "Y", m: "01", po: "x", reason: "r", author: "a" };
    const s = await new Client().markUnreachable(req);
    expect(s).toEqual(c1Summary);
    expect(calls[0]!.url).toBe("/api/fpd");
    expect(calls[0]!.init?.method).toBe("POST");
    expect(JSON.parse(String(calls[0]!.init?.body))).toEqual(req);
  });

  it("surfaces a conflict on covered points as ApiError 409", async () => {
    mockFetch(() => [409, { detail: "covered point cannot be a false path" }]);
    const err = await new Client()
      .markUnreachable({ gate: "g", out: "Y", m: "1", po: "x", reason: "", author: "" })
      .catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(409);
    expect(err.detail).toContain("covered point");
  });
});

describe("rerun", () => {
  it("posts the stimulus path and returns the refreshed summary", async () => {
    const calls = mockFetch(() => [200, c1Summary]);
    const s = await new Client().rerun("full.stim");
    expect(s.total).toBe(7);
    expect(JSON.parse(String(calls[0]!.init?.body))).toEqual({ stimulus_path: "full.stim" });
  });

  it("maps missing stimulus to ApiError 404", async () => {
    mockFetch(() => [404, { detail: "no stimulus file nope.stim" }]);
    const err = await new Client().rerun("nope.stim").catch((e) => e);
    expect(err.status).toBe(404);
  });
});
