/**
 * Thin typed client for the workbench API.  Every UI mutation corresponds to
 * exactly one of these calls; nothing is cached beyond the caller's state.
 */

import {
  CurvePayload, FpdRequest, PointsPage, Summary,
  isCurvePayload, isPointsPage, isSummary,
} from "./types";

export class ApiError extends Error {
  constructor(public status: number, public detail: string) {
    super(`${status}: ${detail}`);
  }
}

export interface PointFilter {
  status?: string;
  gate?: string;
  po?: string;
  page?: number;
  page_size?: number;
}

async function getJson(url: string): Promise<unknown> {
  const res = await fetch(url);
  if (!res.ok) {
    throw new ApiError(res.status, await errDetail(res));
  }
  return res.json();
}

async function errDetail(res: Response): Promise<string> {
  try {
    const body = await res.json();
    return typeof body?.detail === "string" ? body.detail : res.statusText;
  } catch {
    return res.statusText;
  }
}

export class Client {
  constructor(private base: string = "") {}

  async summary(): Promise<Summary> {
    const data = await getJson(`${this.base}/api/summary`);
    if (!isSummary(data)) throw new ApiError(0, "malformed summary payload");
    return data;
  }

  pointsUrl(f: PointFilter): string {
    const q = new URLSearchParams();
    if (f.status) q.set("status", f.status);
    if (f.gate) q.set("gate", f.gate);
    if (f.po) q.set("po", f.po);
    q.set("page", String(f.page ?? 0));
    q.set("page_size", String(f.page_size ?? 100));
    return `${this.base}/api/points?${q.toString()}`;
  }

  async points(f: PointFilter = {}): Promise<PointsPage> {
    const data = await getJson(this.pointsUrl(f));
    if (!isPointsPage(data)) throw new ApiError(0, "malformed points payload");
    return data;
  }

  async curve(): Promise<CurvePayload> {
    const data = await getJson(`${this.base}/api/curve`);
    if (!isCurvePayload(data)) throw new ApiError(0, "malformed curve payload");
    return data;
  }

  /** Append one false-path entry; resolves to the refreshed summary. */
  async markUnreachable(req: FpdRequest): Promise<Summary> {
    const res = await fetch(`${this.base}/api/fpd`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(req),
    });
    if (!res.ok) throw new ApiError(res.status, await errDetail(res));
    const body = await res.json();
    if (!isSummary(body?.summary)) throw new ApiError(0, "malformed fpd response");
    return body.summary;
  }

  async rerun(stimulusPath: string): Promise<Summary> {
    const res = await fetch(`${this.base}/api/rerun`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ stimulus_path: stimulusPath }),
    });
    if (!res.ok) throw new ApiError(res.status, await errDetail(res));
    const data = await res.json();
    if (!isSummary(data)) throw new ApiError(0, "malformed rerun response");
    return data;
  }
}
