/** The one external interface: JSON over HTTP to the synthesis service. */

import type { ProblemDoc, SynthesizeResponse } from "./types.js";

export class ApiError extends Error {}

export interface ApiOptions {
  /** Service origin, e.g. "http://127.0.0.1:8000"; same-origin when "". */
  baseUrl?: string;
  fetchFn?: typeof fetch;
  signal?: AbortSignal;
}

export async function synthesize(
  doc: ProblemDoc,
  opts: ApiOptions = {},
): Promise<SynthesizeResponse> {
  const fetchFn = opts.fetchFn ?? fetch;
  let resp: Response;
  try {
    resp = await fetchFn(`${opts.baseUrl ?? ""}/api/synthesize`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(doc),
      signal: opts.signal,
    });
  } catch (err) {
    if (err instanceof DOMException && err.name === "AbortError") throw err;
    throw new ApiError(`the synthesis service is unreachable: ${String(err)}`);
  }
  let body: unknown;
  try {
    body = await resp.json();
  } catch {
    throw new ApiError(`the service answered ${resp.status} without JSON`);
  }
  const rec = body as SynthesizeResponse;
  if (typeof rec !== "object" || rec === null || typeof rec.status !== "string") {
    throw new ApiError("the service answer has no status field");
  }
  return rec;
}

export async function health(opts: ApiOptions = {}): Promise<boolean> {
  const fetchFn = opts.fetchFn ?? fetch;
  try {
    const resp = await fetchFn(`${opts.baseUrl ?? ""}/api/health`);
    return resp.ok;
  } catch {
    return false;
  }
}
