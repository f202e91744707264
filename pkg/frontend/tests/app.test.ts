import { readFileSync } from "node:fs";
import { join } from "node:path";

import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { createApp, type AppHandle } from "../src/app.js";
import type { SynthesizeResponse } from "../src/types.js";

const RICH = readFileSync(join(process.cwd(), "tests", "fixtures", "rich.json"), "utf8");

// ---------------------------------------------------------------------------
// a controllable stand-in for the synthesis service
// ---------------------------------------------------------------------------

interface ServiceCall {
  url: string;
  body: Record<string, any>;
  signal: AbortSignal | undefined;
  respond(resp: SynthesizeResponse): void;
  fail(err: Error): void;
}

function fakeService(opts: { rejectOnAbort?: boolean } = {}) {
  const calls: ServiceCall[] = [];
  const fetchFn = ((input: RequestInfo | URL, init?: RequestInit) => {
    return new Promise<Response>((resolve, reject) => {
      const signal = init?.signal ?? undefined;
      if (opts.rejectOnAbort !== false && signal) {
        signal.addEventListener("abort", () =>
          reject(new DOMException("aborted", "AbortError")),
        );
      }
      calls.push({
        url: String(input),
        body: JSON.parse(String(init?.body)) as Record<string, any>,
        signal,
        respond: (resp) =>
          resolve({ status: 200, json: async () => resp } as unknown as Response),
        fail: reject,
      });
    });
  }) as typeof fetch;
  return { calls, fetchFn };
}

const SOLVED: SynthesizeResponse = {
  status: "solved",
  elapsed_ms: 12.5,
  stats: { sketches_tried: 3, candidates_checked: 41 },
  sql: "SELECT name, amount\nFROM t\nORDER BY amount ASC",
  dsl: "Order(Table(t), [#1 asc])",
};

function solvedWith(sql: string): SynthesizeResponse {
  return { ...SOLVED, sql };
}

// ---------------------------------------------------------------------------
// DOM helpers
// ---------------------------------------------------------------------------

function mount(): HTMLElement {
  document.body.innerHTML = "";
  const root = document.createElement("div");
  document.body.append(root);
  return root;
}

function cellInput(root: HTMLElement, table: string, row: number, col: number): HTMLInputElement {
  const sel = `[data-table="${table}"] input.cell[data-row="${row}"][data-col="${col}"]`;
  const input = root.querySelector<HTMLInputElement>(sel);
  if (!input) throw new Error(`no cell matches ${sel}`);
  return input;
}

function edit(input: HTMLInputElement, text: string): void {
  input.value = text;
  input.dispatchEvent(new Event("change"));
}

function textOf(root: HTMLElement, role: string): string {
  return root.querySelector(`[data-role="${role}"]`)?.textContent ?? "";
}

const settle = () => vi.advanceTimersByTimeAsync(0);

/** Boot the app and settle its initial synthesis round. */
async function boot(opts: { rejectOnAbort?: boolean } = {}) {
  const service = fakeService(opts);
  const root = mount();
  const handle: AppHandle = createApp(root, { fetchFn: service.fetchFn });
  await vi.advanceTimersByTimeAsync(400);
  expect(service.calls).toHaveLength(1);
  service.calls[0]!.respond(SOLVED);
  await settle();
  return { ...service, root, handle };
}

beforeEach(() => {
  vi.useFakeTimers();
});
afterEach(() => {
  vi.useRealTimers();
});

// ---------------------------------------------------------------------------
// the round trip: edit a cell -> one debounced request -> SQL on screen
// ---------------------------------------------------------------------------

describe("edit-to-SQL round trip", () => {
  it("boots with one request and renders the returned SQL", async () => {
    const { calls, root } = await boot();
    expect(calls[0]!.url).toBe("/api/synthesize");
    expect(Object.keys(calls[0]!.body)).toContain("inputs");
    expect(Object.keys(calls[0]!.body)).toContain("output");
    expect(textOf(root, "sql")).toContain("ORDER BY");
    expect(root.querySelector('[data-role="sql"]')!.innerHTML).toContain("sql-kw");
    expect(textOf(root, "dsl")).toContain("Order(");
    expect(root.querySelector('[data-role="status"]')!.textContent).toBe("solved");
    expect(root.textContent).toContain("12.5 ms");
    expect(root.textContent).toContain("3 sketches, 41 candidates");
  });

  it("an output-cell edit triggers exactly one debounced request and renders the SQL", async () => {
    const { calls, root } = await boot();
    edit(cellInput(root, "output", 0, 0), "zeta");

    await vi.advanceTimersByTimeAsync(399);
    expect(calls).toHaveLength(1); // still inside the quiet period
    await vi.advanceTimersByTimeAsync(1);
    expect(calls).toHaveLength(2); // fired exactly once at 400 ms

    expect(calls[1]!.body["output"].rows[0][0]).toBe("zeta");
    calls[1]!.respond(solvedWith("SELECT name\nFROM t\nWHERE name = 'zeta'"));
    await settle();
    expect(textOf(root, "sql")).toContain("'zeta'");

    await vi.advanceTimersByTimeAsync(2000); // and never fires again
    expect(calls).toHaveLength(2);
  });

  it("a burst of edits collapses into a single request carrying all of them", async () => {
    const { calls, root } = await boot();
    edit(cellInput(root, "output", 0, 0), "one");
    edit(cellInput(root, "output", 1, 0), "two");
    edit(cellInput(root, "output", 2, 0), "three");
    await vi.advanceTimersByTimeAsync(400);
    expect(calls).toHaveLength(2);
    const rows = calls[1]!.body["output"].rows as string[][];
    expect([rows[0]![0], rows[1]![0], rows[2]![0]]).toEqual(["one", "two", "three"]);
  });
});

// ---------------------------------------------------------------------------
// validity gating
// ---------------------------------------------------------------------------

describe("invalid input", () => {
  it("marks the broken cell, explains it, and suppresses the request", async () => {
    const { calls, root } = await boot();
    const amount = cellInput(root, "output", 0, 1); // an Int column
    edit(amount, "twelve");

    expect(amount.classList.contains("invalid")).toBe(true);
    expect(amount.title).toContain("not an integer");

    await vi.advanceTimersByTimeAsync(1000);
    expect(calls).toHaveLength(1); // nothing was sent
    expect(root.querySelector('[data-role="status"]')!.textContent).toContain("fix");
    expect(textOf(root, "errors")).toContain("not an integer");

    edit(amount, "12"); // repaired: the next round fires again
    expect(amount.classList.contains("invalid")).toBe(false);
    await vi.advanceTimersByTimeAsync(400);
    expect(calls).toHaveLength(2);
    expect(calls[1]!.body["output"].rows[0][1]).toBe(12);
  });

  it("never sends a body the service would reject as malformed", async () => {
    const { calls, root } = await boot();
    // empty a column name: a structural error, not a cell error
    const name = root.querySelector<HTMLInputElement>(
      '[data-table="output"] input.col-name',
    )!;
    edit(name, "   ");
    await vi.advanceTimersByTimeAsync(1000);
    expect(calls).toHaveLength(1);
    expect(textOf(root, "errors")).toContain("no name");
  });
});

// ---------------------------------------------------------------------------
// pending state and request supersession
// ---------------------------------------------------------------------------

describe("in-flight behaviour", () => {
  it("greys the previous result while a request is pending", async () => {
    const { calls, root } = await boot();
    edit(cellInput(root, "output", 0, 0), "zeta");
    await vi.advanceTimersByTimeAsync(400);

    const results = root.querySelector('[data-role="results"]')!;
    expect(results.classList.contains("stale")).toBe(true);
    expect(textOf(root, "sql")).toContain("ORDER BY"); // old result still visible
    expect(root.querySelector('[data-role="status"]')!.textContent).toContain("searching");

    calls[1]!.respond(solvedWith("SELECT 1"));
    await settle();
    expect(results.classList.contains("stale")).toBe(false);
    expect(textOf(root, "sql")).toContain("SELECT 1");
  });

  it("aborts the older request and drops its late response", async () => {
    const { calls, root } = await boot({ rejectOnAbort: false });
    edit(cellInput(root, "output", 0, 0), "first-edit");
    await vi.advanceTimersByTimeAsync(400);
    edit(cellInput(root, "output", 0, 0), "second-edit");
    await vi.advanceTimersByTimeAsync(400);
    expect(calls).toHaveLength(3);
    expect(calls[1]!.signal?.aborted).toBe(true); // older request cancelled

    calls[2]!.respond(solvedWith("SELECT 'newer'"));
    await settle();
    expect(textOf(root, "sql")).toContain("newer");

    calls[1]!.respond(solvedWith("SELECT 'older'")); // arrives late anyway
    await settle();
    expect(textOf(root, "sql")).toContain("newer"); // and is ignored
    expect(textOf(root, "sql")).not.toContain("older");
  });

  it("reports a service failure and recovers on the next edit", async () => {
    const service = fakeService();
    const root = mount();
    createApp(root, { fetchFn: service.fetchFn });
    await vi.advanceTimersByTimeAsync(400);
    service.calls[0]!.fail(new TypeError("network down"));
    await settle();
    expect(root.querySelector('[data-role="status"]')!.textContent).toContain("error");
    expect(textOf(root, "errors")).toContain("unreachable");

    edit(cellInput(root, "output", 0, 0), "retry");
    await vi.advanceTimersByTimeAsync(400);
    expect(service.calls).toHaveLength(2);
    service.calls[1]!.respond(SOLVED);
    await settle();
    expect(textOf(root, "sql")).toContain("ORDER BY");
  });

  it("renders a server-side 'invalid' verdict with its reason", async () => {
    const service = fakeService();
    const root = mount();
    createApp(root, { fetchFn: service.fetchFn });
    await vi.advanceTimersByTimeAsync(400);
    service.calls[0]!.respond({
      status: "invalid",
      elapsed_ms: 0.3,
      error: "output uses a value no input contains",
    });
    await settle();
    expect(root.querySelector('[data-role="status"]')!.textContent).toBe("invalid");
    expect(textOf(root, "errors")).toContain("no input contains");
    expect(textOf(root, "sql")).toContain("no program");
  });
});

// ---------------------------------------------------------------------------
// files in, files out
// ---------------------------------------------------------------------------

describe("import and export", () => {
  it("importText loads a file, resynthesizes, and exportText reproduces the bytes", async () => {
    const { calls, root, handle } = await boot();
    handle.importText(RICH);

    expect(root.querySelector('[data-table="ratings"]')).not.toBeNull();
    expect(cellInput(root, "ratings", 0, 0).value).toBe("naïve début");

    await vi.advanceTimersByTimeAsync(400);
    expect(calls).toHaveLength(2);
    expect(Object.keys(calls[1]!.body["inputs"])).toEqual(["ratings"]);
    calls[1]!.respond(SOLVED);
    await settle();

    expect(handle.exportText()).toBe(RICH);
  });

  it("requestNow sends immediately and cancels the pending debounce", async () => {
    const { calls, root, handle } = await boot();
    edit(cellInput(root, "output", 0, 0), "zeta");
    expect(handle.editPending()).toBe(true);

    const done = handle.requestNow();
    expect(calls).toHaveLength(2);
    expect(handle.editPending()).toBe(false);
    calls[1]!.respond(SOLVED);
    await done;

    await vi.advanceTimersByTimeAsync(2000);
    expect(calls).toHaveLength(2); // the debounced duplicate never fired
  });
});
