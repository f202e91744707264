/** The single-page app: editable grids in, synthesized SQL out.
 *
 * Edit flow: a committed change marks cell validity right away and starts
 * the debounce clock (default 400 ms).  When the clock fires, the problem
 * document is built; if anything is invalid the request is suppressed and
 * the reasons are shown instead.  Otherwise exactly one POST goes out —
 * any older in-flight request is aborted, and a response is dropped unless
 * its sequence number is still the newest, so stale answers never paint
 * over fresh ones.  While a request is pending the previous result stays
 * visible but greyed.
 */

import { ApiError, synthesize } from "./api.js";
import { debounce, type Debounced } from "./debounce.js";
import { markCellValidity, renderGrid, type GridHooks } from "./grid.js";
import { escapeHtml, highlightSql } from "./highlight.js";
import { exportProblem, importProblem } from "./io.js";
import type { AppState } from "./state.js";
import {
  addInputTable,
  buildProblem,
  cellProblem,
  defaultState,
  removeInputTable,
  renameInputTable,
} from "./state.js";
import { COL_TYPES, type ColTypeName, type SynthesizeResponse } from "./types.js";
import { parseCellText } from "./validate.js";

export interface AppOptions {
  baseUrl?: string;
  /** Quiet period after the last committed edit before a request fires. */
  debounceMs?: number;
  /** Injected for tests; defaults to the global fetch. */
  fetchFn?: typeof fetch;
  initial?: AppState;
}

export interface AppHandle {
  root: HTMLElement;
  state(): AppState;
  /** Build and send immediately, skipping the debounce. */
  requestNow(): Promise<void>;
  /** True while an edit is waiting out the debounce. */
  editPending(): boolean;
  exportText(): string;
  importText(text: string): void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  cls?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (cls) node.className = cls;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function createApp(root: HTMLElement, opts: AppOptions = {}): AppHandle {
  let state = opts.initial ?? defaultState();
  const baseUrl = opts.baseUrl ?? "";
  const fetchFn = opts.fetchFn;

  // --- static layout -------------------------------------------------------
  root.replaceChildren();
  root.classList.add("app");

  const header = el("header", "app-header");
  header.append(el("h1", undefined, "example-driven SQL"));
  const badge = el("span", "badge");
  badge.dataset["role"] = "status";
  const elapsed = el("span", "elapsed");
  elapsed.dataset["role"] = "elapsed";
  const statsLine = el("span", "stats");
  statsLine.dataset["role"] = "stats";
  header.append(badge, elapsed, statsLine);

  const columns = el("div", "columns");
  const left = el("section", "pane pane-left");
  const right = el("section", "pane pane-right");
  columns.append(left, right);

  const inputsHost = el("div", "inputs");
  const addTableBtn = el("button", "grid-btn", "+ input table");
  addTableBtn.type = "button";
  const constantsHost = el("fieldset", "constants");
  constantsHost.append(el("legend", undefined, "constants"));
  const constantsBody = el("div");
  const addConstBtn = el("button", "grid-btn", "+ constant");
  addConstBtn.type = "button";
  constantsHost.append(constantsBody, addConstBtn);

  const configHost = el("fieldset", "config");
  configHost.append(el("legend", undefined, "search budget"));
  const timeoutLabel = el("label", undefined, "timeout (ms) ");
  const timeoutInput = el("input", "config-timeout") as HTMLInputElement;
  timeoutInput.inputMode = "numeric";
  timeoutLabel.append(timeoutInput);
  configHost.append(timeoutLabel);

  const ioHost = el("div", "io");
  const exportBtn = el("button", "grid-btn", "export JSON");
  exportBtn.type = "button";
  const importBtn = el("button", "grid-btn", "import JSON");
  importBtn.type = "button";
  const filePick = el("input") as HTMLInputElement;
  filePick.type = "file";
  filePick.accept = "application/json,.json";
  filePick.hidden = true;
  ioHost.append(exportBtn, importBtn, filePick);

  left.append(el("h2", undefined, "input tables"), inputsHost, addTableBtn,
    constantsHost, configHost, ioHost);

  const outputHost = el("div", "table-panel output-panel");
  const results = el("div", "results");
  results.dataset["role"] = "results";
  const sqlBlock = el("pre", "sql");
  const sqlCode = el("code");
  sqlCode.dataset["role"] = "sql";
  sqlBlock.append(sqlCode);
  const dslDetails = el("details", "dsl");
  dslDetails.append(el("summary", undefined, "program"));
  const dslPre = el("pre");
  const dslCode = el("code");
  dslCode.dataset["role"] = "dsl";
  dslPre.append(dslCode);
  dslDetails.append(dslPre);
  const errorBox = el("div", "errors");
  errorBox.dataset["role"] = "errors";
  results.append(sqlBlock, dslDetails, errorBox);

  right.append(el("h2", undefined, "output"), outputHost,
    el("h2", undefined, "query"), results);
  root.append(header, columns);

  // --- request plumbing ----------------------------------------------------
  let seq = 0;
  let inFlight: AbortController | null = null;

  function setBadge(kind: string, text: string): void {
    badge.className = `badge badge-${kind}`;
    badge.textContent = text;
  }

  function showErrors(lines: string[]): void {
    errorBox.replaceChildren();
    for (const line of lines) errorBox.append(el("div", "error-line", line));
  }

  function renderResponse(resp: SynthesizeResponse): void {
    results.classList.remove("stale");
    elapsed.textContent = `${resp.elapsed_ms} ms`;
    statsLine.textContent = resp.stats
      ? `${resp.stats.sketches_tried} sketches, ${resp.stats.candidates_checked} candidates`
      : "";
    if (resp.sql !== undefined) {
      sqlCode.innerHTML = highlightSql(resp.sql);
      dslCode.textContent = resp.dsl ?? "";
    } else {
      sqlCode.innerHTML = `<span class="sql-none">-- no program ${escapeHtml(
        `(${resp.status})`,
      )}</span>`;
      dslCode.textContent = "";
    }
    showErrors(resp.error !== undefined ? [resp.error] : []);
    setBadge(resp.status, resp.status);
  }

  async function requestNow(): Promise<void> {
    const mySeq = ++seq;
    if (inFlight !== null) inFlight.abort();
    const built = buildProblem(state);
    if (!built.ok) {
      inFlight = null;
      setBadge("blocked", "fix the marked cells");
      showErrors(built.errors);
      return;
    }
    const controller = new AbortController();
    inFlight = controller;
    results.classList.add("stale");
    setBadge("pending", "searching…");
    let resp: SynthesizeResponse;
    try {
      resp = await synthesize(built.doc, {
        baseUrl,
        signal: controller.signal,
        ...(fetchFn ? { fetchFn } : {}),
      });
    } catch (err) {
      if (mySeq !== seq) return; // superseded: a newer edit owns the panel
      inFlight = null;
      results.classList.remove("stale");
      setBadge("error", "service error");
      showErrors([err instanceof ApiError ? err.message : String(err)]);
      return;
    }
    if (mySeq !== seq) return;
    inFlight = null;
    renderResponse(resp);
  }

  const scheduled: Debounced<[]> = debounce(() => {
    void requestNow();
  }, opts.debounceMs ?? 400);

  // --- validity marking ----------------------------------------------------
  function markAll(): void {
    for (const host of inputsHost.querySelectorAll<HTMLElement>(".grid-host")) {
      const idx = Number(host.dataset["index"]);
      const entry = state.inputs[idx];
      if (entry) {
        markCellValidity(host, (r, c) => cellProblem(entry.table, r, c));
      }
    }
    const outHost = outputHost.querySelector<HTMLElement>(".grid-host");
    if (outHost) {
      markCellValidity(outHost, (r, c) => cellProblem(state.output, r, c));
    }
    for (const input of root.querySelectorAll<HTMLInputElement>("input.col-name")) {
      const bad = input.value.trim() === "";
      input.classList.toggle("invalid", bad);
      if (bad) input.title = "a column needs a name";
    }
    for (const input of constantsBody.querySelectorAll<HTMLInputElement>("input.const-value")) {
      const idx = Number(input.dataset["index"]);
      const constant = state.constants[idx];
      if (!constant) continue;
      const parsed = parseCellText(constant.text, constant.type);
      const reason = !parsed.ok
        ? parsed.reason
        : parsed.value === null
          ? "a constant needs a value"
          : null;
      input.classList.toggle("invalid", reason !== null);
      input.title = reason ?? "";
    }
  }

  function commitEdit(): void {
    markAll();
    scheduled();
  }

  const hooks: GridHooks = {
    onCellCommit: commitEdit,
    onStructure: () => {
      renderAll();
      commitEdit();
    },
  };

  // --- dynamic sections ----------------------------------------------------
  function renderInputs(): void {
    inputsHost.replaceChildren();
    state.inputs.forEach((entry, i) => {
      const panel = el("div", "table-panel");
      const bar = el("div", "table-bar");
      const name = el("input", "table-name") as HTMLInputElement;
      name.value = entry.name;
      name.title = "table name";
      name.addEventListener("change", () => {
        renameInputTable(state, i, name.value);
        hooks.onStructure();
      });
      bar.append(name);
      if (state.inputs.length > 1) {
        const rm = el("button", "grid-btn", "×");
        rm.type = "button";
        rm.title = "remove this table";
        rm.addEventListener("click", () => {
          removeInputTable(state, i);
          hooks.onStructure();
        });
        bar.append(rm);
      }
      const host = el("div", "grid-host");
      host.dataset["index"] = String(i);
      renderGrid(host, entry.name, entry.table, hooks);
      panel.append(bar, host);
      inputsHost.append(panel);
    });
  }

  function renderOutput(): void {
    outputHost.replaceChildren();
    const host = el("div", "grid-host");
    renderGrid(host, "output", state.output, hooks);
    outputHost.append(host);
  }

  function renderConstants(): void {
    constantsBody.replaceChildren();
    state.constants.forEach((constant, i) => {
      const row = el("div", "const-row");
      const type = el("select", "const-type") as HTMLSelectElement;
      for (const t of COL_TYPES) {
        const opt = el("option", undefined, t) as HTMLOptionElement;
        opt.value = t;
        type.append(opt);
      }
      type.value = constant.type;
      type.addEventListener("change", () => {
        constant.type = type.value as ColTypeName;
        commitEdit();
      });
      const value = el("input", "const-value") as HTMLInputElement;
      value.value = constant.text;
      value.dataset["index"] = String(i);
      value.addEventListener("change", () => {
        constant.text = value.value;
        commitEdit();
      });
      const rm = el("button", "grid-btn", "×");
      rm.type = "button";
      rm.title = "remove this constant";
      rm.addEventListener("click", () => {
        state.constants.splice(i, 1);
        hooks.onStructure();
      });
      row.append(type, value, rm);
      constantsBody.append(row);
    });
  }

  function renderConfig(): void {
    timeoutInput.value =
      state.config.timeout_ms === undefined ? "" : String(state.config.timeout_ms);
  }

  function renderAll(): void {
    renderInputs();
    renderOutput();
    renderConstants();
    renderConfig();
  }

  addTableBtn.addEventListener("click", () => {
    if (addInputTable(state)) hooks.onStructure();
  });
  addConstBtn.addEventListener("click", () => {
    state.constants.push({ type: "Str", text: "" });
    hooks.onStructure();
  });
  timeoutInput.addEventListener("change", () => {
    const text = timeoutInput.value.trim();
    if (text === "") {
      delete state.config.timeout_ms;
      timeoutInput.classList.remove("invalid");
      commitEdit();
      return;
    }
    const n = Number(text);
    if (Number.isSafeInteger(n) && n >= 0) {
      state.config.timeout_ms = n;
      timeoutInput.classList.remove("invalid");
      commitEdit();
    } else {
      timeoutInput.classList.add("invalid");
      timeoutInput.title = "timeout must be a non-negative integer";
      setBadge("blocked", "fix the timeout");
    }
  });

  exportBtn.addEventListener("click", () => {
    let text: string;
    try {
      text = exportProblem(state);
    } catch (err) {
      setBadge("blocked", "fix the marked cells");
      showErrors([String(err instanceof Error ? err.message : err)]);
      return;
    }
    const blob = new Blob([text], { type: "application/json" });
    const url = URL.createObjectURL(blob);
    const a = el("a") as HTMLAnchorElement;
    a.href = url;
    a.download = "problem.json";
    a.click();
    URL.revokeObjectURL(url);
  });
  importBtn.addEventListener("click", () => filePick.click());
  filePick.addEventListener("change", () => {
    const file = filePick.files?.[0];
    if (!file) return;
    void file.text().then((text) => {
      try {
        importText(text);
      } catch (err) {
        setBadge("error", "import failed");
        showErrors([String(err instanceof Error ? err.message : err)]);
      }
    });
    filePick.value = "";
  });

  function importText(text: string): void {
    state = importProblem(text);
    renderAll();
    commitEdit();
  }

  // --- first paint ---------------------------------------------------------
  renderAll();
  setBadge("idle", "ready");
  commitEdit();

  return {
    root,
    state: () => state,
    requestNow: () => {
      scheduled.cancel();
      return requestNow();
    },
    editPending: () => scheduled.pending(),
    exportText: () => exportProblem(state),
    importText,
  };
}
