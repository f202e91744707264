/** The editable in-memory problem and every mutation the UI performs.
 *
 * Cells hold raw text while being edited; a problem document is built on
 * demand and only if every cell, constant, and name is valid — the UI
 * never sends a request the service would reject as malformed.
 */

import type {
  CellJson,
  ColTypeName,
  ConfigDoc,
  ProblemDoc,
  TableDoc,
} from "./types.js";
import { CONFIG_KEYS } from "./types.js";
import { cellJsonValid, cellText, parseCellText } from "./validate.js";

/** Soft editor limit: tables never grow past this many rows or columns. */
export const MAX_DIM = 50;

export interface EditTable {
  columns: { name: string; type: ColTypeName }[];
  /** Raw cell text exactly as typed; "" is NULL. */
  cells: string[][];
}

export interface EditConstant {
  type: ColTypeName;
  text: string;
}

export interface AppState {
  inputs: { name: string; table: EditTable }[];
  output: EditTable;
  constants: EditConstant[];
  config: ConfigDoc;
}

export function emptyTable(): EditTable {
  return { columns: [{ name: "c0", type: "Str" }], cells: [[""]] };
}

export function defaultState(): AppState {
  return {
    inputs: [
      {
        name: "t",
        table: {
          columns: [
            { name: "name", type: "Str" },
            { name: "amount", type: "Int" },
          ],
          cells: [
            ["alpha", "3"],
            ["beta", "1"],
            ["gamma", "2"],
          ],
        },
      },
    ],
    output: {
      columns: [
        { name: "name", type: "Str" },
        { name: "amount", type: "Int" },
      ],
      cells: [
        ["beta", "1"],
        ["gamma", "2"],
        ["alpha", "3"],
      ],
    },
    constants: [],
    config: { timeout_ms: 4000 },
  };
}

// ---------------------------------------------------------------------------
// mutations (all bounds-checked, all no-ops past the soft limit)
// ---------------------------------------------------------------------------

export function setCell(t: EditTable, row: number, col: number, text: string): void {
  const r = t.cells[row];
  if (r !== undefined && col < t.columns.length) r[col] = text;
}

export function addRow(t: EditTable): boolean {
  if (t.cells.length >= MAX_DIM) return false;
  t.cells.push(t.columns.map(() => ""));
  return true;
}

export function removeRow(t: EditTable, row: number): void {
  if (t.cells.length > 0 && row < t.cells.length) t.cells.splice(row, 1);
}

export function addColumn(t: EditTable): boolean {
  if (t.columns.length >= MAX_DIM) return false;
  t.columns.push({ name: `c${t.columns.length}`, type: "Str" });
  for (const row of t.cells) row.push("");
  return true;
}

export function removeColumn(t: EditTable, col: number): void {
  if (t.columns.length <= 1 || col >= t.columns.length) return;
  t.columns.splice(col, 1);
  for (const row of t.cells) row.splice(col, 1);
}

export function renameColumn(t: EditTable, col: number, name: string): void {
  const c = t.columns[col];
  if (c) c.name = name;
}

export function setColumnType(t: EditTable, col: number, type: ColTypeName): void {
  const c = t.columns[col];
  if (c) c.type = type;
}

export function addInputTable(state: AppState): boolean {
  if (state.inputs.length >= 8) return false;
  let n = state.inputs.length;
  while (state.inputs.some((i) => i.name === `t${n}`)) n += 1;
  state.inputs.push({ name: `t${n}`, table: emptyTable() });
  return true;
}

export function removeInputTable(state: AppState, index: number): void {
  if (state.inputs.length > 1 && index < state.inputs.length) {
    state.inputs.splice(index, 1);
  }
}

export function renameInputTable(state: AppState, index: number, name: string): void {
  const entry = state.inputs[index];
  if (entry) entry.name = name;
}

// ---------------------------------------------------------------------------
// validation and document building
// ---------------------------------------------------------------------------

/** Why a single cell cannot join a request, or null when it parses. */
export function cellProblem(t: EditTable, row: number, col: number): string | null {
  const column = t.columns[col];
  const text = t.cells[row]?.[col];
  if (column === undefined || text === undefined) return "no such cell";
  const parsed = parseCellText(text, column.type);
  return parsed.ok ? null : parsed.reason;
}

function buildTable(t: EditTable, where: string, errors: string[]): TableDoc {
  const columns = t.columns.map((c, j) => {
    if (c.name.trim() === "") errors.push(`${where}: column ${j} has no name`);
    return { name: c.name, type: c.type };
  });
  const rows: CellJson[][] = t.cells.map((row, i) =>
    row.map((text, j) => {
      const col = t.columns[j];
      if (col === undefined) return null;
      const parsed = parseCellText(text, col.type);
      if (!parsed.ok) {
        errors.push(`${where}: row ${i}, column "${col.name}": ${parsed.reason}`);
        return null;
      }
      return parsed.value;
    }),
  );
  return { columns, rows };
}

export type BuildOutcome =
  | { ok: true; doc: ProblemDoc }
  | { ok: false; errors: string[] };

/** Assemble the problem document, or every reason it cannot be sent. */
export function buildProblem(state: AppState): BuildOutcome {
  const errors: string[] = [];
  if (state.inputs.length === 0) errors.push("at least one input table is needed");
  const seen = new Set<string>();
  for (const { name } of state.inputs) {
    if (name.trim() === "") errors.push("an input table has no name");
    if (seen.has(name)) errors.push(`two input tables are both named "${name}"`);
    seen.add(name);
  }
  const inputs: Record<string, TableDoc> = {};
  for (const { name, table } of state.inputs) {
    inputs[name] = buildTable(table, `input "${name}"`, errors);
  }
  const output = buildTable(state.output, "output", errors);
  if (state.output.cells.length === 0) {
    errors.push("the output table needs at least one row");
  }

  const constants = state.constants.map((c, i) => {
    const parsed = parseCellText(c.text, c.type);
    if (!parsed.ok) {
      errors.push(`constant ${i}: ${parsed.reason}`);
      return { type: c.type, value: null };
    }
    if (parsed.value === null) {
      errors.push(`constant ${i}: a constant needs a value`);
    }
    return { type: c.type, value: parsed.value };
  });

  if (errors.length > 0) return { ok: false, errors };
  const doc: ProblemDoc = { inputs, output };
  if (constants.length > 0) doc.constants = constants;
  if (Object.keys(state.config).length > 0) doc.config = { ...state.config };
  return { ok: true, doc };
}

// ---------------------------------------------------------------------------
// loading a document back into editable form
// ---------------------------------------------------------------------------

export class ProblemImportError extends Error {}

function fail(msg: string): never {
  throw new ProblemImportError(msg);
}

function asTable(value: unknown, where: string): EditTable {
  if (typeof value !== "object" || value === null || Array.isArray(value)) {
    fail(`${where} must be an object with "columns" and "rows"`);
  }
  const rec = value as Record<string, unknown>;
  for (const key of Object.keys(rec)) {
    if (key !== "columns" && key !== "rows") fail(`${where} has unknown key "${key}"`);
  }
  const { columns, rows } = rec;
  if (!Array.isArray(columns) || columns.length === 0) {
    fail(`${where}.columns must be a non-empty array`);
  }
  const cols = columns.map((c, j) => {
    const col = c as Record<string, unknown>;
    if (typeof col !== "object" || col === null) fail(`${where}.columns[${j}] must be an object`);
    const { name, type } = col;
    if (typeof name !== "string") fail(`${where}.columns[${j}].name must be a string`);
    if (type !== "Int" && type !== "Dbl" && type !== "Str" && type !== "Date") {
      fail(`${where}.columns[${j}].type must be one of Int, Dbl, Str, Date`);
    }
    return { name, type: type as ColTypeName };
  });
  if (!Array.isArray(rows)) fail(`${where}.rows must be an array`);
  const cells = rows.map((row, i) => {
    if (!Array.isArray(row)) fail(`${where}.rows[${i}] must be an array`);
    if (row.length !== cols.length) {
      fail(`${where}.rows[${i}] has ${row.length} cells for ${cols.length} columns`);
    }
    return row.map((cell, j) => {
      const col = cols[j]!;
      if (!cellJsonValid(cell as CellJson, col.type)) {
        fail(`${where}.rows[${i}][${j}] is not a ${col.type}`);
      }
      return cellText(cell as CellJson);
    });
  });
  return { columns: cols, cells };
}

export function fromProblemDoc(doc: unknown): AppState {
  if (typeof doc !== "object" || doc === null || Array.isArray(doc)) {
    fail("a problem document is a JSON object");
  }
  const rec = doc as Record<string, unknown>;
  for (const key of Object.keys(rec)) {
    if (!["inputs", "output", "constants", "config"].includes(key)) {
      fail(`unknown key "${key}"`);
    }
  }
  const { inputs, output, constants, config } = rec;
  if (typeof inputs !== "object" || inputs === null || Array.isArray(inputs)) {
    fail('"inputs" must map table names to tables');
  }
  const names = Object.keys(inputs as object);
  if (names.length === 0) fail('"inputs" needs at least one table');
  const state: AppState = {
    inputs: names.map((name) => ({
      name,
      table: asTable((inputs as Record<string, unknown>)[name], `inputs.${name}`),
    })),
    output: asTable(output, "output"),
    constants: [],
    config: {},
  };

  if (constants !== undefined) {
    if (!Array.isArray(constants)) fail('"constants" must be an array');
    state.constants = constants.map((c, i) => {
      const rec = c as Record<string, unknown>;
      if (typeof rec !== "object" || rec === null) fail(`constants[${i}] must be an object`);
      const { type, value } = rec;
      if (type !== "Int" && type !== "Dbl" && type !== "Str" && type !== "Date") {
        fail(`constants[${i}].type must be one of Int, Dbl, Str, Date`);
      }
      if (value === null || value === undefined) {
        fail(`constants[${i}] needs a value`);
      }
      if (!cellJsonValid(value as CellJson, type as ColTypeName)) {
        fail(`constants[${i}].value is not a ${String(type)}`);
      }
      return { type: type as ColTypeName, text: cellText(value as CellJson) };
    });
  }

  if (config !== undefined) {
    if (typeof config !== "object" || config === null || Array.isArray(config)) {
      fail('"config" must be an object');
    }
    for (const [key, value] of Object.entries(config as object)) {
      if (!(CONFIG_KEYS as readonly string[]).includes(key)) {
        fail(`config has unknown key "${key}"`);
      }
      if (key === "projection_mode") {
        if (value !== "fast" && value !== "baseline") {
          fail('config.projection_mode must be "fast" or "baseline"');
        }
      } else if (typeof value !== "number" || !Number.isSafeInteger(value) || value < 0) {
        fail(`config.${key} must be a non-negative integer`);
      }
    }
    state.config = { ...(config as ConfigDoc) };
  }
  return state;
}
