/** Problem-file import/export, byte-compatible with the CLI's writer.
 *
 * The CLI saves problems as JSON with two-space indentation, every array
 * element on its own line, non-ASCII characters escaped as \uXXXX, a
 * trailing newline, and floating-point cells always carrying a decimal
 * point ("2.0", never "2").  This module reproduces that format exactly,
 * so a file exported here and one saved by the CLI differ at most in key
 * order.  (Exotic float magnitudes that the two languages print with
 * different exponent spellings are outside the editor's desk-scale use.)
 */

import type { CellJson, ColTypeName, ProblemDoc } from "./types.js";
import { CONFIG_KEYS } from "./types.js";
import type { AppState } from "./state.js";
import { buildProblem, fromProblemDoc, ProblemImportError } from "./state.js";

function escapeString(s: string): string {
  let out = '"';
  for (let i = 0; i < s.length; i += 1) {
    const code = s.charCodeAt(i);
    const ch = s[i]!;
    if (ch === '"') out += '\\"';
    else if (ch === "\\") out += "\\\\";
    else if (ch === "\n") out += "\\n";
    else if (ch === "\r") out += "\\r";
    else if (ch === "\t") out += "\\t";
    else if (ch === "\b") out += "\\b";
    else if (ch === "\f") out += "\\f";
    else if (code < 0x20 || code > 0x7e) {
      out += `\\u${code.toString(16).padStart(4, "0")}`;
    } else out += ch;
  }
  return out + '"';
}

function numberText(n: number, float: boolean): string {
  if (float && Number.isInteger(n) && Number.isFinite(n)) {
    return `${n}.0`;
  }
  return String(n);
}

function cell(value: CellJson, ctype: ColTypeName): string {
  if (value === null) return "null";
  if (typeof value === "number") return numberText(value, ctype === "Dbl");
  return escapeString(value);
}

class Writer {
  private parts: string[] = [];
  private depth = 0;

  private pad(): string {
    return "  ".repeat(this.depth);
  }

  /** Write `lines` as a block between `open` and `close` brackets. */
  block(open: string, close: string, items: (() => void)[]): void {
    if (items.length === 0) {
      this.parts.push(open + close);
      return;
    }
    this.parts.push(open + "\n");
    this.depth += 1;
    items.forEach((emit, i) => {
      this.parts.push(this.pad());
      emit();
      this.parts.push(i < items.length - 1 ? ",\n" : "\n");
    });
    this.depth -= 1;
    this.parts.push(this.pad() + close);
  }

  raw(text: string): void {
    this.parts.push(text);
  }

  key(name: string): void {
    this.parts.push(`${escapeString(name)}: `);
  }

  text(): string {
    return this.parts.join("");
  }
}

function writeTable(w: Writer, t: ProblemDoc["output"]): void {
  w.block("{", "}", [
    () => {
      w.key("columns");
      w.block(
        "[",
        "]",
        t.columns.map((col) => () => {
          w.block("{", "}", [
            () => w.raw(`${escapeString("name")}: ${escapeString(col.name)}`),
            () => w.raw(`${escapeString("type")}: ${escapeString(col.type)}`),
          ]);
        }),
      );
    },
    () => {
      w.key("rows");
      w.block(
        "[",
        "]",
        t.rows.map((row) => () => {
          w.block(
            "[",
            "]",
            row.map((value, j) => () => {
              w.raw(cell(value, t.columns[j]!.type));
            }),
          );
        }),
      );
    },
  ]);
}

/** The exact file text for a problem document (with trailing newline). */
export function serializeProblem(doc: ProblemDoc): string {
  const w = new Writer();
  const top: (() => void)[] = [
    () => {
      w.key("inputs");
      w.block(
        "{",
        "}",
        Object.entries(doc.inputs).map(([name, table]) => () => {
          w.key(name);
          writeTable(w, table);
        }),
      );
    },
    () => {
      w.key("output");
      writeTable(w, doc.output);
    },
  ];
  if (doc.constants !== undefined) {
    top.push(() => {
      w.key("constants");
      w.block(
        "[",
        "]",
        doc.constants!.map((c) => () => {
          w.block("{", "}", [
            () => w.raw(`${escapeString("type")}: ${escapeString(c.type)}`),
            () => w.raw(`${escapeString("value")}: ${cell(c.value, c.type)}`),
          ]);
        }),
      );
    });
  }
  if (doc.config !== undefined) {
    top.push(() => {
      w.key("config");
      const entries = CONFIG_KEYS.filter((k) => doc.config![k] !== undefined);
      w.block(
        "{",
        "}",
        entries.map((k) => () => {
          const value = doc.config![k]!;
          w.raw(
            `${escapeString(k)}: ` +
              (typeof value === "number" ? String(value) : escapeString(value)),
          );
        }),
      );
    });
  }
  w.block("{", "}", top);
  return w.text() + "\n";
}

/** Export the live editor state; the state must currently be valid. */
export function exportProblem(state: AppState): string {
  const built = buildProblem(state);
  if (!built.ok) {
    throw new ProblemImportError(
      `cannot export an invalid problem: ${built.errors[0]}`,
    );
  }
  return serializeProblem(built.doc);
}

/** Parse problem-file text into editor state; throws ProblemImportError. */
export function importProblem(text: string): AppState {
  let parsed: unknown;
  try {
    parsed = JSON.parse(text);
  } catch (err) {
    throw new ProblemImportError(`the file is not JSON: ${String(err)}`);
  }
  return fromProblemDoc(parsed);
}
