/** Cell text <-> typed JSON value conversion, mirroring the service rules.
 *
 * The grid edits text; a cell only becomes part of a request once its text
 * parses under the column type.  Empty text is NULL.  The rules match the
 * server's reader exactly: Int takes optional-sign digits only, Dbl takes
 * any finite decimal number (an integer reads as its float), Str takes
 * anything, Date takes a real calendar date written YYYY-MM-DD.
 */

import type { CellJson, ColTypeName } from "./types.js";

export type ParseOutcome =
  | { ok: true; value: CellJson }
  | { ok: false; reason: string };

const INT_RE = /^[+-]?\d+$/;
const DBL_RE = /^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$/;
const DATE_RE = /^(\d{4})-(\d{2})-(\d{2})$/;

export function parseCellText(text: string, ctype: ColTypeName): ParseOutcome {
  const trimmed = text.trim();
  if (trimmed === "") {
    return { ok: true, value: null };
  }
  switch (ctype) {
    case "Int": {
      if (!INT_RE.test(trimmed)) {
        return { ok: false, reason: `not an integer: ${text}` };
      }
      const n = Number(trimmed);
      if (!Number.isSafeInteger(n)) {
        return { ok: false, reason: `integer out of range: ${text}` };
      }
      return { ok: true, value: n };
    }
    case "Dbl": {
      if (!DBL_RE.test(trimmed)) {
        return { ok: false, reason: `not a number: ${text}` };
      }
      const x = Number(trimmed);
      if (!Number.isFinite(x)) {
        return { ok: false, reason: `not a finite number: ${text}` };
      }
      return { ok: true, value: x };
    }
    case "Str":
      return { ok: true, value: text };
    case "Date": {
      const m = DATE_RE.exec(trimmed);
      if (!m) {
        return { ok: false, reason: `dates are written YYYY-MM-DD: ${text}` };
      }
      const [, y, mo, d] = m;
      const date = new Date(`${y}-${mo}-${d}T00:00:00Z`);
      if (
        Number(y) < 1 || // the service's calendar starts at year 1
        Number.isNaN(date.getTime()) ||
        date.getUTCMonth() + 1 !== Number(mo) ||
        date.getUTCDate() !== Number(d)
      ) {
        return { ok: false, reason: `no such date: ${text}` };
      }
      return { ok: true, value: trimmed };
    }
  }
}

/** The editing text for a typed value; null renders as the empty cell. */
export function cellText(value: CellJson): string {
  return value === null ? "" : String(value);
}

/** Check a JSON value (from an imported file) against a column type. */
export function cellJsonValid(value: CellJson, ctype: ColTypeName): boolean {
  if (value === null) return true;
  switch (ctype) {
    case "Int":
      return typeof value === "number" && Number.isSafeInteger(value);
    case "Dbl":
      return typeof value === "number" && Number.isFinite(value);
    case "Str":
      return typeof value === "string";
    case "Date":
      return typeof value === "string" && parseCellText(value, "Date").ok;
  }
}
