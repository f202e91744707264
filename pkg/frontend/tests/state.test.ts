import { describe, expect, it } from "vitest";

import {
  addColumn,
  addInputTable,
  addRow,
  buildProblem,
  cellProblem,
  defaultState,
  emptyTable,
  fromProblemDoc,
  MAX_DIM,
  ProblemImportError,
  removeColumn,
  removeInputTable,
  removeRow,
  renameColumn,
  setCell,
  setColumnType,
} from "../src/state.js";
import type { EditTable } from "../src/state.js";

function twoByTwo(): EditTable {
  return {
    columns: [
      { name: "a", type: "Str" },
      { name: "b", type: "Int" },
    ],
    cells: [
      ["x", "1"],
      ["y", "2"],
    ],
  };
}

describe("table mutations", () => {
  it("adds and removes rows, keeping at least the shape consistent", () => {
    const t = twoByTwo();
    expect(addRow(t)).toBe(true);
    expect(t.cells).toHaveLength(3);
    expect(t.cells[2]).toEqual(["", ""]);
    removeRow(t, 0);
    expect(t.cells).toEqual([
      ["y", "2"],
      ["", ""],
    ]);
  });

  it("stops growing at the soft limit", () => {
    const t = emptyTable();
    while (addRow(t)) {
      /* grow to the cap */
    }
    expect(t.cells).toHaveLength(MAX_DIM);
    while (addColumn(t)) {
      /* grow to the cap */
    }
    expect(t.columns).toHaveLength(MAX_DIM);
    expect(t.cells[0]).toHaveLength(MAX_DIM);
  });

  it("adds and removes columns across every row", () => {
    const t = twoByTwo();
    expect(addColumn(t)).toBe(true);
    expect(t.columns[2]?.name).toBe("c2");
    expect(t.cells[0]).toEqual(["x", "1", ""]);
    removeColumn(t, 0);
    expect(t.columns.map((c) => c.name)).toEqual(["b", "c2"]);
    expect(t.cells[1]).toEqual(["2", ""]);
  });

  it("never removes the last column", () => {
    const t = emptyTable();
    removeColumn(t, 0);
    expect(t.columns).toHaveLength(1);
  });

  it("renames and retypes columns in place", () => {
    const t = twoByTwo();
    renameColumn(t, 1, "count");
    setColumnType(t, 1, "Dbl");
    expect(t.columns[1]).toEqual({ name: "count", type: "Dbl" });
  });

  it("ignores out-of-range edits", () => {
    const t = twoByTwo();
    setCell(t, 9, 0, "zzz");
    setCell(t, 0, 9, "zzz");
    expect(t.cells).toEqual([
      ["x", "1"],
      ["y", "2"],
    ]);
  });
});

describe("input table management", () => {
  it("adds tables with fresh unique names and keeps at least one", () => {
    const s = defaultState();
    expect(addInputTable(s)).toBe(true);
    expect(s.inputs.map((i) => i.name)).toEqual(["t", "t1"]);
    removeInputTable(s, 1);
    removeInputTable(s, 0);
    expect(s.inputs).toHaveLength(1);
  });

  it("caps the number of input tables", () => {
    const s = defaultState();
    let added = 0;
    while (addInputTable(s)) added += 1;
    expect(s.inputs.length).toBe(8);
    expect(added).toBe(7);
  });
});

describe("cellProblem", () => {
  it("pinpoints the broken cell with a reason", () => {
    const t = twoByTwo();
    setCell(t, 1, 1, "not a number");
    expect(cellProblem(t, 0, 1)).toBeNull();
    expect(cellProblem(t, 1, 1)).toContain("not an integer");
  });
});

describe("buildProblem", () => {
  it("builds a complete document from valid state", () => {
    const built = buildProblem(defaultState());
    expect(built.ok).toBe(true);
    if (!built.ok) return;
    expect(Object.keys(built.doc.inputs)).toEqual(["t"]);
    expect(built.doc.output.rows).toEqual([
      ["beta", 1],
      ["gamma", 2],
      ["alpha", 3],
    ]);
    expect(built.doc.config).toEqual({ timeout_ms: 4000 });
    expect(built.doc.constants).toBeUndefined();
  });

  it("collects every reason the problem cannot be sent", () => {
    const s = defaultState();
    setCell(s.inputs[0]!.table, 0, 1, "oops");
    setCell(s.output, 1, 1, "worse");
    renameColumn(s.output, 0, "  ");
    s.constants.push({ type: "Int", text: "x" });
    s.constants.push({ type: "Str", text: "" });
    const built = buildProblem(s);
    expect(built.ok).toBe(false);
    if (built.ok) return;
    expect(built.errors.some((e) => e.includes('input "t"'))).toBe(true);
    expect(built.errors.some((e) => e.includes("output") && e.includes("row 1"))).toBe(true);
    expect(built.errors.some((e) => e.includes("column 0 has no name"))).toBe(true);
    expect(built.errors.some((e) => e.includes("constant 0"))).toBe(true);
    expect(built.errors.some((e) => e.includes("constant 1"))).toBe(true);
  });

  it("requires at least one output row", () => {
    const s = defaultState();
    removeRow(s.output, 0);
    removeRow(s.output, 0);
    removeRow(s.output, 0);
    const built = buildProblem(s);
    expect(built.ok).toBe(false);
    if (!built.ok) {
      expect(built.errors.some((e) => e.includes("at least one row"))).toBe(true);
    }
  });

  it("rejects duplicate input table names", () => {
    const s = defaultState();
    addInputTable(s);
    s.inputs[1]!.name = "t";
    const built = buildProblem(s);
    expect(built.ok).toBe(false);
    if (!built.ok) {
      expect(built.errors.some((e) => e.includes('both named "t"'))).toBe(true);
    }
  });
});

describe("fromProblemDoc", () => {
  const good = {
    inputs: {
      t: {
        columns: [{ name: "a", type: "Int" }],
        rows: [[1], [null]],
      },
    },
    output: {
      columns: [{ name: "a", type: "Int" }],
      rows: [[1]],
    },
  };

  it("loads a minimal document into editable text", () => {
    const s = fromProblemDoc(good);
    expect(s.inputs[0]?.name).toBe("t");
    expect(s.inputs[0]?.table.cells).toEqual([["1"], [""]]);
    expect(s.constants).toEqual([]);
    expect(s.config).toEqual({});
  });

  it.each([
    [{ ...good, extra: 1 }, 'unknown key "extra"'],
    [{ output: good.output }, "inputs"],
    [{ ...good, inputs: {} }, "at least one table"],
    [
      { ...good, inputs: { t: { columns: [], rows: [] } } },
      "columns must be a non-empty array",
    ],
    [
      {
        ...good,
        inputs: { t: { columns: [{ name: "a", type: "Real" }], rows: [] } },
      },
      "type must be one of",
    ],
    [
      {
        ...good,
        inputs: { t: { columns: [{ name: "a", type: "Int" }], rows: [[1, 2]] } },
      },
      "has 2 cells for 1 columns",
    ],
    [
      {
        ...good,
        inputs: { t: { columns: [{ name: "a", type: "Int" }], rows: [["x"]] } },
      },
      "is not a Int",
    ],
    [{ ...good, constants: [{ type: "Int", value: null }] }, "needs a value"],
    [{ ...good, config: { warp_speed: 9 } }, 'unknown key "warp_speed"'],
    [{ ...good, config: { timeout_ms: -1 } }, "non-negative integer"],
    [{ ...good, config: { projection_mode: "psychic" } }, "projection_mode"],
  ])("rejects malformed documents (%#)", (doc, message) => {
    expect(() => fromProblemDoc(doc)).toThrowError(ProblemImportError);
    expect(() => fromProblemDoc(doc)).toThrowError(new RegExp(message.replace(/[.*+?^${}()|[\]\\]/g, "\\$&")));
  });

  it("accepts constants and config when well-formed", () => {
    const s = fromProblemDoc({
      ...good,
      constants: [{ type: "Dbl", value: 2 }],
      config: { timeout_ms: 1500, projection_mode: "baseline" },
    });
    expect(s.constants).toEqual([{ type: "Dbl", text: "2" }]);
    expect(s.config).toEqual({ timeout_ms: 1500, projection_mode: "baseline" });
  });
});
