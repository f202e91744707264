/** An editable table grid bound to one EditTable.
 *
 * The grid rebuilds its DOM on structural changes (rows or columns added
 * or removed, types changed) and leaves cell edits in place so focus is
 * not stolen mid-typing.  Every committed change lands in the EditTable
 * and then calls back into the app, which re-validates and schedules a
 * synthesis request.
 */

import type { EditTable } from "./state.js";
import {
  addColumn,
  addRow,
  MAX_DIM,
  removeColumn,
  removeRow,
  renameColumn,
  setCell,
  setColumnType,
} from "./state.js";
import { COL_TYPES, type ColTypeName } from "./types.js";

export interface GridHooks {
  /** A cell's text changed (already stored); validate and resynthesize. */
  onCellCommit: () => void;
  /** Shape or schema changed; re-render, validate, resynthesize. */
  onStructure: () => void;
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

function button(label: string, title: string, onClick: () => void): HTMLButtonElement {
  const b = el("button", "grid-btn", label);
  b.type = "button";
  b.title = title;
  b.addEventListener("click", onClick);
  return b;
}

export function renderGrid(
  container: HTMLElement,
  tableId: string,
  table: EditTable,
  hooks: GridHooks,
): void {
  container.replaceChildren();
  container.dataset["table"] = tableId;

  const grid = el("table", "grid");
  const head = el("thead");
  const headRow = el("tr");

  table.columns.forEach((column, j) => {
    const th = el("th");
    const name = el("input", "col-name") as HTMLInputElement;
    name.value = column.name;
    name.title = "column name";
    name.addEventListener("change", () => {
      renameColumn(table, j, name.value);
      hooks.onCellCommit();
    });
    const type = el("select", "col-type") as HTMLSelectElement;
    for (const t of COL_TYPES) {
      const opt = el("option", undefined, t) as HTMLOptionElement;
      opt.value = t;
      type.append(opt);
    }
    type.value = column.type;
    type.title = "column type";
    type.addEventListener("change", () => {
      setColumnType(table, j, type.value as ColTypeName);
      hooks.onStructure();
    });
    th.append(name, type);
    if (table.columns.length > 1) {
      th.append(
        button("×", "remove this column", () => {
          removeColumn(table, j);
          hooks.onStructure();
        }),
      );
    }
    headRow.append(th);
  });

  const addColTh = el("th", "add-cell");
  addColTh.append(
    button("+ col", `add a column (limit ${MAX_DIM})`, () => {
      if (addColumn(table)) hooks.onStructure();
    }),
  );
  headRow.append(addColTh);
  head.append(headRow);
  grid.append(head);

  const body = el("tbody");
  table.cells.forEach((row, i) => {
    const tr = el("tr");
    row.forEach((text, j) => {
      const td = el("td");
      const input = el("input", "cell") as HTMLInputElement;
      input.value = text;
      input.dataset["row"] = String(i);
      input.dataset["col"] = String(j);
      input.addEventListener("change", () => {
        setCell(table, i, j, input.value);
        hooks.onCellCommit();
      });
      td.append(input);
      tr.append(td);
    });
    const rm = el("td", "add-cell");
    rm.append(
      button("×", "remove this row", () => {
        removeRow(table, i);
        hooks.onStructure();
      }),
    );
    tr.append(rm);
    body.append(tr);
  });
  grid.append(body);

  const foot = el("div", "grid-foot");
  foot.append(
    button("+ row", `add a row (limit ${MAX_DIM})`, () => {
      if (addRow(table)) hooks.onStructure();
    }),
  );
  container.append(grid, foot);
}

/** Toggle the invalid marker on every cell input under `container`. */
export function markCellValidity(
  container: HTMLElement,
  problemFor: (row: number, col: number) => string | null,
): void {
  for (const input of container.querySelectorAll<HTMLInputElement>("input.cell")) {
    const row = Number(input.dataset["row"]);
    const col = Number(input.dataset["col"]);
    const problem = problemFor(row, col);
    input.classList.toggle("invalid", problem !== null);
    input.title = problem ?? "";
  }
}
