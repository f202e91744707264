/** JSON shapes shared with the synthesis service and the CLI problem files. */

export type ColTypeName = "Int" | "Dbl" | "Str" | "Date";

export const COL_TYPES: readonly ColTypeName[] = ["Int", "Dbl", "Str", "Date"];

/** A table cell as it appears in problem JSON; null is the SQL NULL. */
export type CellJson = string | number | null;

export interface ColumnDoc {
  name: string;
  type: ColTypeName;
}

export interface TableDoc {
  columns: ColumnDoc[];
  rows: CellJson[][];
}

export interface ConstantDoc {
  type: ColTypeName;
  value: CellJson;
}

/** Search settings the service understands; unknown keys are rejected. */
export const CONFIG_KEYS = [
  "timeout_ms",
  "max_sketch_size",
  "max_prims_per_clause",
  "max_clauses",
  "max_join_pairs",
  "max_projection_combos",
  "projection_mode",
] as const;

export type ConfigDoc = Partial<{
  timeout_ms: number;
  max_sketch_size: number;
  max_prims_per_clause: number;
  max_clauses: number;
  max_join_pairs: number;
  max_projection_combos: number;
  projection_mode: "fast" | "baseline";
}>;

export interface ProblemDoc {
  inputs: Record<string, TableDoc>;
  output: TableDoc;
  constants?: ConstantDoc[];
  config?: ConfigDoc;
}

export type SynthesisStatus = "solved" | "timeout" | "exhausted" | "invalid";

export interface SynthesizeResponse {
  status: SynthesisStatus;
  elapsed_ms: number;
  stats?: { sketches_tried: number; candidates_checked: number };
  sql?: string;
  dsl?: string;
  error?: string;
}
