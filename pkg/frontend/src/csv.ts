import { readFileSync } from "fs";
import Papa from "papaparse";

export interface Table {
  path: string;
  columns: string[];
  rows: Record<string, string>[];
}

export function loadCsv(path: string): Table {
  const text = readFileSync(path, "utf8");
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new Error(`${path}: parse error at row ${first.row}: ${first.message}`);
  }
  const columns = parsed.meta.fields ?? [];
  return { path, columns, rows: parsed.data };
}

export function numericColumn(table: Table, name: string): number[] {
  if (!table.columns.includes(name)) {
    throw new Error(`missing column "${name}" in ${table.path}`);
  }
  return table.rows.map((row) => {
    const raw = row[name];
    const value = raw === "" || raw === undefined ? NaN : Number(raw);
    return value;
  });
}

export function stringColumn(table: Table, name: string): string[] {
  if (!table.columns.includes(name)) {
    throw new Error(`missing column "${name}" in ${table.path}`);
  }
  return table.rows.map((row) => row[name] ?? "");
}
