/**
 * Readers for the ghz-sensing CLI table formats: CSV with a leading `#`
 * provenance comment, and the JSON sidecar documents.
 */

import { readFileSync } from "fs";

export interface Table {
  columns: string[];
  rows: number[][];
}

export class SchemaError extends Error {}

function parseCell(cell: string): number {
  if (cell === "true") return 1;
  if (cell === "false") return 0;
  const value = Number(cell);
  if (Number.isNaN(value)) {
    throw new SchemaError(`non-numeric cell ${JSON.stringify(cell)}`);
  }
  return value;
}

export function parseTable(text: string): Table {
  const lines = text
    .split("\n")
    .map((line) => line.trim())
    .filter((line) => line.length > 0 && !line.startsWith("#"));
  if (lines.length === 0) {
    throw new SchemaError("no header row found");
  }
  const columns = lines[0].split(",");
  const rows = lines.slice(1).map((line) => line.split(",").map(parseCell));
  for (const row of rows) {
    if (row.length !== columns.length) {
      throw new SchemaError(`row width ${row.length} does not match header width ${columns.length}`);
    }
  }
  return { columns, rows };
}

export function readTable(path: string): Table {
  return parseTable(readFileSync(path, "utf-8"));
}

/** Validate that every needed column exists, naming the offender. */
export function requireColumns(table: Table, needed: string[], source: string): void {
  for (const name of needed) {
    if (!table.columns.includes(name)) {
      throw new SchemaError(`${source}: missing column "${name}" (have: ${table.columns.join(", ")})`);
    }
  }
}

export function column(table: Table, name: string): number[] {
  const index = table.columns.indexOf(name);
  if (index < 0) {
    throw new SchemaError(`missing column "${name}"`);
  }
  return table.rows.map((row) => row[index]);
}

export function readJsonDocument(path: string): Record<string, unknown> {
  return JSON.parse(readFileSync(path, "utf-8")) as Record<string, unknown>;
}
