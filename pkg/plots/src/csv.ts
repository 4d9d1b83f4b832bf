/** Minimal CSV reader for loclab outputs (comma-separated, header row,
 * no quoting, '.' decimal point). */

export interface Table {
  columns: string[];
  rows: Record<string, string>[];
}

export class SchemaError extends Error {}

export function parseCsv(text: string): Table {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) {
    return { columns: [], rows: [] };
  }
  const columns = lines[0].split(",");
  const rows = lines.slice(1).map((line) => {
    const cells = line.split(",");
    const row: Record<string, string> = {};
    columns.forEach((c, i) => {
      row[c] = cells[i] ?? "";
    });
    return row;
  });
  return { columns, rows };
}

/** Numeric column accessor; names the missing column on failure. */
export function numericColumn(table: Table, name: string): number[] {
  if (!table.columns.includes(name)) {
    throw new SchemaError(
      `missing column '${name}' (have: ${table.columns.join(", ")})`,
    );
  }
  return table.rows.map((r) => Number(r[name]));
}

export function requireColumns(table: Table, names: string[]): void {
  for (const n of names) {
    if (!table.columns.includes(n)) {
      throw new SchemaError(
        `missing column '${n}' (have: ${table.columns.join(", ")})`,
      );
    }
  }
}
