/** Minimal parser for the service's delimited results files. */

export interface CsvTable {
  header: string[];
  rows: string[][];
}

export function parseCsv(text: string): CsvTable {
  const lines = text
    .split(/\r?\n/)
    .filter((line) => line.length > 0);
  if (lines.length === 0) {
    return { header: [], rows: [] };
  }
  const [first, ...rest] = lines;
  return {
    header: (first as string).split(","),
    rows: rest.map((line) => line.split(",")),
  };
}

/** Column accessor; throws on unknown names so typos fail loudly. */
export function column(table: CsvTable, name: string): string[] {
  const index = table.header.indexOf(name);
  if (index < 0) {
    throw new Error(`no column ${name} in [${table.header.join(", ")}]`);
  }
  return table.rows.map((row) => row[index] ?? "");
}

export function numericColumn(table: CsvTable, name: string): number[] {
  return column(table, name).map((value) => {
    const parsed = Number(value);
    if (Number.isNaN(parsed)) {
      throw new Error(`column ${name}: ${value} is not a number`);
    }
    return parsed;
  });
}
