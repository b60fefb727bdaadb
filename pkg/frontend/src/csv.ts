import { readFileSync } from 'fs'
import Papa from 'papaparse'

export interface Table {
  columns: string[]
  rows: Record<string, number>[]
}

/** Parse a cellpp CSV bundle: '#'-prefixed config lines, header row, numbers. */
export function readCsv(path: string): Table {
  const text = readFileSync(path, 'utf8')
  const parsed = Papa.parse<Record<string, string>>(text, {
    header: true,
    comments: '#',
    skipEmptyLines: true,
  })
  if (parsed.errors.length > 0) {
    throw new Error(`failed to parse ${path}: ${parsed.errors[0].message}`)
  }
  const columns = parsed.meta.fields ?? []
  const rows = parsed.data.map((raw) => {
    const row: Record<string, number> = {}
    for (const col of columns) row[col] = Number(raw[col])
    return row
  })
  return { columns, rows }
}

export function column(table: Table, name: string): number[] {
  if (!table.columns.includes(name)) {
    throw new Error(`missing column: ${name}`)
  }
  return table.rows.map((r) => r[name])
}

/** True when the column exists and holds at least one finite value. */
export function hasData(table: Table, name: string): boolean {
  return table.columns.includes(name) && table.rows.some((r) => Number.isFinite(r[name]))
}
