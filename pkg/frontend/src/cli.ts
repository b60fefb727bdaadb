#!/usr/bin/env node
import { writeFileSync } from 'fs'
import { join } from 'path'
import yargs from 'yargs'
import { hideBin } from 'yargs/helpers'
import { readCsv } from './csv.js'
import { FIGURE_IDS, FIGURES, FigureId, renderFigure } from './figures.js'

export function run(argv: string[]): number {
  const args = yargs(argv)
    .command('render', 'render one figure from a CSV bundle directory')
    .option('figure', { type: 'string', demandOption: true, choices: FIGURE_IDS })
    .option('in', { type: 'string', demandOption: true, describe: 'bundle directory' })
    .option('out', { type: 'string', demandOption: true, describe: 'output SVG file' })
    .strict()
    .exitProcess(false)
    .fail((msg) => {
      throw new UsageError(msg)
    })
    .parseSync()

  const spec = FIGURES[args.figure as FigureId]
  const csvPath = join(args.in, spec.csvName)
  const svg = renderFigure(spec, readCsv(csvPath))
  writeFileSync(args.out, svg)
  console.log(args.out)
  return 0
}

class UsageError extends Error {}

export function main(argv: string[]): number {
  try {
    return run(argv)
  } catch (err) {
    const msg = err instanceof Error ? err.message : String(err)
    console.error(`error: ${msg}`)
    if (err instanceof UsageError || msg.startsWith('missing column')) return 2
    if ((err as NodeJS.ErrnoException).code !== undefined) return 3
    return 1
  }
}

const invokedDirectly =
  process.argv[1] !== undefined && import.meta.url.endsWith(process.argv[1].split('/').pop()!)
if (invokedDirectly) {
  process.exit(main(hideBin(process.argv)))
}
