import { mkdtempSync, readFileSync, writeFileSync } from 'fs'
import { tmpdir } from 'os'
import { join } from 'path'
import { describe, expect, it } from 'vitest'
import { readCsv } from '../src/csv.js'
import { FIGURES, FigureId, renderFigure } from '../src/figures.js'
import { main } from '../src/cli.js'

const FIXTURES = join(__dirname, 'fixtures')

function renderFromFixture(id: FigureId): string {
  const spec = FIGURES[id]
  return renderFigure(spec, readCsv(join(FIXTURES, spec.csvName)))
}

function countMatches(s: string, re: RegExp): number {
  return (s.match(re) ?? []).length
}

describe('figure curve inventories', () => {
  it('fig1 shows four labeled curves with an uncertainty band', () => {
    const svg = renderFromFixture('fig1')
    expect(countMatches(svg, /class="curve"/g)).toBe(4)
    expect(countMatches(svg, /class="band"/g)).toBe(1)
    for (const label of ['simulation', 'prototype fit', 'best exponential fit', 'fitted Ginibre pcf']) {
      expect(svg).toContain(`>${label}</text>`)
    }
  })

  it('fig2 shows the simulated curve and the linear law', () => {
    const svg = renderFromFixture('fig2')
    expect(countMatches(svg, /class="curve"/g)).toBe(2)
    expect(svg).toContain('>1/2 + rho/3</text>')
  })

  it('fig3 shows five labeled curves', () => {
    const svg = renderFromFixture('fig3')
    expect(countMatches(svg, /class="curve"/g)).toBe(5)
    for (const label of [
      'simulation',
      'analytical approximation',
      'prototype fit',
      'best exponential fit',
      'low-load exponential',
    ]) {
      expect(svg).toContain(`>${label}</text>`)
    }
  })

  it('fig4 uses a secondary axis for the link distance', () => {
    const svg = renderFromFixture('fig4')
    expect(countMatches(svg, /class="curve"/g)).toBe(5)
    expect(svg).toContain('class="y-axis-right"')
    expect(svg).toContain('mean link distance')
    // left axis pinned to [0, 1.6]
    expect(svg).toContain('>1.6</text>')
  })
})

describe('rendering behavior', () => {
  it('is a pure function of the bundle: re-render is byte-identical', () => {
    expect(renderFromFixture('fig1')).toBe(renderFromFixture('fig1'))
  })

  it('legend order follows column order', () => {
    const svg = renderFromFixture('fig3')
    const idx = (label: string) => svg.indexOf(`>${label}</text>`)
    expect(idx('simulation')).toBeLessThan(idx('analytical approximation'))
    expect(idx('analytical approximation')).toBeLessThan(idx('prototype fit'))
    expect(idx('best exponential fit')).toBeLessThan(idx('low-load exponential'))
  })

  it('renders without a band when the stderr column is empty', () => {
    const dir = mkdtempSync(join(tmpdir(), 'figs-'))
    const src = readFileSync(join(FIXTURES, 'fig1.csv'), 'utf8')
    const noErr = src
      .split('\n')
      .map((line, i) => {
        if (line.startsWith('#') || line === '') return line
        const cells = line.split(',')
        if (!line.startsWith('r,')) cells[2] = i === 0 ? cells[2] : 'nan'
        return cells.join(',')
      })
      .join('\n')
    writeFileSync(join(dir, 'fig1.csv'), noErr)
    const svg = renderFigure(FIGURES.fig1, readCsv(join(dir, 'fig1.csv')))
    expect(countMatches(svg, /class="band"/g)).toBe(0)
    expect(countMatches(svg, /class="curve"/g)).toBe(4)
  })

  it('fails naming the missing column', () => {
    const dir = mkdtempSync(join(tmpdir(), 'figs-'))
    writeFileSync(join(dir, 'fig2.csv'), 'rho,area_sim\n0.1,0.5\n0.2,0.55\n')
    expect(() => renderFigure(FIGURES.fig2, readCsv(join(dir, 'fig2.csv')))).toThrow(
      /missing column: area_small_rho_model/,
    )
  })
})

describe('cli', () => {
  it('renders every figure bundle end to end', () => {
    const dir = mkdtempSync(join(tmpdir(), 'figs-'))
    for (const id of ['fig1', 'fig2', 'fig3', 'fig4'] as FigureId[]) {
      const out = join(dir, `${id}.svg`)
      const rc = main(['render', '--figure', id, '--in', FIXTURES, '--out', out])
      expect(rc).toBe(0)
      const svg = readFileSync(out, 'utf8')
      expect(svg.startsWith('<svg')).toBe(true)
      expect(svg).toContain('</svg>')
    }
  })

  it('exits 2 on unknown figure', () => {
    expect(main(['render', '--figure', 'fig9', '--in', FIXTURES, '--out', '/tmp/x.svg'])).toBe(2)
  })

  it('exits 2 on missing column, naming it', () => {
    const dir = mkdtempSync(join(tmpdir(), 'figs-'))
    writeFileSync(join(dir, 'fig2.csv'), 'rho,area_sim\n0.1,0.5\n')
    expect(main(['render', '--figure', 'fig2', '--in', dir, '--out', join(dir, 'o.svg')])).toBe(2)
  })

  it('exits 3 when the bundle directory does not exist', () => {
    expect(main(['render', '--figure', 'fig1', '--in', '/no/such/dir', '--out', '/tmp/y.svg'])).toBe(3)
  })
})
