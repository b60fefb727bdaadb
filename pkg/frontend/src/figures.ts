import { Table, column, hasData } from './csv.js'
import { Curve, PALETTE, PlotSpec, renderSvg } from './svg.js'

export type FigureId = 'fig1' | 'fig2' | 'fig3' | 'fig4'

export const FIGURE_IDS: FigureId[] = ['fig1', 'fig2', 'fig3', 'fig4']

export interface FigureSpec {
  id: FigureId
  csvName: string
  xLabel: string
  yLabel: string
  xColumn: string
  /** curve columns in legend order, with display labels */
  curves: [string, string][]
  /** column holding the half-width band of the first (simulated) curve */
  stderrColumn?: string
  /** columns plotted against the secondary (right) axis */
  rightAxisColumns?: string[]
  rightYLabel?: string
  yDomain?: [number, number]
  rightYDomain?: [number, number]
}

export const FIGURES: Record<FigureId, FigureSpec> = {
  fig1: {
    id: 'fig1',
    csvName: 'fig1.csv',
    xLabel: 'r',
    yLabel: 'g(r)',
    xColumn: 'r',
    stderrColumn: 'stderr',
    curves: [
      ['g_sim', 'simulation'],
      ['g_prototype', 'prototype fit'],
      ['g_best_exp', 'best exponential fit'],
      ['g_ginibre', 'fitted Ginibre pcf'],
    ],
  },
  fig2: {
    id: 'fig2',
    csvName: 'fig2.csv',
    xLabel: 'rho',
    yLabel: 'mean cell area given neighbor within rho',
    xColumn: 'rho',
    curves: [
      ['area_sim', 'simulation'],
      ['area_small_rho_model', '1/2 + rho/3'],
    ],
  },
  fig3: {
    id: 'fig3',
    csvName: 'fig3.csv',
    xLabel: 'r',
    yLabel: 'g_BS(r)',
    xColumn: 'r',
    stderrColumn: 'stderr',
    curves: [
      ['gbs_sim', 'simulation'],
      ['gbs_analytical', 'analytical approximation'],
      ['gbs_prototype', 'prototype fit'],
      ['gbs_best_exp', 'best exponential fit'],
      ['gbs_singh', 'low-load exponential'],
    ],
  },
  fig4: {
    id: 'fig4',
    csvName: 'fig4.csv',
    xLabel: 'density ratio (dB)',
    yLabel: 'vacant fraction / mean areas',
    xColumn: 'eta_db',
    curves: [
      ['nu_model', 'vacant fraction (model)'],
      ['nu_sim', 'vacant fraction (simulation)'],
      ['mean_area_occ', 'mean occupied-cell area'],
      ['mean_area_vac', 'mean vacant-cell area'],
      ['mean_link', 'mean link distance'],
    ],
    rightAxisColumns: ['mean_link'],
    rightYLabel: 'mean link distance',
    yDomain: [0, 1.6],
  },
}

/** Build the plot for one figure from its CSV table.
 *
 * Throws with the offending column name when the bundle lacks one; a missing
 * or all-NaN stderr column just drops the uncertainty band.
 */
export function buildPlot(spec: FigureSpec, table: Table): PlotSpec {
  const x = column(table, spec.xColumn)
  const curves: Curve[] = spec.curves.map(([col, label], i) => {
    const c: Curve = {
      label,
      x,
      y: column(table, col),
      color: PALETTE[i % PALETTE.length],
      dashed: i > 0,
      rightAxis: spec.rightAxisColumns?.includes(col),
    }
    if (i === 0 && spec.stderrColumn && hasData(table, spec.stderrColumn)) {
      c.band = column(table, spec.stderrColumn)
    }
    return c
  })
  return {
    title: spec.id,
    xLabel: spec.xLabel,
    yLabel: spec.yLabel,
    curves,
    yDomain: spec.yDomain,
    rightYLabel: spec.rightYLabel,
    rightYDomain: spec.rightYDomain,
  }
}

export function renderFigure(spec: FigureSpec, table: Table): string {
  return renderSvg(buildPlot(spec, table))
}
