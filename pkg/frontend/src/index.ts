export { readCsv, column, hasData } from './csv.js'
export type { Table } from './csv.js'
export { FIGURES, FIGURE_IDS, buildPlot, renderFigure } from './figures.js'
export type { FigureId, FigureSpec } from './figures.js'
export { renderSvg, PALETTE } from './svg.js'
export type { Curve, PlotSpec } from './svg.js'
export { main } from './cli.js'
