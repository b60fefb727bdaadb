/** Minimal deterministic SVG line-plot builder (no DOM, no randomness). */

export interface Curve {
  label: string
  x: number[]
  y: number[]
  color: string
  dashed?: boolean
  /** half-width of an uncertainty band around y, if any */
  band?: number[]
  /** scale against the right-hand axis instead of the left one */
  rightAxis?: boolean
}

export interface PlotSpec {
  title: string
  xLabel: string
  yLabel: string
  curves: Curve[]
  yDomain?: [number, number]
  rightYLabel?: string
  rightYDomain?: [number, number]
}

export const PALETTE = ['#1f77b4', '#d62728', '#2ca02c', '#9467bd', '#ff7f0e', '#8c564b']

const W = 760
const H = 480
const M = { top: 40, right: 72, bottom: 52, left: 64 }

interface Scale {
  (v: number): number
  domain: [number, number]
}

function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain
  const [r0, r1] = range
  const f = ((v: number) => r0 + ((v - d0) / (d1 - d0 || 1)) * (r1 - r0)) as Scale
  f.domain = domain
  return f
}

function extent(values: number[]): [number, number] {
  let lo = Infinity
  let hi = -Infinity
  for (const v of values) {
    if (!Number.isFinite(v)) continue
    if (v < lo) lo = v
    if (v > hi) hi = v
  }
  if (lo === Infinity) return [0, 1]
  if (lo === hi) return [lo - 1, hi + 1]
  return [lo, hi]
}

function ticks([lo, hi]: [number, number], n = 6): number[] {
  const span = hi - lo
  const step = Math.pow(10, Math.floor(Math.log10(span / n)))
  const err = span / n / step
  const mult = err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1
  const s = mult * step
  const out: number[] = []
  for (let v = Math.ceil(lo / s) * s; v <= hi + 1e-12; v += s) out.push(Number(v.toPrecision(12)))
  return out
}

function fmt(v: number): string {
  return Number(v.toPrecision(6)).toString()
}

function path(xs: number[], ys: number[], sx: Scale, sy: Scale): string {
  const pts: string[] = []
  let pen = 'M'
  for (let i = 0; i < xs.length; i++) {
    if (!Number.isFinite(xs[i]) || !Number.isFinite(ys[i])) {
      pen = 'M'
      continue
    }
    pts.push(`${pen}${sx(xs[i]).toFixed(2)},${sy(ys[i]).toFixed(2)}`)
    pen = 'L'
  }
  return pts.join(' ')
}

function bandPath(c: Curve, sx: Scale, sy: Scale): string {
  const up: string[] = []
  const dn: string[] = []
  for (let i = 0; i < c.x.length; i++) {
    const h = c.band![i]
    if (!Number.isFinite(c.y[i]) || !Number.isFinite(h)) continue
    up.push(`${sx(c.x[i]).toFixed(2)},${sy(c.y[i] + h).toFixed(2)}`)
    dn.unshift(`${sx(c.x[i]).toFixed(2)},${sy(c.y[i] - h).toFixed(2)}`)
  }
  if (up.length === 0) return ''
  return `M${up.join(' L')} L${dn.join(' L')} Z`
}

export function renderSvg(spec: PlotSpec): string {
  const left = spec.curves.filter((c) => !c.rightAxis)
  const right = spec.curves.filter((c) => c.rightAxis)
  const xDomain = extent(spec.curves.flatMap((c) => c.x))
  const yDomain = spec.yDomain ?? extent(left.flatMap((c) => c.y))
  const sx = linearScale(xDomain, [M.left, W - M.right])
  const sy = linearScale(yDomain, [H - M.bottom, M.top])
  const syR = right.length
    ? linearScale(spec.rightYDomain ?? extent(right.flatMap((c) => c.y)), [H - M.bottom, M.top])
    : undefined

  const parts: string[] = []
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${W}" height="${H}" viewBox="0 0 ${W} ${H}" font-family="sans-serif" font-size="12">`,
  )
  parts.push(`<rect width="${W}" height="${H}" fill="white"/>`)
  parts.push(`<text x="${W / 2}" y="22" text-anchor="middle" font-size="15">${spec.title}</text>`)

  // axes
  const axisY = H - M.bottom
  parts.push(`<g class="x-axis" stroke="black">`)
  parts.push(`<line x1="${M.left}" y1="${axisY}" x2="${W - M.right}" y2="${axisY}"/>`)
  for (const t of ticks(xDomain)) {
    const x = sx(t).toFixed(2)
    parts.push(`<line x1="${x}" y1="${axisY}" x2="${x}" y2="${axisY + 5}"/>`)
    parts.push(
      `<text x="${x}" y="${axisY + 18}" stroke="none" text-anchor="middle">${fmt(t)}</text>`,
    )
  }
  parts.push(`</g>`)
  parts.push(`<g class="y-axis" stroke="black">`)
  parts.push(`<line x1="${M.left}" y1="${M.top}" x2="${M.left}" y2="${axisY}"/>`)
  for (const t of ticks(sy.domain)) {
    const y = sy(t).toFixed(2)
    parts.push(`<line x1="${M.left - 5}" y1="${y}" x2="${M.left}" y2="${y}"/>`)
    parts.push(
      `<text x="${M.left - 8}" y="${y}" dy="4" stroke="none" text-anchor="end">${fmt(t)}</text>`,
    )
  }
  parts.push(`</g>`)
  if (syR) {
    const xr = W - M.right
    parts.push(`<g class="y-axis-right" stroke="black">`)
    parts.push(`<line x1="${xr}" y1="${M.top}" x2="${xr}" y2="${axisY}"/>`)
    for (const t of ticks(syR.domain)) {
      const y = syR(t).toFixed(2)
      parts.push(`<line x1="${xr}" y1="${y}" x2="${xr + 5}" y2="${y}"/>`)
      parts.push(
        `<text x="${xr + 8}" y="${y}" dy="4" stroke="none" text-anchor="start">${fmt(t)}</text>`,
      )
    }
    parts.push(`</g>`)
  }

  // axis labels
  parts.push(
    `<text x="${(M.left + W - M.right) / 2}" y="${H - 14}" text-anchor="middle">${spec.xLabel}</text>`,
  )
  parts.push(
    `<text transform="translate(16,${(M.top + axisY) / 2}) rotate(-90)" text-anchor="middle">${spec.yLabel}</text>`,
  )
  if (spec.rightYLabel) {
    parts.push(
      `<text transform="translate(${W - 14},${(M.top + axisY) / 2}) rotate(90)" text-anchor="middle">${spec.rightYLabel}</text>`,
    )
  }

  // bands behind curves
  for (const c of spec.curves) {
    if (!c.band) continue
    const d = bandPath(c, sx, c.rightAxis && syR ? syR : sy)
    if (d) parts.push(`<path class="band" d="${d}" fill="${c.color}" fill-opacity="0.18" stroke="none"/>`)
  }
  // curves, in column order
  for (const c of spec.curves) {
    const d = path(c.x, c.y, sx, c.rightAxis && syR ? syR : sy)
    const dash = c.dashed ? ' stroke-dasharray="6 4"' : ''
    parts.push(
      `<path class="curve" d="${d}" fill="none" stroke="${c.color}" stroke-width="1.8"${dash}/>`,
    )
  }

  // legend: fixed order = curve order
  const lx = M.left + 12
  let ly = M.top + 8
  parts.push(`<g class="legend">`)
  for (const c of spec.curves) {
    const dash = c.dashed ? ' stroke-dasharray="6 4"' : ''
    parts.push(
      `<line x1="${lx}" y1="${ly}" x2="${lx + 26}" y2="${ly}" stroke="${c.color}" stroke-width="1.8"${dash}/>`,
    )
    parts.push(`<text x="${lx + 32}" y="${ly + 4}">${c.label}</text>`)
    ly += 18
  }
  parts.push(`</g>`)
  parts.push(`</svg>`)
  return parts.join('\n')
}
