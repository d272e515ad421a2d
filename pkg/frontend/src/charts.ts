/**
 * Dependency-free SVG line charts with multi-series overlays.
 *
 * Scenario overlays share the year axis; uncertainty-mode runs draw one
 * line per candidate with opacity weighted by its probability so the
 * common prefix reads as a single path.
 */

const SVG_NS = 'http://www.w3.org/2000/svg';
const PALETTE = ['#2563eb', '#dc2626', '#059669', '#d97706', '#7c3aed', '#0891b2'];

export interface Series {
  label: string;
  years: number[];
  values: number[];
  colorIndex?: number;
  weight?: number; // stroke opacity, e.g. scenario probability
  dashed?: boolean;
}

export interface ChartSpec {
  id: string;
  title: string;
  logScale?: boolean;
}

export class LineChart {
  readonly element: SVGSVGElement;
  private width = 420;
  private height = 240;
  private margin = { left: 56, right: 10, top: 24, bottom: 28 };

  constructor(private spec: ChartSpec) {
    this.element = document.createElementNS(SVG_NS, 'svg') as SVGSVGElement;
    this.element.setAttribute('viewBox', `0 0 ${this.width} ${this.height}`);
    this.element.setAttribute('class', 'chart');
    this.element.dataset.chart = spec.id;
  }

  render(seriesList: Series[]): void {
    this.element.innerHTML = '';
    const title = document.createElementNS(SVG_NS, 'text');
    title.setAttribute('x', '8');
    title.setAttribute('y', '16');
    title.setAttribute('class', 'chart-title');
    title.textContent = this.spec.title;
    this.element.appendChild(title);
    if (!seriesList.length || seriesList.every((s) => !s.values.length)) return;

    const xs = seriesList.flatMap((s) => s.years);
    let ys = seriesList.flatMap((s) => s.values);
    const log = Boolean(this.spec.logScale);
    if (log) ys = ys.filter((y) => y > 0);
    if (!ys.length) return;
    const xMin = Math.min(...xs);
    const xMax = Math.max(...xs);
    let yMin = Math.min(...ys);
    let yMax = Math.max(...ys);
    if (log) {
      yMin = Math.log10(yMin);
      yMax = Math.log10(yMax);
    }
    if (yMax === yMin) {
      yMax += 1;
      yMin -= 1;
    }
    const { left, right, top, bottom } = this.margin;
    const plotW = this.width - left - right;
    const plotH = this.height - top - bottom;
    const toX = (x: number) => left + ((x - xMin) / Math.max(xMax - xMin, 1e-12)) * plotW;
    const toY = (raw: number) => {
      const y = log ? Math.log10(Math.max(raw, 1e-300)) : raw;
      return top + (1 - (y - yMin) / (yMax - yMin)) * plotH;
    };

    this.drawAxes(xMin, xMax, yMin, yMax, log);
    seriesList.forEach((series, i) => {
      const color = PALETTE[(series.colorIndex ?? i) % PALETTE.length];
      const points = series.years
        .map((x, k) => [toX(x), toY(series.values[k])] as const)
        .filter(([, y]) => Number.isFinite(y));
      if (!points.length) return;
      const path = document.createElementNS(SVG_NS, 'path');
      path.setAttribute('d', 'M' + points.map(([x, y]) => `${x.toFixed(1)},${y.toFixed(1)}`).join('L'));
      path.setAttribute('fill', 'none');
      path.setAttribute('stroke', color);
      path.setAttribute('stroke-width', '1.6');
      path.setAttribute('stroke-opacity', String(series.weight ?? 1));
      if (series.dashed) path.setAttribute('stroke-dasharray', '5,3');
      path.dataset.series = series.label;
      this.element.appendChild(path);
    });
  }

  private drawAxes(xMin: number, xMax: number, yMin: number, yMax: number, log: boolean): void {
    const { left, right, top, bottom } = this.margin;
    const axis = document.createElementNS(SVG_NS, 'path');
    const x0 = left;
    const y0 = this.height - bottom;
    axis.setAttribute(
      'd',
      `M${x0},${top}L${x0},${y0}L${this.width - right},${y0}`,
    );
    axis.setAttribute('stroke', '#9ca3af');
    axis.setAttribute('fill', 'none');
    this.element.appendChild(axis);
    for (const frac of [0, 0.5, 1]) {
      const xTick = document.createElementNS(SVG_NS, 'text');
      xTick.setAttribute('x', String(x0 + frac * (this.width - left - right)));
      xTick.setAttribute('y', String(this.height - 8));
      xTick.setAttribute('class', 'tick');
      xTick.textContent = (xMin + frac * (xMax - xMin)).toFixed(0);
      this.element.appendChild(xTick);
      const value = yMin + frac * (yMax - yMin);
      const yTick = document.createElementNS(SVG_NS, 'text');
      yTick.setAttribute('x', '2');
      yTick.setAttribute('y', String(y0 - frac * (this.height - top - bottom) + 4));
      yTick.setAttribute('class', 'tick');
      yTick.textContent = log ? `1e${value.toFixed(1)}` : compact(value);
      this.element.appendChild(yTick);
    }
  }
}

export function compact(x: number): string {
  const abs = Math.abs(x);
  if (abs >= 1e12 || (abs > 0 && abs < 1e-2)) return x.toExponential(1);
  if (abs >= 1e3) return x.toLocaleString('en-US', { maximumFractionDigits: 0 });
  return x.toPrecision(3);
}

/** The six standard chart panels of the results view. */
export const CHART_PANELS: ChartSpec[] = [
  { id: 'output', title: 'Gross world product ($/year)', logScale: true },
  { id: 'growth', title: 'Annual output growth' },
  { id: 'automation', title: 'Fraction of tasks automated' },
  { id: 'compute', title: 'Effective compute & training run (eFLOP)', logScale: true },
  { id: 'shares', title: 'Investment shares of output' },
  { id: 'efficiency', title: 'Hardware & software efficiency', logScale: true },
];
