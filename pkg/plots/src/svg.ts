/** Deterministic SVG scene builder: fixed canvas, linear axes with round
 * ticks, polylines, markers and annotations. String output only, so
 * re-rendering the same data yields byte-identical files. */

export const WIDTH = 720;
export const HEIGHT = 480;
const MARGIN = { left: 70, right: 20, top: 40, bottom: 55 };

export const SERIES_COLORS = ["#1f6fb2", "#c8401f", "#2e8540", "#7d3fb2"];

export interface Scale {
  lo: number;
  hi: number;
  toPx(v: number): number;
}

function niceTicks(lo: number, hi: number, n = 6): number[] {
  if (!(hi > lo)) {
    hi = lo + 1;
  }
  const span = hi - lo;
  const step0 = span / n;
  const mag = 10 ** Math.floor(Math.log10(step0));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => span / s <= n)!;
  const first = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let v = first; v <= hi + 1e-12 * span; v += step) {
    ticks.push(Math.abs(v) < 1e-12 * span ? 0 : v);
  }
  return ticks;
}

function fmtTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(1);
  return Number(v.toPrecision(4)).toString();
}

export function makeScale(lo: number, hi: number, pxLo: number,
                          pxHi: number): Scale {
  if (!(hi > lo)) {
    hi = lo + 1;
    lo = lo - 1;
  }
  const pad = 0.04 * (hi - lo);
  const a = lo - pad;
  const b = hi + pad;
  return {
    lo: a,
    hi: b,
    toPx: (v: number) => pxLo + ((v - a) / (b - a)) * (pxHi - pxLo),
  };
}

export class Figure {
  private parts: string[] = [];
  readonly x: Scale;
  readonly y: Scale;

  constructor(
    xlim: [number, number],
    ylim: [number, number],
    readonly title: string,
    readonly xlabel: string,
    readonly ylabel: string,
  ) {
    this.x = makeScale(xlim[0], xlim[1], MARGIN.left, WIDTH - MARGIN.right);
    this.y = makeScale(ylim[0], ylim[1], HEIGHT - MARGIN.bottom, MARGIN.top);
  }

  polyline(xs: number[], ys: number[], color: string, width = 1.6,
           dash = ""): void {
    const pts = xs
      .map((v, i) => `${this.x.toPx(v).toFixed(2)},${this.y.toPx(ys[i]).toFixed(2)}`)
      .join(" ");
    const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(
      `<polyline fill="none" stroke="${color}" stroke-width="${width}"${dashAttr} points="${pts}"/>`,
    );
  }

  markers(xs: number[], ys: number[], color: string, rad = 3): void {
    for (let i = 0; i < xs.length; i++) {
      this.parts.push(
        `<circle cx="${this.x.toPx(xs[i]).toFixed(2)}" cy="${this.y
          .toPx(ys[i])
          .toFixed(2)}" r="${rad}" fill="${color}"/>`,
      );
    }
  }

  annotate(text: string, fx = 0.55, fy = 0.12): void {
    const px = MARGIN.left + fx * (WIDTH - MARGIN.left - MARGIN.right);
    const py = MARGIN.top + fy * (HEIGHT - MARGIN.top - MARGIN.bottom);
    this.parts.push(
      `<text x="${px.toFixed(1)}" y="${py.toFixed(1)}" font-size="14" fill="#222">${text}</text>`,
    );
  }

  legend(entries: [string, string][]): void {
    entries.forEach(([label, color], i) => {
      const py = MARGIN.top + 18 * i + 4;
      const px = WIDTH - MARGIN.right - 190;
      this.parts.push(
        `<rect x="${px}" y="${py - 9}" width="14" height="4" fill="${color}"/>`,
        `<text x="${px + 20}" y="${py}" font-size="12" fill="#222">${label}</text>`,
      );
    });
  }

  render(): string {
    const axes: string[] = [];
    const x0 = MARGIN.left;
    const x1 = WIDTH - MARGIN.right;
    const y0 = HEIGHT - MARGIN.bottom;
    const y1 = MARGIN.top;
    axes.push(
      `<rect x="${x0}" y="${y1}" width="${x1 - x0}" height="${y0 - y1}" fill="none" stroke="#444"/>`,
    );
    for (const t of niceTicks(this.x.lo, this.x.hi)) {
      const px = this.x.toPx(t);
      axes.push(
        `<line x1="${px.toFixed(1)}" y1="${y0}" x2="${px.toFixed(1)}" y2="${y0 + 5}" stroke="#444"/>`,
        `<text x="${px.toFixed(1)}" y="${y0 + 20}" font-size="11" text-anchor="middle" fill="#222">${fmtTick(t)}</text>`,
      );
    }
    for (const t of niceTicks(this.y.lo, this.y.hi)) {
      const py = this.y.toPx(t);
      axes.push(
        `<line x1="${x0 - 5}" y1="${py.toFixed(1)}" x2="${x0}" y2="${py.toFixed(1)}" stroke="#444"/>`,
        `<text x="${x0 - 9}" y="${(py + 4).toFixed(1)}" font-size="11" text-anchor="end" fill="#222">${fmtTick(t)}</text>`,
      );
    }
    const labels = [
      `<text x="${(x0 + x1) / 2}" y="24" font-size="15" text-anchor="middle" fill="#111">${this.title}</text>`,
      `<text x="${(x0 + x1) / 2}" y="${HEIGHT - 12}" font-size="13" text-anchor="middle" fill="#111">${this.xlabel}</text>`,
      `<text x="18" y="${(y0 + y1) / 2}" font-size="13" text-anchor="middle" fill="#111" transform="rotate(-90 18 ${(y0 + y1) / 2})">${this.ylabel}</text>`,
    ];
    return [
      `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
      `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
      ...axes,
      ...labels,
      ...this.parts,
      `</svg>`,
    ].join("\n");
  }
}
