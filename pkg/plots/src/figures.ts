/** Figure builders for the loclab CSV schemas. Each returns the SVG text
 * plus the numbers it annotated, so tests can assert on them directly. */

import { numericColumn, parseCsv, requireColumns, SchemaError, Table } from "./csv.js";
import { Fit, linreg } from "./linreg.js";
import { Figure, SERIES_COLORS } from "./svg.js";

export { SchemaError };

export const FIGURE_IDS = ["ids", "wegner", "msa", "decay", "moments"] as const;
export type FigureId = (typeof FIGURE_IDS)[number];

export interface RenderResult {
  svg: string;
  annotations: Record<string, number>;
}

function extent(vals: number[]): [number, number] {
  return [Math.min(...vals), Math.max(...vals)];
}

function idsFigure(tables: Table[]): RenderResult {
  const t = tables[0];
  requireColumns(t, ["E", "N_hat"]);
  const E = numericColumn(t, "E");
  const N = numericColumn(t, "N_hat");
  const fig = new Figure(extent(E), [0, 1],
    "Integrated density of states", "E", "N(E)");
  fig.polyline(E, N, SERIES_COLORS[0]);
  fig.markers(E, N, SERIES_COLORS[0], 2);
  return { svg: fig.render(), annotations: {} };
}

function wegnerFigure(tables: Table[]): RenderResult {
  const t = tables[0];
  requireColumns(t, ["eps", "ratio"]);
  const pts = t.rows
    .map((r) => ({ eps: Number(r.eps), ratio: Number(r.ratio) }))
    .filter((p) => p.eps > 0 && p.eps < 1 && p.ratio > 0);
  const xs = pts.map((p) => Math.log(Math.log(1 / p.eps)));
  const ys = pts.map((p) => Math.log(p.ratio));
  const fit: Fit = linreg(xs, ys);
  const fig = new Figure(extent(xs), extent(ys),
    "Eigenvalue-window ratio", "log log(1/eps)", "log ratio");
  fig.markers(xs, ys, SERIES_COLORS[0]);
  if (Number.isFinite(fit.slope)) {
    const [x0, x1] = extent(xs);
    fig.polyline([x0, x1],
      [fit.intercept + fit.slope * x0, fit.intercept + fit.slope * x1],
      SERIES_COLORS[1], 1.2, "6 4");
    fig.annotate(`envelope slope ${fit.slope.toFixed(3)} (beta_hat ${(-fit.slope).toFixed(3)})`);
  }
  return { svg: fig.render(), annotations: { slope: fit.slope } };
}

function msaFigure(tables: Table[]): RenderResult {
  const t = tables[0];
  requireColumns(t, ["r_k", "p_hat", "target", "verdict"]);
  const rows = t.rows.filter((r) => r.verdict !== "skipped");
  if (rows.length === 0) {
    throw new SchemaError("no estimated rungs (all skipped)");
  }
  const xs = rows.map((r) => Math.log10(Number(r.r_k)));
  const ys = rows.map((r) => Math.log10(Math.max(Number(r.p_hat), 1e-12)));
  const tg = rows.map((r) => Math.log10(Math.max(Number(r.target), 1e-300)));
  const fig = new Figure(extent(xs), extent([...ys, ...tg]),
    "Suitability failure probability by scale", "log10 r_k",
    "log10 p_hat");
  fig.markers(xs, ys, SERIES_COLORS[0]);
  fig.polyline(xs, ys, SERIES_COLORS[0]);
  fig.polyline(xs, tg, SERIES_COLORS[1], 1.2, "6 4");
  fig.legend([["estimate", SERIES_COLORS[0]], ["target r^-alpha", SERIES_COLORS[1]]]);
  return { svg: fig.render(), annotations: { rungs: rows.length } };
}

function decayFigure(tables: Table[]): RenderResult {
  const t = tables[0];
  requireColumns(t, ["shell", "max_amp"]);
  const rows = t.rows
    .map((r) => ({ k: Number(r.shell), a: Number(r.max_amp) }))
    .filter((p) => p.a > 0);
  const ks = rows.map((p) => p.k);
  const la = rows.map((p) => Math.log(p.a));
  const expFit = linreg(ks, la);
  const sqrtFit = linreg(ks.map(Math.sqrt), la);
  const fig = new Figure(extent(ks), extent(la),
    "Eigenfunction decay profile", "shell |n|", "log max |psi|");
  fig.markers(ks, la, SERIES_COLORS[0]);
  const [k0, k1] = extent(ks);
  const line = (f: Fit, g: (k: number) => number, color: string) => {
    const grid: number[] = [];
    for (let i = 0; i <= 40; i++) grid.push(k0 + ((k1 - k0) * i) / 40);
    fig.polyline(grid, grid.map((k) => f.intercept + f.slope * g(k)), color,
      1.2, "6 4");
  };
  line(expFit, (k) => k, SERIES_COLORS[1]);
  line(sqrtFit, Math.sqrt, SERIES_COLORS[2]);
  fig.legend([
    ["data", SERIES_COLORS[0]],
    ["exp(-rate |n|) fit", SERIES_COLORS[1]],
    ["exp(-c sqrt|n|) fit", SERIES_COLORS[2]],
  ]);
  fig.annotate(
    `exp-model slope ${expFit.slope.toFixed(3)} (R2 ${expFit.r2.toFixed(4)})`);
  return {
    svg: fig.render(),
    annotations: { slope: expFit.slope, r2: expFit.r2,
                   sqrt_slope: sqrtFit.slope },
  };
}

function momentsFigure(tables: Table[]): RenderResult {
  const fig_tables = tables.length > 0 ? tables : [];
  if (fig_tables.length === 0) {
    throw new SchemaError("moments figure needs at least one CSV");
  }
  const series = fig_tables.map((t) => {
    requireColumns(t, ["t", "X_p"]);
    return {
      t: numericColumn(t, "t"),
      x: numericColumn(t, "X_p").map((v) => Math.log10(Math.max(v, 1e-12))),
    };
  });
  const allT = series.flatMap((s) => s.t);
  const allX = series.flatMap((s) => s.x);
  const fig = new Figure(extent(allT), extent(allX),
    "Transport moment X(p)", "t", "log10 X(p)");
  series.forEach((s, i) => {
    fig.polyline(s.t, s.x, SERIES_COLORS[i % SERIES_COLORS.length]);
  });
  fig.legend(series.map((_, i) => [
    i === 0 ? "series 1 (e.g. free)" : `series ${i + 1} (e.g. disordered)`,
    SERIES_COLORS[i % SERIES_COLORS.length],
  ]));
  return { svg: fig.render(), annotations: { series: series.length } };
}

const BUILDERS: Record<FigureId, (tables: Table[]) => RenderResult> = {
  ids: idsFigure,
  wegner: wegnerFigure,
  msa: msaFigure,
  decay: decayFigure,
  moments: momentsFigure,
};

export function render(figureId: string, csvTexts: string[]): RenderResult {
  if (!(FIGURE_IDS as readonly string[]).includes(figureId)) {
    throw new SchemaError(
      `unknown figure id '${figureId}' (use ${FIGURE_IDS.join(", ")})`);
  }
  if (csvTexts.length === 0) {
    throw new SchemaError("no input CSVs");
  }
  return BUILDERS[figureId as FigureId](csvTexts.map(parseCsv));
}
