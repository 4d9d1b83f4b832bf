/** Ordinary least squares y = a x + b with the coefficient of
 * determination (used for fitted reference lines and annotations). */

export interface Fit {
  slope: number;
  intercept: number;
  r2: number;
}

export function linreg(xs: number[], ys: number[]): Fit {
  const n = Math.min(xs.length, ys.length);
  if (n < 2) {
    return { slope: NaN, intercept: NaN, r2: NaN };
  }
  let sx = 0;
  let sy = 0;
  for (let i = 0; i < n; i++) {
    sx += xs[i];
    sy += ys[i];
  }
  const mx = sx / n;
  const my = sy / n;
  let sxx = 0;
  let sxy = 0;
  let syy = 0;
  for (let i = 0; i < n; i++) {
    sxx += (xs[i] - mx) ** 2;
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) ** 2;
  }
  const slope = sxy / sxx;
  const intercept = my - slope * mx;
  const r2 = syy === 0 ? 1 : (sxy * sxy) / (sxx * syy);
  return { slope, intercept, r2 };
}
