"""Hot numeric kernels: numba-jitted with a pure-numpy fallback.

Set LOCLAB_NUMBA=0 to force the numpy path (used by the benchmark and as a
safety hatch); by default numba is used when importable.
"""

from __future__ import annotations

import os

import numpy as np

_flag = os.environ.get("LOCLAB_NUMBA", "1").strip().lower()
_WANT_NUMBA = _flag not in ("0", "false", "no", "off")

try:
    if _WANT_NUMBA:
        from numba import njit

        HAS_NUMBA = True
    else:
        HAS_NUMBA = False
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False


def _worst_pair_numpy(absG, coords, r, gamma):
    n = absG.shape[0]
    best = -1.0
    bi = bj = -1
    chunk = max(1, int(4e6) // max(n, 1))
    for start in range(0, n, chunk):
        stop = min(n, start + chunk)
        diff = coords[start:stop, None, :] - coords[None, :, :]
        dist = np.abs(diff).max(axis=2)
        mask = 10 * dist >= r
        for i in range(start, stop):
            mask[i - start, i] = False
        with np.errstate(over="ignore"):  # inf ratios just mean "fails"
            vals = np.where(mask, absG[start:stop] * np.exp(gamma * dist),
                            -1.0)
        k = int(vals.argmax())
        i, j = divmod(k, n)  # vals is (stop - start, n)
        if vals[i, j] > best:
            best = float(vals[i, j])
            bi, bj = start + i, j
    return best, bi, bj


if HAS_NUMBA:

    @njit(cache=True)
    def _worst_pair_jit(absG, coords, r, gamma):  # pragma: no cover - jitted
        n = absG.shape[0]
        d = coords.shape[1]
        best = -1.0
        bi = -1
        bj = -1
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                dist = 0
                for k in range(d):
                    a = coords[i, k] - coords[j, k]
                    if a < 0:
                        a = -a
                    if a > dist:
                        dist = a
                if 10 * dist < r:
                    continue
                v = absG[i, j] * np.exp(gamma * dist)
                if v > best:
                    best = v
                    bi = i
                    bj = j
        return best, bi, bj

    def worst_pair_scan(absG, coords, r, gamma):
        return _worst_pair_jit(
            np.ascontiguousarray(absG, dtype=np.float64),
            np.ascontiguousarray(coords, dtype=np.int64),
            np.int64(r),
            float(gamma),
        )

else:

    def worst_pair_scan(absG, coords, r, gamma):
        return _worst_pair_numpy(
            np.asarray(absG, dtype=np.float64),
            np.asarray(coords, dtype=np.int64),
            int(r),
            float(gamma),
        )


worst_pair_scan.__doc__ = """Scan Green's-function magnitudes against the decay bound.

Over site pairs (i, j), i != j, with 10*|x_i - x_j|_inf >= r, returns
(max absG[i,j] * exp(gamma * |x_i - x_j|_inf), argmax i, argmax j);
(-1.0, -1, -1) when no pair qualifies.
"""
