"""Random potentials: alloy convolutions, locally-determined families, and
their analytic extension to complex couplings on the disk of radius 6."""

from __future__ import annotations

import math

import numpy as np
from scipy import ndimage

from .errors import ConfigError, ContainmentError, DomainError
from .lattice import Box, Region, norm_1, norm_inf

DISK_RADIUS = 6.0  # analyticity domain |z| < 6 per coordinate


def default_truncation(lam: float, c: float) -> int:
    """Radius making the alloy tail < 1e-12 up to lambda ~ 1e4."""
    return math.ceil((max(0.0, math.log(lam)) + 30.0) / c)


def shell_count(k: int, d: int) -> int:
    return (2 * k + 1) ** d - (2 * k - 1) ** d if k >= 1 else 1


class SingleSite:
    """Single-site profile phi with phi(0) != 0 and |phi(n)| <= exp(-c|n|_inf)."""

    def __init__(self, kind: str, c: float, table: dict | None = None):
        if c <= 0:
            raise ConfigError("decay rate c must be positive")
        self.kind = kind
        self.c = float(c)
        self.table = dict(table) if table else None
        if self.table is not None:
            zero = tuple([0] * len(next(iter(self.table))))
            if self.table.get(zero, 0.0) == 0.0:
                raise ConfigError("finite profile must have phi(0) != 0")
            for m, v in self.table.items():
                if abs(v) > math.exp(-self.c * norm_inf(m)) + 1e-15:
                    raise ConfigError(
                        f"profile value phi({m})={v} violates the declared "
                        f"decay exp(-{self.c}|n|)"
                    )

    def phi(self, m) -> float:
        if self.kind == "delta":
            return 1.0 if all(v == 0 for v in m) else 0.0
        if self.kind == "alt-exp":
            return (-1.0) ** norm_1(m) * math.exp(-self.c * norm_inf(m))
        return self.table.get(tuple(m), 0.0)

    def support_radius(self, R_t: int) -> int:
        """Radius actually carrying weight, capped at R_t."""
        if self.kind == "delta":
            return 0
        if self.kind == "finite":
            return min(R_t, max(norm_inf(m) for m in self.table))
        return R_t

    def kernel(self, d: int, R_t: int) -> np.ndarray:
        """Dense (2h+1)^d array of phi over |m|_inf <= h = support_radius."""
        h = self.support_radius(R_t)
        shape = (2 * h + 1,) * d
        ker = np.zeros(shape)
        for idx in np.ndindex(shape):
            m = tuple(i - h for i in idx)
            ker[idx] = self.phi(m)
        return ker

    def abs_sum(self, d: int, R_t: int) -> float:
        return float(np.abs(self.kernel(d, R_t)).sum())

    def tail_abs_sum(self, d: int, R_t: int) -> float:
        """sum |phi(m)| over |m|_inf > R_t (zero for compact profiles)."""
        if self.kind in ("delta", "finite"):
            h = 0 if self.kind == "delta" else max(norm_inf(m) for m in self.table)
            if R_t >= h:
                return 0.0
            return float(
                sum(abs(v) for m, v in self.table.items() if norm_inf(m) > R_t)
            )
        total = 0.0
        k = R_t + 1
        while True:
            term = shell_count(k, d) * math.exp(-self.c * k)
            total += term
            if term < 1e-18 * max(total, 1e-300) or k > R_t + 200000:
                break
            k += 1
        return total


def parse_profile(spec: str, c: float, d: int) -> SingleSite:
    """Profile from a config string: alt-exp | delta | finite:<entries>.

    Finite entries are semicolon-separated `coords:value` with coords a
    comma-separated integer vector, e.g. "finite:0:1.0;1:-0.4;-1:-0.4".
    """
    if spec == "alt-exp":
        return SingleSite("alt-exp", c)
    if spec == "delta":
        return SingleSite("delta", c)
    if spec.startswith("finite:"):
        table = {}
        for entry in spec[len("finite:"):].split(";"):
            entry = entry.strip()
            if not entry:
                continue
            coords_s, _, val_s = entry.rpartition(":")
            site = tuple(int(t) for t in coords_s.split(","))
            if len(site) != d:
                raise ConfigError(f"profile entry {entry!r} has wrong dimension")
            table[site] = float(val_s)
        if not table:
            raise ConfigError("empty finite profile")
        return SingleSite("finite", c, table)
    raise ConfigError(f"unknown profile spec {spec!r}")


def _check_window(field, x, R_t):
    for m in Box(tuple([0] * len(x)), R_t).sites():
        site = tuple(a + b for a, b in zip(x, m))
        if site not in field.support.index:
            raise ContainmentError(
                f"field support misses {site}; need Lambda_{R_t}({x}) covered"
            )


def eval_alloy(ss: SingleSite, field, x, lam: float, R_t: int):
    """lam * sum_{|m|_inf <= R_t} omega_{x+m} phi(m), with its tail bound.

    Returns (value, tail_bound); the bound uses |omega| <= 1/2 and the
    declared profile decay.
    """
    d = len(x)
    h = ss.support_radius(R_t)
    _check_window(field, x, h)
    acc = 0.0
    for m in Box(tuple([0] * d), h).sites():
        p = ss.phi(m)
        if p != 0.0:
            acc += field.value(tuple(a + b for a, b in zip(x, m))) * p
    tail = lam * 0.5 * ss.tail_abs_sum(d, R_t)
    return lam * acc, tail


class AlloyPotential:
    """Alloy evaluation model bound to (profile, lambda, truncation)."""

    def __init__(self, ss: SingleSite, lam: float, R_t: int | None = None):
        if lam < 0:
            raise ConfigError("lambda must be nonnegative")
        self.ss = ss
        self.lam = float(lam)
        self.R_t = default_truncation(max(lam, 1.0), ss.c) if R_t is None else R_t

    def value(self, field, x):
        return eval_alloy(self.ss, field, x, self.lam, self.R_t)[0]

    def values_on_region(self, field, region: Region) -> np.ndarray:
        """Vectorized evaluation over a region (its index order)."""
        d = region.d
        h = self.ss.support_radius(self.R_t)
        sup = field.support.coords()
        lo = sup.min(axis=0)
        hi = sup.max(axis=0)
        if len(field.support) == int(np.prod(hi - lo + 1)):
            # dense box support: one cross-correlation over the grid
            grid = np.full(tuple(hi - lo + 1), np.nan)
            for s, v in field.values.items():
                grid[tuple(np.asarray(s) - lo)] = v
            ker = self.ss.kernel(d, self.R_t)
            out = ndimage.correlate(grid, ker, mode="constant", cval=np.nan)
            vals = np.array(
                [out[tuple(np.asarray(s) - lo)] for s in region.sites]
            )
            if np.isnan(vals).any():
                raise ContainmentError(
                    "field support too small for the requested truncation"
                )
            return self.lam * vals
        return np.array(
            [eval_alloy(self.ss, field, x, self.lam, self.R_t)[0]
             for x in region.sites]
        )

    def sup_bound(self, d: int) -> float:
        """Bound on sup_x |V(x)| from |omega| <= 1/2."""
        return self.lam * 0.5 * (
            self.ss.abs_sum(d, self.R_t) + self.ss.tail_abs_sum(d, self.R_t)
        )

    def tail_bound(self, d: int) -> float:
        return self.lam * 0.5 * self.ss.tail_abs_sum(d, self.R_t)


class CorrelatedPotential:
    """V(x) = lam * sum_r f_r({omega_n}_{n in Lambda_r(x)}).

    Each term is (r, f_r) with f_r taking a dict offset -> value; values may
    be complex when evaluating the analytic extension. The declared tail
    constant c bounds sum_{r >= R} ||f_r||_inf <= exp(-c R).
    """

    def __init__(self, terms, c: float, lam: float, sup_f: float = 1.0):
        if c <= 0 or lam < 0:
            raise ConfigError("need c > 0 and lambda >= 0")
        self.terms = sorted(terms, key=lambda t: t[0])
        self.c = float(c)
        self.lam = float(lam)
        self.sup_f = float(sup_f)  # declared bound on sum_r ||f_r||

    @classmethod
    def from_alloy(cls, ss: SingleSite, lam: float, max_r: int) -> "CorrelatedPotential":
        """Shell decomposition f_r = sum_{|m|_inf = r} omega_m phi(m)."""
        def make_term(r):
            def f(window, _r=r):
                tot = 0.0
                for m, v in window.items():
                    if norm_inf(m) == _r:
                        p = ss.phi(m)
                        if p != 0.0:
                            tot = tot + v * p
                return tot

            return f

        terms = [(r, make_term(r)) for r in range(max_r + 1)]
        # the shell sums decay slower than phi by the shell cardinality;
        # halve the declared rate to stay a valid tail constant
        sup = DISK_RADIUS * sum(
            shell_count(k, 1) * math.exp(-ss.c * k) for k in range(max_r + 1)
        )
        return cls(terms, c=ss.c / 2.0, lam=lam, sup_f=sup)

    @classmethod
    def doubling_map(cls, lam: float, max_r: int, g=None) -> "CorrelatedPotential":
        """f(omega) = g(sum_j omega_j / 2^j) through telescoped partial sums."""
        if g is None:
            g = lambda x: np.sin(2.0 * np.pi * x)

        def partial(window, r):
            return sum(
                window[m] / 2.0 ** m[0]
                for m in window
                if m[0] >= 1 and norm_inf(m) <= r and all(v == 0 for v in m[1:])
            )

        def make_term(r):
            def f(window, _r=r):
                if _r == 0:
                    return g(0.0 * next(iter(window.values())))
                return g(partial(window, _r)) - g(partial(window, _r - 1))

            return f

        terms = [(r, make_term(r)) for r in range(max_r + 1)]
        return cls(terms, c=0.5 * math.log(2.0), lam=lam, sup_f=60.0)

    def _window(self, getter, x, r):
        w = {}
        for m in Box(tuple([0] * len(x)), r).sites():
            w[m] = getter(tuple(a + b for a, b in zip(x, m)))
        return w

    def _eval(self, getter, x, R_t):
        acc = 0.0
        for r, f in self.terms:
            if r > R_t:
                break
            acc = acc + f(self._window(getter, x, r))
        return self.lam * acc

    def value(self, field, x):
        return self.eval(field, x, self.max_radius())[0]

    def max_radius(self) -> int:
        return self.terms[-1][0] if self.terms else 0

    def eval(self, field, x, R_t: int):
        """(value, tail bound lam * exp(-c R_t))."""
        _check_window(field, x, min(R_t, self.max_radius()))
        val = self._eval(field.value, x, R_t)
        return val, self.lam * math.exp(-self.c * R_t)

    def eval_complex(self, zvalues: dict, x, R_t: int):
        """Analytic extension: zvalues maps sites to points of the disk D."""
        for site, z in zvalues.items():
            if abs(z) >= DISK_RADIUS:
                raise DomainError(
                    f"|z|={abs(z):.3f} at {site} outside the disk of radius 6"
                )

        def getter(site):
            try:
                return zvalues[site]
            except KeyError:
                raise ContainmentError(f"complex field misses {site}") from None

        return self._eval(getter, x, R_t)

    def values_on_region(self, field, region: Region) -> np.ndarray:
        R_t = self.max_radius()
        return np.array([self.eval(field, x, R_t)[0] for x in region.sites])

    def sup_bound(self, d: int) -> float:
        return self.lam * self.sup_f


def eval_correlated(cp: CorrelatedPotential, field, x, R_t: int):
    return cp.eval(field, x, R_t)


def eval_complex(cp: CorrelatedPotential, zvalues: dict, x, R_t: int):
    return cp.eval_complex(zvalues, x, R_t)
