"""Seeded disorder fields on finite regions.

The value at site n is drawn from a counter-based stream keyed by
(seed, n, density), so fields over different supports are consistent
extensions of each other and materialization order never matters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConfigError, ContainmentError
from .lattice import Region, norm_inf

_MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def _site_hash(site, salt: int) -> int:
    h = _splitmix64(salt & _MASK64)
    for c in site:
        # zigzag-encode so negative coordinates stay distinct
        z = (2 * c) if c >= 0 else (-2 * c - 1)
        h = _splitmix64(h ^ z)
    return h


def derive_seed(master: int, k: int) -> int:
    """Deterministic child seed for trial/worker k."""
    return _splitmix64((master & _MASK64) ^ _splitmix64(k + 1))


def site_generator(seed: int, site, salt: int = 0) -> np.random.Generator:
    """Independent generator for one site of one field."""
    key = np.array([seed & _MASK64, _site_hash(site, salt)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True)
class Density:
    name: str
    sup_norm: float  # bound on the density rho on [-1/2, 1/2]
    sampler: Callable[[np.random.Generator], float]


def _uniform_sampler(gen):
    return gen.uniform(-0.5, 0.5)


_DENSITIES = {"uniform": Density("uniform", 1.0, _uniform_sampler)}


def register_density(name: str, sampler, sup_norm: float) -> None:
    """Register a custom bounded density on [-1/2, 1/2] by name."""
    if sup_norm <= 0:
        raise ConfigError("density sup-norm bound must be positive")
    _DENSITIES[name] = Density(name, float(sup_norm), sampler)


def get_density(name: str) -> Density:
    try:
        return _DENSITIES[name]
    except KeyError:
        raise ConfigError(f"unknown density {name!r}") from None


class DisorderField:
    """Assignment omega: support -> [-1/2, 1/2], materialized on a Region."""

    __slots__ = ("support", "values", "seed", "density_id")

    def __init__(self, support: Region, values: dict, seed: int, density_id: str):
        self.support = support
        self.values = values
        self.seed = seed
        self.density_id = density_id

    def value(self, site) -> float:
        try:
            return self.values[site]
        except KeyError:
            raise ContainmentError(
                f"site {site} outside the field support; enlarge the "
                "truncation radius"
            ) from None

    def array(self, region: Region) -> np.ndarray:
        """Values over a region in its index order."""
        return np.array([self.value(s) for s in region.sites])

    def with_values(self, new_values: dict) -> "DisorderField":
        merged = dict(self.values)
        merged.update(new_values)
        return DisorderField(self.support, merged, self.seed, self.density_id)


def sample(support: Region, seed: int, density_id: str = "uniform") -> DisorderField:
    """Draw an iid field on the support; deterministic in (seed, density)."""
    dens = get_density(density_id)
    salt = _site_hash(tuple(ord(ch) for ch in density_id), 0x5EED)
    values = {}
    for site in support.sites:
        gen = site_generator(seed, site, salt)
        v = float(dens.sampler(gen))
        if not -0.5 <= v <= 0.5:
            raise ConfigError(
                f"density {density_id!r} produced {v} outside [-1/2, 1/2]"
            )
        values[site] = v
    return DisorderField(support, values, seed, density_id)


def resample_mod(field: DisorderField, region: Region, seed2: int) -> DisorderField:
    """Fresh draws on `region`, untouched values elsewhere (omega mod region)."""
    if not region.issubset(field.support):
        raise ContainmentError("resampling region must lie inside the support")
    fresh = sample(region, seed2, field.density_id)
    out = dict(field.values)
    out.update(fresh.values)
    return DisorderField(field.support, out, field.seed, field.density_id)


def holder_metric(a: DisorderField, b: DisorderField) -> float:
    """Diagnostic distance sum_n |a_n - b_n| / 2^{|n|_inf}, truncated at the
    common support."""
    common = [s for s in a.support.sites if s in b.support.index]
    return float(
        sum(abs(a.value(s) - b.value(s)) / 2.0 ** norm_inf(s) for s in common)
    )


def concentration_estimate(
    f, E: float, eps: float, trials: int, seed: int, support: Region,
    density_id: str = "uniform",
):
    """Monte Carlo estimate of P(|f(omega) - E| <= eps).

    Returns (p_hat, stderr); f maps a DisorderField to a real number.
    """
    if eps <= 0:
        raise ConfigError("eps must be positive")
    if trials < 1:
        raise ConfigError("need at least one trial")
    hits = 0
    for k in range(trials):
        fld = sample(support, _splitmix64(seed ^ (k + 1)), density_id)
        if abs(f(fld) - E) <= eps:
            hits += 1
    p_hat = hits / trials
    stderr = math.sqrt(p_hat * (1.0 - p_hat) / trials)
    return p_hat, stderr
