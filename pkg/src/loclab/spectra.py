"""Spectral statistics: integrated density of states, eigenvalue-window
counting, the window bound implied by scale-wise suitability decay, and the
spectrum-interval path experiment."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .disorder import derive_seed
from .errors import CapacityError
from .experiment import ExperimentSetup
from .lattice import Region
from .operator import CAPACITY


@dataclass
class IDSTable:
    E_grid: np.ndarray
    N_hat: np.ndarray
    stderr: np.ndarray
    R: int
    realizations: int


def _eigenvalue_samples(setup: ExperimentSetup, R: int, realizations: int,
                        seed: int, scale: float = 1.0):
    box = setup.origin_box(R)
    if (2 * R + 1) ** setup.d > CAPACITY:
        raise CapacityError(f"R={R} exceeds the dense-solve ceiling")
    for k in range(realizations):
        field = setup.field_for(box, derive_seed(seed, k))
        if scale != 1.0:
            field = field.with_values(
                {s: scale * v for s, v in field.values.items()})
        op = setup.operator_on(box, field)
        yield np.sort(op.spectral().eigenvalues)


def ids(setup: ExperimentSetup, R: int, E_grid, realizations: int,
        seed: int) -> IDSTable:
    """N_hat(E) = mean over realizations of #{eigenvalues <= E} / #sites."""
    E_grid = np.asarray(E_grid, dtype=float)
    n_sites = (2 * R + 1) ** setup.d
    per_real = []
    for w in _eigenvalue_samples(setup, R, realizations, seed):
        per_real.append(np.searchsorted(w, E_grid, side="right") / n_sites)
    arr = np.asarray(per_real)
    return IDSTable(E_grid, arr.mean(axis=0),
                    arr.std(axis=0) / math.sqrt(realizations), R, realizations)


def free_ids_1d(E) -> np.ndarray:
    """Large-volume N(E) = arccos(-E/2)/pi of the free 1-d lattice operator."""
    E = np.clip(np.asarray(E, dtype=float), -2.0, 2.0)
    return np.arccos(-E / 2.0) / np.pi


def wegner_ratio(setup: ExperimentSetup, R: int, E: float, eps: float,
                 realizations: int, seed: int) -> dict:
    """Mean of #{eigenvalues in [E-eps, E+eps]} / #sites with its stderr."""
    if not 0.0 < eps:
        raise ValueError("eps must be positive")
    n_sites = (2 * R + 1) ** setup.d
    counts = []
    for w in _eigenvalue_samples(setup, R, realizations, seed):
        lo = np.searchsorted(w, E - eps, side="left")
        hi = np.searchsorted(w, E + eps, side="right")
        counts.append((hi - lo) / n_sites)
    counts = np.asarray(counts)
    return {"eps": eps, "ratio": float(counts.mean()),
            "stderr": float(counts.std() / math.sqrt(realizations))}


def wegner_table(setup: ExperimentSetup, R: int, E: float, eps_list,
                 realizations: int, seed: int) -> dict:
    """Ratio rows over an eps grid plus the log-power envelope fit.

    The fit regresses log(ratio) on log log(1/eps); its slope -beta_hat is
    descriptive (the underlying bound C_beta / log(eps^-1)^beta is
    asymptotic), never asserted."""
    rows = [wegner_ratio(setup, R, E, eps, realizations, derive_seed(seed, i))
            for i, eps in enumerate(eps_list)]
    xs, ys = [], []
    for row in rows:
        if row["ratio"] > 0 and 0 < row["eps"] < 1:
            xs.append(math.log(math.log(1.0 / row["eps"])))
            ys.append(math.log(row["ratio"]))
    beta_hat = None
    if len(xs) >= 2:
        slope, _ = np.polyfit(xs, ys, 1)
        beta_hat = -float(slope)
    return {"rows": rows, "beta_hat": beta_hat}


def msa_to_wegner(psi, d: int, tau: float, eps: float) -> dict:
    """Window bound 7 psi((1/3) log(1/eps)^(1/tau))^(1/(d+1)) from the
    suitability-failure profile psi (a decreasing function of the scale).

    Also returns the intermediate scales r = floor((1/3) log(1/eps)^(1/tau))
    and s = floor(1 / (3 psi(r)^(1/(d+1))))."""
    if not 0.0 < tau < 1.0:
        raise ValueError("tau must lie in (0, 1)")
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")

    def snapped_floor(x):  # guard against float fuzz on exact integers
        return math.floor(round(x) if abs(x - round(x)) < 1e-9 else x)

    r = snapped_floor((1.0 / 3.0) * math.log(1.0 / eps) ** (1.0 / tau))
    val = psi(max(r, 1))
    bound = 7.0 * val ** (1.0 / (d + 1.0))
    s = snapped_floor(1.0 / (3.0 * val ** (1.0 / (d + 1.0)))) \
        if val > 0 else None
    return {"bound": bound, "r": r, "s": s}


def spectrum_path_union(setup: ExperimentSetup, R: int, steps: int,
                        seed: int) -> dict:
    """Track sigma(H_{lambda, t*omega}) along t in [0, 1].

    Verifies the eigenvalue-path Weyl inequality
    |lambda_k(t1) - lambda_k(t2)| <= ||V(t1) - V(t2)|| and measures the
    largest gap of the union of the sampled spectra against the tolerance
    (potential Lipschitz step) + (free-endpoint level spacing)."""
    if steps < 2:
        raise ValueError("need at least 2 path steps")
    box = setup.origin_box(R)
    field = setup.field_for(box, seed)
    pot = setup.potential()
    t_grid = np.linspace(0.0, 1.0, steps)
    v_full = pot.values_on_region(field, Region.from_box(box))
    eigs = []
    for t in t_grid:
        scaled = field.with_values({s: t * v for s, v in field.values.items()})
        op = setup.operator_on(box, scaled)
        eigs.append(np.sort(op.spectral().eigenvalues))
    eigs = np.asarray(eigs)

    dt = float(t_grid[1] - t_grid[0])
    v_max = float(np.max(np.abs(v_full)))
    weyl_ok = True
    worst_excess = -math.inf
    for i in range(len(t_grid) - 1):
        jump = float(np.max(np.abs(eigs[i + 1] - eigs[i])))
        allowed = dt * v_max + 1e-9
        worst_excess = max(worst_excess, jump - allowed)
        if jump > allowed:
            weyl_ok = False
    free_spacing = float(np.max(np.diff(eigs[0])))
    tol = dt * v_max + free_spacing
    union = np.sort(eigs.ravel())
    max_gap = float(np.max(np.diff(union)))
    return {
        "weyl_ok": weyl_ok,
        "worst_weyl_excess": worst_excess,
        "max_union_gap": max_gap,
        "tolerance": tol,
        "union_connected": max_gap <= tol,
        "eig_min": eigs.min(axis=1),
        "eig_max": eigs.max(axis=1),
        "t_grid": t_grid,
    }
