"""Multi-scale analysis driver: scale/constant formulas, Monte Carlo
acceptability estimation, bad-cube discovery, resampling search, and the
initial-scale search at large coupling."""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .disorder import derive_seed, resample_mod
from .errors import LadderError, SingularEnergyError
from .experiment import ExperimentSetup
from .green import SuitabilityParams, check_suitable
from .lattice import Box, Region, clamped_cube, dist_inf
from .operator import CAPACITY, resolvent_norm


def _snap(x: float, tol: float = 1e-9) -> float:
    """Guard floor/ceil against float fuzz on exact integer powers."""
    r = round(x)
    return float(r) if abs(x - r) < tol else x


def rbar(r: float, gamma: float, c: float, lam: float) -> int:
    """Enlarged radius ceil((1 + 4 gamma/c) r + log(lambda)/c).

    Field changes outside Lambda_rbar(x) perturb H^{Lambda_r(x)} by at most
    exp(-4 gamma r).
    """
    if r <= 0 or gamma <= 0 or c <= 0 or lam <= 0:
        raise ValueError("rbar needs positive r, gamma, c, lambda")
    return math.ceil(_snap((1.0 + 4.0 * gamma / c) * r + math.log(lam) / c))


def rbar_growth_constant(gamma: float, c: float) -> float:
    """T_0 = 2 + 4 gamma / c with rbar <= T_0 max(r, log(lambda)/c)."""
    return 2.0 + 4.0 * gamma / c


def t_hat(t: int, r: int, gamma: float, c: float, lam: float) -> int:
    """max(tbar, 3t, t + 3r): the next boundary-safe rung seed."""
    return max(rbar(t, gamma, c, lam), 3 * t, t + 3 * r)


def schedule_wegner(r: int, d: int, alpha_variant: str = "thm") -> dict:
    """One Wegner-regime induction step from scale r.

    Returns R0 = ceil(r^(1+1/(5d))), R1 = floor(r^(1+1/(2d))), the exponent
    alpha, and the decay-rate factor 1 - 200/r^(1/d). The two alpha variants
    reflect the d(2d+1) and d(2d+2) numerators used in different places of
    the source; `thm` is the default.
    """
    if r < 2:
        raise ValueError("need r >= 2")
    if alpha_variant == "thm":
        alpha = d * (2.0 * d + 1.0) / (2.0 * d - 1.0)
    elif alpha_variant == "sec8":
        alpha = d * (2.0 * d + 2.0) / (2.0 * d - 1.0)
    else:
        raise ValueError(f"unknown alpha variant {alpha_variant!r}")
    return {
        "R0": math.ceil(_snap(r ** (1.0 + 1.0 / (5.0 * d)))),
        "R1": math.floor(_snap(r ** (1.0 + 1.0 / (2.0 * d)))),
        "alpha": alpha,
        "gamma_factor": 1.0 - 200.0 / r ** (1.0 / d),
    }


def k_formula(r: int, d: int, gamma: float, c: float) -> int:
    """floor(sqrt(log r / (2 d log max(4, 2 + 4 gamma/c))))."""
    base = max(4.0, 2.0 + 4.0 * gamma / c)
    return math.floor(_snap(math.sqrt(math.log(r) / (2.0 * d * math.log(base)))))


def schedule_cartan(r: int, d: int, alpha: float, gamma: float, c: float) -> dict:
    """One Cartan-regime induction step from scale r.

    R0 = r^(3d+8), R1 = r^((alpha-1)/(d+1)), the new exponent alpha_tilde
    (same expression as the bad-cube budget K), and gamma factor 1 - 2/r.
    """
    if alpha < 3 * d + 2:
        raise ValueError(f"need alpha >= 3d+2 = {3 * d + 2}")
    K = k_formula(r, d, gamma, c)
    if K < 1:
        raise LadderError(f"r={r} too small: K formula gives {K} < 1")
    return {
        "R0": r ** (3 * d + 8),
        "R1": float(r) ** ((alpha - 1.0) / (d + 1.0)),
        "alpha_tilde": K,
        "gamma_factor": 1.0 - 2.0 / r,
        "K": K,
    }


def gamma_ladder(r_start: int, d: int, steps: int) -> list:
    """Decay rates gamma_k = gamma_{k-1} (1 - 2/R_{k-1}) along R_k = R_{k-1}^(3d+8).

    Starts from gamma_0 = 2 at R_0 = r_start; every returned value must stay
    >= 1 (the induction would otherwise lose its decay)."""
    if r_start < 3:
        raise LadderError("need r_start >= 3")
    out = []
    gamma = 2.0
    log_R = math.log(r_start)
    power = 3 * d + 8
    for _ in range(steps):
        inv = math.exp(-log_R) if log_R < 700.0 else 0.0
        gamma *= 1.0 - 2.0 * inv
        if gamma < 1.0:
            raise LadderError(
                f"gamma ladder dipped to {gamma:.4f} < 1; r_start too small")
        out.append(gamma)
        log_R *= power
    return out


@dataclass
class AcceptabilityEstimate:
    r: int
    E: float
    trials: int
    failures: int
    target: float  # 1 / r^alpha
    p_hat: float = dc_field(init=False)
    stderr: float = dc_field(init=False)

    def __post_init__(self):
        self.p_hat = self.failures / self.trials
        self.stderr = math.sqrt(self.p_hat * (1.0 - self.p_hat) / self.trials)

    @property
    def meets_target(self) -> bool:
        return self.p_hat + 3.0 * self.stderr <= self.target


def auto_energy_grid(gamma: float, r: int, E_min: float, E_max: float,
                     max_points: int = 10_001) -> np.ndarray:
    """Energy grid with the eigenvalue-hunting spacing 2 exp(-3 gamma r).

    The nominal spacing is astronomically fine at realistic scales, so the
    point count is capped (callers pass explicit grids where that matters).
    """
    if E_max <= E_min:
        raise ValueError("need E_max > E_min")
    spacing = 2.0 * math.exp(-3.0 * gamma * r)
    n = math.floor((E_max - E_min) / spacing) + 1 if spacing > 0 else max_points
    n = min(max(n, 2), max_points)
    return np.linspace(E_min, E_max, n)


def estimate_acceptability(setup: ExperimentSetup, r: int, E: float,
                           params: SuitabilityParams, trials: int, seed: int,
                           alpha: float = 2.0) -> AcceptabilityEstimate:
    """Monte Carlo frequency of Lambda_r(0) failing suitability for H - E."""
    if trials < 100:
        raise ValueError("need at least 100 trials for a meaningful estimate")
    failures = 0
    for k in range(trials):
        _, op = setup.sample_operator(r, derive_seed(seed, k))
        if not check_suitable(op, E, params).passed:
            failures += 1
    return AcceptabilityEstimate(r, E, trials, failures, r ** (-alpha))


def initial_scale_search(setup: ExperimentSetup, r: int, alpha: float,
                         E_grid, gamma: float = 2.0, trials: int = 300,
                         seed: int = 0, lam_start: float = 1.0,
                         max_doublings: int = 24) -> dict:
    """Smallest coupling on a doubling grid making [*, r] acceptable.

    Doubles lambda from lam_start until the failure estimate satisfies
    p_hat + 3 sigma <= 1/r^alpha for every E in the grid. Returns the found
    lambda (or None), plus the per-(lambda, E) history.
    """
    params = SuitabilityParams(gamma, 0.5, 3)
    history = []
    lam = lam_start
    for step in range(max_doublings):
        ok = True
        for E in E_grid:
            est = estimate_acceptability(setup.with_lambda(lam), r, E, params,
                                         trials, derive_seed(seed, step),
                                         alpha)
            history.append((lam, E, est.p_hat, est.stderr, est.meets_target))
            if not est.meets_target:
                ok = False
                break
        if ok:
            return {"found": True, "lambda0": lam, "history": history}
        lam *= 2.0
    return {"found": False, "lambda0": None, "history": history}


def find_bad_cubes(setup: ExperimentSetup, field, R: int, r: int, E: float,
                   params: SuitabilityParams, K: int) -> dict:
    """Maximal 2rbar-separated centers of non-suitable r-cubes in Lambda_R(0).

    Returns the greedy (lexicographic) maximal separated family of failing
    centers and whether it stays within the budget K.
    """
    rb = rbar(r, params.gamma, setup.c, max(setup.lam, 1.0 + 1e-12))
    op_R = setup.operator_on(setup.origin_box(R), field)
    failing = []
    for n in setup.origin_box(R - r).sites():
        rep = check_suitable(op_R.restrict(Box(n, r)), E, params)
        if not rep.passed:
            failing.append(n)
    centers = []
    for n in failing:
        if all(dist_inf(n, m) >= 2 * rb + 1 for m in centers):
            centers.append(n)
    return {"centers": centers, "rbar": rb, "count_ok": len(centers) <= K,
            "n_failing": len(failing)}


def scale_ladder_13(r: int, K: int, d: int, gamma: float, c: float,
                    lam: float) -> dict:
    """The nested resampling/merging ladders grown from rbar(r).

    Builds s_k^q, t_k^q for k = 1..K, q = 1..Q with Q = (d+1)K + 1 via
    t = rbar(s), s = rbar(t_prev), next rung seeded by
    t_hat = max(tbar, 3t, t + 3r); also returns the merge ladder
    (rhat_q, shat_q) = (s_1^q, t_K^q). Asserts t_K^Q <= r^3; the rung-count
    bound <= 2dK^2 is reported, not asserted (it fails for d = 1, where
    QK = (2K+1)K > 2K^2).
    """
    base = max(4.0, 2.0 + 4.0 * gamma / c)
    if r < base ** (2 * d * K * K):
        raise LadderError(
            f"condKsetup violated: r={r} < max(4, 2+4g/c)^(2dK^2) = "
            f"{base ** (2 * d * K * K):.4g}")
    Q = (d + 1) * K + 1
    s = [[0] * (K + 1) for _ in range(Q + 1)]  # s[q][k]
    t = [[0] * (K + 1) for _ in range(Q + 1)]
    for q in range(1, Q + 1):
        if q == 1:
            s[q][1] = rbar(r, gamma, c, lam)
        else:
            s[q][1] = t_hat(t[q - 1][K], r, gamma, c, lam)
        t[q][1] = rbar(s[q][1], gamma, c, lam)
        for k in range(2, K + 1):
            s[q][k] = rbar(t[q][k - 1], gamma, c, lam)
            t[q][k] = rbar(s[q][k], gamma, c, lam)
    t_KQ = t[Q][K]
    if t_KQ > r ** 3:
        raise LadderError(f"ladder top t_K^Q = {t_KQ} exceeds r^3 = {r ** 3}")
    count = Q * K
    return {
        "Q": Q,
        "s": s,
        "t": t,
        "rhat": [s[q][1] for q in range(1, Q + 1)],
        "shat": [t[q][K] for q in range(1, Q + 1)],
        "t_KQ": t_KQ,
        "t_bound_ok": True,
        "count": count,
        "count_bound_2dK2": count <= 2 * d * K * K,
        "count_leq_r": count <= r,
    }


def resample_search(setup: ExperimentSetup, field, n, scales, E: float,
                    params: SuitabilityParams, attempts: int, R: int,
                    seed: int) -> dict:
    """Hunt for a resampling making some Lambda^R_{t_k}(n) suitable.

    scales: [(s_1, t_1), ..., (s_K, t_K)] obeying the chain
    t_1 >= max(r + rbar, s_1 + rbar), s_k >= rbar(t_{k-1}),
    t_k >= s_k + rbar(r). Level k redraws the region
    Lambda^{R,t_{k-1}}_{s_k}(n) up to `attempts` times (the unmodified field
    counts as attempt 0) and tests (gamma, tau, p-1)-suitability of the
    t_k-cube. Returns the first success or a failure report.
    """
    checked = []
    lowered = params.lower() if params.p >= 1 else params
    for k, (s_k, t_k) in enumerate(scales, start=1):
        clamp = scales[k - 2][1] if k >= 2 else s_k
        region_box = clamped_cube(n, s_k, R, clamp=clamp) if s_k >= 0 else None
        test_box = clamped_cube(n, min(t_k, R), R)
        for attempt in range(attempts + 1):
            if attempt == 0 or region_box is None:
                cand = field
            else:
                region = Region.from_box(region_box)
                cand = resample_mod(field, region,
                                    derive_seed(seed, 1000 * k + attempt))
            op = setup.operator_on(test_box, cand)
            rep = check_suitable(op, E, lowered)
            checked.append((k, attempt, rep.passed))
            if rep.passed:
                return {"success": True, "level": k, "attempt": attempt,
                        "field": cand, "checked": checked}
    return {"success": False, "level": None, "attempt": None, "field": None,
            "checked": checked}


def validate_resample_scales(scales, r: int, gamma: float, c: float,
                             lam: float) -> list:
    """Chain conditions on (s_k, t_k); returns a list of violation strings."""
    rb = rbar(r, gamma, c, lam)
    bad = []
    if not scales:
        return ["empty scale list"]
    s1, t1 = scales[0]
    if t1 < max(r + rb, s1 + rb):
        bad.append(f"t_1 = {t1} < max(r + rbar, s_1 + rbar) = "
                   f"{max(r + rb, s1 + rb)}")
    for k in range(1, len(scales)):
        s_k, t_k = scales[k]
        t_prev = scales[k - 1][1]
        if s_k < rbar(t_prev, gamma, c, lam):
            bad.append(f"s_{k + 1} = {s_k} < rbar(t_{k}) = "
                       f"{rbar(t_prev, gamma, c, lam)}")
        if t_k < s_k + rb:
            bad.append(f"t_{k + 1} = {t_k} < s_{k + 1} + rbar = {s_k + rb}")
    return bad


def check_constants_14(r: int, d: int, K: int, gamma: float, c: float,
                       lam: float, rho_sup: float, R: float,
                       t_infty: float) -> list:
    """Verdicts (name, ok, lhs, rhs) for the large-coupling constant checks.

    Includes the derived quantities a = r^(3d+3), S = gamma a r, T = K r and
    their inequalities S >= r^(3d+4), S/T >= r^(3d+2)."""
    a = float(r) ** (3 * d + 3)
    S = gamma * a * r
    T = K * r
    checks = [
        ("r >= 20000 K 3^d", r >= 20000.0 * K * 3 ** d, r, 20000.0 * K * 3 ** d),
        ("r >= log rho_sup", r >= math.log(max(rho_sup, 1e-300)), r,
         math.log(max(rho_sup, 1e-300))),
        ("r >= 2^(2dK^2)", r >= 2.0 ** (2 * d * K * K), r, 2.0 ** (2 * d * K * K)),
        ("r >= log(2d+lam)^2", r >= math.log(2 * d + lam) ** 2, r,
         math.log(2 * d + lam) ** 2),
        ("R >= r^(3d+8)", R >= float(r) ** (3 * d + 8), R, float(r) ** (3 * d + 8)),
        ("t_infty <= r^3", t_infty <= r ** 3, t_infty, r ** 3),
        ("S >= r^(3d+4)", S >= float(r) ** (3 * d + 4), S, float(r) ** (3 * d + 4)),
        ("S/T >= r^(3d+2)", S / T >= float(r) ** (3 * d + 2), S / T,
         float(r) ** (3 * d + 2)),
    ]
    return [(name, bool(ok), float(lhs), float(rhs))
            for name, ok, lhs, rhs in checks]


@dataclass
class ScaleSchedule:
    """Ladder of (r_k, gamma_k, alpha_k) rungs for run_ladder."""

    entries: list  # (k, r_k, gamma_k, alpha_k)
    regime: str = "cartan"

    @classmethod
    def build(cls, r0: int, d: int, gamma0: float, c: float, steps: int,
              regime: str = "cartan", alpha0: float = None,
              alpha_variant: str = "thm") -> "ScaleSchedule":
        entries = []
        r, gamma = r0, gamma0
        alpha = alpha0 if alpha0 is not None else 3 * d + 2
        for k in range(steps):
            entries.append((k + 1, r, gamma, alpha))
            if regime == "wegner":
                sched = schedule_wegner(r, d, alpha_variant)
                r = max(sched["R0"], r + 1)
                gamma *= sched["gamma_factor"]
                alpha = sched["alpha"]
            else:
                if r < 1e300:  # beyond that the update is an exact no-op
                    gamma *= 1.0 - 2.0 / r
                try:
                    alpha = max(alpha, k_formula(r, d, gamma, c))
                except (ValueError, OverflowError):
                    pass
                r = r ** (3 * d + 8)
        return cls(entries, regime)


def run_ladder(setup: ExperimentSetup, schedule: ScaleSchedule, E: float,
               trials: int, seed: int) -> list:
    """Estimate acceptability at every ladder rung within solver capacity.

    Rows: (k, r_k, gamma_k, alpha_k, trials, failures, p_hat, target,
    verdict) with verdict in {'pass', 'fail', 'skipped'}."""
    rows = []
    for (k, r_k, gamma_k, alpha_k) in schedule.entries:
        sites = (2 * r_k + 1) ** setup.d
        if sites > CAPACITY:
            try:
                target = float(r_k) ** (-alpha_k)
            except OverflowError:
                target = 0.0
            rows.append((k, r_k, gamma_k, alpha_k, 0, 0, math.nan,
                         target, "skipped"))
            continue
        params = SuitabilityParams(gamma_k, 0.5, 3)
        est = estimate_acceptability(setup, r_k, E, params, trials,
                                     derive_seed(seed, k), alpha_k)
        rows.append((k, r_k, gamma_k, alpha_k, est.trials, est.failures,
                     est.p_hat, est.target,
                     "pass" if est.meets_target else "fail"))
    return rows


def markov_wegner_check(setup: ExperimentSetup, s_radius: int, E: float,
                        eps: float, trials: int, seed: int) -> dict:
    """Empirical Markov step: freq(||(H-E)^-1|| > 1/eps) vs E[tr P_[E-eps,E+eps]].

    The per-realization indicator is dominated by the eigenvalue count, so
    the frequency can never exceed the mean count; both are returned with
    stderr for the 3-sigma comparison used in tests."""
    hits = 0
    counts = []
    for k in range(trials):
        _, op = setup.sample_operator(s_radius, derive_seed(seed, k))
        w = op.spectral().eigenvalues
        cnt = int(np.sum(np.abs(w - E) <= eps))
        counts.append(cnt)
        try:
            if resolvent_norm(op, E) > 1.0 / eps:
                hits += 1
        except SingularEnergyError:
            hits += 1
    freq = hits / trials
    mean_count = float(np.mean(counts))
    se = float(np.std(counts) / math.sqrt(trials))
    return {"freq": freq, "mean_count": mean_count, "stderr": se,
            "ok": freq <= mean_count + 3.0 * se + 1e-12}
