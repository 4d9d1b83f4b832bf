"""Cartan-lemma machinery: sublevel bounds for analytic functions,
determinant inequalities, Schur complements, matrix Cartan bounds, and the
Schrodinger-operator version, each with a Monte Carlo measurement it must
dominate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, ThresholdError

E3_30 = 30.0 * math.e ** 3
E3_60 = 60.0 * math.e ** 3
COMPLEX_RADIUS = 2.0 * math.e  # scalar lemmas live on the 2e-polydisk


def cartan_bound_1d(eps: float, s: float) -> float:
    """Sublevel bound 30 e^3 exp(-s / log(1/eps)) on [-1, 1].

    Valid for analytic f on the 2e-disk with ||f|| <= 1 and |f(0)| >= eps.
    """
    if not 0.0 < eps < 1.0:
        raise DomainError(f"eps must lie in (0, 1), got {eps}")
    if s <= 0:
        raise DomainError("s must be positive")
    return E3_30 * math.exp(-s / math.log(1.0 / eps))


def cartan_bound_nd(n: int, eps: float, s: float) -> float:
    """Sublevel bound 60 e^3 n^{3/2} 2^n exp(-s / log(1/eps)) on [-1, 1]^n."""
    if n < 1:
        raise DomainError("n must be >= 1")
    if not 0.0 < eps < 1.0:
        raise DomainError(f"eps must lie in (0, 1), got {eps}")
    if s <= 0:
        raise DomainError("s must be positive")
    return E3_60 * n ** 1.5 * 2.0 ** n * math.exp(-s / math.log(1.0 / eps))


@dataclass
class AnalyticScalar:
    """Analytic f on the 2e-polydisk with ||f|| <= 1 and |f(0)| >= eps.

    evaluator acts coordinatewise on arrays of shape (n, samples).
    """

    evaluator: Callable
    n: int
    eps: float

    def sublevel_measure(self, s: float, samples: int, seed: int):
        """Monte Carlo Lebesgue measure of {x in [-1,1]^n : |f(x)| <= e^-s}.

        Returns (measure, stderr); the measure is of the whole cube, i.e.
        hit fraction times 2^n.
        """
        gen = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
        x = gen.uniform(-1.0, 1.0, size=(self.n, samples))
        hits = np.abs(self.evaluator(x)) <= math.exp(-s)
        p = float(hits.mean())
        vol = 2.0 ** self.n
        return p * vol, math.sqrt(p * (1.0 - p) / samples) * vol


def product_family(shifts) -> AnalyticScalar:
    """f(z) = prod (z_i - a_i) / (2e + |a_i|), the shipped scalar family.

    Each |a_i| >= 1 keeps f zero-free at 0 with |f(0)| = prod |a_i|/(2e+|a_i|).
    """
    shifts = np.asarray(shifts, dtype=float)
    if np.any(np.abs(shifts) < 1.0):
        raise DomainError("shifts need |a_i| >= 1")
    scale = COMPLEX_RADIUS + np.abs(shifts)

    def f(x):
        return np.prod((x - shifts[:, None]) / scale[:, None], axis=0)

    eps = float(np.prod(np.abs(shifts) / scale))
    return AnalyticScalar(f, len(shifts), eps)


def det_bounds(A: np.ndarray) -> dict:
    """Determinant inequalities via singular values.

    (i) |det A| <= ||A||^N, (ii) |det A| >= ||A^{-1}||^{-N},
    (iii) ||A^{-1}|| <= N ||A||^{N-1} / |det A|; (ii)/(iii) need A invertible.
    """
    A = np.asarray(A)
    N = A.shape[0]
    sv = np.linalg.svd(A, compute_uv=False)
    absdet = float(np.prod(sv))
    nrm = float(sv[0])
    out = {"absdet": absdet, "norm": nrm, "N": N}
    slack = 1.0 + 1e-12
    out["i"] = absdet <= nrm ** N * slack
    if sv[-1] <= 0.0:
        out["invertible"] = False
        return out
    out["invertible"] = True
    inv_nrm = 1.0 / float(sv[-1])
    out["inv_norm"] = inv_nrm
    out["ii"] = absdet * slack >= inv_nrm ** (-N)
    out["iii"] = inv_nrm <= N * nrm ** (N - 1) / absdet * slack
    return out


def schur_complement(A, B, C, D) -> dict:
    """Schur complement S = D - C A^{-1} B and the block inverse it induces.

    Returns S, the reassembled inverse, its residual against a direct dense
    inverse, and the two norm inequalities tying ||S^{-1}|| to ||M^{-1}||.
    """
    A, B, C, D = map(np.asarray, (A, B, C, D))
    sv = np.linalg.svd(A, compute_uv=False)
    if sv[-1] <= 1e-13 * max(1.0, sv[0]):
        raise np.linalg.LinAlgError("A block is (numerically) singular")
    Ainv = np.linalg.inv(A)
    S = D - C @ Ainv @ B
    Sinv = np.linalg.inv(S)
    top = np.hstack([Ainv + Ainv @ B @ Sinv @ C @ Ainv, -Ainv @ B @ Sinv])
    bot = np.hstack([-Sinv @ C @ Ainv, Sinv])
    Minv_schur = np.vstack([top, bot])
    M = np.vstack([np.hstack([A, B]), np.hstack([C, D])])
    Minv = np.linalg.inv(M)
    residual = float(np.linalg.norm(Minv_schur - Minv, 2)
                     / max(1.0, np.linalg.norm(Minv, 2)))
    norm_Minv = float(np.linalg.norm(Minv, 2))
    norm_Sinv = float(np.linalg.norm(Sinv, 2))
    bdd1 = norm_Sinv <= norm_Minv * (1.0 + 1e-12)
    prod = ((1.0 + norm_Sinv) * (1.0 + np.linalg.norm(Ainv, 2)) ** 2
            * (1.0 + np.linalg.norm(B, 2)) * (1.0 + np.linalg.norm(C, 2)))
    bdd2 = norm_Minv <= prod * (1.0 + 1e-12)
    return {"S": S, "inverse": Minv_schur, "residual": residual,
            "bddschur1": bdd1, "bddschur2": bdd2,
            "norm_Minv": norm_Minv, "norm_Sinv": norm_Sinv}


@dataclass
class AnalyticMatrixFamily:
    """Analytic A: D^n -> C^{NxN} with sup bound B and witness inverse D.

    evaluator maps (n, samples) arrays to (samples, N, N) stacks. The witness
    bound ||A(x0)^{-1}|| <= D_bound is verified at construction.
    """

    evaluator: Callable
    n: int
    N: int
    B: float
    D_bound: float
    x0: np.ndarray

    def __post_init__(self):
        self.x0 = np.asarray(self.x0, dtype=float)
        if self.B < self.N:
            raise ThresholdError("B >= N", f"B={self.B} < N={self.N}")
        if self.D_bound < 1.0:
            raise ThresholdError("D >= 1", f"D={self.D_bound} < 1")
        if np.any(np.abs(self.x0) > 0.5):
            raise DomainError("witness x0 must lie in [-1/2, 1/2]^n")
        A0 = self.evaluator(self.x0[:, None])[0]
        inv_norm = 1.0 / float(np.linalg.svd(A0, compute_uv=False)[-1])
        if inv_norm > self.D_bound * (1.0 + 1e-9):
            raise ThresholdError(
                "witness inverse bound",
                f"||A(x0)^-1|| = {inv_norm:.3g} > D = {self.D_bound}")

    def event_measure(self, s: float, samples: int, seed: int,
                      rho_sup: float = 1.0):
        """mu-measure of {x : ||A(x)^{-1}|| >= e^s} on [-1/2, 1/2]^n.

        The theorem writes the event with ||A(x)|| but bounds the inverse
        norm through det(A); we measure the inverse-norm event. Uniform
        sampling covers any density through mu(A) <= ||rho||_inf^n |A|.
        """
        gen = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
        x = gen.uniform(-0.5, 0.5, size=(self.n, samples))
        mats = self.evaluator(x)
        smin = np.linalg.svd(mats, compute_uv=False)[:, -1]
        hits = smin <= math.exp(-s)  # ||A^{-1}|| >= e^s
        p = float(hits.mean())
        scale = rho_sup ** self.n
        return p * scale, math.sqrt(p * (1.0 - p) / samples) * scale


def diagonal_family(shifts, B: float | None = None) -> AnalyticMatrixFamily:
    """A(z) = diag(z_i - a_i): the shipped affine matrix family (n = N)."""
    shifts = np.asarray(shifts, dtype=float)
    N = len(shifts)

    def f(x):
        vals = (x - shifts[:, None]).T  # (samples, N)
        out = np.zeros((vals.shape[0], N, N), dtype=vals.dtype)
        idx = np.arange(N)
        out[:, idx, idx] = vals
        return out

    sup = float(np.max(6.0 + np.abs(shifts)))
    x0 = np.full(N, -0.5)
    d0 = 1.0 / float(np.min(np.abs(x0 - shifts)))
    return AnalyticMatrixFamily(f, N, N, B if B is not None else max(sup, N),
                                max(d0, 1.0), x0)


def matrix_cartan_bound(family: AnalyticMatrixFamily, s: float,
                        rho_sup: float | None = None) -> float:
    """Bound on the measure of {||A(x)^{-1}|| >= e^s} over [-1/2, 1/2]^n.

    Without a density: needs s/N >= 20 n log(B D), gives
    exp(-s / (2 N log(B D))). With a bounded density: threshold factor
    25 max(1, log||rho||) and exponent 1/4. The max(1, .) keeps the
    threshold meaningful for ||rho|| <= e (the stated factor log||rho||
    would make it nonpositive there, a gap in the source statement).
    """
    N, n = family.N, family.n
    logBD = math.log(family.B * family.D_bound)
    if rho_sup is None:
        if s / N < 20.0 * n * logBD:
            raise ThresholdError(
                "s/N >= 20 n log(BD)",
                f"s/N = {s / N:.3g} < {20.0 * n * logBD:.3g}")
        return math.exp(-0.5 * s / (N * logBD))
    if rho_sup <= 0:
        raise DomainError("density sup-norm must be positive")
    factor = max(1.0, math.log(rho_sup))
    if s / N < 25.0 * n * factor * logBD:
        raise ThresholdError(
            "s/N >= 25 n log(rho) log(BD)",
            f"s/N = {s / N:.3g} < {25.0 * n * factor * logBD:.3g}")
    return math.exp(-0.25 * s / (N * logBD))


def schroedinger_cartan_bound(S: float, T: float, J: int, r_infty: int,
                              n: int, d: int, p: int, r: int, tau: float,
                              rho_sup: float = 1.0) -> dict:
    """Threshold verdicts and the e^{-T} bound of the operator Cartan step.

    Verifies S/T >= 1200 * 3^d * J * r_infty^(d + 2 tau) and
    S >= max(10000 J 3^d r_infty^(d+2 tau) n max(1, log rho),
             2 (p+4) log 2 + 10 r^tau); returns the verdict list and e^{-T}.
    """
    lhs1 = S / T
    rhs1 = 1200.0 * 3.0 ** d * J * r_infty ** (d + 2.0 * tau)
    factor = max(1.0, math.log(rho_sup)) if rho_sup > 0 else 1.0
    rhs2a = 10000.0 * J * 3.0 ** d * r_infty ** (d + 2.0 * tau) * n * factor
    rhs2b = 2.0 * (p + 4) * math.log(2.0) + 10.0 * r ** tau
    verdicts = [
        ("vii:S-over-T", lhs1 >= rhs1, lhs1, rhs1),
        ("vii:S-lower-a", S >= rhs2a, S, rhs2a),
        ("vii:S-lower-b", S >= rhs2b, S, rhs2b),
    ]
    ok = all(v[1] for v in verdicts)
    return {"ok": ok, "verdicts": verdicts, "bound": math.exp(-T)}


def schroedinger_event_measure(op_family, E, S: float, p: int, samples: int,
                               seed: int) -> tuple:
    """Monte Carlo measure of {omega : ||(H(omega)-E)^{-1}|| >= 2^{-p} e^S}.

    op_family(omega_vector) must return a dense matrix; omega entries are
    uniform on [-1/2, 1/2]. As in the matrix case the inverse-norm event is
    measured. Returns (p_hat, stderr).
    """
    gen = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
    # compare in logs: 1/smin >= 2^-p e^S  <=>  log smin <= p log 2 - S
    log_thr = p * math.log(2.0) - S
    hits = 0
    nvar = op_family.n_variables
    for _ in range(samples):
        omega = gen.uniform(-0.5, 0.5, size=nvar)
        mat = op_family(omega)
        smin = np.linalg.svd(mat - E * np.eye(mat.shape[0]),
                             compute_uv=False)[-1]
        if math.log(max(smin, 1e-300)) <= log_thr:
            hits += 1
    ph = hits / samples
    return ph, math.sqrt(ph * (1.0 - ph) / samples)
