"""Dense restrictions H^Xi = Delta^Xi + V and their spectral data.

The restriction is the entrywise truncation (Dirichlet): couplings leaving
the region are dropped, no boundary terms are added.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import CapacityError, ContainmentError, SingularEnergyError
from .lattice import Box, Region

CAPACITY = 4001  # sites per dense eigensolve (d=1 r<=2000, d=2 r<=30)

_C0_DEFAULT = 0.25  # calibrated Combes-Thomas prefactor, see combes_thomas_rate


class SpectralData:
    """Eigenvalues/eigenvectors of a box operator, validated on build."""

    def __init__(self, eigenvalues, eigenvectors):
        self.eigenvalues = eigenvalues
        self.eigenvectors = eigenvectors


class BoxOperator:
    """H restricted to a region; real-symmetric or complex diagonal."""

    def __init__(self, region: Region, matrix: np.ndarray, kind: str,
                 lam: float = 0.0, box: Box | None = None):
        self.region = region
        self.matrix = matrix
        self.kind = kind  # "real" | "complex"
        self.lam = lam
        self.box = box  # set when the region is a full cube
        self._spectral = None

    @property
    def n(self) -> int:
        return len(self.region)

    @property
    def d(self) -> int:
        return self.region.d

    @property
    def radius(self) -> int:
        if self.box is None:
            raise ValueError("operator region is not a box")
        return self.box.radius

    def spectral(self) -> SpectralData:
        if self._spectral is None:
            if self.kind == "real":
                w, v = np.linalg.eigh(self.matrix)
            else:
                w, v = np.linalg.eig(self.matrix)
            self._spectral = SpectralData(w, v)
        return self._spectral

    def norm(self) -> float:
        if self.kind == "real":
            w = self.spectral().eigenvalues
            return float(max(abs(w[0]), abs(w[-1])))
        return float(np.linalg.norm(self.matrix, 2))

    def restrict(self, sub) -> "BoxOperator":
        """Dirichlet restriction to a sub-box/sub-region (a submatrix)."""
        box = sub if isinstance(sub, Box) else None
        sub = Region.from_box(sub) if isinstance(sub, Box) else sub
        try:
            idx = np.array([self.region.index[s] for s in sub.sites])
        except KeyError as exc:
            raise ContainmentError(f"site {exc.args[0]} not in the region") from None
        return BoxOperator(sub, self.matrix[np.ix_(idx, idx)], self.kind,
                           self.lam, box)


def _adjacency(region: Region) -> np.ndarray:
    n = len(region)
    mat = np.zeros((n, n))
    d = region.d
    for i, s in enumerate(region.sites):
        for j_axis in range(d):
            nb = list(s)
            nb[j_axis] += 1
            k = region.index.get(tuple(nb))
            if k is not None:
                mat[i, k] = 1.0
                mat[k, i] = 1.0
    return mat


def assemble(target, pot, field, check_capacity: bool = True) -> BoxOperator:
    """Build H = Delta + V on a box or region.

    `pot` provides values_on_region(field, region); complex potentials give
    a complex operator.
    """
    box = target if isinstance(target, Box) else None
    region = Region.from_box(target) if isinstance(target, Box) else target
    if check_capacity and len(region) > CAPACITY:
        raise CapacityError(
            f"{len(region)} sites exceed the dense-solve ceiling {CAPACITY}"
        )
    mat = _adjacency(region)
    diag = pot.values_on_region(field, region)
    kind = "real"
    if np.iscomplexobj(diag):
        mat = mat.astype(complex)
        kind = "complex"
    mat[np.diag_indices_from(mat)] = diag
    lam = getattr(pot, "lam", 0.0)
    return BoxOperator(region, mat, kind, lam, box)


def from_diagonal(region_or_box, diag) -> BoxOperator:
    """Operator with an explicit diagonal (used by synthetic tests)."""

    class _Direct:
        lam = 0.0

        def values_on_region(self, field, region):
            return np.asarray(diag)

    return assemble(region_or_box, _Direct(), None)


class FreePotential:
    """V = 0."""

    lam = 0.0

    def values_on_region(self, field, region):
        return np.zeros(len(region))

    def sup_bound(self, d):
        return 0.0


def resolvent_norm(op: BoxOperator, E, rel_tol: float = 1e-12) -> float:
    """||(H - E)^{-1}|| = 1/dist(E, sigma(H)) for normal H.

    Raises SingularEnergyError when E is in the spectrum to within
    rel_tol * max(1, ||H||).
    """
    scale = max(1.0, _matrix_scale(op))
    if op.kind == "real" and np.isrealobj(np.asarray(E)):
        w = op.spectral().eigenvalues
        dist = float(np.min(np.abs(w - E)))
    else:
        # smallest singular value equals 1/||(H-E)^{-1}|| for any matrix
        dist = float(np.linalg.svd(op.matrix - E * np.eye(op.n),
                                   compute_uv=False)[-1])
    if dist <= rel_tol * scale:
        raise SingularEnergyError(f"E={E} is within {dist:.3e} of the spectrum")
    return 1.0 / dist


def _matrix_scale(op: BoxOperator) -> float:
    return float(np.abs(op.matrix).sum(axis=1).max())


def green_matrix(op: BoxOperator, E) -> np.ndarray:
    """(H - E)^{-1} as a dense matrix (raises on singular E)."""
    resolvent_norm(op, E)  # singularity guard
    if op.kind == "real" and np.isrealobj(np.asarray(E)):
        sd = op.spectral()
        w, v = sd.eigenvalues, sd.eigenvectors
        return (v / (w - E)) @ v.T
    return np.linalg.solve(op.matrix - E * np.eye(op.n), np.eye(op.n))


def green_entry(op: BoxOperator, E, x, y):
    """<e_x, (H - E)^{-1} e_y> by spectral decomposition / linear solve."""
    i, j = op.region.index[x], op.region.index[y]
    resolvent_norm(op, E)
    if op.kind == "real" and np.isrealobj(np.asarray(E)):
        sd = op.spectral()
        w, v = sd.eigenvalues, sd.eigenvectors
        return float(np.sum(v[i] * v[j] / (w - E)))
    rhs = np.zeros(op.n, dtype=complex)
    rhs[j] = 1.0
    sol = np.linalg.solve(op.matrix - E * np.eye(op.n), rhs)
    return complex(sol[i])


class _SignedLog:
    """Scalar carried as (sign, log magnitude); exact under sign bookkeeping."""

    __slots__ = ("sign", "log")

    def __init__(self, sign, log):
        self.sign = sign
        self.log = log


def _sl_combine(a_val, a: _SignedLog, b: _SignedLog) -> _SignedLog:
    """a_val * a - b in signed-log arithmetic."""
    if a_val == 0.0:
        return _SignedLog(-b.sign, b.log)
    s1 = a.sign * (1.0 if a_val > 0 else -1.0)
    l1 = a.log + math.log(abs(a_val))
    s2, l2 = -b.sign, b.log
    if s1 == 0.0:
        return _SignedLog(s2, l2)
    if s2 == 0.0:
        return _SignedLog(s1, l1)
    m = max(l1, l2)
    v = s1 * math.exp(l1 - m) + s2 * math.exp(l2 - m)
    if v == 0.0:
        return _SignedLog(0.0, -math.inf)
    return _SignedLog(math.copysign(1.0, v), m + math.log(abs(v)))


def tridiag_log_green(diag_shifted: np.ndarray):
    """Log-magnitudes of the inverse of a tridiagonal matrix with unit
    off-diagonals and diagonal `diag_shifted` (already H - E).

    Returns (ltheta, lphi, ldet): log|leading minors| theta_0..theta_N,
    log|trailing minors| phi_1..phi_{N+1}, and log|det|; then
    log|G(i, j)| = ltheta[i] + lphi[j + 1] - ldet for i <= j (0-based).
    Works entirely in log space, so entries far below the float underflow
    threshold keep full relative accuracy (no cancellation occurs when E
    lies outside the spectrum, the regime that needs this path).
    """
    a = np.asarray(diag_shifted, dtype=float)
    n = len(a)
    ltheta = np.empty(n + 1)
    th_prev, th = _SignedLog(0.0, -math.inf), _SignedLog(1.0, 0.0)
    ltheta[0] = 0.0
    for k in range(n):
        th_prev, th = th, _sl_combine(a[k], th, th_prev)
        ltheta[k + 1] = th.log
    ldet = th.log
    if th.sign == 0.0 or ldet == -math.inf:
        raise SingularEnergyError("tridiagonal determinant vanished")
    lphi = np.empty(n + 1)
    ph_next, ph = _SignedLog(0.0, -math.inf), _SignedLog(1.0, 0.0)
    lphi[n] = 0.0
    for k in range(n - 1, -1, -1):
        ph_next, ph = ph, _sl_combine(a[k], ph, ph_next)
        lphi[k] = ph.log
    # ltheta[i] indexes theta_i (minor of rows 0..i-1); lphi[j] = phi_{j}
    return ltheta, lphi, ldet


def tridiag_abs_green_matrix_log(diag_shifted: np.ndarray) -> np.ndarray:
    """(N, N) array of log|G(i, j)| for the shifted tridiagonal operator."""
    ltheta, lphi, ldet = tridiag_log_green(diag_shifted)
    n = len(diag_shifted)
    i = np.arange(n)
    upper = ltheta[i][:, None] + lphi[i + 1][None, :] - ldet
    return np.minimum(upper, upper.T)  # |G| symmetric; formula valid i <= j


def combes_thomas_rate(delta: float, c0: float = _C0_DEFAULT) -> float:
    """Off-diagonal decay rate c0 * log(1 + delta) at spectral distance delta.

    c0 is a calibrated stand-in for the estimate's unspecified universal
    constant; the suitability contract behind it is tested, not proved.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    return c0 * math.log(1.0 + delta)
