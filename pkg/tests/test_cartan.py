"""Cartan bounds vs Monte Carlo, determinant inequalities, Schur pipeline."""

import math

import numpy as np
import pytest

from loclab import cartan
from loclab.errors import DomainError, ThresholdError


def test_bound_1d_values():
    # eps = e^-1, s = 3: 30 e^3 e^-3 = 30
    assert cartan.cartan_bound_1d(math.exp(-1), 3.0) == pytest.approx(30.0)
    assert cartan.cartan_bound_1d(0.5, 1e6) < 1e-300 * 1e300  # decays to 0
    with pytest.raises(DomainError):
        cartan.cartan_bound_1d(1.5, 1.0)
    with pytest.raises(DomainError):
        cartan.cartan_bound_1d(0.5, -1.0)


def test_bound_nd_reduces_and_monotone():
    # n=1 plug-in of the displayed formula: 60 e^3 * 1 * 2^1 = 120 e^3 times
    # the exponential (the 2^n factor carries the volume of [-1,1]^n)
    eps = 0.3
    assert cartan.cartan_bound_nd(1, eps, 2.0) == pytest.approx(
        60.0 * math.e ** 3 * 2.0 * math.exp(-2.0 / math.log(1 / eps)))
    assert cartan.cartan_bound_nd(1, eps, 4.0) < cartan.cartan_bound_nd(
        1, eps, 2.0)
    assert cartan.cartan_bound_nd(3, eps, 2.0) > cartan.cartan_bound_nd(
        2, eps, 2.0)


def test_scalar_family_exact_interval():
    """(x - 2)/(2e + 2) on [-1, 1]: sublevel measure known in closed form."""
    fam = cartan.product_family([2.0])
    assert fam.eps == pytest.approx(2.0 / (2 * math.e + 2))
    for s in (2.0, 3.0):
        radius = (2 * math.e + 2) * math.exp(-s)
        lo, hi = 2.0 - radius, 2.0 + radius
        exact = max(0.0, min(hi, 1.0) - max(lo, -1.0))
        meas, se = fam.sublevel_measure(s, 200_000, seed=5)
        assert abs(meas - exact) <= 3 * se + 1e-4
        assert exact <= cartan.cartan_bound_1d(fam.eps, s)


def test_scalar_families_dominated():
    """Monte Carlo sublevel measure - 3 sigma <= Cartan bound, n <= 3."""
    for n in (1, 2, 3):
        fam = cartan.product_family([2.0] * n)
        for s in (2.0, 4.0, 8.0):
            bound = (cartan.cartan_bound_1d(fam.eps, s) if n == 1
                     else cartan.cartan_bound_nd(n, fam.eps, s))
            meas, se = fam.sublevel_measure(s, 300_000, seed=10 * n + int(s))
            assert meas - 3 * se <= bound


def test_det_bounds_identity():
    out = cartan.det_bounds(np.eye(4))
    assert out["absdet"] == pytest.approx(1.0)
    assert out["i"] and out["ii"] and out["iii"]


def test_det_bounds_hand_example():
    out = cartan.det_bounds(np.diag([2.0, 0.5]))
    assert out["absdet"] == pytest.approx(1.0)
    assert out["norm"] == pytest.approx(2.0)
    assert out["inv_norm"] == pytest.approx(2.0)
    # (iii): 2 <= 2 * 2 / 1 = 4
    assert out["iii"]


def test_det_bounds_random_battery():
    rng = np.random.default_rng(0)
    for _ in range(2000):
        N = int(rng.integers(1, 11))
        A = rng.standard_normal((N, N))
        if rng.random() < 0.3:
            A = A + 1j * rng.standard_normal((N, N))
        out = cartan.det_bounds(A)
        assert out["i"]
        if out["invertible"]:
            assert out["ii"] and out["iii"]


def test_schur_block_diagonal():
    A = np.diag([2.0, 3.0])
    D = np.diag([4.0])
    Z = np.zeros((2, 1))
    out = cartan.schur_complement(A, Z, Z.T, D)
    assert np.allclose(out["S"], D)
    assert out["residual"] < 1e-12


def test_schur_random_battery():
    rng = np.random.default_rng(1)
    for _ in range(500):
        n = int(rng.integers(2, 9))
        k = int(rng.integers(1, n))
        M = rng.standard_normal((n, n))
        A, B = M[:k, :k], M[:k, k:]
        C, D = M[k:, :k], M[k:, k:]
        try:
            out = cartan.schur_complement(A, B, C, D)
        except np.linalg.LinAlgError:
            continue
        assert out["residual"] <= 1e-9
        assert out["bddschur1"] and out["bddschur2"]


def test_matrix_family_witness_validation():
    with pytest.raises(ThresholdError):
        cartan.AnalyticMatrixFamily(lambda x: np.zeros((x.shape[1], 2, 2)),
                                    n=2, N=2, B=1.0, D_bound=2.0,
                                    x0=np.zeros(2))  # B < N


def test_matrix_cartan_threshold_and_bound():
    fam = cartan.diagonal_family([2.0, 2.0])
    logBD = math.log(fam.B * fam.D_bound)
    s_min = 20.0 * fam.N * fam.n * logBD
    with pytest.raises(ThresholdError):
        cartan.matrix_cartan_bound(fam, 0.9 * s_min)
    b = cartan.matrix_cartan_bound(fam, s_min)
    assert b == pytest.approx(math.exp(-0.5 * s_min / (fam.N * logBD)))
    # density variant at rho = 1 uses max(1, log rho) = 1 in the threshold
    s_rho = 25.0 * fam.N * fam.n * logBD
    b2 = cartan.matrix_cartan_bound(fam, s_rho, rho_sup=1.0)
    assert b2 == pytest.approx(math.exp(-0.25 * s_rho / (fam.N * logBD)))


def test_matrix_cartan_density_threshold_form():
    """At the threshold with log rho >= 1 the bound takes the stated form."""
    fam = cartan.diagonal_family([2.0, 2.0])
    rho = math.e ** 2
    logBD = math.log(fam.B * fam.D_bound)
    s = 25.0 * fam.N * fam.n * math.log(rho) * logBD
    b = cartan.matrix_cartan_bound(fam, s, rho_sup=rho)
    assert b == pytest.approx(math.exp(-6.25 * fam.n * math.log(rho)))


def test_matrix_event_dominated():
    for shifts in ([2.0, 2.0], [2.0, 2.2, 1.8, 2.1]):
        fam = cartan.diagonal_family(shifts)
        s = 20.0 * fam.N * fam.n * math.log(fam.B * fam.D_bound)
        bound = cartan.matrix_cartan_bound(fam, s)
        meas, se = fam.event_measure(s, 20_000, seed=3)
        assert meas - 3 * se <= bound


def test_matrix_event_nontrivial_family():
    """A family singular inside the cube: the event has positive measure at
    small s, still below the (then looser) measured comparison."""
    fam = cartan.diagonal_family([0.15, -0.12], B=8.0)
    meas, se = fam.event_measure(2.0, 50_000, seed=4)
    # event = some coordinate within e^-s of its shift (windows interior to
    # the unit cube): 1 - (1 - 2 e^-s)^2
    exact = 1.0 - (1.0 - 2.0 * math.exp(-2.0)) ** 2
    assert meas > 0
    assert abs(meas - exact) < 10 * max(se, 1e-3)


def test_schroedinger_threshold_verdicts():
    out = cartan.schroedinger_cartan_bound(S=3e6, T=2.0, J=1, r_infty=4,
                                           n=5, d=1, p=3, r=2, tau=0.5)
    assert out["bound"] == pytest.approx(math.exp(-2.0))
    assert out["ok"]
    # S/T ratio constraint: enlarging T with S fixed must eventually fail
    out2 = cartan.schroedinger_cartan_bound(S=2e6, T=1e5, J=1, r_infty=4,
                                            n=5, d=1, p=3, r=2, tau=0.5)
    assert not out2["ok"]
    names = [v[0] for v in out2["verdicts"] if not v[1]]
    assert "vii:S-over-T" in names


def test_schroedinger_minimal_S_formula():
    """d=1, J=1, r_inf=4, tau=1/2: S/T >= 1200*3*16 = 57600."""
    out = cartan.schroedinger_cartan_bound(S=57600.0 * 2, T=2.0, J=1,
                                           r_infty=4, n=1, d=1, p=3, r=2,
                                           tau=0.5)
    assert out["verdicts"][0][3] == pytest.approx(57600.0)
