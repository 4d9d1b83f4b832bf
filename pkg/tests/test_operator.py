"""Operator assembly, spectral data quality, resolvent/Green identities."""

import math

import numpy as np
import pytest

from loclab import operator
from loclab import lattice as lat
from loclab.errors import CapacityError, SingularEnergyError
from loclab.experiment import ExperimentSetup


def test_free_tridiagonal():
    op = operator.assemble(lat.Box((0,), 1), operator.FreePotential(), None)
    assert np.array_equal(op.matrix,
                          np.array([[0., 1., 0.], [1., 0., 1.], [0., 1., 0.]]))


def test_free_path_eigenvalues():
    N = 17
    op = operator.assemble(lat.Box((0,), (N - 1) // 2),
                           operator.FreePotential(), None)
    w = np.sort(op.spectral().eigenvalues)
    want = np.sort(2.0 * np.cos(np.arange(1, N + 1) * np.pi / (N + 1)))
    assert np.allclose(w, want, atol=1e-12)


def test_laplacian_norm_bound():
    for d, R in ((1, 20), (2, 5)):
        op = operator.assemble(lat.Box((0,) * d, R),
                               operator.FreePotential(), None)
        assert op.norm() <= 2 * d + 1e-12


def test_gershgorin_at_large_coupling():
    setup = ExperimentSetup(d=1, lam=1e5, profile="delta", truncation=2)
    field, op = setup.sample_operator(6, 3)
    w = np.sort(op.spectral().eigenvalues)
    diag = np.sort(np.diag(op.matrix))
    assert np.max(np.abs(w - diag)) <= 2.0  # 2d with d=1


def test_operator_norm_bound_with_potential():
    setup = ExperimentSetup(d=1, lam=50.0, truncation=10)
    field, op = setup.sample_operator(15, 4)
    assert op.norm() <= 2 * 1 + setup.potential().sup_bound(1) + 1e-9


def test_spectral_quality():
    setup = ExperimentSetup(d=1, lam=10.0, truncation=8)
    _, op = setup.sample_operator(40, 5)
    sd = op.spectral()
    H, w, v = op.matrix, sd.eigenvalues, sd.eigenvectors
    resid = np.max(np.linalg.norm(H @ v - v * w, axis=0))
    assert resid <= 1e-10 * max(1.0, op.norm())
    assert np.max(np.abs(v.T @ v - np.eye(op.n))) <= 1e-10


def test_resolvent_free_n3():
    op = operator.assemble(lat.Box((0,), 1), operator.FreePotential(), None)
    assert abs(operator.resolvent_norm(op, 3.0) - 1 / (3 - math.sqrt(2))) < 1e-12


def test_resolvent_far_energy():
    setup = ExperimentSetup(d=1, lam=5.0, truncation=5)
    _, op = setup.sample_operator(10, 1)
    E = op.norm() + 1.5
    assert operator.resolvent_norm(op, E) <= 1.0


def test_resolvent_singular_energy():
    op = operator.assemble(lat.Box((0,), 2), operator.FreePotential(), None)
    E = float(np.sort(op.spectral().eigenvalues)[0])
    with pytest.raises(SingularEnergyError):
        operator.resolvent_norm(op, E)


def test_resolvent_vs_dense_inverse():
    rng = np.random.default_rng(0)
    setup = ExperimentSetup(d=1, lam=8.0, truncation=5)
    for k in range(30):
        _, op = setup.sample_operator(int(rng.integers(3, 15)), k)
        E = float(rng.uniform(-6, 6))
        try:
            got = operator.resolvent_norm(op, E)
        except SingularEnergyError:
            continue
        want = np.linalg.norm(
            np.linalg.inv(op.matrix - E * np.eye(op.n)), 2)
        assert abs(got - want) / want < 1e-8


def test_spectral_mapping_identity():
    setup = ExperimentSetup(d=1, lam=8.0, truncation=5)
    rng = np.random.default_rng(3)
    for k in range(20):
        _, op = setup.sample_operator(10, k)
        E = float(rng.uniform(-5, 5))
        w = op.spectral().eigenvalues
        dist = float(np.min(np.abs(w - E)))
        if dist < 1e-6:
            continue
        assert abs(operator.resolvent_norm(op, E) * dist - 1.0) < 1e-10


def test_green_entry_1x1():
    op = operator.from_diagonal(lat.Box((0,), 0), [2.5])
    assert abs(operator.green_entry(op, 1.0, (0,), (0,)) - 1 / 1.5) < 1e-14


def test_green_symmetry_and_solve():
    setup = ExperimentSetup(d=2, lam=5.0, truncation=3)
    _, op = setup.sample_operator(2, 7)
    E = 0.37
    G = operator.green_matrix(op, E)
    assert np.max(np.abs(G - G.T)) < 1e-10
    resid = np.max(np.abs((op.matrix - E * np.eye(op.n)) @ G - np.eye(op.n)))
    assert resid < 1e-9
    x, y = op.region.sites[0], op.region.sites[5]
    g = operator.green_entry(op, E, x, y)
    assert abs(g - G[op.region.index[x], op.region.index[y]]) < 1e-12


def test_restriction_is_submatrix():
    """Dirichlet restriction = entrywise truncation: restricting the big
    operator equals assembling directly on the sub-box from the same field."""
    setup = ExperimentSetup(d=1, lam=3.0, truncation=4)
    field, op = setup.sample_operator(10, 2)
    sub = op.restrict(lat.Box((2,), 3))
    direct = operator.assemble(lat.Box((2,), 3), setup.potential(), field)
    assert sub.region.sites == direct.region.sites
    assert np.array_equal(sub.matrix, direct.matrix)


def test_capacity_error():
    with pytest.raises(CapacityError):
        operator.assemble(lat.Box((0,), 3000), operator.FreePotential(), None)


def test_complex_operator_resolvent():
    diag = np.array([1.0 + 0.5j, -0.3 + 0.2j, 0.8 - 1.0j])
    op = operator.from_diagonal(lat.Box((0,), 1), diag)
    assert op.kind == "complex"
    E = 5.0
    got = operator.resolvent_norm(op, E)
    want = np.linalg.norm(np.linalg.inv(op.matrix - E * np.eye(3)), 2)
    assert abs(got - want) / want < 1e-10


def test_combes_thomas_rate_shape():
    assert operator.combes_thomas_rate(math.e - 1.0) == pytest.approx(0.25)
    assert operator.combes_thomas_rate(1e-9) < 1e-9
    with pytest.raises(ValueError):
        operator.combes_thomas_rate(0.0)


def test_combes_thomas_calibration():
    """Measured Green decay beats c0 log(1+delta) in >= 99% of trials."""
    from loclab.green import SuitabilityParams, check_suitable

    setup = ExperimentSetup(d=1, lam=50.0, truncation=10)
    r = 12
    hits = total = 0
    for k in range(500):
        _, op = setup.sample_operator(r, k)
        E = op.norm() * 1.05 + 1.0  # outside with a real gap
        delta = 1.0 / operator.resolvent_norm(op, E)
        gamma = operator.combes_thomas_rate(delta)
        rep = check_suitable(op, E, SuitabilityParams(gamma, 0.5, 3))
        total += 1
        hits += rep.passed
    assert hits / total >= 0.99


def test_tridiag_recursion_vs_dense():
    rng = np.random.default_rng(1)
    for _ in range(40):
        n = int(rng.integers(3, 40))
        diag = rng.uniform(-5, 5, n)
        E = float(rng.choice([-1, 1]) * rng.uniform(7.6, 20))
        T = (np.diag(diag) + np.diag(np.ones(n - 1), 1)
             + np.diag(np.ones(n - 1), -1))
        G = np.linalg.inv(T - E * np.eye(n))
        L = operator.tridiag_abs_green_matrix_log(diag - E)
        rel = np.max(np.abs(np.exp(L) - np.abs(G))
                     / np.maximum(np.abs(G), 1e-290))
        assert rel < 1e-8


def test_tridiag_recursion_free_chebyshev():
    """Free 1-d Green function: the minor recursion reproduces the closed
    form G(i,j) = -U_i(E/2) U_{n-1-j}(E/2) / (U_n(E/2) * ...) magnitudes via
    the dense inverse (cross-check at representable energies)."""
    n = 21
    E = 3.0
    T = np.diag(np.zeros(n)) + np.diag(np.ones(n - 1), 1) \
        + np.diag(np.ones(n - 1), -1)
    G = np.linalg.inv(T - E * np.eye(n))
    L = operator.tridiag_abs_green_matrix_log(np.zeros(n) - E)
    assert np.max(np.abs(np.exp(L) - np.abs(G))) < 1e-12
