"""Potentials: alloy sums, truncation control, correlated families, and the
complex-analytic extension."""

import math

import numpy as np
import pytest

from loclab import disorder, potential
from loclab import lattice as lat
from loclab.errors import ConfigError, ContainmentError, DomainError


def field_on(R, seed=0, d=1):
    return disorder.sample(lat.Region.from_box(lat.Box((0,) * d, R)), seed)


def test_alloy_zero_field():
    ss = potential.SingleSite("alt-exp", 1.0)
    f = field_on(10)
    zero = f.with_values({s: 0.0 for s in f.support.sites})
    v, _ = potential.eval_alloy(ss, zero, (0,), 3.0, 5)
    assert v == 0.0


def test_alloy_delta_profile():
    ss = potential.SingleSite("delta", 1.0)
    f = field_on(5)
    f = f.with_values({(0,): 0.5})
    v, tail = potential.eval_alloy(ss, f, (0,), 2.0, 5)
    assert v == 1.0 and tail == 0.0


def test_alloy_truncation_bound_scale():
    ss = potential.SingleSite("alt-exp", 1.0)
    f = field_on(30)
    _, tail = potential.eval_alloy(ss, f, (0,), 1.0, 10)
    # geometric-series bound is within a small factor of e^-10
    assert 0 < tail < 10 * math.exp(-10)


def test_alloy_truncation_monotone():
    ss = potential.SingleSite("alt-exp", 0.7)
    rng = np.random.default_rng(0)
    for seed in range(5):
        f = field_on(40, seed)
        vals = {}
        for R_t in (6, 10, 14):
            vals[R_t], tail = potential.eval_alloy(ss, f, (2,), 3.0, R_t)
        t6 = potential.eval_alloy(ss, f, (2,), 3.0, 6)[1]
        assert abs(vals[10] - vals[6]) <= t6
        assert abs(vals[14] - vals[10]) <= \
            potential.eval_alloy(ss, f, (2,), 3.0, 10)[1]


def test_alloy_support_too_small():
    ss = potential.SingleSite("alt-exp", 1.0)
    f = field_on(4)
    with pytest.raises(ContainmentError):
        potential.eval_alloy(ss, f, (0,), 1.0, 6)


def test_vectorized_matches_scalar_d2():
    ss = potential.SingleSite("alt-exp", 1.0)
    f = field_on(8, seed=3, d=2)
    pot = potential.AlloyPotential(ss, 5.0, 4)
    reg = lat.Region.from_box(lat.Box((0, 0), 4))
    vec = pot.values_on_region(f, reg)
    for i, x in enumerate(reg.sites):
        v, _ = potential.eval_alloy(ss, f, x, 5.0, 4)
        assert abs(vec[i] - v) < 1e-12


def test_profile_parsing():
    ss = potential.parse_profile("finite:0:1.0;1:-0.3;-1:-0.3", 1.0, 1)
    assert ss.phi((0,)) == 1.0 and ss.phi((1,)) == -0.3 and ss.phi((5,)) == 0.0
    with pytest.raises(ConfigError):
        potential.parse_profile("finite:1:0.5", 1.0, 1)  # phi(0) = 0
    with pytest.raises(ConfigError):
        potential.parse_profile("gaussian", 1.0, 1)
    with pytest.raises(ConfigError):
        potential.parse_profile("finite:0:1.0;3:0.9", 1.0, 1)  # decay violated


def test_nonmonotone_witness():
    """Sign-changing profile: increasing omega can decrease V."""
    ss = potential.SingleSite("alt-exp", 1.0)
    f = field_on(6)
    low = f.with_values({s: 0.0 for s in f.support.sites})
    # raise omega only at a site where phi < 0
    high = low.with_values({(1,): 0.5})
    v_low = potential.eval_alloy(ss, low, (0,), 1.0, 5)[0]
    v_high = potential.eval_alloy(ss, high, (0,), 1.0, 5)[0]
    assert all(high.value(s) >= low.value(s) for s in f.support.sites)
    assert v_high < v_low


def test_correlated_from_alloy_agrees():
    ss = potential.SingleSite("alt-exp", 1.0)
    cp = potential.CorrelatedPotential.from_alloy(ss, 2.0, 8)
    f = field_on(12, seed=5)
    direct, _ = potential.eval_alloy(ss, f, (1,), 2.0, 8)
    series, _ = potential.eval_correlated(cp, f, (1,), 8)
    assert abs(direct - series) < 1e-12


def test_doubling_map_matches_direct():
    cp = potential.CorrelatedPotential.doubling_map(3.0, 20)
    f = field_on(25, seed=8)
    got, tail = potential.eval_correlated(cp, f, (0,), 20)
    direct = 3.0 * math.sin(
        2 * math.pi * sum(f.value((j,)) / 2 ** j for j in range(1, 21)))
    assert abs(got - direct) < 1e-9
    assert tail == 3.0 * math.exp(-cp.c * 20)


def test_shift_covariance():
    ss = potential.SingleSite("alt-exp", 1.0)
    f = field_on(20, seed=2)
    x = (3,)
    shifted_vals = {(n,): f.value((n + 3,)) for n in range(-15, 16)}
    g = disorder.DisorderField(lat.Region(shifted_vals), shifted_vals, 0,
                               "uniform")
    v1 = potential.eval_alloy(ss, f, x, 2.0, 10)[0]
    v2 = potential.eval_alloy(ss, g, (0,), 2.0, 10)[0]
    assert abs(v1 - v2) < 1e-14


def test_complex_restriction_to_real():
    ss = potential.SingleSite("alt-exp", 1.0)
    cp = potential.CorrelatedPotential.from_alloy(ss, 2.0, 6)
    f = field_on(8, seed=4)
    z = {s: complex(v) for s, v in f.values.items()}
    got = potential.eval_complex(cp, z, (0,), 6)
    want = potential.eval_correlated(cp, f, (0,), 6)[0]
    assert abs(got - want) < 1e-12


def test_complex_domain_error():
    ss = potential.SingleSite("alt-exp", 1.0)
    cp = potential.CorrelatedPotential.from_alloy(ss, 1.0, 3)
    z = {s: 0.0j for s in lat.Box((0,), 9).sites()}
    z[(1,)] = 6.0 + 0.0j
    with pytest.raises(DomainError):
        potential.eval_complex(cp, z, (0,), 3)


def test_complex_linearity_alloy():
    """Alloy extension is affine in each coordinate: finite difference
    recovers lambda * phi(m)."""
    ss = potential.SingleSite("alt-exp", 1.0)
    lam = 2.0
    cp = potential.CorrelatedPotential.from_alloy(ss, lam, 6)
    base = {s: 0.1 + 0.05j for s in lat.Box((0,), 12).sites()}
    for m in ((0,), (1,), (-2,)):
        zp = dict(base)
        zm = dict(base)
        zp[m] = base[m] + 0.5
        zm[m] = base[m] - 0.5
        slope = (potential.eval_complex(cp, zp, (0,), 6)
                 - potential.eval_complex(cp, zm, (0,), 6))
        assert abs(slope - lam * ss.phi(m)) < 1e-10


def test_complex_sup_bound():
    """|V| <= lam * 6 * sum|phi| on sampled disk points."""
    ss = potential.SingleSite("alt-exp", 1.0)
    lam = 1.5
    cp = potential.CorrelatedPotential.from_alloy(ss, lam, 5)
    rng = np.random.default_rng(0)
    cap = lam * 6.0 * ss.abs_sum(1, 5)
    for _ in range(50):
        z = {s: complex(*rng.uniform(-4, 4, 2)) for s in lat.Box((0,), 11).sites()}
        if any(abs(v) >= 6 for v in z.values()):
            continue
        assert abs(potential.eval_complex(cp, z, (0,), 5)) <= cap + 1e-9


def test_cauchy_riemann_residual():
    """Central differences along real and imaginary axes agree (analyticity)."""
    cp = potential.CorrelatedPotential.doubling_map(1.0, 10)
    base = {s: 0.2 + 0.1j for s in lat.Box((0,), 11).sites()}
    h = 1e-4
    site = (3,)

    def at(dz):
        z = dict(base)
        z[site] = base[site] + dz
        return potential.eval_complex(cp, z, (0,), 10)

    d_re = (at(h) - at(-h)) / (2 * h)
    d_im = (at(1j * h) - at(-1j * h)) / (2j * h)
    assert abs(d_re - d_im) < 1e-6


def test_default_truncation_formula():
    assert potential.default_truncation(1.0, 1.0) == 30
    assert potential.default_truncation(math.e ** 2, 1.0) == 32
    assert potential.default_truncation(1e4, 2.0) == math.ceil(
        (math.log(1e4) + 30) / 2.0)
