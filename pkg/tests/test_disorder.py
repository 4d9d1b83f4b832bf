"""Disorder fields: determinism, consistency, resampling, concentration."""

import numpy as np
import pytest

from loclab import disorder
from loclab import lattice as lat
from loclab.errors import ConfigError, ContainmentError


def box_region(R, d=1):
    return lat.Region.from_box(lat.Box((0,) * d, R))


def test_same_seed_identical():
    sup = box_region(30)
    assert disorder.sample(sup, 5).values == disorder.sample(sup, 5).values


def test_different_seed_differs():
    sup = box_region(30)
    a = disorder.sample(sup, 5)
    b = disorder.sample(sup, 6)
    assert a.values != b.values


def test_values_in_range():
    f = disorder.sample(box_region(200), 1)
    assert all(-0.5 <= v <= 0.5 for v in f.values.values())


def test_fields_are_consistent_extensions():
    big = disorder.sample(box_region(50), 9)
    small = disorder.sample(box_region(7), 9)
    assert all(small.value(s) == big.value(s) for s in small.support.sites)


def test_order_independence():
    sup_sorted = lat.Region([(i,) for i in range(-10, 11)])
    sup_other = lat.Region([(i,) for i in range(10, -11, -1)])
    a = disorder.sample(sup_sorted, 4)
    b = disorder.sample(sup_other, 4)
    assert a.values == b.values


def test_density_changes_stream():
    disorder.register_density("tent", lambda g: 0.5 * (g.uniform(-1, 1)
                                                       + g.uniform(-1, 1)) / 2,
                              sup_norm=2.0)
    sup = box_region(10)
    assert disorder.sample(sup, 3).values != \
        disorder.sample(sup, 3, "tent").values


def test_unknown_density():
    with pytest.raises(ConfigError):
        disorder.sample(box_region(3), 0, "no-such-density")


def test_evaluation_outside_support():
    f = disorder.sample(box_region(3), 0)
    with pytest.raises(ContainmentError):
        f.value((4,))


def test_uniform_moments():
    f = disorder.sample(box_region(50000), 12)
    vals = np.fromiter(f.values.values(), dtype=float)
    n = len(vals)
    assert abs(vals.mean()) <= 3.0 * (1.0 / np.sqrt(12.0)) / np.sqrt(n)


def test_uniform_dkw():
    """Empirical CDF within 0.02 of the uniform CDF at 1e5 samples."""
    f = disorder.sample(box_region(50000), 77)
    vals = np.sort(np.fromiter(f.values.values(), dtype=float))
    n = len(vals)
    cdf_model = vals + 0.5
    emp = np.arange(1, n + 1) / n
    assert np.max(np.abs(emp - cdf_model)) < 0.02


def test_resample_mod_region_only():
    sup = box_region(20)
    f = disorder.sample(sup, 1)
    reg = lat.Region.from_box(lat.Box((3,), 2))
    g = disorder.resample_mod(f, reg, 99)
    for s in sup.sites:
        if s in reg.index:
            assert g.value(s) != f.value(s)  # fresh draw (a.s. different)
        else:
            assert g.value(s) == f.value(s)


def test_resample_mod_empty_and_full():
    sup = box_region(8)
    f = disorder.sample(sup, 1)
    same = disorder.resample_mod(f, lat.Region([]), 2)
    assert same.values == f.values
    fresh = disorder.resample_mod(f, sup, 2)
    assert all(fresh.value(s) != f.value(s) for s in sup.sites)


def test_resample_mod_containment():
    f = disorder.sample(box_region(3), 1)
    with pytest.raises(ContainmentError):
        disorder.resample_mod(f, box_region(5), 2)


def test_holder_metric_diagnostic():
    f = disorder.sample(box_region(5), 1)
    assert disorder.holder_metric(f, f) == 0.0
    g = disorder.resample_mod(f, box_region(5), 2)
    assert disorder.holder_metric(f, g) > 0.0


def test_concentration_uniform_point_mass():
    sup = box_region(0)
    p, se = disorder.concentration_estimate(
        lambda f: f.value((0,)), 0.0, 0.1, 4000, 3, sup)
    assert abs(p - 0.2) <= 3.0 * max(se, 1e-3)


def test_concentration_full_mass():
    sup = box_region(0)
    p, _ = disorder.concentration_estimate(
        lambda f: f.value((0,)), 0.0, 1.0, 200, 3, sup)
    assert p == 1.0


def test_concentration_alloy_power_law():
    """log-log fit of eps -> P(|f| <= eps) has positive slope (alpha > 0)."""
    from loclab.potential import SingleSite, eval_alloy

    ss = SingleSite("alt-exp", 1.0)
    sup = box_region(6)

    def f(field):
        return eval_alloy(ss, field, (0,), 1.0, 6)[0]

    eps_grid = [0.4, 0.2, 0.1, 0.05]
    ps = [disorder.concentration_estimate(f, 0.0, e, 1500, 11, sup)[0]
          for e in eps_grid]
    assert all(p > 0 for p in ps)
    slope, _ = np.polyfit(np.log(eps_grid), np.log(ps), 1)
    assert slope > 0.5  # roughly linear mass near 0 for this profile
