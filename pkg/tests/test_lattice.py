"""Lattice geometry: boundaries, shifted cubes, annuli, r-acceptability."""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loclab import lattice as lat
from loclab.errors import ContainmentError, ScaleError


def brute_inner_boundary(box):
    """Quantifier expansion of the inner-boundary definition."""
    inside = set(box.sites())
    out = []
    for n in inside:
        for j in range(box.d):
            for sgn in (-1, 1):
                m = list(n)
                m[j] += sgn
                if tuple(m) not in inside:
                    out.append(n)
                    break
            else:
                continue
            break
    return set(out)


@given(st.integers(1, 6), st.integers(1, 3), st.data())
@settings(max_examples=60, deadline=None)
def test_inner_boundary_is_shell_difference(r, d, data):
    center = tuple(data.draw(st.integers(-5, 5)) for _ in range(d))
    box = lat.Box(center, r)
    bdry = set(lat.inner_boundary(box).sites)
    smaller = set(lat.Box(center, r - 1).sites())
    assert bdry == set(box.sites()) - smaller
    assert bdry == brute_inner_boundary(box)
    assert len(bdry) == lat.inner_boundary_count(r, d)
    assert len(bdry) <= 2 * d * (3 * r) ** (d - 1)


@given(st.integers(0, 8), st.integers(1, 3))
@settings(max_examples=40, deadline=None)
def test_box_cardinality(r, d):
    assert lat.Box((0,) * d, r).site_count() == (2 * r + 1) ** d
    assert len(list(lat.Box((0,) * d, r).sites())) == (2 * r + 1) ** d


def test_inner_boundary_interval_endpoints():
    assert lat.inner_boundary(lat.Box((0,), 2)).sites == ((-2,), (2,))


def test_inner_boundary_d2_count():
    assert len(lat.inner_boundary(lat.Box((0, 0), 3))) == 7 ** 2 - 5 ** 2  # 24


def test_inner_boundary_r0_errors():
    with pytest.raises(ScaleError):
        lat.inner_boundary(lat.Box((0,), 0))


def test_boundary_in_1d():
    outer = lat.Region.from_box(lat.Box((0,), 3))
    pairs = lat.boundary_in(lat.Box((0,), 1), outer)
    assert set(pairs) == {((-1,), (-2,)), ((1,), (2,))}


def test_boundary_in_equal_regions_empty():
    reg = lat.Region.from_box(lat.Box((0,), 2))
    assert lat.boundary_in(reg, reg) == []


def test_boundary_in_d2_count():
    outer = lat.Region.from_box(lat.Box((0, 0), 2))
    pairs = lat.boundary_in(lat.Box((0, 0), 1), outer)
    # brute force: edges with |x-y|_1 = 1 crossing the cube face; the four
    # corner sites carry two exterior neighbors each, the four edge
    # midpoints one, so 4*2 + 4*1 = 12
    inner = set(lat.Box((0, 0), 1).sites())
    expect = [(x, y) for x in inner for y in outer.sites
              if y not in inner and lat.norm_1(lat.site_sub(x, y)) == 1]
    assert len(pairs) == len(expect) == 12


def test_boundary_in_containment_error():
    outer = lat.Region.from_box(lat.Box((0,), 2))
    with pytest.raises(ContainmentError):
        lat.boundary_in(lat.Box((0,), 5), outer)


def test_shifted_point_examples():
    assert lat.shifted_point((9,), 3, 10) == (7,)
    assert lat.shifted_point((3,), 3, 10) == (3,)  # interior unchanged
    assert lat.shifted_point((5, -5), 2, 5) == (3, -3)
    with pytest.raises(ScaleError):
        lat.shifted_point((0,), 11, 10)


@given(st.integers(1, 3), st.data())
@settings(max_examples=100, deadline=None)
def test_shifted_cube_contained(d, data):
    R = data.draw(st.integers(1, 12))
    t = data.draw(st.integers(0, R))
    n = tuple(data.draw(st.integers(-R, R)) for _ in range(d))
    cube = lat.shifted_cube(n, t, t, R)
    assert all(lat.norm_inf(s) <= R for s in cube.sites())
    # overlap with the unshifted cube is maximal among contained cubes
    unshifted = set(lat.Box(n, t).sites())
    big = set(lat.Box((0,) * d, R).sites())
    best = len(unshifted & set(cube.sites()))
    for shift in itertools.product((-1, 0, 1), repeat=d):
        c2 = tuple(a + b for a, b in zip(cube.center, shift))
        if set(lat.Box(c2, t).sites()) <= big:
            assert len(unshifted & set(lat.Box(c2, t).sites())) <= best


def test_shifted_cube_s_gt_t_can_escape():
    cube = lat.shifted_cube((9,), 5, 3, 10)  # Lambda_5(7), sticks out past 10
    assert any(lat.norm_inf(s) > 10 for s in cube.sites())


def test_shifted_cube_s0_single_site():
    assert lat.shifted_cube((4,), 0, 0, 10).site_count() == 1


def test_annulus_1d():
    assert lat.annulus((0,), 1, 2, 10).sites == ((-2,), (2,))


def test_annulus_order_error():
    with pytest.raises(ScaleError):
        lat.annulus((0,), 3, 2, 10)


def test_annulus_clipped_at_region():
    ann = lat.annulus((9,), 0, 3, 10)
    assert all(lat.norm_inf(s) <= 10 for s in ann.sites)
    assert (10,) in ann.index and (12,) not in ann.index


def test_shell_equals_relative_inner_boundary():
    # A^R_t(n) = inner boundary of Lambda_t(n) relative to Lambda_R(0);
    # an equality whenever Lambda_{t+1}(n) stays inside Lambda_R(0) (at the
    # region edge, shell sites can lose all their exterior neighbors)
    rng = np.random.default_rng(0)
    exact_checked = 0
    for _ in range(40):
        d = int(rng.integers(1, 3))
        R = int(rng.integers(3, 9))
        t = int(rng.integers(1, R + 1))
        n = tuple(int(v) for v in rng.integers(-R, R + 1, size=d))
        shell = set(lat.shell(n, t, R).sites)
        big = lat.Region.from_box(lat.Box((0,) * d, R))
        cube_in_big = lat.Region(
            [s for s in lat.Box(n, t).sites() if lat.norm_inf(s) <= R])
        rel = set(lat.relative_inner_boundary(cube_in_big, big).sites)
        assert rel <= shell
        if lat.norm_inf(n) + t + 1 <= R:
            assert rel == shell
            exact_checked += 1
    assert exact_checked >= 5


def brute_r_acceptable(region, r):
    """Independent quantifier expansion of the r-acceptability definition."""
    sites = set(region.sites)
    cubes = []
    coords = region.coords()
    lo, hi = coords.min(axis=0), coords.max(axis=0)
    for n in itertools.product(*[range(int(a), int(b) + 1)
                                 for a, b in zip(lo, hi)]):
        if set(lat.Box(n, r).sites()) <= sites:
            cubes.append(n)
    for x in region.sites:
        ok = False
        for n in cubes:
            if lat.dist_inf(x, n) > r:
                continue
            box = set(lat.Box(n, r).sites())
            outers = {y for y in sites - box
                      if any(lat.norm_1(lat.site_sub(y, b)) == 1 for b in box)}
            if all(10 * lat.dist_inf(x, y) >= r for y in outers):
                ok = True
                break
        if not ok:
            return False
    return True


def test_r_acceptable_full_box():
    for R, r in ((5, 2), (6, 3), (4, 4)):
        reg = lat.Region.from_box(lat.Box((0,), R))
        assert lat.is_r_acceptable(reg, r).acceptable


def test_r_acceptable_single_site():
    assert not lat.is_r_acceptable(lat.Region([(0,)]), 2).acceptable


def test_r_acceptable_1d_punctured():
    big = lat.Region.from_box(lat.Box((0,), 20))
    reg = big.minus([lat.Box((0,), 3)])
    got = lat.is_r_acceptable(reg, 2)
    assert got.acceptable == brute_r_acceptable(reg, 2)


def test_r_acceptable_matches_bruteforce_randomized():
    rng = np.random.default_rng(7)
    checked = 0
    for _ in range(40):
        d = int(rng.integers(1, 3))
        R = int(rng.integers(2, 5 if d == 2 else 15))
        r = int(rng.integers(1, 4))
        reg = lat.Region.from_box(lat.Box((0,) * d, R))
        if rng.random() < 0.7:
            m = tuple(int(v) for v in rng.integers(-R, R + 1, size=d))
            reg = reg.minus([lat.Box(m, int(rng.integers(1, R + 1)))])
        if not len(reg) or len(reg) > 60:
            continue
        checked += 1
        assert lat.is_r_acceptable(reg, r).acceptable == \
            brute_r_acceptable(reg, r)
    assert checked >= 20


def test_r_acceptable_witness_valid():
    reg = lat.Region.from_box(lat.Box((0,), 8))
    rep = lat.is_r_acceptable(reg, 3)
    assert rep.acceptable
    for x, n in rep.witness.items():
        assert set(lat.Box(n, 3).sites()) <= set(reg.sites)
        assert lat.dist_inf(x, n) <= 3
