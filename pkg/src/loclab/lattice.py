"""Integer-lattice geometry: cubes, boundaries, shifted cubes, annuli.

Sites are plain tuples of ints ordered lexicographically; that ordering
fixes matrix indexing everywhere else in the package.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from .errors import ContainmentError, ScaleError

Site = tuple  # tuple of ints, length d


def norm_inf(n) -> int:
    return max(abs(c) for c in n)


def norm_1(n) -> int:
    return sum(abs(c) for c in n)


def site_sub(a, b) -> Site:
    return tuple(x - y for x, y in zip(a, b))


def dist_inf(a, b) -> int:
    return max(abs(x - y) for x, y in zip(a, b))


@dataclass(frozen=True)
class Box:
    """Cube {n : |n - center|_inf <= radius} in Z^d."""

    center: Site
    radius: int

    def __post_init__(self):
        if self.radius < 0:
            raise ScaleError(f"negative box radius {self.radius}")

    @property
    def d(self) -> int:
        return len(self.center)

    def site_count(self) -> int:
        return (2 * self.radius + 1) ** self.d

    def contains(self, site) -> bool:
        return dist_inf(site, self.center) <= self.radius

    def contains_box(self, other: "Box") -> bool:
        return dist_inf(other.center, self.center) + other.radius <= self.radius

    def intersects(self, other: "Box") -> bool:
        return dist_inf(other.center, self.center) <= self.radius + other.radius

    def sites(self) -> Iterable[Site]:
        """Sites in lexicographic order."""
        ranges = [range(c - self.radius, c + self.radius + 1) for c in self.center]
        return itertools.product(*ranges)


class Region:
    """Finite ordered set of sites with a site -> index bijection."""

    __slots__ = ("sites", "index", "_coords")

    def __init__(self, sites):
        ordered = sorted(set(sites))
        self.sites = tuple(ordered)
        self.index = {s: i for i, s in enumerate(ordered)}
        self._coords = None

    @classmethod
    def from_box(cls, box: Box) -> "Region":
        r = cls.__new__(cls)
        ordered = list(box.sites())  # already lexicographic, no duplicates
        r.sites = tuple(ordered)
        r.index = {s: i for i, s in enumerate(ordered)}
        r._coords = None
        return r

    def __len__(self):
        return len(self.sites)

    def __contains__(self, site):
        return site in self.index

    def __iter__(self):
        return iter(self.sites)

    def __eq__(self, other):
        return isinstance(other, Region) and self.sites == other.sites

    def __hash__(self):
        return hash(self.sites)

    @property
    def d(self) -> int:
        return len(self.sites[0]) if self.sites else 0

    def coords(self) -> np.ndarray:
        """(N, d) int64 coordinate array in index order."""
        if self._coords is None:
            self._coords = np.asarray(self.sites, dtype=np.int64).reshape(
                len(self.sites), -1
            )
        return self._coords

    def issubset(self, other: "Region") -> bool:
        return all(s in other.index for s in self.sites)

    def minus(self, boxes) -> "Region":
        """Region with all sites lying in any of `boxes` removed."""
        boxes = list(boxes)
        kept = [s for s in self.sites if not any(b.contains(s) for b in boxes)]
        return Region(kept)


class BoundaryPair(NamedTuple):
    inner: Site
    outer: Site


def _as_region(obj) -> Region:
    return Region.from_box(obj) if isinstance(obj, Box) else obj


def inner_boundary(box: Box) -> Region:
    """partial_- Lambda_r(x) = Lambda_r(x) \\ Lambda_{r-1}(x), needs r >= 1."""
    if box.radius < 1:
        raise ScaleError("inner boundary needs radius >= 1 (empty interior)")
    r = box.radius
    shell = [s for s in box.sites() if dist_inf(s, box.center) == r]
    return Region(shell)


def inner_boundary_count(r: int, d: int) -> int:
    """#partial_- Lambda_r in Z^d, exactly (2r+1)^d - (2r-1)^d."""
    if r < 1:
        raise ScaleError("inner boundary needs radius >= 1")
    return (2 * r + 1) ** d - (2 * r - 1) ** d


def boundary_in(inner, outer: Region) -> list:
    """Boundary pairs (x, y): x in inner, y in outer minus inner, |x-y|_1 = 1."""
    inner = _as_region(inner)
    if not inner.issubset(outer):
        raise ContainmentError("inner region is not contained in outer region")
    d = outer.d
    steps = []
    for j in range(d):
        for sgn in (-1, 1):
            e = [0] * d
            e[j] = sgn
            steps.append(tuple(e))
    pairs = []
    for x in inner.sites:
        for e in steps:
            y = tuple(a + b for a, b in zip(x, e))
            if y in outer.index and y not in inner.index:
                pairs.append(BoundaryPair(x, y))
    return pairs


def relative_inner_boundary(inner, outer: Region) -> Region:
    """partial_-^outer inner: sites of inner with a |.|_1-neighbor in outer\\inner."""
    return Region({p.inner for p in boundary_in(inner, outer)})


def shifted_point(n, t: int, R: int) -> Site:
    """Clamp n coordinatewise so that Lambda_t(n^t_R) fits inside Lambda_R(0)."""
    if t < 0 or t > R:
        raise ScaleError(f"shift scale t={t} outside [0, R={R}]")
    if norm_inf(n) > R:
        raise ContainmentError(f"site {n} outside Lambda_{R}(0)")
    lo, hi = -R + t, R - t
    return tuple(min(max(c, lo), hi) for c in n)


def shifted_cube(n, s: int, t: int, R: int) -> Box:
    """Lambda^{R,t}_s(n) = Lambda_s(n^t_R); contained in Lambda_R(0) when s = t."""
    return Box(shifted_point(n, t, R), s)


def clamped_cube(n, radius: int, R: int, clamp: int | None = None) -> Box:
    """Lambda^{R,clamp}_radius(n); the clamp level defaults to the radius
    and is capped at R (a clamp at R centers the cube at the origin).

    With clamp < radius the cube may stick out of Lambda_R(0), as the
    shifted-cube definition allows.
    """
    if clamp is None:
        clamp = radius
    return Box(shifted_point(n, min(clamp, R), R), radius)


def annulus(n, s: int, t: int, R: int) -> Region:
    """A^R_{s,t}(n) = (Lambda_t(n) \\ Lambda_s(n)) cap Lambda_R(0)."""
    if t < s:
        raise ScaleError(f"annulus needs t >= s, got s={s}, t={t}")
    if s < 0:
        raise ScaleError("annulus needs s >= 0")
    out = []
    for x in Box(n, t).sites():
        k = dist_inf(x, n)
        if s + 1 <= k <= t and norm_inf(x) <= R:
            out.append(x)
    return Region(out)


def shell(n, t: int, R: int) -> Region:
    """A^R_t(n), the sites of Lambda_R(0) at |.|_inf-distance exactly t from n."""
    if t == 0:
        return Region([n] if norm_inf(n) <= R else [])
    return annulus(n, t - 1, t, R)


class AcceptabilityReport(NamedTuple):
    acceptable: bool
    witness: dict  # site -> cube center, filled for the sites checked
    failing_site: Site  # first site with no admissible cube, or None


def is_r_acceptable(region: Region, r: int) -> AcceptabilityReport:
    """Check that every site sits r/10-deep inside some r-cube of the region.

    A site x is served by a cube Lambda_r(n) contained in the region with
    x in the cube and dist(x, boundary of the cube in the region) >= r/10;
    the comparison 10*dist >= r is exact integer arithmetic. The distance
    is taken to the outer member of each boundary pair: with the inner
    member the predicate is unsatisfiable at hole corners in d >= 2 (the
    corner site lies on the face of every admissible cube), which would
    falsify the cube-removal combinatorics this predicate exists for.
    """
    region_set = region.index
    cube_ok: dict = {}
    bdry_outer: dict = {}

    def cube_contained(n):
        if n not in cube_ok:
            cube_ok[n] = all(s in region_set for s in Box(n, r).sites())
        return cube_ok[n]

    def boundary_outers(n):
        if n not in bdry_outer:
            box = Box(n, r)
            outers = set()
            d = region.d
            for s in box.sites():
                if dist_inf(s, n) < r:
                    continue  # only face sites can have exterior neighbors
                for j in range(d):
                    for sgn in (-1, 1):
                        y = list(s)
                        y[j] += sgn
                        y = tuple(y)
                        if y in region_set and not box.contains(y):
                            outers.add(y)
            bdry_outer[n] = outers
        return bdry_outer[n]

    witness = {}
    for x in region.sites:
        found = None
        for n in Box(x, r).sites():  # any cube containing x has |n - x|_inf <= r
            if not cube_contained(n):
                continue
            outers = boundary_outers(n)
            if all(10 * dist_inf(x, s) >= r for s in outers):
                found = n
                break
        if found is None:
            return AcceptabilityReport(False, witness, x)
        witness[x] = found
    return AcceptabilityReport(True, witness, None)
