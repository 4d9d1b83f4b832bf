"""Constructive cube merging: cover bad centers by disjoint shifted cubes.

Follows the inductive construction: insert points one at a time; a point is
either already covered, becomes a new level-1 cube, or escalates the level
of a cube it collides with, with collisions between cubes resolved by
escalating the larger level and absorbing the other cube.

All collision tests run on the shifted cubes Lambda^R_s(m) so every
conclusion lives inside Lambda_R(0). Shifted-cube radii are clamped at R,
which allows ladder rungs above R (the clamped cube is then all of
Lambda_R(0)); escalation stays sound because Lambda^R_t(m) grows with t.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import LadderError
from .lattice import Box, Region, is_r_acceptable, norm_inf, shifted_cube


@dataclass(frozen=True)
class ScaleLadder:
    """Rungs (r_q, s_q), q = 1..Q, with r_1 <= s_1 <= r_2 <= ... and
    r_{q+1} >= 3 s_q; the acceptability variant also needs s_q >= r_q + 3r."""

    rungs: tuple  # tuple of (r_q, s_q)

    def __post_init__(self):
        prev_s = None
        for q, (rq, sq) in enumerate(self.rungs):
            if rq > sq:
                raise LadderError(f"rung {q + 1}: r={rq} > s={sq}")
            if prev_s is not None and rq < 3 * prev_s:
                raise LadderError(
                    f"rung {q + 1}: r={rq} < 3 s_{q} = {3 * prev_s}")
            prev_s = sq

    @property
    def Q(self) -> int:
        return len(self.rungs)

    def r(self, q: int) -> int:
        return self.rungs[q - 1][0]

    def s(self, q: int) -> int:
        return self.rungs[q - 1][1]

    def check_variant_gap(self, r: int) -> None:
        for q, (rq, sq) in enumerate(self.rungs):
            if sq < rq + 3 * r:
                raise LadderError(
                    f"rung {q + 1}: s={sq} < r + 3*{r} = {rq + 3 * r} "
                    "(acceptability variant gap)")

    @classmethod
    def minimal(cls, r: int, Q: int, variant_gap: bool = False) -> "ScaleLadder":
        """Smallest valid ladder of Q rungs starting at r."""
        rungs = []
        rq = r
        for _ in range(Q):
            sq = rq + 3 * r if variant_gap else rq
            rungs.append((rq, sq))
            rq = 3 * sq
        return cls(tuple(rungs))


@dataclass
class MergeResult:
    centers: tuple  # m_1..m_J
    levels: tuple  # q_1..q_J
    escalations: int

    @property
    def J(self) -> int:
        return len(self.centers)


def _clamped_cube(m, radius: int, R: int) -> Box:
    """Lambda^R_radius(m), with radii above R collapsing to Lambda_R(0)."""
    if radius >= R:
        return Box(tuple([0] * len(m)), R)
    return shifted_cube(m, radius, radius, R)


def merge(points, ladder: ScaleLadder, r: int, R: int,
          rung_ids=None) -> MergeResult:
    """Cover every Lambda_r(n_k) by pairwise-disjoint shifted ladder cubes.

    Guarantees (checked by the oracles in the test suite):
      (i)  Lambda^R_{s_{q_i}}(m_i) pairwise disjoint,
      (ii) each Lambda_r(n_k) inside Lambda^R_{r_{q_j}}(m_j) for some j,
    with J <= K. Needs Q >= K + 1 rungs.

    `rung_ids` optionally maps algorithm levels to a sub-ladder (used by
    merge_acceptable); levels in the result refer to the full ladder.
    """
    points = list(points)
    K = len(points)
    if rung_ids is None:
        rung_ids = list(range(1, ladder.Q + 1))
    if len(rung_ids) <= K:
        raise LadderError(
            f"ladder too short: {len(rung_ids)} usable rungs for K={K} "
            "points (need Q >= K + 1)")
    for n in points:
        if norm_inf(n) > R:
            raise LadderError(f"point {n} outside Lambda_{R}(0)")

    def s_cube(m, level):
        return _clamped_cube(m, ladder.s(rung_ids[level - 1]), R)

    def r_cube(m, level):
        return _clamped_cube(m, ladder.r(rung_ids[level - 1]), R)

    def covered(n, cube: Box) -> bool:
        # Lambda_r(n) cap Lambda_R(0) inside cube; for boundary points the
        # unclipped cube sticks out of Lambda_R(0) and could never be
        # covered by shifted cubes
        return all(
            max(c - r, -R) >= cc - cube.radius
            and min(c + r, R) <= cc + cube.radius
            for c, cc in zip(n, cube.center)
        )

    centers: list = []
    levels: list = []
    escalations = 0

    def escalate(i):
        nonlocal escalations
        if levels[i] >= len(rung_ids):
            raise LadderError("ran out of ladder rungs during escalation")
        levels[i] += 1
        escalations += 1

    for n_k in points:
        if any(covered(n_k, r_cube(m, q))
               for m, q in zip(centers, levels)):
            continue  # case 1: already covered
        colliding = [i for i in range(len(centers))
                     if s_cube(n_k, 1).intersects(s_cube(centers[i], levels[i]))]
        if not colliding:
            centers.append(n_k)  # case 2: disjoint, new level-1 cube
            levels.append(1)
            continue
        # case 3: escalate the highest-level collider (smallest index on ties)
        qmax = max(levels[i] for i in colliding)
        i = min(j for j in colliding if levels[j] == qmax)
        escalate(i)
        # resolve collisions among survivors: escalate the larger level,
        # drop the other cube (ties keep the smaller index)
        while True:
            pair = None
            for a in range(len(centers)):
                for b in range(a + 1, len(centers)):
                    if s_cube(centers[a], levels[a]).intersects(
                            s_cube(centers[b], levels[b])):
                        pair = (a, b)
                        break
                if pair:
                    break
            if pair is None:
                break
            a, b = pair
            if levels[b] > levels[a]:
                keep, drop = b, a
            else:
                keep, drop = a, b  # ties keep the smaller index
            escalate(keep)
            del centers[drop], levels[drop]

    result_levels = tuple(rung_ids[q - 1] for q in levels)
    return MergeResult(tuple(centers), result_levels, escalations)


def _rung_safe(n, rq: int, sq: int, r: int, R: int) -> bool:
    """No hole radius of this rung leaves a sliver at the boundary.

    For the clamped hole Lambda^R_rt(n), each coordinate gap between hole
    edge and region boundary must be 0 or at least 2r + 1, otherwise the
    strip is too thin to hold any r-cube and the complement cannot be
    r-acceptable. Checked for every admissible rt of the rung.
    """
    width = 2 * r + 1
    for rt in range(rq, min(sq - 2 * r - 2, R - 1) + 1):
        for c0 in n:
            c = min(max(c0, -(R - rt)), R - rt)  # clamped center
            for gap in (R - (c + rt), (c - rt) + R):
                if 0 < gap < width:
                    return False
    return True


def merge_acceptable(points, ladder: ScaleLadder, r: int, R: int) -> MergeResult:
    """merge() that additionally preserves r-acceptability of the complement.

    Rungs where some point would leave a too-thin boundary sliver for some
    admissible hole radius are skipped (this strengthens the source's
    |n_j| + r_q <= R <= |n_j| + s_q criterion, which misses slivers created
    by the clamping of shifted cubes); needs Q >= (d+1)K + 1 spare rungs
    and s_q >= r_q + 3r. For the result, Lambda_R(0) minus the union of
    Lambda^R_rt(m_j) stays r-acceptable for every choice
    r_{q_j} <= rt <= s_{q_j} - 2r - 2. In d >= 2 this needs r <= 10: a
    removed interior cube leaves corner sites at unit distance from the
    relative boundary, so the r/10 margin must not exceed 1.
    """
    points = list(points)
    K = len(points)
    d = len(points[0]) if points else 1
    if ladder.Q < (d + 1) * K + 1:
        raise LadderError(
            f"ladder too short: Q={ladder.Q} < (d+1)K+1 = {(d + 1) * K + 1}")
    ladder.check_variant_gap(r)
    good = [
        q for q in range(1, ladder.Q + 1)
        if all(_rung_safe(n, ladder.r(q), ladder.s(q), r, R) for n in points)
    ]
    if len(good) <= K:
        raise LadderError(
            f"only {len(good)} boundary-safe rungs remain for K={K} points")
    return merge(points, ladder, r, R, rung_ids=good)


def verify_merge(points, ladder: ScaleLadder, r: int, R: int,
                 result: MergeResult) -> dict:
    """Exhaustive check of conditions (i) and (ii) by site enumeration."""
    s_regions = [
        Region.from_box(_clamped_cube(m, ladder.s(q), R))
        for m, q in zip(result.centers, result.levels)
    ]
    cond_i = True
    for a in range(len(s_regions)):
        for b in range(a + 1, len(s_regions)):
            if any(s in s_regions[b].index for s in s_regions[a].sites):
                cond_i = False
    r_regions = [
        Region.from_box(_clamped_cube(m, ladder.r(q), R))
        for m, q in zip(result.centers, result.levels)
    ]
    cond_ii = True
    for n in points:
        wanted = [s for s in Box(n, r).sites() if norm_inf(s) <= R]
        got = any(all(s in reg.index for s in wanted) for reg in r_regions)
        cond_ii = cond_ii and got
    return {"cond_i": cond_i, "cond_ii": cond_ii,
            "J_ok": result.J <= len(points)}


def verify_acceptable(points, ladder: ScaleLadder, r: int, R: int,
                      result: MergeResult, max_combos: int = 512) -> dict:
    """Conditions (i)/(ii) plus (iii): r-acceptability of the complement for
    every admissible radius choice (exhausted up to max_combos products)."""
    out = verify_merge(points, ladder, r, R, result)
    big = Region.from_box(Box(tuple([0] * (len(points[0]) if points else 1)), R))
    choices = []
    for m, q in zip(result.centers, result.levels):
        lo, hi = ladder.r(q), ladder.s(q) - 2 * r - 2
        if hi < lo:  # no admissible radius at this rung: (iii) is vacuous
            out["cond_iii"] = True
            out["combos_checked"] = 0
            return out
        choices.append(range(lo, hi + 1))
    total = 1
    for c in choices:
        total *= len(c)
    combos = itertools.product(*choices)
    if total > max_combos:
        stride = max(1, total // max_combos)
        combos = itertools.islice(itertools.product(*choices), 0, None, stride)
    cond_iii = True
    checked = 0
    for combo in combos:
        checked += 1
        holes = [_clamped_cube(m, rt, R)
                 for m, rt in zip(result.centers, combo)]
        rest = big.minus(holes)
        if len(rest) and not is_r_acceptable(rest, r).acceptable:
            cond_iii = False
            break
    out["cond_iii"] = cond_iii
    out["combos_checked"] = checked
    return out
