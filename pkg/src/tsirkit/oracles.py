"""Independent brute-force oracles used by the test suite.

Everything here deliberately avoids the library's computation paths:
the norm oracle enumerates every admissible block system directly from
the defining equation, the bracket oracle tries every ordered block
decomposition, and the small-ordinal oracle computes sums and products
by the defining transfinite recursions on a triple encoding instead of
normal-form merging rules.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations

from tsirkit.families import FamilyExpr
from tsirkit.norms import SparseVector, SpaceSpec


# -- exhaustive norm oracle ---------------------------------------------


def oracle_norm(spec: SpaceSpec, x: SparseVector) -> Fraction:
    """Exhaustive maximum over all admissible trees, from the definition.

    Recurses on support subsets; block systems are enumerated as a
    covered subset plus arbitrary cuts between consecutive covered
    points, which ranges over exactly the successive block sequences.
    """
    points = x.support
    if not points:
        return Fraction(0)
    absv = {p: abs(x.coeff(p)) for p in points}
    f0_table = _member_table(spec.f0, points)
    fam_tables = [_member_table(f, points) for _, f in spec.used_pairs]
    memo: dict[frozenset, Fraction] = {}

    def seminorm_at(pts: tuple) -> Fraction:
        best = Fraction(0)
        for r in range(1, len(pts) + 1):
            for sub in combinations(pts, r):
                if f0_table.get(sub, False):
                    w = sum((absv[p] for p in sub), Fraction(0))
                    if w > best:
                        best = w
        return best

    def value(pts: frozenset) -> Fraction:
        if not pts:
            return Fraction(0)
        got = memo.get(pts)
        if got is not None:
            return got
        ordered = tuple(sorted(pts))
        best = seminorm_at(ordered)
        whole = frozenset(pts)
        for n0, table in enumerate(fam_tables):
            theta = spec.theta(n0 + 1)
            for covered_size in range(1, len(ordered) + 1):
                for covered in combinations(ordered, covered_size):
                    # cuts: each gap between consecutive covered points may
                    # close the current block and open the next
                    for cutmask in range(1 << (covered_size - 1)):
                        blocks = [[covered[0]]]
                        for t in range(1, covered_size):
                            if cutmask >> (t - 1) & 1:
                                blocks.append([covered[t]])
                            else:
                                blocks[-1].append(covered[t])
                        minima = tuple(b[0] for b in blocks)
                        if not table.get(minima, False):
                            continue
                        if len(blocks) == 1 and frozenset(blocks[0]) == whole:
                            continue  # the degenerate self-reference
                        total = Fraction(0)
                        for b in blocks:
                            total += value(frozenset(b))
                        total *= theta
                        if total > best:
                            best = total
        memo[pts] = best
        return best

    return value(frozenset(points))


def _member_table(f: FamilyExpr, points: tuple) -> dict[tuple, bool]:
    table: dict[tuple, bool] = {(): True}
    for r in range(1, len(points) + 1):
        for sub in combinations(points, r):
            table[sub] = f.member(sub)
    return table


def oracle_seminorm(f: FamilyExpr, x: SparseVector) -> Fraction:
    points = x.support
    best = Fraction(0)
    for r in range(1, len(points) + 1):
        for sub in combinations(points, r):
            if f.member(sub):
                w = sum((abs(x.coeff(p)) for p in sub), Fraction(0))
                if w > best:
                    best = w
    return best


# -- exhaustive bracket membership --------------------------------------


def oracle_bracket_member(m: FamilyExpr, n: FamilyExpr, s: tuple) -> bool:
    """Does ANY ordered decomposition into n-blocks have m-admissible minima?"""
    if not s:
        return True

    def split(rest: tuple, minima: tuple) -> bool:
        if not rest:
            return m.member(minima)
        for j in range(1, len(rest) + 1):
            if n.member(rest[:j]) and split(rest[j:], minima + (rest[0],)):
                return True
        return False

    return split(s, ())


# -- small-ordinal arithmetic by the defining recursions -----------------
#
# Ordinals below w^3 are encoded as triples (a, b, c) = w^2*a + w*b + c,
# ordered lexicographically.  Sums and products are computed by the
# successor/limit recursions, with limits evaluated along canonical
# sequences and detected by coordinate stabilization; this never uses the
# normal-form merging rules under test.

Triple = tuple[int, int, int]

_LIMIT_PROBES = (8, 16, 32)


def t_is_zero(t: Triple) -> bool:
    return t == (0, 0, 0)


def t_succ(t: Triple) -> Triple:
    return (t[0], t[1], t[2] + 1)


def t_pred(t: Triple) -> Triple:
    a, b, c = t
    if c == 0:
        raise ValueError("not a successor")
    return (a, b, c - 1)


def t_is_limit(t: Triple) -> bool:
    return t != (0, 0, 0) and t[2] == 0


def t_fund(t: Triple, n: int) -> Triple:
    a, b, c = t
    if c != 0:
        raise ValueError("not a limit")
    if b > 0:
        return (a, b - 1, n)
    return (a - 1, n, 0)


def _sup_along(seq) -> Triple:
    """Supremum of a nondecreasing sequence of triples sampled at probe
    points, detected by which coordinate keeps growing."""
    samples = [seq(n) for n in _LIMIT_PROBES]
    first, last = samples[0], samples[-1]
    if first == last:
        return last
    for coord in range(3):
        if first[coord] != last[coord]:
            break
    # the first changing coordinate grows without bound: bump the next
    # higher coordinate and zero everything below
    if coord == 0:
        raise ValueError("supremum escapes w^3")
    out = list(last)
    out[coord - 1] += 1
    for k in range(coord, 3):
        out[k] = 0
    return tuple(out)  # type: ignore[return-value]


@lru_cache(maxsize=None)
def t_add(x: Triple, y: Triple) -> Triple:
    if t_is_zero(y):
        return x
    if not t_is_limit(y):
        return t_succ(t_add(x, t_pred(y)))
    return _sup_along(lambda n: t_add(x, t_fund(y, n)))


@lru_cache(maxsize=None)
def t_mul(x: Triple, y: Triple) -> Triple:
    if t_is_zero(y) or t_is_zero(x):
        return (0, 0, 0)
    if not t_is_limit(y):
        return t_add(t_mul(x, t_pred(y)), x)
    return _sup_along(lambda n: t_mul(x, t_fund(y, n)))
