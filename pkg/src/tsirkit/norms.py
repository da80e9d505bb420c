"""Exact evaluation of the implicitly defined mixed Tsirelson norm.

A space is given by a base family F0, finitely many pairs (theta_n, F_n)
with nonincreasing theta_n in (0,1), and the norm satisfies

    |x| = max( |x|_F0 ,  max_n  theta_n * sum_i |E_i x| )

with the inner maximum over F_n-admissible successive block sequences.
All arithmetic is over ``fractions.Fraction``; no floating point.

The dynamic program restricts blocks to consecutive intervals of the
support: for an optimal admissible system (E_i) with minima p_1<...<p_k,
replacing E_i by everything in the support from p_i up to the next
minimum keeps the minima set (hence admissibility) and can only increase
each summand, because the norm is monotone in the support.  Candidate
minima sets are enumerated from F_n restricted to the support; ties are
broken toward the base seminorm, then fewer blocks, then smaller n, then
lexicographically smaller minima, which makes certificates deterministic.

Certificates are complete admissible trees with integer-interval nodes;
``verify_certificate`` re-checks every structural invariant and
re-evaluates the tree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Sequence

from . import families as fam
from .families import FamilyExpr, FinSet, HorizonError, members_within

ENUM_BUDGET = 200_000
_S0_PROBE = 16


class NormError(ValueError):
    pass


class CertificateError(ValueError):
    """A certificate violates a structural invariant (named in the message)."""


class SparseVector:
    """Finitely supported vector with exact rational coordinates."""

    __slots__ = ("_entries", "_support")

    def __init__(self, entries: Mapping[int, Fraction] | Iterable[tuple[int, Fraction]] = ()):
        items = entries.items() if isinstance(entries, Mapping) else entries
        acc: dict[int, Fraction] = {}
        for i, v in items:
            i = int(i)
            if i < 1:
                raise NormError("coordinates are indexed by positive integers")
            v = Fraction(v)
            if v:
                acc[i] = acc.get(i, Fraction(0)) + v
        self._entries = {i: acc[i] for i in sorted(acc) if acc[i]}
        self._support = tuple(self._entries)

    @classmethod
    def unit(cls, k: int) -> "SparseVector":
        return cls({k: Fraction(1)})

    @property
    def support(self) -> FinSet:
        return self._support

    def coeff(self, i: int) -> Fraction:
        return self._entries.get(i, Fraction(0))

    def items(self):
        return self._entries.items()

    def is_zero(self) -> bool:
        return not self._entries

    def l1(self) -> Fraction:
        return sum((abs(v) for v in self._entries.values()), Fraction(0))

    def restrict(self, points: Iterable[int]) -> "SparseVector":
        pts = set(points)
        return SparseVector({i: v for i, v in self._entries.items() if i in pts})

    def restrict_interval(self, lo: int, hi: int) -> "SparseVector":
        return SparseVector({i: v for i, v in self._entries.items() if lo <= i <= hi})

    def scale(self, c: Fraction) -> "SparseVector":
        c = Fraction(c)
        return SparseVector({i: v * c for i, v in self._entries.items()})

    def flip_signs(self, signs: Mapping[int, int]) -> "SparseVector":
        return SparseVector({i: (v if signs.get(i, 1) >= 0 else -v) for i, v in self._entries.items()})

    def __add__(self, other: "SparseVector") -> "SparseVector":
        out = dict(self._entries)
        for i, v in other._entries.items():
            out[i] = out.get(i, Fraction(0)) + v
        return SparseVector(out)

    def __neg__(self) -> "SparseVector":
        return self.scale(Fraction(-1))

    def __eq__(self, other):
        return isinstance(other, SparseVector) and self._entries == other._entries

    def __hash__(self):
        return hash(tuple(self._entries.items()))

    def __repr__(self):
        inner = " + ".join(f"{v}*e{i}" for i, v in self._entries.items()) or "0"
        return f"<{inner}>"


def _contains_singletons(f: FamilyExpr) -> bool:
    return all(f.member((j,)) for j in range(1, _S0_PROBE + 1))


def ensure_singletons(f: FamilyExpr) -> FamilyExpr:
    """Return f, or f joined with S0 when the singleton probe fails."""
    return f if _contains_singletons(f) else fam.Union((f, fam.S0))


class SpaceSpec:
    """A truncated mixed Tsirelson space.

    ``pairs`` lists (theta, family) with nonincreasing thetas in (0,1);
    only the first ``n_max`` pairs are used.  ``infinite_tail`` marks the
    spec as a truncation of a conceptually infinite sequence, which turns
    the upper norm estimate into value + theta_{n_max} * l1.  Families are
    normalized to contain all singletons.
    """

    __slots__ = ("f0", "pairs", "n_max", "infinite_tail")

    def __init__(
        self,
        f0: FamilyExpr,
        pairs: Sequence[tuple[Fraction, FamilyExpr]],
        n_max: int | None = None,
        infinite_tail: bool = False,
    ):
        if not pairs:
            raise NormError("a space needs at least one (theta, family) pair")
        norm_pairs = []
        prev = None
        for theta, family in pairs:
            theta = Fraction(theta)
            if not (0 < theta < 1):
                raise NormError("thetas must lie in (0,1)")
            if prev is not None and theta > prev:
                raise NormError("thetas must be nonincreasing")
            prev = theta
            norm_pairs.append((theta, ensure_singletons(family)))
        self.f0 = ensure_singletons(f0)
        self.pairs = tuple(norm_pairs)
        self.n_max = len(self.pairs) if n_max is None else int(n_max)
        if not (1 <= self.n_max <= len(self.pairs)):
            raise NormError("n_max must select a nonempty prefix of the pairs")
        self.infinite_tail = bool(infinite_tail)

    def theta(self, n: int) -> Fraction:
        return self.pairs[n - 1][0]

    def family(self, n: int) -> FamilyExpr:
        return self.pairs[n - 1][1]

    @property
    def used_pairs(self) -> tuple[tuple[Fraction, FamilyExpr], ...]:
        return self.pairs[: self.n_max]

    def __eq__(self, other):
        return (
            isinstance(other, SpaceSpec)
            and self.f0 == other.f0
            and self.pairs == other.pairs
            and self.n_max == other.n_max
            and self.infinite_tail == other.infinite_tail
        )

    def __repr__(self):
        ps = ", ".join(f"({t}, {f})" for t, f in self.used_pairs)
        return f"SpaceSpec({self.f0}, [{ps}])"


def derived_spec(spec: SpaceSpec, new_f0: FamilyExpr) -> SpaceSpec:
    """Same pairs, replaced base family."""
    return SpaceSpec(new_f0, spec.pairs, spec.n_max, spec.infinite_tail)


def seminorm(f: FamilyExpr, x: SparseVector, budget: int | None = ENUM_BUDGET) -> Fraction:
    """sup over members s of f of sum_{k in s} |x_k|, computed exactly."""
    if x.is_zero():
        return Fraction(0)
    best = Fraction(0)
    for s in members_within(f, x.support, budget):
        w = sum((abs(x.coeff(i)) for i in s), Fraction(0))
        if w > best:
            best = w
    return best


class NormResult(NamedTuple):
    value: Fraction
    lower: Fraction
    upper: Fraction


@dataclass
class CertNode:
    """Node of a norm certificate: the integer interval [lo, hi].

    ``n`` is the admissibility index of the sibling group the node
    belongs to (0 for the root, matching the tag convention theta_0 = 1).
    ``tag`` may store the multiplicative tag explicitly; when present it
    is re-checked against the product of thetas along the path.
    """

    lo: int
    hi: int
    n: int = 0
    children: tuple["CertNode", ...] = field(default_factory=tuple)
    tag: Fraction | None = None

    def is_leaf(self) -> bool:
        return not self.children


NormCertificate = CertNode  # the root node; roots are unique by construction


class _DP:
    """Per-call evaluator; memoizes on support intervals [i, j)."""

    def __init__(self, spec: SpaceSpec, x: SparseVector, budget: int | None):
        self.spec = spec
        self.x = x
        self.points = x.support
        self.budget = budget
        self.absv = [abs(x.coeff(p)) for p in self.points]
        acc = Fraction(0)
        self.prefix = [acc]
        for v in self.absv:
            acc += v
            self.prefix.append(acc)
        self.index = {p: i for i, p in enumerate(self.points)}
        # members of each family inside the support, bucketed by first index
        self.f0_members = self._indexed(members_within(spec.f0, self.points, budget))
        self.by_min: list[dict[int, list[tuple[int, ...]]]] = []
        for _, famly in spec.used_pairs:
            buckets: dict[int, list[tuple[int, ...]]] = {}
            for p in self._indexed(members_within(famly, self.points, budget)):
                buckets.setdefault(p[0], []).append(p)
            for lst in buckets.values():
                lst.sort(key=lambda t: (len(t), t))
            self.by_min.append(buckets)
        self.value_memo: dict[tuple[int, int], Fraction] = {}
        self.choice_memo: dict[tuple[int, int], tuple] = {}

    def _indexed(self, sets: list[FinSet]) -> list[tuple[int, ...]]:
        return [tuple(self.index[p] for p in s) for s in sets]

    def base_value(self, i: int, j: int) -> tuple[Fraction, tuple[int, ...]]:
        best = Fraction(0)
        pick: tuple[int, ...] = ()
        for s in self.f0_members:
            if s and s[0] >= i and s[-1] < j:
                w = sum((self.absv[t] for t in s), Fraction(0))
                if w > best:
                    best = w
                    pick = s
        return best, pick

    def value(self, i: int, j: int) -> Fraction:
        got = self.value_memo.get((i, j))
        if got is not None:
            return got
        base, base_pick = self.base_value(i, j)
        # tie rank: leaf (0,...) beats splits (1, blocks, n, minima)
        best = base
        best_rank: tuple = (0, 0, 0, ())
        choice: tuple = ("leaf", base_pick)
        for n0, buckets in enumerate(self.by_min):
            theta = self.spec.theta(n0 + 1)
            for a in range(i, j):
                bucket = buckets.get(a)
                if not bucket:
                    continue
                # theta * l1 of [a, j) bounds every candidate starting at a
                if theta * (self.prefix[j] - self.prefix[a]) < best:
                    continue
                for p in bucket:
                    if p[-1] >= j:
                        continue
                    if len(p) == 1 and a == i:
                        continue  # degenerate single block covering the interval
                    cuts = list(p) + [j]
                    total = Fraction(0)
                    for lo, hi in zip(cuts, cuts[1:]):
                        total += self.value(lo, hi)
                    total *= theta
                    cand_rank = (1, len(p), n0 + 1, p)
                    if total > best or (total == best and cand_rank < best_rank):
                        best = total
                        best_rank = cand_rank
                        choice = ("split", n0 + 1, p)
        self.value_memo[(i, j)] = best
        self.choice_memo[(i, j)] = choice
        return best

    def build_certificate(self, i: int, j: int, n: int = 0, tag: Fraction = Fraction(1)) -> CertNode:
        choice = self.choice_memo[(i, j)]
        lo, hi = self.points[i], self.points[j - 1]
        if choice[0] == "leaf":
            return CertNode(lo, hi, n, (), tag)
        _, n_used, p = choice
        cuts = list(p) + [j]
        child_tag = tag * self.spec.theta(n_used)
        kids = tuple(
            self.build_certificate(a, b, n_used, child_tag) for a, b in zip(cuts, cuts[1:])
        )
        return CertNode(lo, hi, n, kids, tag)


def norm(spec: SpaceSpec, x: SparseVector, budget: int | None = ENUM_BUDGET) -> NormResult:
    """Exact norm in the truncated space, with untruncated bounds.

    Returns (value, lower, upper): lower = value always; upper adds
    theta_{n_max} * l1(x) when the spec is flagged infinite_tail.
    """
    if x.is_zero():
        return NormResult(Fraction(0), Fraction(0), Fraction(0))
    dp = _DP(spec, x, budget)
    v = dp.value(0, len(dp.points))
    upper = v + spec.theta(spec.n_max) * x.l1() if spec.infinite_tail else v
    return NormResult(v, v, upper)


def norm_certificate(spec: SpaceSpec, x: SparseVector, budget: int | None = ENUM_BUDGET) -> CertNode:
    """A complete admissible tree witnessing norm(spec, x).value."""
    if x.is_zero():
        raise NormError("the zero vector has no certificate")
    dp = _DP(spec, x, budget)
    dp.value(0, len(dp.points))
    return dp.build_certificate(0, len(dp.points))


def _walk_leaves(node: CertNode, tag: Fraction, spec: SpaceSpec, x: SparseVector, out: list):
    if node.is_leaf():
        out.append((node, tag))
        return
    for child in node.children:
        _walk_leaves(child, tag * spec.theta(child.n), spec, x, out)


def verify_certificate(spec: SpaceSpec, x: SparseVector, cert: CertNode) -> Fraction:
    """Re-check all structural invariants and evaluate the tree.

    Raises CertificateError naming the violated invariant; the returned
    value is at most norm(spec, x).value for a well-formed certificate.
    """
    if cert.n != 0:
        raise CertificateError("root invariant: the root must carry index 0")
    if cert.tag is not None and cert.tag != 1:
        raise CertificateError("tag violation: the root tag must be 1")

    def check(node: CertNode, tag: Fraction):
        if node.lo > node.hi or node.lo < 1:
            raise CertificateError(f"interval invariant: bad interval [{node.lo},{node.hi}]")
        if not node.children:
            return
        ns = {c.n for c in node.children}
        if len(ns) != 1:
            raise CertificateError(
                f"history invariant: children of [{node.lo},{node.hi}] carry mixed indices {sorted(ns)}"
            )
        n = node.children[0].n
        if not (1 <= n <= spec.n_max):
            raise CertificateError(f"index invariant: n={n} outside 1..{spec.n_max}")
        prev_hi = None
        minima = []
        for c in node.children:
            if c.lo < node.lo or c.hi > node.hi:
                raise CertificateError(
                    f"nesting invariant: child [{c.lo},{c.hi}] escapes [{node.lo},{node.hi}]"
                )
            if prev_hi is not None and c.lo <= prev_hi:
                raise CertificateError(
                    f"succession invariant: child [{c.lo},{c.hi}] does not follow previous block"
                )
            prev_hi = c.hi
            minima.append(c.lo)
        if not spec.family(n).member(tuple(minima)):
            raise CertificateError(
                f"admissibility violation: minima {fam.format_finset(tuple(minima))} not in {spec.family(n)}"
            )
        child_tag = tag * spec.theta(n)
        for c in node.children:
            if c.tag is not None and c.tag != child_tag:
                raise CertificateError(
                    f"tag violation: node [{c.lo},{c.hi}] carries {c.tag}, expected {child_tag}"
                )
            check(c, child_tag)

    check(cert, Fraction(1))
    leaves: list[tuple[CertNode, Fraction]] = []
    _walk_leaves(cert, Fraction(1), spec, x, leaves)
    total = Fraction(0)
    for node, tag in leaves:
        total += tag * seminorm(spec.f0, x.restrict_interval(node.lo, node.hi))
    return total


def certificate_tags(spec: SpaceSpec, cert: CertNode) -> list[tuple[CertNode, tuple[int, ...], Fraction]]:
    """(node, history, tag) for every node, root first."""
    out = []

    def walk(node: CertNode, hist: tuple[int, ...], tag: Fraction):
        out.append((node, hist, tag))
        for c in node.children:
            walk(c, hist + (c.n,), tag * spec.theta(c.n))

    walk(cert, (0,), Fraction(1))
    return out


# -- the combinatorial quantities of the upper-bound machinery ---------


def pi_n(spec: SpaceSpec, n: int) -> Fraction:
    """sup of theta_{n_1}*...*theta_{n_s} over tuples with sum > n.

    Attained on multisets with n < sum <= n + n_max: dropping a factor
    from any longer tuple keeps the sum above n and strictly increases
    the product.
    """
    if n < 0:
        raise NormError("n must be >= 0")
    k = spec.n_max
    best = Fraction(0)

    def extend(smallest: int, total: int, prod: Fraction):
        nonlocal best
        for idx in range(smallest, k + 1):
            t = total + idx
            if t > n + k:
                break
            p = prod * spec.theta(idx)
            if t > n and p > best:
                best = p
            if t <= n + k:
                extend(idx, t, p)

    extend(1, 0, Fraction(1))
    return best


def compositions_upto(n: int, n_max: int | None = None) -> list[tuple[int, ...]]:
    """All history tuples (0, n_1, ..., n_s) with n_i >= 1 and sum <= n.

    ``n_max`` optionally caps the entries (histories realizable in a
    truncated space); by default entries are unconstrained, and the count
    is 2**n - 1.
    """
    out: list[tuple[int, ...]] = []

    def extend(prefix: tuple[int, ...], total: int):
        for i in range(1, n - total + 1):
            if n_max is not None and i > n_max:
                break
            t = prefix + (i,)
            out.append((0,) + t)
            extend(t, total + i)

    extend((), 0)
    return sorted(out, key=lambda t: (len(t), t))


def p_n(n: int) -> int:
    """Cardinality of the composition set: 2**n - 1."""
    if n < 1:
        raise NormError("n must be >= 1")
    return 2**n - 1


def composition_union(spec: SpaceSpec, n: int) -> FamilyExpr:
    """Union over history tuples of the iterated brackets [F_{n_1},...,F_{n_s}]."""
    chains = []
    for tup in compositions_upto(n, spec.n_max):
        expr: FamilyExpr | None = None
        for idx in tup[1:]:
            f = spec.family(idx)
            expr = f if expr is None else fam.Bracket(expr, f)
        chains.append(expr)
    return chains[0] if len(chains) == 1 else fam.Union(chains)
