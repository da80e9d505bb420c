"""Regular families of finite subsets of N, represented intensionally.

A family expression is built from constructors:

* ``S0``            -- singletons together with the empty set
* ``A(n)``          -- all sets of cardinality <= n
* ``S(a; g)``       -- Schreier class of ordinal a for a growth function g
* ``M[N]``          -- bracket: unions of N-blocks whose minima are M-admissible
* ``(M1,...,Mk)``   -- concatenation: ordered unions, one piece per argument
* ``M | N``         -- union
* ``tail(M, k)``    -- members with min >= k, together with singletons
* ``R(b)``          -- canonical family of Cantor-Bendixson index b
* ``hull(F1,...)``  -- hereditary spreading closure of an explicit list

Every constructed family is hereditary, spreading and compact, except
that the selectable card-variant of the Schreier limit rule need not be
hereditary (see ``Schreier``).  Membership is decidable and horizon-free;
enumeration is horizon-bounded.

Bracket membership uses the greedy decomposition into maximal initial
blocks; for regular arguments the minima of the greedy blocks witness
membership whenever any decomposition does (the uniqueness argument is
the one behind the greedy-vs-exhaustive property tests).
"""

from __future__ import annotations

from typing import Callable, Iterable, Sequence, Tuple

from .ordinals import ONE, Ordinal, ZERO, fund_seq, from_int

FinSet = Tuple[int, ...]

DEFAULT_HORIZON = 24
_CARD_SCAN_LIMIT = 16


class FamilyError(ValueError):
    """Malformed family construction or query."""


class HorizonError(RuntimeError):
    """An enumeration exceeded the configured horizon or budget."""


class ConstructionError(ValueError):
    """A construction's precondition failed; carries a witness."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


def as_finset(elements: Iterable[int]) -> FinSet:
    s = tuple(sorted(set(int(x) for x in elements)))
    if s and s[0] < 1:
        raise FamilyError("finite sets contain positive integers only")
    return s


def format_finset(s: FinSet) -> str:
    return "{" + ",".join(str(x) for x in s) + "}"


def spreading_of(s: FinSet, t: FinSet) -> bool:
    """True iff t is a spreading of s: same size, elementwise t >= s."""
    return len(s) == len(t) and all(b >= a for a, b in zip(s, t))


# -- growth functions --------------------------------------------------


class GrowthFn:
    """Nondecreasing function N -> N increasing to infinity."""

    __slots__ = ("name", "fn")

    def __init__(self, name: str, fn: Callable[[int], int]):
        self.name = name
        self.fn = fn

    def __call__(self, n: int) -> int:
        return self.fn(n)

    @staticmethod
    def from_table(name: str, values: Sequence[int]) -> "GrowthFn":
        """Table lookup, extended past the end with unit increments."""
        vals = tuple(int(v) for v in values)
        if not vals or any(b < a for a, b in zip(vals, vals[1:])):
            raise FamilyError("growth table must be nonempty and nondecreasing")

        def fn(n: int) -> int:
            if n < 1:
                return vals[0]
            if n <= len(vals):
                return vals[n - 1]
            return vals[-1] + (n - len(vals))

        return GrowthFn(name, fn)


IDENTITY = GrowthFn("identity", lambda n: n)


# -- expression nodes --------------------------------------------------


class FamilyExpr:
    """Base class; structural equality, memoized membership."""

    __slots__ = ("_key", "_hash", "_memo", "_members_cache")
    kind = "?"

    def _init(self, key: tuple) -> None:
        self._key = (self.kind,) + key
        self._hash = hash(self._key)
        self._memo: dict = {}
        self._members_cache: dict = {}

    def __eq__(self, other):
        return isinstance(other, FamilyExpr) and self._key == other._key

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"FamilyExpr({format_family(self)!r})"

    def __str__(self):
        return format_family(self)

    def children(self) -> tuple["FamilyExpr", ...]:
        return ()

    def member(self, s: FinSet) -> bool:
        """Decide s in F.  The empty set belongs to every family here."""
        if not s:
            return True
        cached = self._memo.get(s)
        if cached is None:
            cached = self._member(s)
            self._memo[s] = cached
        return cached

    def _member(self, s: FinSet) -> bool:
        raise NotImplementedError


class Singletons(FamilyExpr):
    kind = "S0"

    def __init__(self):
        self._init(())

    def _member(self, s):
        return len(s) <= 1


S0 = Singletons()


class Bounded(FamilyExpr):
    """All subsets of cardinality <= n."""

    __slots__ = ("n",)
    kind = "A"

    def __init__(self, n: int):
        if n < 0:
            raise FamilyError("cardinality bound must be >= 0")
        self.n = int(n)
        self._init((self.n,))

    def _member(self, s):
        return len(s) <= self.n


class Schreier(FamilyExpr):
    """Schreier class of ordinal ``alpha`` for growth function ``g``.

    alpha = 0 gives singletons; alpha = 1 gives {F : |F| <= g(min F)};
    successors bracket with order 1; at a limit, membership holds when
    the set lies in the class of a fundamental-sequence stage n with
    n <= g(min F) (variant "min", the default) or n <= g(|F|) (variant
    "card", the literal rule, which need not be hereditary).
    """

    __slots__ = ("alpha", "growth", "variant", "_stage_cache")
    kind = "S"

    def __init__(self, alpha: Ordinal, growth: GrowthFn = IDENTITY, variant: str = "min"):
        if variant not in ("min", "card"):
            raise FamilyError("variant must be 'min' or 'card'")
        self.alpha = alpha
        self.growth = growth
        self.variant = variant
        self._stage_cache: dict = {}
        self._init((alpha, growth.name, variant))

    def _stage(self, alpha: Ordinal) -> "Schreier":
        got = self._stage_cache.get(alpha)
        if got is None:
            got = Schreier(alpha, self.growth, self.variant)
            self._stage_cache[alpha] = got
        return got

    def _member(self, s):
        a = self.alpha
        if a.is_zero():
            return len(s) <= 1
        if a == ONE:
            return len(s) <= self.growth(s[0])
        if a.is_successor():
            return _bracket_member(self._stage(ONE), self._stage(a.predecessor()), s)
        bound = self.growth(s[0]) if self.variant == "min" else self.growth(len(s))
        for n in range(1, bound + 1):
            if self._stage(fund_seq(a, n)).member(s):
                return True
        return False


class Bracket(FamilyExpr):
    """M[N]: unions of successive N-blocks whose minima are M-admissible."""

    __slots__ = ("left", "right")
    kind = "bracket"

    def __init__(self, left: FamilyExpr, right: FamilyExpr):
        self.left = left
        self.right = right
        self._init((left._key, right._key))

    def children(self):
        return (self.left, self.right)

    def _member(self, s):
        return _bracket_member(self.left, self.right, s)


class Concat(FamilyExpr):
    """(M1,...,Mk): ordered unions with one (possibly empty) piece per part."""

    __slots__ = ("parts",)
    kind = "concat"

    def __init__(self, parts: Sequence[FamilyExpr]):
        if not parts:
            raise FamilyError("concatenation needs at least one part")
        self.parts = tuple(parts)
        self._init(tuple(p._key for p in self.parts))

    def children(self):
        return self.parts

    def _member(self, s):
        parts = self.parts
        n = len(s)

        memo: dict = {}

        def fits(i: int, j: int) -> bool:
            if j == len(parts):
                return i == n
            got = memo.get((i, j))
            if got is None:
                got = any(
                    parts[j].member(s[i:m]) and fits(m, j + 1)
                    for m in range(i, n + 1)
                )
                memo[(i, j)] = got
            return got

        return fits(0, 0)


class Union(FamilyExpr):
    __slots__ = ("parts",)
    kind = "union"

    def __init__(self, parts: Sequence[FamilyExpr]):
        flat: list[FamilyExpr] = []
        for p in parts:
            flat.extend(p.parts if isinstance(p, Union) else (p,))
        if not flat:
            raise FamilyError("union needs at least one part")
        self.parts = tuple(flat)
        self._init(tuple(p._key for p in self.parts))

    def children(self):
        return self.parts

    def _member(self, s):
        return any(p.member(s) for p in self.parts)


class Tail(FamilyExpr):
    """{s in F : k <= min s} together with all singletons."""

    __slots__ = ("child", "k")
    kind = "tail"

    def __init__(self, child: FamilyExpr, k: int):
        if k < 1:
            raise FamilyError("tail cutoff must be >= 1")
        self.child = child
        self.k = int(k)
        self._init((child._key, self.k))

    def children(self):
        return (self.child,)

    def _member(self, s):
        if len(s) <= 1:
            return True
        return s[0] >= self.k and self.child.member(s)


class CanonicalR(FamilyExpr):
    """Canonical family of Cantor-Bendixson index b > 0.

    For b = w^b1*k1 + ... + w^bm*km this is the concatenation of the
    k_i-fold powers of the Schreier classes S(b_i), smallest exponent
    first.
    """

    __slots__ = ("beta", "expansion")
    kind = "R"

    def __init__(self, beta: Ordinal):
        if beta.is_zero():
            raise FamilyError("R(b) needs b > 0")
        self.beta = beta
        parts: list[FamilyExpr] = []
        for e, c in reversed(beta.terms):
            parts.extend([Schreier(e)] * c)
        self.expansion = Concat(parts) if len(parts) > 1 else parts[0]
        self._init((beta,))

    def children(self):
        return (self.expansion,)

    def _member(self, s):
        return self.expansion.member(s)


class SpreadHull(FamilyExpr):
    """Hereditary spreading closure of an explicit finite list of sets."""

    __slots__ = ("sets",)
    kind = "hull"

    def __init__(self, sets: Iterable[FinSet]):
        self.sets = tuple(sorted(set(as_finset(s) for s in sets)))
        self._init((self.sets,))

    def _member(self, s):
        return any(_spread_subset(f, s) for f in self.sets)


def _spread_subset(f: FinSet, s: FinSet) -> bool:
    # is s a spreading of some subset of f?  greedy matching works because
    # using the smallest still-unused element of f never hurts later picks
    i = 0
    for x in s:
        if i < len(f) and f[i] <= x:
            i += 1
        else:
            return False
    return True


# -- core operations ---------------------------------------------------


def greedy_decompose(h: FamilyExpr, s: FinSet) -> list[FinSet]:
    """Split s into maximal initial h-blocks, left to right.

    Each block is the longest prefix of the remainder lying in h.  Raises
    ConstructionError when some element cannot start a block (its
    singleton is not in h).
    """
    if not s:
        raise ConstructionError("cannot decompose the empty set")
    blocks = []
    rest = s
    while rest:
        k = 0
        for j in range(1, len(rest) + 1):
            if h.member(rest[:j]):
                k = j
        if k == 0:
            raise ConstructionError(
                f"singleton {format_finset(rest[:1])} not in {h}", witness=rest[:1]
            )
        blocks.append(rest[:k])
        rest = rest[k:]
    return blocks


def _bracket_member(m: FamilyExpr, n: FamilyExpr, s: FinSet) -> bool:
    blocks = []
    rest = s
    while rest:
        k = 0
        for j in range(1, len(rest) + 1):
            if n.member(rest[:j]):
                k = j
        if k == 0:
            return False
        blocks.append(rest[:k])
        rest = rest[k:]
    return m.member(tuple(b[0] for b in blocks))


def is_admissible(f: FamilyExpr, blocks: Sequence[FinSet]) -> bool:
    """True iff blocks are nonempty, successive and have f-admissible minima."""
    prev = 0
    minima = []
    for b in blocks:
        if not b:
            return False
        if b[0] <= prev:
            return False
        prev = b[-1]
        minima.append(b[0])
    return f.member(tuple(minima))


def tail_restrict(f: FamilyExpr, k: int) -> FamilyExpr:
    return Tail(f, k)


def _colex_key(s: FinSet):
    return tuple(reversed(s))


def _uses_card_variant(f: FamilyExpr) -> bool:
    if isinstance(f, Schreier) and f.variant == "card":
        return True
    return any(_uses_card_variant(c) for c in f.children())


def enumerate_restriction(f: FamilyExpr, n: int, cap: int = DEFAULT_HORIZON) -> list[FinSet]:
    """All members of f contained in [1, n], in colex order.

    Grows members element by element, which is complete for hereditary
    families; expressions containing a card-variant Schreier node fall
    back to an exhaustive subset scan (capped at n <= 16).
    """
    if n > cap:
        raise HorizonError(f"restriction bound {n} exceeds horizon {cap}")
    if n < 1:
        return [()]
    if _uses_card_variant(f):
        if n > _CARD_SCAN_LIMIT:
            raise HorizonError(
                f"card-variant enumeration is capped at {_CARD_SCAN_LIMIT}"
            )
        universe = range(1, n + 1)
        out = []
        for mask in range(1 << n):
            s = tuple(i for i in universe if mask >> (i - 1) & 1)
            if f.member(s):
                out.append(s)
        return sorted(out, key=_colex_key)
    out = [()]
    frontier: list[FinSet] = [()]
    while frontier:
        new = []
        for s in frontier:
            for m in range((s[-1] + 1) if s else 1, n + 1):
                t = s + (m,)
                if f.member(t):
                    new.append(t)
        out.extend(new)
        frontier = new
    return sorted(out, key=_colex_key)


def family_subset_upto(a: FamilyExpr, b: FamilyExpr, n: int, cap: int = DEFAULT_HORIZON) -> bool:
    """True iff every member of a inside [1, n] belongs to b."""
    return all(b.member(s) for s in enumerate_restriction(a, n, cap))


def members_within(f: FamilyExpr, points: Sequence[int], budget: int | None = 200_000) -> list[FinSet]:
    """Nonempty members of f whose elements all lie in ``points``.

    Same hereditary growth as enumerate_restriction but over an arbitrary
    support; ``budget`` bounds the number of membership probes.  Results
    are cached per expression; a cached superset of the requested points
    is filtered instead of re-enumerated (sound for hereditary families).
    """
    pts = tuple(sorted(set(points)))
    cache = f._members_cache
    got = cache.get(pts)
    if got is not None:
        return got
    for key, mem in cache.items():
        if len(key) >= len(pts) and set(key).issuperset(pts):
            ps = set(pts)
            out = [s for s in mem if all(x in ps for x in s)]
            cache[pts] = out
            return out
    out = []
    frontier: list[FinSet] = [()]
    probes = 0
    while frontier:
        new = []
        for s in frontier:
            start = 0 if not s else pts.index(s[-1]) + 1
            for i in range(start, len(pts)):
                t = s + (pts[i],)
                probes += 1
                if budget is not None and probes > budget:
                    raise HorizonError(
                        f"member enumeration over {len(pts)} points exceeded budget {budget}"
                    )
                if f.member(t):
                    new.append(t)
        out.extend(new)
        frontier = new
    cache[pts] = out
    return out


# -- printer -----------------------------------------------------------


def format_family(f: FamilyExpr) -> str:
    from .ordinals import format_ordinal

    if isinstance(f, Singletons):
        return "S0"
    if isinstance(f, Bounded):
        return f"A({f.n})"
    if isinstance(f, Schreier):
        inner = format_ordinal(f.alpha)
        if f.variant == "card":
            return f"S({inner};{f.growth.name};card)"
        if f.growth.name != "identity":
            return f"S({inner};{f.growth.name})"
        return f"S({inner})"
    if isinstance(f, Bracket):
        left = format_family(f.left)
        if isinstance(f.left, Union):
            left = "(" + left + ")"
        return f"{left}[{format_family(f.right)}]"
    if isinstance(f, Concat):
        return "(" + ",".join(format_family(p) for p in f.parts) + ")"
    if isinstance(f, Union):
        return "|".join(format_family(p) for p in f.parts)
    if isinstance(f, Tail):
        return f"tail({format_family(f.child)},{f.k})"
    if isinstance(f, CanonicalR):
        return f"R({format_ordinal(f.beta)})"
    if isinstance(f, SpreadHull):
        return "hull(" + ",".join(format_finset(s) for s in f.sets) + ")"
    raise FamilyError(f"unknown family node {type(f).__name__}")


# -- convenience constructors ------------------------------------------


def schreier(alpha: Ordinal | int, growth: GrowthFn = IDENTITY, variant: str = "min") -> Schreier:
    if isinstance(alpha, int):
        alpha = from_int(alpha)
    return Schreier(alpha, growth, variant)


def bounded(n: int) -> Bounded:
    return Bounded(n)


def bracket(m: FamilyExpr, n: FamilyExpr) -> Bracket:
    return Bracket(m, n)


def concat(*parts: FamilyExpr) -> Concat:
    return Concat(parts)


def union(*parts: FamilyExpr) -> Union:
    return Union(parts)


def spread_hull(sets: Iterable[Iterable[int]]) -> SpreadHull:
    return SpreadHull(as_finset(s) for s in sets)


def canonical_r(beta: Ordinal) -> CanonicalR:
    return CanonicalR(beta)
