"""Cantor-Bendixson indices, well-founded tree orders and l1-tree checks.

``iota_symbolic`` evaluates the CB index of a family expression by
structural rules, returning an exact value where an identity applies and
an interval otherwise.  ``cb_rank_oracle`` iterates the topological
derivative set-wise on horizon truncations and is the independent check
for the symbolic rules at finite ranks.

Trees on block vectors are prefix-closed sets of successive block
sequences; the derived tree removes maximal nodes and the order counts
iterations until empty.  ``is_l1k_tree`` verifies the lower l1 estimate
K^-1 * sum |a_i| branchwise with exact norm evaluations at coefficient
patterns in {-1, 0, +1}; the norm only depends on coordinatewise
absolute values, so sign choices collapse (spot-checked), and the 0/1
patterns are the uniform combinations the certificates of this package
realize their constants on.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from . import families as fam
from .families import DEFAULT_HORIZON, FamilyExpr, FinSet, enumerate_restriction
from .norms import SparseVector, SpaceSpec, norm
from .ordinals import ONE, Ordinal, ZERO, compare, from_int, log_leading, omega_pow, ord_max

_S0_PROBE = 16


@dataclass(frozen=True)
class IotaResult:
    """CB-index estimate: exact value when ``exact``, else [lower, upper].

    ``upper`` is None for lower-bound-only results (e.g. a truncated
    derivative chain that is still growing with the horizon).
    """

    lower: Ordinal
    upper: Ordinal | None
    exact: bool

    def __post_init__(self):
        if self.exact and self.upper != self.lower:
            raise ValueError("exact results need lower == upper")
        if self.upper is not None and compare(self.lower, self.upper) > 0:
            raise ValueError("lower must not exceed upper")

    @staticmethod
    def of(value: Ordinal) -> "IotaResult":
        return IotaResult(value, value, True)


def _has_singleton(f: FamilyExpr) -> bool:
    # spreading families contain singletons cofinally once they contain one
    return any(f.member((j,)) for j in range(1, _S0_PROBE + 1))


def _flatten_bracket(f: fam.Bracket) -> list[FamilyExpr]:
    # [M1,...,Mk] is the left-nested bracket chain
    chain: list[FamilyExpr] = []
    node: FamilyExpr = f
    while isinstance(node, fam.Bracket):
        chain.append(node.right)
        node = node.left
    chain.append(node)
    chain.reverse()
    return chain


def _schreier_bracket_exact(left: FamilyExpr, right: FamilyExpr) -> Ordinal | None:
    """S(a)[S(w^eta*m)] = S(w^eta*m + a) when log(a) <= eta."""
    if not (isinstance(left, fam.Schreier) and isinstance(right, fam.Schreier)):
        return None
    if left.growth.name != right.growth.name or left.variant != right.variant:
        return None
    beta = right.alpha
    if len(beta.terms) != 1 or beta.is_finite():
        return None
    eta = beta.terms[0][0]
    alpha = left.alpha
    if not alpha.is_zero() and compare(log_leading(alpha), eta) > 0:
        return None
    return omega_pow(beta + alpha)


def iota_symbolic(f: FamilyExpr) -> IotaResult:
    """Symbolic CB index of a family expression.

    Exact rules: singletons 1; A(n) = n; Schreier classes w^a; canonical
    families R(b) = b; tail restriction preserves the index; unions take
    the maximum; concatenations sum the children's indices in reverse
    order; spreading hulls give the largest generator cardinality;
    bracket chains with identical leading families multiply,
    iota(base) * iota(lead)^m, and Schreier pairs of logarithm-compatible
    shape merge.  Other brackets return an interval bounded above by the
    reversed product.
    """
    if isinstance(f, fam.Singletons):
        return IotaResult.of(ONE)
    if isinstance(f, fam.Bounded):
        return IotaResult.of(from_int(f.n))
    if isinstance(f, fam.Schreier):
        return IotaResult.of(omega_pow(f.alpha))
    if isinstance(f, fam.CanonicalR):
        return IotaResult.of(f.beta)
    if isinstance(f, fam.Tail):
        return iota_symbolic(f.child)
    if isinstance(f, fam.SpreadHull):
        top = max((len(s) for s in f.sets), default=0)
        return IotaResult.of(from_int(top))
    if isinstance(f, fam.Union):
        subs = [iota_symbolic(p) for p in f.parts]
        lower = subs[0].lower
        for r in subs[1:]:
            lower = ord_max(lower, r.lower)
        if any(r.upper is None for r in subs):
            return IotaResult(lower, None, False)
        upper = subs[0].upper
        for r in subs[1:]:
            upper = ord_max(upper, r.upper)
        return IotaResult(lower, upper, all(r.exact for r in subs))
    if isinstance(f, fam.Concat):
        subs = [iota_symbolic(p) for p in f.parts]
        lower = ZERO
        for r in reversed(subs):
            lower = lower + r.lower
        if any(r.upper is None for r in subs):
            return IotaResult(lower, None, False)
        upper = ZERO
        for r in reversed(subs):
            upper = upper + r.upper
        exact = all(r.exact for r in subs)
        if exact:
            return IotaResult.of(lower)
        return IotaResult(lower, upper, False)
    if isinstance(f, fam.Bracket):
        merged = _schreier_bracket_exact(f.left, f.right)
        if merged is not None:
            return IotaResult.of(merged)
        chain = _flatten_bracket(f)
        leads, base = chain[:-1], chain[-1]
        subs = [iota_symbolic(p) for p in chain]
        lead_res, base_res = subs[0], subs[-1]
        if (
            all(p == leads[0] for p in leads)
            and lead_res.exact
            and base_res.exact
            and compare(lead_res.lower, ONE) > 0
            and _has_singleton(leads[0])
            and _has_singleton(base)
        ):
            value = base_res.lower
            for _ in leads:
                value = value * lead_res.lower
            return IotaResult.of(value)
        # interval: embeddings give the lower bound, the reversed product the upper
        lower = ZERO
        for r, g in zip(subs, chain):
            ok = all(_has_singleton(h) for h in chain if h is not g)
            if ok:
                lower = ord_max(lower, r.lower)
        if any(r.upper is None for r in subs):
            return IotaResult(lower, None, False)
        upper = subs[-1].upper
        for r in reversed(subs[:-1]):
            upper = upper * r.upper
        if lower == upper:
            return IotaResult.of(lower)
        return IotaResult(lower, upper, False)
    raise fam.FamilyError(f"unknown family node {type(f).__name__}")


# -- finite-stage derivative oracle -------------------------------------


def cb_derivative(f: FamilyExpr, s: FinSet, horizon: int = DEFAULT_HORIZON) -> bool:
    """Is s a limit point of f?

    For a spreading family one witness suffices: s is a limit point iff
    s + {m} belongs to f for every large m, and membership at the single
    probe m = max(horizon, max s + 1) decides it (threshold capped at the
    horizon).  Grammar families are spreading by construction.
    """
    probe = max(horizon, (s[-1] + 1) if s else 1)
    return f.member(s + (probe,))


def _derive_set(collection: set[FinSet], n: int) -> set[FinSet]:
    out = set()
    for s in collection:
        lo = s[-1] + 1 if s else 1
        if any(s + (m,) in collection for m in range(lo, n + 1)):
            out.add(s)
    return out


def derivative_chain(f: FamilyExpr, n: int, cap_steps: int | None = None,
                     horizon: int = DEFAULT_HORIZON) -> list[int]:
    """Sizes of the iterated set-wise derivatives of f restricted to [1, n].

    Stops when the collection reaches {empty set} (rank = number of steps)
    or when cap_steps is hit.
    """
    current: set[FinSet] = set(enumerate_restriction(f, n, max(n, horizon)))
    sizes = [len(current)]
    steps = 0
    while current and current != {()}:
        if cap_steps is not None and steps >= cap_steps:
            break
        current = _derive_set(current, n)
        sizes.append(len(current))
        steps += 1
    return sizes


def cb_rank_oracle(
    f: FamilyExpr,
    cap: Ordinal | int | None = None,
    horizon: int = 14,
) -> IotaResult:
    """Finite-stage CB rank from truncated derivative chains.

    Runs the chain at two horizons; an exact (finite) rank is reported
    only when both chains empty at the same step count.  A chain that is
    still growing with the horizon, or that hits a finite cap, yields a
    lower-bound-only result.  ``cap`` below omega limits the number of
    derivative steps; a cap >= omega means "run until empty".
    """
    if cap is None:
        cap = omega_pow(ONE)
    if isinstance(cap, int):
        cap = from_int(cap)
    cap_steps = cap.to_int() if cap.is_finite() else None
    h1 = max(4, horizon - 2)
    chain_small = _rank_at(f, h1, cap_steps)
    chain_big = _rank_at(f, horizon, cap_steps)
    if chain_small is not None and chain_big is not None and chain_small == chain_big:
        return IotaResult.of(from_int(chain_big))
    lower = from_int(max(x for x in (chain_small, chain_big, 0) if x is not None))
    if chain_big is None and cap_steps is not None:
        lower = from_int(cap_steps)
    return IotaResult(lower, None, False)


def _rank_at(f: FamilyExpr, n: int, cap_steps: int | None) -> int | None:
    current: set[FinSet] = set(enumerate_restriction(f, n, max(n, DEFAULT_HORIZON)))
    steps = 0
    while current and current != {()}:
        if cap_steps is not None and steps >= cap_steps:
            return None
        current = _derive_set(current, n)
        steps += 1
    if not current:
        # collection vanished without stabilizing at {0}: rank passed by
        return steps - 1 if steps else 0
    return steps


# -- block trees ---------------------------------------------------------


class BlockTree:
    """Prefix-closed set of successive block sequences.

    ``vectors`` is the node alphabet; ``nodes`` are tuples of indices
    into it.  Every listed sequence must be a successive block sequence
    of nonzero vectors.
    """

    __slots__ = ("vectors", "nodes")

    def __init__(self, vectors: Sequence[SparseVector], nodes: Iterable[tuple[int, ...]]):
        self.vectors = tuple(vectors)
        self.nodes = frozenset(tuple(n) for n in nodes)
        for v in self.vectors:
            if v.is_zero():
                raise fam.ConstructionError("block tree vectors must be nonzero")
        for node in self.nodes:
            if not node:
                raise fam.ConstructionError("the empty sequence is not a node")
            if node[:-1] and node[:-1] not in self.nodes:
                raise fam.ConstructionError(f"tree not prefix-closed at {node}")
            prev_max = 0
            for idx in node:
                supp = self.vectors[idx].support
                if supp[0] <= prev_max:
                    raise fam.ConstructionError(f"sequence {node} is not successive")
                prev_max = supp[-1]

    def sequences(self) -> list[tuple[int, ...]]:
        return sorted(self.nodes)

    def maximal_nodes(self) -> list[tuple[int, ...]]:
        return sorted(n for n in self.nodes if not any(
            m != n and m[: len(n)] == n for m in self.nodes
        ))

    def branch_vectors(self, node: tuple[int, ...]) -> list[SparseVector]:
        return [self.vectors[i] for i in node]

    def __len__(self):
        return len(self.nodes)

    def __eq__(self, other):
        return (
            isinstance(other, BlockTree)
            and self.vectors == other.vectors
            and self.nodes == other.nodes
        )


def tree_derive(t: BlockTree) -> BlockTree:
    """Remove the maximal nodes."""
    maximal = set(t.maximal_nodes())
    return BlockTree(t.vectors, (n for n in t.nodes if n not in maximal))


def tree_order(t: BlockTree) -> Ordinal:
    """Iterations of the derived tree until empty: 1 + max child order."""
    if not t.nodes:
        return ZERO
    return from_int(max(len(n) for n in t.nodes))


def tree_families(t: BlockTree) -> tuple[list[FinSet], fam.SpreadHull]:
    """Max-support sets of all nodes, and their hereditary spreading hull."""
    h = sorted({tuple(t.vectors[i].support[-1] for i in node) for node in t.nodes})
    return list(h), fam.SpreadHull(h)


def _sign_patterns(k: int) -> list[tuple[int, ...]]:
    # alternating pattern plus the all-ones; the norm is sign-invariant
    alt = tuple((-1) ** i for i in range(k))
    return [tuple([1] * k), alt] if k > 1 else [tuple([1] * k)]


def is_l1k_tree(spec: SpaceSpec, t: BlockTree, k_const: Fraction, budget=None) -> bool:
    ok, _ = l1k_tree_report(spec, t, k_const, budget)
    return ok


def _subset_closed(t: BlockTree) -> bool:
    # closure under single-element removal implies closure under subsets
    return all(
        node[:i] + node[i + 1:] in t.nodes
        for node in t.nodes
        for i in range(len(node))
        if len(node) > 1
    )


def l1k_tree_report(
    spec: SpaceSpec, t: BlockTree, k_const: Fraction, budget=None
) -> tuple[bool, list[dict]]:
    """Verify the branchwise lower l1 estimate with constant 1/K.

    Every vector in use must be normalized (checked first; failures are
    reported by index).  For each maximal branch and each nonempty
    subset of it, the +-1 combinations are evaluated exactly and
    compared with K^-1 times the number of terms.  When the node set is
    closed under subsets, each node is evaluated once at full support,
    which covers the same pattern family without duplication.
    """
    from .norms import ENUM_BUDGET

    if budget is None:
        budget = ENUM_BUDGET
    k_const = Fraction(k_const)
    if k_const <= 0:
        raise fam.ConstructionError("the l1 constant K must be positive")
    failures: list[dict] = []
    used = {idx for node in t.nodes for idx in node}
    for idx in sorted(used):
        nv = norm(spec, t.vectors[idx], budget).value
        if nv != 1:
            raise fam.ConstructionError(
                f"vector {idx} is not normalized: norm {nv}", witness=idx
            )
    inv = 1 / k_const

    def check_combo(branch, sub):
        vecs = [t.vectors[i] for i in sub]
        for signs in _sign_patterns(len(vecs)):
            total = SparseVector()
            for sgn, v in zip(signs, vecs):
                total = total + (v if sgn > 0 else -v)
            achieved = norm(spec, total, budget).value
            needed = inv * len(vecs)
            if achieved < needed:
                failures.append(
                    {
                        "branch": list(branch),
                        "subset": list(sub),
                        "signs": list(signs),
                        "achieved": achieved,
                        "needed": needed,
                    }
                )

    if _subset_closed(t):
        for node in t.sequences():
            check_combo(node, node)
    else:
        for node in t.maximal_nodes():
            for size in range(1, len(node) + 1):
                for sub in combinations(node, size):
                    check_combo(node, sub)
    return (not failures), failures


# -- the gamma quantity --------------------------------------------------


def gamma(
    spec: SpaceSpec,
    iotas: Sequence[Ordinal],
    eps: Fraction,
    m: int,
) -> Ordinal:
    """max of log(iota_0 * iota_{n_s} * ... * iota_{n_1}) over tuples
    (n_1,...,n_s) with eps * theta_{n_1} * ... * theta_{n_s} > theta_m;
    the empty maximum is 0.

    ``iotas`` lists the CB indices alpha_0..alpha_{n_max}.  The tuple set
    is finite because the theta products decay below theta_m / eps.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise fam.ConstructionError("eps must be positive")
    if not (1 <= m <= spec.n_max):
        raise fam.ConstructionError("m must index a pair of the spec")
    if len(iotas) != spec.n_max + 1:
        raise fam.ConstructionError("iotas must list alpha_0..alpha_{n_max}")
    theta_m = spec.theta(m)
    best = ZERO
    found = False

    def explore(prefix: list[int], prod: Fraction):
        nonlocal best, found
        for n in range(1, spec.n_max + 1):
            p = prod * spec.theta(n)
            if eps * p <= theta_m:
                continue
            tup = prefix + [n]
            value = iotas[0]
            for idx in reversed(tup):
                value = value * iotas[idx]
            lg = log_leading(value) if not value.is_zero() else ZERO
            if not found or compare(lg, best) > 0:
                best = lg
                found = True
            explore(tup, p)

    explore([], Fraction(1))
    return best
