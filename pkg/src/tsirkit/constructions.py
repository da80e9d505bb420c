"""Builders for lower-bound witnesses, all verified by exact computation.

Nothing here is trusted from construction logic alone: every builder
either re-checks its postcondition exactly (l1 mass, norm bounds, family
membership, branchwise l1 constants) or raises with a witness.

* ``bracket_power_family``  iterated bracket of a family over a base
* ``bracket_power_tree``    block tree of basis vectors realizing it
* ``repeated_average``      recursively averaged flat vectors
* ``small_vector_search``   escalating search for small-seminorm vectors
* ``flat_vector``           fixed-l1-mass vectors with certified norm bound
* ``l1_block_sequence``     normalized blocks with a certified l1 constant
* ``condense``              finite-order tree extraction from cell data
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Callable, Iterable, Sequence

from . import families as fam
from .families import ConstructionError, FamilyExpr, FinSet, HorizonError
from .indices import BlockTree, gamma, iota_symbolic, l1k_tree_report, tree_order
from .norms import ENUM_BUDGET, SparseVector, SpaceSpec, norm, seminorm
from .ordinals import Ordinal, from_int, fund_seq

MAX_AVERAGE_SUPPORT = 64


@dataclass(frozen=True)
class TailSet:
    """Arithmetic tail {start, start+step, start+2*step, ...}."""

    start: int
    step: int = 1

    def __post_init__(self):
        if self.start < 1 or self.step < 1:
            raise ConstructionError("tail start and step must be >= 1")

    def shifted(self, new_start: int) -> "TailSet":
        return TailSet(new_start, self.step)


def bracket_power_family(fn: FamilyExpr, f0: FamilyExpr, m: int) -> FamilyExpr:
    """The m-fold bracket of fn over f0; m = 0 gives f0 itself."""
    if m < 0:
        raise ConstructionError("m must be >= 0")
    if m == 0:
        return f0
    expr: FamilyExpr = fn
    for _ in range(m - 1):
        expr = fam.Bracket(expr, fn)
    return fam.Bracket(expr, f0)


def bracket_power_tree(
    spec: SpaceSpec,
    n: int,
    m: int,
    horizon: int,
    budget: int | None = ENUM_BUDGET,
    verify: bool = True,
) -> tuple[BlockTree, FamilyExpr, Fraction]:
    """Block tree of unit basis vectors over the m-fold bracket family.

    Branches are exactly the nonempty members of the family inside
    [1, horizon]; the tree is an l1-K tree for K = theta_n^-m, verified
    branchwise unless ``verify`` is disabled.  Returns (tree, family, K).
    """
    if not (1 <= n <= spec.n_max):
        raise ConstructionError("n must index a pair of the spec")
    if m < 1:
        raise ConstructionError("m must be >= 1")
    family = bracket_power_family(spec.family(n), spec.f0, m)
    members = [s for s in fam.enumerate_restriction(family, horizon, max(horizon, fam.DEFAULT_HORIZON)) if s]
    if not any(len(s) > 1 for s in members):
        raise HorizonError(f"horizon {horizon} admits no nontrivial branch")
    vectors = [SparseVector.unit(k) for k in range(1, horizon + 1)]
    nodes = {tuple(k - 1 for k in s) for s in members}
    tree = BlockTree(vectors, nodes)
    k_const = Fraction(1) / spec.theta(n) ** m
    if verify:
        ok, failures = l1k_tree_report(spec, tree, k_const, budget)
        if not ok:
            raise ConstructionError(
                f"bracket tree fails the l1 bound on {len(failures)} branches", witness=failures[0]
            )
    return tree, family, k_const


def repeated_average(
    order: Ordinal | int,
    tail: TailSet,
    target_l1: Fraction = Fraction(1),
    max_support: int = MAX_AVERAGE_SUPPORT,
) -> SparseVector:
    """Recursively averaged vector of exact l1 mass ``target_l1``.

    Order 0 on a tail is the basis vector at its start scaled to the
    target mass; order k+1 averages n = start successive order-k vectors
    on consecutive tails.  A limit order is resolved through its standard
    fundamental sequence at the tail start, mirroring the Schreier limit
    rule, so the support lies in the Schreier class of the given order
    relative to the tail.
    """
    target = Fraction(target_l1)
    if target <= 0:
        raise ConstructionError("target l1 mass must be positive")
    counter = {"left": max_support}
    vec, _ = _build_average(_as_ordinal(order), tail.start, tail.step, target, counter)
    return vec


def _as_ordinal(order: Ordinal | int) -> Ordinal:
    return from_int(order) if isinstance(order, int) else order


def _build_average(
    order: Ordinal, start: int, step: int, target: Fraction, counter: dict
) -> tuple[SparseVector, int]:
    while order.is_limit():
        order = fund_seq(order, start)
    if order.is_zero():
        if counter["left"] <= 0:
            raise HorizonError(
                f"average support exceeds the budget of {MAX_AVERAGE_SUPPORT} points"
            )
        counter["left"] -= 1
        return SparseVector({start: target}), start + step
    pred = order.predecessor()
    n = start
    total = SparseVector()
    cursor = start
    for _ in range(n):
        part, cursor = _build_average(pred, cursor, step, target / n, counter)
        total = total + part
    return total, cursor


def small_vector_search(
    g: FamilyExpr,
    support_family: FamilyExpr,
    eps: Fraction,
    tail: TailSet,
    orders: Iterable[Ordinal | int] = (0, 1, 2, 3),
    start_scales: Iterable[int] = (1, 2, 4, 8),
    budget: int | None = ENUM_BUDGET,
) -> SparseVector:
    """Find y with l1 mass 1, supp y in ``support_family`` and
    seminorm(g, y) <= eps, by escalating average order and tail start.

    Every candidate is verified exactly; failure raises with a report of
    the attempts instead of approximating.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise ConstructionError("eps must be positive")
    attempts = []
    for order in orders:
        for scale in start_scales:
            start = tail.start * scale if scale > 1 else tail.start
            try:
                y = repeated_average(order, tail.shifted(start))
            except HorizonError as e:
                attempts.append((order, start, f"support budget: {e}"))
                continue
            if not support_family.member(y.support):
                attempts.append((order, start, "support not in the required family"))
                continue
            try:
                sn = seminorm(g, y, budget)
            except HorizonError as e:
                attempts.append((order, start, f"seminorm budget: {e}"))
                continue
            if sn <= eps:
                return y
            attempts.append((order, start, f"seminorm {sn} > {eps}"))
    raise HorizonError(
        "no candidate met the seminorm target; attempts: "
        + "; ".join(f"order {o} start {s}: {why}" for o, s, why in attempts)
    )


def flat_vector(
    spec: SpaceSpec,
    m: int,
    eps: Fraction,
    tail: TailSet = TailSet(2),
    budget: int | None = ENUM_BUDGET,
) -> tuple[SparseVector, dict]:
    """A vector x with l1 mass exactly 1/theta_m and norm at most 1 + 1/eps.

    The support lies in the Schreier class of order gamma(eps, m) + 2
    relative to the tail, the small-seminorm ingredient is searched for
    exactly, and both conclusions are re-checked on the result.  Returns
    (x, report).
    """
    eps = Fraction(eps)
    if not (1 <= m <= spec.n_max):
        raise ConstructionError("m must index a pair of the spec")
    iotas = []
    for f in [spec.f0] + [f for _, f in spec.used_pairs]:
        r = iota_symbolic(f)
        if not r.exact:
            raise ConstructionError(f"cannot compute an exact index for {f}")
        iotas.append(r.lower)
    gm = gamma(spec, iotas, eps, m)
    tuples = _qualifying_tuples(spec, eps, m)
    support_family = fam.Schreier(gm + from_int(2))
    seminorm_family = fam.Schreier(gm + from_int(1))
    theta_m = spec.theta(m)
    if tuples:
        bound = theta_m / len(tuples)
        y = small_vector_search(seminorm_family, support_family, bound, tail, budget=budget)
    else:
        # every admissible tag is already below theta_m / eps; any flat
        # vector with admissible support works
        y = small_vector_search(fam.S0, support_family, Fraction(1), tail, budget=budget)
    x = y.scale(1 / theta_m)
    report = {
        "gamma": gm,
        "qualifying_tuples": len(tuples),
        "l1": x.l1(),
        "norm": norm(spec, x, budget).value,
        "bound": 1 + 1 / eps,
    }
    if report["l1"] != 1 / theta_m:
        raise ConstructionError(f"l1 mass {report['l1']} != {1/theta_m}")
    if report["norm"] > report["bound"]:
        raise ConstructionError(
            f"norm {report['norm']} exceeds the bound {report['bound']}"
        )
    return x, report


def _qualifying_tuples(spec: SpaceSpec, eps: Fraction, m: int) -> list[tuple[int, ...]]:
    """Tuples (n_1,...,n_s) with eps * theta_{n_1}...theta_{n_s} > theta_m."""
    theta_m = spec.theta(m)
    out: list[tuple[int, ...]] = []

    def explore(prefix: tuple[int, ...], prod: Fraction):
        for n in range(1, spec.n_max + 1):
            p = prod * spec.theta(n)
            if eps * p <= theta_m:
                continue
            tup = prefix + (n,)
            out.append(tup)
            explore(tup, p)

    explore((), Fraction(1))
    return sorted(out, key=lambda t: (len(t), t))


def l1_block_sequence(
    spec: SpaceSpec,
    n: int,
    f: FinSet,
    cuts: Sequence[int],
    standin: FamilyExpr,
    eps: Fraction = Fraction(1),
    budget: int | None = ENUM_BUDGET,
) -> tuple[list[SparseVector], Fraction]:
    """Normalized blocks (x_k) for k in f, supp x_k inside [q_k, q_{k+1}),
    with the branchwise l1 constant eps*theta_n/(1+eps) verified exactly.

    ``f`` must lie in the bracket of the spec's n-th family over the
    finite ``standin`` family; ``cuts`` maps each k in f (and the next
    index) to the cut points q_k.  Returns (blocks, constant).
    """
    eps = Fraction(eps)
    if not (1 <= n <= spec.n_max):
        raise ConstructionError("n must index a pair of the spec")
    shape = fam.Bracket(spec.family(n), standin)
    if not shape.member(f):
        raise ConstructionError(
            f"{fam.format_finset(f)} is not in {shape}", witness=f
        )
    q = {k: cuts[i] for i, k in enumerate(f)}
    if len(cuts) < len(f) + 1:
        raise ConstructionError("cuts must cover every index of f plus one")
    nxt = {k: cuts[i + 1] for i, k in enumerate(f)}
    if any(cuts[i] >= cuts[i + 1] for i in range(len(f))):
        raise ConstructionError("cuts must be strictly increasing")
    if any(q[k] < k for k in f):
        raise ConstructionError("cut points must dominate the indices (q_k >= k)")
    blocks = []
    for k in f:
        # an order-1 average from q_k spans {q_k .. 2q_k - 1}
        order = 1 if nxt[k] - q[k] >= q[k] else 0
        y = repeated_average(order, TailSet(q[k]))
        if y.support[-1] >= nxt[k]:
            y = repeated_average(0, TailSet(q[k]))
        nv = norm(spec, y, budget).value
        blocks.append(y.scale(1 / nv))
    constant = eps * spec.theta(n) / (1 + eps)
    failures = _verify_block_constant(spec, blocks, constant, budget)
    if failures:
        worst = failures[0]
        raise fam.ConstructionError(
            f"l1 constant {constant} fails on subset {worst['subset']}: achieved {worst['achieved']}",
            witness=worst,
        )
    return blocks, constant


def _verify_block_constant(spec, blocks, constant, budget) -> list[dict]:
    failures = []
    for size in range(1, len(blocks) + 1):
        for sub in combinations(range(len(blocks)), size):
            total = SparseVector()
            for i in sub:
                total = total + blocks[i]
            achieved = norm(spec, total, budget).value
            if achieved < constant * size:
                failures.append({"subset": list(sub), "achieved": achieved, "needed": constant * size})
    return failures


# -- finite-order condensation ------------------------------------------


def condense(
    cells: Sequence[Sequence[SparseVector]],
    chains: Iterable[tuple[tuple[int, int], ...]],
    h: FamilyExpr,
    target: int,
) -> BlockTree:
    """Extract a tree of order >= target from a hereditary chain family.

    ``cells`` lists the alphabet A_1..A_N (vectors; cell t holds the
    choices for index t+1); ``chains`` is the hereditary collection: each
    chain is a tuple of (index, choice) pairs with strictly increasing
    1-based indices.  Requires: for every nonempty member F of h inside
    [1, N] some chain is indexed exactly by F (violations are reported
    with the witness F).  The successor step picks a singleton surviving
    target-1 derivative stages, recurses, partitions the maximal nodes by
    compatible choices at the picked index, and keeps a part of maximal
    order.
    """
    if target < 1:
        raise ConstructionError("target order must be >= 1")
    ncells = len(cells)
    chain_set = {tuple(c) for c in chains}
    for c in chain_set:
        idxs = [i for i, _ in c]
        if idxs != sorted(set(idxs)):
            raise ConstructionError(f"chain {c} has unordered indices")
        if any(not (1 <= i <= ncells) for i in idxs):
            raise ConstructionError(f"chain {c} indexes a missing cell")
        if any(not (0 <= j < len(cells[i - 1])) for i, j in c):
            raise ConstructionError(f"chain {c} picks a missing element")
    for c in chain_set:
        for drop in range(len(c)):
            sub = c[:drop] + c[drop + 1:]
            if sub and sub not in chain_set:
                raise ConstructionError(f"chain family is not hereditary: missing {sub}")
    hset = {s for s in fam.enumerate_restriction(h, ncells, max(ncells, fam.DEFAULT_HORIZON)) if s}
    indexed = {}
    for c in chain_set:
        indexed.setdefault(tuple(i for i, _ in c), []).append(c)
    for fset in sorted(hset):
        if fset not in indexed:
            raise ConstructionError(
                f"no chain realizes {fam.format_finset(fset)}", witness=fset
            )
    node_chains = _condense(hset | {()}, chain_set, target, ncells, cells)
    # flatten to a BlockTree over the cell vectors
    vec_index: dict[tuple[int, int], int] = {}
    vectors: list[SparseVector] = []
    for i, cell in enumerate(cells, start=1):
        for j, v in enumerate(cell):
            vec_index[(i, j)] = len(vectors)
            vectors.append(v)
    nodes = set()
    for c in node_chains:
        for ln in range(1, len(c) + 1):
            nodes.add(tuple(vec_index[p] for p in c[:ln]))
    tree = BlockTree(vectors, nodes)
    got = tree_order(tree)
    if got < from_int(target):
        raise ConstructionError(f"condensation reached order {got} < {target}")
    for node in tree.nodes:
        pairs = tuple(_pair_of(vec_index, idx) for idx in node)
        if pairs not in chain_set:
            raise ConstructionError(f"branch {pairs} escaped the chain family")
    return tree


def _pair_of(vec_index: dict, flat: int) -> tuple[int, int]:
    for pair, idx in vec_index.items():
        if idx == flat:
            return pair
    raise ConstructionError("internal: unindexed vector")


def _set_derivative_stages(hset: set[FinSet], ncells: int, steps: int) -> set[FinSet]:
    current = set(hset)
    for _ in range(steps):
        nxt = set()
        for s in current:
            lo = s[-1] + 1 if s else 1
            if any(s + (m,) in current for m in range(lo, ncells + 1)):
                nxt.add(s)
        current = nxt
    return current


def _condense(hset: set[FinSet], chain_set: set, target: int, ncells: int, cells) -> list:
    if target == 1:
        out = []
        for n in range(1, ncells + 1):
            if (n,) in hset:
                for j in range(len(cells[n - 1])):
                    if ((n, j),) in chain_set:
                        out.append(((n, j),))
                        break
        if not out:
            raise ConstructionError("no singleton chain available", witness=())
        return out
    stage = _set_derivative_stages(hset, ncells, target - 1)
    n0 = None
    for s in sorted(stage):
        if len(s) == 1:
            n0 = s[0]
            break
    if n0 is None:
        raise ConstructionError(
            f"no singleton survives {target - 1} derivative steps; target too large",
            witness=target,
        )
    gset = {s[1:] for s in hset if s and s[0] == n0 and len(s) > 1}
    gset = {g for g in gset if g}
    # tails of chains through n0 are hereditary because the chain family is
    sub_chains = {c[1:] for c in chain_set if len(c) > 1 and c[0][0] == n0}
    t0 = _condense(gset, sub_chains, target - 1, ncells, cells)
    # maximal nodes of t0
    t0set = set(t0)
    allnodes = set()
    for c in t0set:
        for ln in range(1, len(c) + 1):
            allnodes.add(c[:ln])
    maximal = [c for c in allnodes if not any(d != c and d[: len(c)] == c for d in allnodes)]
    parts: dict[int, list] = {}
    for node in maximal:
        for j in range(len(cells[n0 - 1])):
            if ((n0, j),) + node in chain_set:
                parts.setdefault(j, []).append(node)
                break
        else:
            raise ConstructionError(f"maximal node {node} has no compatible choice at {n0}")
    best_j, best_nodes, best_order = None, None, -1
    for j in sorted(parts):
        sel = parts[j]
        closed = set()
        for c in sel:
            for ln in range(1, len(c) + 1):
                closed.add(c[:ln])
        order = max(len(c) for c in closed)
        if order > best_order:
            best_j, best_nodes, best_order = j, closed, order
    out = [((n0, best_j),)]
    for node in best_nodes:
        out.append(((n0, best_j),) + node)
    return out
