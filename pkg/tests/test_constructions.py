from fractions import Fraction as F

import pytest

from tsirkit.families import (
    S0,
    ConstructionError,
    HorizonError,
    bounded,
    bracket,
    schreier,
)
from tsirkit.constructions import (
    TailSet,
    bracket_power_family,
    bracket_power_tree,
    condense,
    flat_vector,
    l1_block_sequence,
    repeated_average,
    small_vector_search,
)
from tsirkit.indices import is_l1k_tree, iota_symbolic, tree_order
from tsirkit.norms import SparseVector, SpaceSpec, norm, seminorm
from tsirkit.ordinals import OMEGA, from_int, omega_pow, parse_ordinal

S1 = schreier(1)
S2 = schreier(2)
e = SparseVector.unit


def tsirelson():
    return SpaceSpec(S0, [(F(1, 2), S1)])


def two_pair():
    return SpaceSpec(S0, [(F(1, 2), S1), (F(1, 4), S2)])


# -- bracket powers -----------------------------------------------------------


def test_bracket_power_family_examples():
    b1 = bracket_power_family(S1, S0, 1)
    assert b1.member((3, 4, 5))
    assert bracket_power_family(S1, S0, 0) == S0
    r = iota_symbolic(bracket_power_family(S1, S0, 2))
    assert r.exact and r.lower == omega_pow(from_int(2))


def test_bracket_power_tree_branches():
    spec = tsirelson()
    tree, family, k_const = bracket_power_tree(spec, 1, 1, 8)
    assert k_const == 2
    # branch over {3,4,5}: norm e3+e4+e5 = 3/2 >= (1/2)*3
    v = norm(spec, e(3) + e(4) + e(5)).value
    assert v == F(3, 2)
    assert is_l1k_tree(spec, tree, k_const)
    for node in tree.nodes:
        s = tuple(i + 1 for i in node)
        assert family.member(s)


def test_bracket_power_tree_rejects_tiny_horizon():
    spec = tsirelson()
    with pytest.raises(HorizonError):
        bracket_power_tree(spec, 1, 1, 1)


# -- repeated averages ----------------------------------------------------------


def test_repeated_average_examples():
    assert repeated_average(1, TailSet(4)) == SparseVector({k: F(1, 4) for k in range(4, 8)})
    assert repeated_average(0, TailSet(9)) == SparseVector({9: F(1)})
    y = repeated_average(2, TailSet(2))
    assert y == SparseVector(
        {2: F(1, 4), 3: F(1, 4), 4: F(1, 8), 5: F(1, 8), 6: F(1, 8), 7: F(1, 8)}
    )
    assert seminorm(S1, y) == F(1, 2)


def test_repeated_average_mass_and_support():
    for order in (0, 1, 2):
        for start in (2, 3, 4):
            y = repeated_average(order, TailSet(start), F(3, 7))
            assert y.l1() == F(3, 7)
            assert schreier(order).member(y.support)


def test_repeated_average_limit_order():
    # a limit order resolves through its fundamental sequence at the start
    y = repeated_average(OMEGA, TailSet(2))
    assert y == repeated_average(2, TailSet(2))
    assert schreier(parse_ordinal("w")).member(y.support)


def test_repeated_average_support_budget():
    with pytest.raises(HorizonError):
        repeated_average(3, TailSet(4))


# -- small-vector search -----------------------------------------------------------


def test_small_vector_search_examples():
    y = small_vector_search(S0, S1, F(1, 4), TailSet(4))
    assert seminorm(S0, y) == F(1, 4) and y.l1() == 1
    y = small_vector_search(S1, S2, F(1, 2), TailSet(2))
    assert seminorm(S1, y) == F(1, 2)
    y = small_vector_search(S1, S2, F(1), TailSet(5))
    assert y == SparseVector({5: F(1)})   # eps >= 1: a basis vector suffices


def test_small_vector_search_failure_reports():
    with pytest.raises(HorizonError, match="attempts"):
        small_vector_search(S0, S0, F(1, 1000), TailSet(2), orders=(0, 1), start_scales=(1,))


# -- flat vectors ----------------------------------------------------------------------


def test_flat_vector_postconditions():
    spec = tsirelson()
    x, rep = flat_vector(spec, 1, F(1))
    assert x.l1() == 2 and rep["norm"] <= 2
    x, rep = flat_vector(spec, 1, F(1, 4))
    assert x.l1() == 2 and rep["norm"] <= 5
    assert rep["bound"] == 5


def test_flat_vector_infeasible_depth_fails_honestly():
    # a positive gamma demands genuinely deep averages, which exceed the
    # support budget at desk scale; the search reports its attempts
    spec = SpaceSpec(S0, [(F(1, 2) ** n, schreier(n)) for n in range(1, 5)])
    with pytest.raises(HorizonError, match="attempts"):
        flat_vector(spec, 3, F(1), TailSet(2))


def test_flat_vector_support_in_schreier_class():
    spec = tsirelson()
    x, rep = flat_vector(spec, 1, F(1))
    assert schreier(rep["gamma"] + from_int(2)).member(x.support)


# -- l1 block sequences -------------------------------------------------------------------


def test_l1_block_sequence_single_block():
    spec = tsirelson()
    blocks, const = l1_block_sequence(spec, 1, (3,), [3, 8], standin=S1)
    assert len(blocks) == 1 and const == F(1, 4)
    assert norm(spec, blocks[0]).value == 1


def test_l1_block_sequence_example():
    spec = tsirelson()
    blocks, const = l1_block_sequence(spec, 1, (3, 4, 5), [3, 8, 16, 24], standin=S1)
    assert const == F(1, 4)
    assert len(blocks) == 3
    for b, lo, hi in zip(blocks, [3, 8, 16], [8, 16, 24]):
        assert lo <= b.support[0] and b.support[-1] < hi
        assert norm(spec, b).value == 1
    total = SparseVector()
    for b in blocks:
        total = total + b
    assert norm(spec, total).value >= const * 3


def test_l1_block_sequence_checks_shape():
    spec = tsirelson()
    with pytest.raises(ConstructionError):
        l1_block_sequence(spec, 1, (1, 2, 3, 4, 5), [1, 2, 3, 4, 5, 6], standin=S0)


def test_l1_block_sequence_two_part_split():
    # minima of a two-part decomposition stay admissible for the pair family
    spec = two_pair()
    f = (3, 4, 6, 7)
    assert bracket(spec.family(1), S1).member(f)
    blocks, const = l1_block_sequence(spec, 1, f, [3, 8, 12, 15, 18], standin=S1)
    assert const == F(1, 4)
    total = SparseVector()
    for b in blocks:
        total = total + b
    assert norm(spec, total).value >= const * len(f)


# -- condensation ----------------------------------------------------------------------------


def _cells(n, width=10):
    return [[e(width * i + 1)] for i in range(1, n + 1)]


def _pairs_chains(n):
    chains = set()
    for a in range(1, n + 1):
        chains.add(((a, 0),))
        for b in range(a + 1, n + 1):
            chains.add(((a, 0), (b, 0)))
    return chains


def test_condense_singleton_target():
    cells = _cells(3)
    chains = {((n, 0),) for n in range(1, 4)}
    tree = condense(cells, chains, bounded(1), 1)
    assert tree_order(tree) == from_int(1)


def test_condense_pairs():
    tree = condense(_cells(4), _pairs_chains(4), bounded(2), 2)
    assert tree_order(tree) == from_int(2)
    for node in tree.nodes:
        assert len(node) <= 2


def test_condense_reports_missing_chain():
    cells = _cells(3)
    chains = {((1, 0),), ((2, 0),), ((3, 0),)}   # no pairs although A(2) wants them
    with pytest.raises(ConstructionError) as exc:
        condense(cells, chains, bounded(2), 2)
    assert exc.value.witness is not None


def test_condense_target_too_large():
    with pytest.raises(ConstructionError, match="target"):
        condense(_cells(4), _pairs_chains(4), bounded(2), 3)


def test_condense_requires_hereditary_chains():
    cells = _cells(3)
    chains = {((1, 0), (2, 0))}   # pair without its singletons
    with pytest.raises(ConstructionError, match="hereditary"):
        condense(cells, chains, bounded(2), 2)
