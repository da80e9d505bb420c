import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tsirkit.families import S0, bounded, bracket, schreier, union
from tsirkit.norms import (
    CertNode,
    CertificateError,
    SparseVector,
    SpaceSpec,
    composition_union,
    compositions_upto,
    derived_spec,
    norm,
    norm_certificate,
    p_n,
    pi_n,
    seminorm,
    verify_certificate,
)
from oracles import oracle_norm, oracle_seminorm

S1 = schreier(1)
S2 = schreier(2)
e = SparseVector.unit


def tsirelson():
    return SpaceSpec(S0, [(F(1, 2), S1)])


def two_pair():
    return SpaceSpec(S0, [(F(1, 2), S1), (F(1, 4), S2)])


def random_vector(rng, universe=10, max_size=8):
    supp = sorted(rng.sample(range(1, universe + 1), rng.randint(1, max_size)))
    return SparseVector(
        {k: F(rng.choice([-4, -3, -2, -1, 1, 2, 3, 4]), rng.randint(1, 4)) for k in supp}
    )


# -- vectors ---------------------------------------------------------------


def test_vector_drops_zeros_and_sorts():
    v = SparseVector([(3, F(1)), (2, F(0)), (5, F(-1, 2)), (3, F(-1))])
    assert v.support == (5,)
    assert v.coeff(5) == F(-1, 2)


def test_vector_rejects_bad_indices():
    with pytest.raises(ValueError):
        SparseVector({0: F(1)})


def test_vector_l1_and_restrict():
    v = SparseVector({2: F(1, 2), 4: F(-1, 3)})
    assert v.l1() == F(5, 6)
    assert v.restrict([2]).support == (2,)
    assert v.restrict_interval(3, 5).support == (4,)


# -- seminorms ----------------------------------------------------------------


def test_seminorm_examples():
    assert seminorm(S0, e(2) + e(3)) == 1
    assert seminorm(S1, e(2) + e(3)) == 2
    y = SparseVector({1: F(1, 2), 2: F(1, 3), 3: F(1, 3)})
    assert seminorm(S1, y) == F(2, 3)
    assert seminorm(S1, SparseVector()) == 0


@given(st.integers(0, 10**6))
@settings(max_examples=60, deadline=None)
def test_seminorm_matches_oracle(seed):
    rng = random.Random(seed)
    f = rng.choice([S0, S1, bounded(2), bracket(S1, S1)])
    x = random_vector(rng, universe=9, max_size=6)
    assert seminorm(f, x) == oracle_seminorm(f, x)


# -- specs -----------------------------------------------------------------------


def test_spec_validation():
    with pytest.raises(ValueError):
        SpaceSpec(S0, [])
    with pytest.raises(ValueError):
        SpaceSpec(S0, [(F(3, 2), S1)])
    with pytest.raises(ValueError):
        SpaceSpec(S0, [(F(1, 4), S1), (F(1, 2), S2)])   # increasing thetas


def test_spec_wraps_families_without_singletons():
    from tsirkit.families import spread_hull

    spec = SpaceSpec(spread_hull([(3, 7)]), [(F(1, 2), S1)])
    assert spec.f0.member((1,))     # singletons joined in


# -- the norm ----------------------------------------------------------------------


def test_norm_golden_values():
    spec = tsirelson()
    assert norm(spec, e(2) + e(3)).value == 1
    assert norm(spec, e(3) + e(4) + e(5) + e(6)).value == F(3, 2)
    assert norm(spec, e(17)).value == 1
    assert norm(spec, SparseVector()).value == 0


def test_norm_upper_bound_flag():
    spec = SpaceSpec(S0, [(F(1, 2), S1)], infinite_tail=True)
    x = e(2) + e(3)
    r = norm(spec, x)
    assert r.lower == r.value == 1
    assert r.upper == 1 + F(1, 2) * 2


def test_derived_spec_examples():
    spec = tsirelson()
    assert norm(derived_spec(spec, S1), e(2) + e(3)).value == 2
    assert norm(derived_spec(spec, bounded(2)), e(2) + e(3)).value == 2
    rng = random.Random(3)
    same = derived_spec(spec, S0)
    for _ in range(50):
        x = random_vector(rng)
        assert norm(spec, x).value == norm(same, x).value


@given(st.integers(0, 10**6))
@settings(max_examples=40, deadline=None)
def test_norm_matches_exhaustive_oracle(seed):
    rng = random.Random(seed)
    spec = rng.choice([
        tsirelson(),
        two_pair(),
        SpaceSpec(bounded(2), [(F(1, 3), bounded(3))]),
    ])
    x = random_vector(rng, universe=10, max_size=7)
    assert norm(spec, x).value == oracle_norm(spec, x)


@given(st.integers(0, 10**6))
@settings(max_examples=60, deadline=None)
def test_fixed_point_equation(seed):
    # the computed norm satisfies the defining maximum exactly
    rng = random.Random(seed)
    spec = two_pair()
    x = random_vector(rng, universe=9, max_size=6)
    v = norm(spec, x).value
    best = seminorm(spec.f0, x)
    pts = x.support
    from tsirkit.families import members_within

    for n in range(1, spec.n_max + 1):
        theta = spec.theta(n)
        for p in members_within(spec.family(n), pts):
            cuts = list(p) + [None]
            total = F(0)
            for a, b in zip(cuts, cuts[1:]):
                hi = (b - 1) if b is not None else pts[-1]
                total += norm(spec, x.restrict_interval(a, hi)).value
            best = max(best, theta * total)
    assert v == best


@given(st.integers(0, 10**6))
@settings(max_examples=60, deadline=None)
def test_unconditionality_and_monotonicity(seed):
    rng = random.Random(seed)
    spec = two_pair()
    x = random_vector(rng, universe=9, max_size=6)
    v = norm(spec, x).value
    flipped = SparseVector({i: (c if rng.random() < 0.5 else -c) for i, c in x.items()})
    assert norm(spec, flipped).value == v
    sub = SparseVector({i: c for i, c in x.items() if rng.random() < 0.6})
    assert norm(spec, sub).value <= v


@given(st.integers(0, 10**6))
@settings(max_examples=60, deadline=None)
def test_sandwich(seed):
    rng = random.Random(seed)
    spec = two_pair()
    x = random_vector(rng, universe=9, max_size=6)
    v = norm(spec, x).value
    assert seminorm(spec.f0, x) <= v <= x.l1()


# -- certificates --------------------------------------------------------------------


def test_certificate_shape_and_value():
    spec = tsirelson()
    x = e(3) + e(4) + e(5) + e(6)
    cert = norm_certificate(spec, x)
    assert (cert.lo, cert.hi, cert.n) == (3, 6, 0)
    assert [(c.lo, c.hi) for c in cert.children] == [(3, 3), (4, 4), (5, 6)]
    assert all(c.n == 1 for c in cert.children)
    assert verify_certificate(spec, x, cert) == F(3, 2)


def test_certificate_single_point():
    spec = tsirelson()
    cert = norm_certificate(spec, e(5))
    assert cert.is_leaf() and verify_certificate(spec, e(5), cert) == 1


def test_certificate_matches_norm_randomly():
    rng = random.Random(0)
    spec = two_pair()
    for _ in range(50):
        x = random_vector(rng, universe=10, max_size=7)
        cert = norm_certificate(spec, x)
        assert verify_certificate(spec, x, cert) == norm(spec, x).value


def test_certificate_violations():
    spec = tsirelson()
    x = e(3) + e(4) + e(5) + e(6)
    with pytest.raises(CertificateError, match="root"):
        verify_certificate(spec, x, CertNode(3, 6, 1))
    bad_minima = CertNode(1, 6, 0, (CertNode(1, 1, 1), CertNode(2, 6, 1)))
    with pytest.raises(CertificateError, match="admissibility"):
        verify_certificate(spec, x, bad_minima)
    mixed = CertNode(3, 6, 0, (CertNode(3, 3, 1), CertNode(4, 6, 2)))
    with pytest.raises(CertificateError, match="history|index"):
        verify_certificate(spec, x, mixed)
    overlap = CertNode(3, 6, 0, (CertNode(3, 5, 1), CertNode(5, 6, 1)))
    with pytest.raises(CertificateError, match="succession"):
        verify_certificate(spec, x, overlap)
    stale = CertNode(3, 6, 0, (CertNode(3, 4, 1, (), F(1, 3)), CertNode(5, 6, 1)))
    with pytest.raises(CertificateError, match="tag"):
        verify_certificate(spec, x, stale)


def test_certificate_evaluation_is_lower_bound():
    spec = tsirelson()
    x = e(3) + e(4) + e(5) + e(6)
    weak = CertNode(3, 6, 0, (CertNode(3, 3, 1), CertNode(4, 6, 1)))
    assert verify_certificate(spec, x, weak) <= norm(spec, x).value


def test_deterministic_tie_breaks():
    spec = tsirelson()
    x = e(2) + e(3)
    cert = norm_certificate(spec, x)
    assert cert.is_leaf()   # leaf preferred on ties


# -- combinatorial quantities ----------------------------------------------------------


def dyadic(n_pairs=4):
    return SpaceSpec(S0, [(F(1, 2) ** n, schreier(n)) for n in range(1, n_pairs + 1)])


def test_pi_n_examples():
    spec = dyadic()
    assert pi_n(spec, 3) == F(1, 16)
    assert pi_n(spec, 0) == F(1, 2)
    geometric = SpaceSpec(S0, [(F(1, 3) ** n, schreier(n)) for n in range(1, 5)])
    assert pi_n(geometric, 2) == F(1, 3) ** 3


def test_compositions_and_count():
    assert p_n(1) == 1
    assert p_n(3) == 7
    assert set(compositions_upto(2)) == {(0, 1), (0, 2), (0, 1, 1)}
    assert len(compositions_upto(3)) == 7
    for n in range(1, 7):
        assert len(compositions_upto(n)) == p_n(n)


def test_composition_union_bound():
    spec = SpaceSpec(S1, [(F(1, 2) ** n, schreier(n)) for n in range(1, 5)])
    m_union = composition_union(spec, 3)
    over = bracket(m_union, S1)
    rng = random.Random(1)
    pi3, p3 = pi_n(spec, 3), p_n(3)
    for _ in range(40):
        x = random_vector(rng, universe=10, max_size=8)
        assert norm(spec, x).value <= pi3 * x.l1() + p3 * seminorm(over, x)
