import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tsirkit.ordinals import (
    OMEGA,
    ONE,
    ZERO,
    Ordinal,
    OrdinalDepthError,
    OrdinalError,
    compare,
    format_ordinal,
    from_int,
    fund_seq,
    log_leading,
    omega_pow,
    parse_ordinal,
)
from oracles import t_add, t_mul


def o(text: str) -> Ordinal:
    return parse_ordinal(text)


# -- frozen examples -----------------------------------------------------


def test_add_identity():
    assert ZERO + OMEGA == OMEGA
    assert OMEGA + ZERO == OMEGA


def test_add_absorption():
    assert o("w*3") + o("w^2") == o("w^2")


def test_add_merges_coefficients():
    assert o("w^2") + o("w^2*2+w") == o("w^2*3+w")


def test_mul_zero():
    assert OMEGA * ZERO == ZERO
    assert ZERO * OMEGA == ZERO


def test_mul_limit_rule():
    assert o("w+1") * OMEGA == o("w^2")


def test_mul_scalar():
    assert o("w^2") * from_int(3) == o("w^2*3")


def test_omega_pow():
    assert omega_pow(ZERO) == ONE
    assert omega_pow(from_int(2)) == o("w^2")
    assert omega_pow(OMEGA) == o("w^w")


def test_log_leading():
    assert log_leading(o("w^2*3+w*5")) == from_int(2)
    assert log_leading(ONE) == ZERO
    assert log_leading(o("w^w*2+w^3")) == OMEGA
    with pytest.raises(OrdinalError):
        log_leading(ZERO)


def test_fund_seq_examples():
    assert fund_seq(OMEGA, 4) == from_int(4)
    assert fund_seq(o("w^2"), 3) == o("w*3")
    assert fund_seq(o("w^w"), 2) == o("w^2")
    with pytest.raises(OrdinalError):
        fund_seq(o("w+1"), 2)
    with pytest.raises(OrdinalError):
        fund_seq(ZERO, 2)


def test_compare_examples():
    assert compare(OMEGA, OMEGA) == 0
    assert compare(o("w*2+1"), o("w^2")) < 0
    assert compare(o("w^w"), o("w^3*9")) > 0


def test_depth_cap():
    deep = OMEGA
    with pytest.raises(OrdinalDepthError):
        for _ in range(20):
            deep = omega_pow(deep)


# -- random ordinals and properties ---------------------------------------


def random_ordinal(rng: random.Random, depth: int = 2) -> Ordinal:
    terms = []
    used = set()
    for _ in range(rng.randint(0, 3)):
        if depth > 0 and rng.random() < 0.4:
            e = random_ordinal(rng, depth - 1)
        else:
            e = from_int(rng.randint(0, 4))
        if e in used:
            continue
        used.add(e)
        terms.append((e, rng.randint(1, 3)))
    terms.sort(key=lambda t: t[0], reverse=True)
    return Ordinal(terms)


@given(st.integers(0, 10**6))
@settings(max_examples=150, deadline=None)
def test_algebraic_laws(seed):
    rng = random.Random(seed)
    a, b, c = (random_ordinal(rng) for _ in range(3))
    assert (a + b) + c == a + (b + c)
    assert a + ZERO == a and ZERO + a == a
    assert a * ONE == a
    assert a * (b + c) == a * b + a * c


@given(st.integers(0, 10**6))
@settings(max_examples=150, deadline=None)
def test_log_multiplicative(seed):
    rng = random.Random(seed)
    a, b = random_ordinal(rng), random_ordinal(rng)
    if a.is_zero() or b.is_zero():
        return
    assert log_leading(a * b) == log_leading(a) + log_leading(b)


@given(st.integers(0, 10**6), st.integers(1, 6))
@settings(max_examples=150, deadline=None)
def test_fund_seq_strictly_increasing_below(seed, n):
    rng = random.Random(seed)
    a = random_ordinal(rng)
    if not a.is_limit():
        return
    lo, hi = fund_seq(a, n), fund_seq(a, n + 1)
    assert lo < hi < a


@given(st.integers(0, 10**6))
@settings(max_examples=100, deadline=None)
def test_total_order(seed):
    rng = random.Random(seed)
    a, b, c = (random_ordinal(rng) for _ in range(3))
    assert (compare(a, b) == 0) == (a == b)
    assert compare(a, b) == -compare(b, a)
    if a <= b <= c:
        assert a <= c


# -- agreement with the recursion oracle below w^3 ------------------------


def _to_ordinal(t):
    a, b, c = t
    terms = []
    if a:
        terms.append((from_int(2), a))
    if b:
        terms.append((from_int(1), b))
    if c:
        terms.append((ZERO, c))
    return Ordinal(terms)


def _degree(t):
    return 2 if t[0] else (1 if t[1] else 0)


@given(st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3)),
       st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3)))
@settings(max_examples=250, deadline=None)
def test_matches_recursion_oracle(x, y):
    assert _to_ordinal(t_add(x, y)) == _to_ordinal(x) + _to_ordinal(y)
    if x == (0, 0, 0) or y == (0, 0, 0) or _degree(x) + _degree(y) <= 2:
        assert _to_ordinal(t_mul(x, y)) == _to_ordinal(x) * _to_ordinal(y)


# -- text syntax ----------------------------------------------------------


@pytest.mark.parametrize("text", [
    "0", "1", "7", "w", "w*3", "w^2*3+w+4", "w^w", "w^(w+1)*2",
    "w^w^w", "w^(w^2*3+w)+w^2+5", "w^4*2+w^2+1",
])
def test_round_trip(text):
    value = parse_ordinal(text)
    assert parse_ordinal(format_ordinal(value)) == value


@given(st.integers(0, 10**6))
@settings(max_examples=200, deadline=None)
def test_round_trip_random(seed):
    rng = random.Random(seed)
    a = random_ordinal(rng, depth=3)
    assert parse_ordinal(format_ordinal(a)) == a


@pytest.mark.parametrize("bad", ["w^", "w*0", "2+", "w^()", "x", "w**2", "w^2*"])
def test_parse_errors(bad):
    with pytest.raises(ValueError):
        parse_ordinal(bad)
