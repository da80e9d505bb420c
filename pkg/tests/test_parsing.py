import random

import pytest

import tsirkit.families as fam
from tsirkit.families import GrowthFn, format_family
from tsirkit.ordinals import parse_ordinal
from tsirkit.parsing import FamilyParseError, GrammarConfig, parse_family, parse_finset
from tsirkit.suite import random_family


def test_parse_examples():
    b = parse_family("S(1)[S(1)]")
    assert isinstance(b, fam.Bracket)
    assert b.left == fam.Schreier(parse_ordinal("1"))
    c = parse_family("(A(2),S(1))")
    assert isinstance(c, fam.Concat) and len(c.parts) == 2
    s = parse_family("S(w^2*3+w)")
    assert isinstance(s, fam.Schreier)
    assert s.alpha == parse_ordinal("w^2*3+w")


def test_parse_union_and_precedence():
    u = parse_family("A(1)|S(2)|S0")
    assert isinstance(u, fam.Union) and len(u.parts) == 3
    # bracket binds tighter than union
    expr = parse_family("A(1)|S(1)[S(1)]")
    assert isinstance(expr, fam.Union)
    assert isinstance(expr.parts[1], fam.Bracket)
    # parenthesised union can head a bracket
    expr = parse_family("(A(1)|S(1))[S0]")
    assert isinstance(expr, fam.Bracket) and isinstance(expr.left, fam.Union)


def test_parse_left_associative_brackets():
    expr = parse_family("S(1)[S(1)][S0]")
    assert isinstance(expr, fam.Bracket)
    assert isinstance(expr.left, fam.Bracket)


def test_parse_tail_r_hull():
    t = parse_family("tail(S(1),3)")
    assert isinstance(t, fam.Tail) and t.k == 3
    r = parse_family("R(w*2+1)")
    assert isinstance(r, fam.CanonicalR)
    h = parse_family("hull({1,3},{2,5})")
    assert isinstance(h, fam.SpreadHull) and h.sets == ((1, 3), (2, 5))


def test_parse_single_paren_is_grouping():
    assert parse_family("(S(1))") == parse_family("S(1)")


def test_growth_registry():
    g = GrowthFn.from_table("slow", [1, 1, 2, 2, 3])
    config = GrammarConfig({"slow": g})
    s = parse_family("S(1;slow)", config)
    assert isinstance(s, fam.Schreier) and s.growth.name == "slow"
    with pytest.raises(FamilyParseError, match="unknown growth"):
        parse_family("S(1;missing)")


def test_variant_field_and_config_default():
    s = parse_family("S(w;identity;card)")
    assert s.variant == "card"
    config = GrammarConfig(variant="card")
    s = parse_family("S(w)", config)
    assert s.variant == "card"


def test_parse_errors_carry_positions():
    for bad in ["S(", "A(x)", "S(1)[", "tail(S(1))", "Q(1)", "", "S(1)]", "hull({2,1})"]:
        with pytest.raises(ValueError) as exc:
            parse_family(bad)
        assert "position" in str(exc.value)


def test_parse_finset():
    assert parse_finset("{2,3,5}") == (2, 3, 5)
    assert parse_finset("{}") == ()
    with pytest.raises(ValueError):
        parse_finset("{3,2}")


def test_round_trip_corpus():
    rng = random.Random(2024)
    for _ in range(1000):
        expr = random_family(rng)
        text = format_family(expr)
        again = parse_family(text)
        assert again == expr
        assert format_family(again) == text
