"""Parser for the family-expression grammar.

ASCII grammar (whitespace is insignificant)::

    family := union
    union  := post ("|" post)*
    post   := atom ("[" family "]")*
    atom   := "S0" | "A(" nat ")"
            | "S(" ordinal [";" gname [";" "card"]] ")"
            | "tail(" family "," nat ")"
            | "R(" ordinal ")"
            | "hull(" [finset ("," finset)*] ")"
            | "(" family ("," family)* ")"

A parenthesised single family is plain grouping; two or more parts make
a concatenation.  Brackets are left associative, matching the iterated
bracket convention.  ``hull`` and the optional Schreier variant field
are printer extensions so that every expression round-trips.

Ordinals use the text syntax of :mod:`tsirkit.ordinals`; finite sets are
written ``{2,3,5}``.
"""

from __future__ import annotations

from . import families as fam
from .families import FamilyExpr, GrowthFn, IDENTITY
from .ordinals import TextParseError, _parse_sum, _Scanner


class FamilyParseError(TextParseError):
    pass


class GrammarConfig:
    """Growth-function registry and default Schreier variant."""

    def __init__(self, growths: dict[str, GrowthFn] | None = None, variant: str = "min"):
        self.growths = {"identity": IDENTITY}
        if growths:
            self.growths.update(growths)
        if variant not in ("min", "card"):
            raise FamilyParseError("variant must be 'min' or 'card'", 0)
        self.variant = variant


DEFAULT_CONFIG = GrammarConfig()


def parse_family(text: str, config: GrammarConfig = DEFAULT_CONFIG) -> FamilyExpr:
    p = _Parser(text, config)
    expr = p.family()
    p.sc.skip_ws()
    if p.sc.pos != len(text):
        raise FamilyParseError("trailing input", p.sc.pos)
    return expr


def parse_finset(text: str) -> fam.FinSet:
    sc = _Scanner(text)
    s = _finset(sc)
    sc.skip_ws()
    if sc.pos != len(text):
        raise FamilyParseError("trailing input", sc.pos)
    return s


def _finset(sc: _Scanner) -> fam.FinSet:
    if sc.peek() != "{":
        raise FamilyParseError("expected '{'", sc.pos)
    sc.take("{")
    items: list[int] = []
    if sc.peek() != "}":
        items.append(sc.nat())
        while sc.peek() == ",":
            sc.take(",")
            items.append(sc.nat())
    sc.take("}")
    out = tuple(items)
    if any(b <= a for a, b in zip(out, out[1:])) or (out and out[0] < 1):
        raise FamilyParseError("set elements must be strictly increasing and >= 1", sc.pos)
    return out


class _Parser:
    def __init__(self, text: str, config: GrammarConfig):
        self.sc = _Scanner(text)
        self.config = config

    def fail(self, msg: str):
        raise FamilyParseError(msg, self.sc.pos)

    def _word(self) -> str:
        self.sc.skip_ws()
        start = self.sc.pos
        text = self.sc.text
        while self.sc.pos < len(text) and (text[self.sc.pos].isalnum() or text[self.sc.pos] == "_"):
            self.sc.pos += 1
        return text[start:self.sc.pos]

    def _ordinal(self):
        return _parse_sum(self.sc)

    def family(self) -> FamilyExpr:
        parts = [self.post()]
        while self.sc.peek() == "|":
            self.sc.take("|")
            parts.append(self.post())
        return parts[0] if len(parts) == 1 else fam.Union(parts)

    def post(self) -> FamilyExpr:
        expr = self.atom()
        while self.sc.peek() == "[":
            self.sc.take("[")
            inner = self.family()
            self.sc.take("]")
            expr = fam.Bracket(expr, inner)
        return expr

    def atom(self) -> FamilyExpr:
        ch = self.sc.peek()
        if ch == "(":
            self.sc.take("(")
            parts = [self.family()]
            while self.sc.peek() == ",":
                self.sc.take(",")
                parts.append(self.family())
            self.sc.take(")")
            return parts[0] if len(parts) == 1 else fam.Concat(parts)
        if ch == "{":
            self.fail("a bare finite set is not a family; use hull({...})")
        word = self._word()
        if word == "S0":
            return fam.S0
        if word == "A":
            self.sc.take("(")
            n = self.sc.nat()
            self.sc.take(")")
            return fam.Bounded(n)
        if word == "S":
            self.sc.take("(")
            alpha = self._ordinal()
            growth = IDENTITY
            variant = self.config.variant
            if self.sc.peek() == ";":
                self.sc.take(";")
                gname = self._word()
                got = self.config.growths.get(gname)
                if got is None:
                    self.fail(f"unknown growth function {gname!r}")
                growth = got
                if self.sc.peek() == ";":
                    self.sc.take(";")
                    flag = self._word()
                    if flag not in ("min", "card"):
                        self.fail("variant must be 'min' or 'card'")
                    variant = flag
            self.sc.take(")")
            return fam.Schreier(alpha, growth, variant)
        if word == "tail":
            self.sc.take("(")
            child = self.family()
            self.sc.take(",")
            k = self.sc.nat()
            self.sc.take(")")
            return fam.Tail(child, k)
        if word == "R":
            self.sc.take("(")
            beta = self._ordinal()
            self.sc.take(")")
            return fam.CanonicalR(beta)
        if word == "hull":
            self.sc.take("(")
            sets = []
            if self.sc.peek() == "{":
                sets.append(_finset(self.sc))
                while self.sc.peek() == ",":
                    self.sc.take(",")
                    sets.append(_finset(self.sc))
            self.sc.take(")")
            return fam.SpreadHull(sets)
        self.fail(f"unknown family constructor {word!r}" if word else "expected a family")
