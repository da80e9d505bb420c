"""Ordinal arithmetic in Cantor normal form below epsilon_0.

An ordinal is a finite sum ``w^e1*c1 + ... + w^ek*ck`` with ordinal
exponents ``e1 > ... > ek`` and positive integer coefficients.  The
exponents are ordinals of the same kind, so every value below epsilon_0
is representable; the nesting depth is capped (default 16, see
``set_depth_cap``).

Operations: addition, multiplication, ``omega_pow`` (base-omega
exponentiation, the only exponentiation needed), the logarithm
``log_leading`` (leading exponent of the normal form), standard
fundamental sequences for limit ordinals, and a total order.

Text syntax, used everywhere else in the package::

    w^2*3+w*1+4        ==  w^2*3 + w + 4
    w^(w+1)*2          ==  exponents that are not atoms are parenthesised
    w^w                ==  atomic exponents need no parentheses

``parse_ordinal`` and ``format_ordinal`` round-trip bit-exactly on
canonical output.
"""

from __future__ import annotations

from typing import Iterable, Tuple


class OrdinalError(ValueError):
    """Domain error for ordinal operations."""


class OrdinalDepthError(OrdinalError):
    """Exponent nesting exceeds the configured depth cap."""


_DEPTH_CAP = 16


def set_depth_cap(n: int) -> None:
    """Set the maximum exponent nesting depth (>= 1)."""
    global _DEPTH_CAP
    if n < 1:
        raise OrdinalError("depth cap must be positive")
    _DEPTH_CAP = n


def depth_cap() -> int:
    return _DEPTH_CAP


class Ordinal:
    """Immutable ordinal below epsilon_0 in Cantor normal form.

    ``terms`` is a tuple of (exponent, coefficient) pairs with strictly
    decreasing exponents and coefficients >= 1; the empty tuple is 0.
    """

    __slots__ = ("terms", "depth", "_hash")

    def __init__(self, terms: Iterable[Tuple["Ordinal", int]] = ()):
        tms = []
        depth = 0
        prev = None
        for e, c in terms:
            if not isinstance(e, Ordinal):
                raise TypeError("exponent must be an Ordinal")
            c = int(c)
            if c < 1:
                raise OrdinalError("coefficients must be >= 1")
            if prev is not None and compare(prev, e) <= 0:
                raise OrdinalError("exponents must be strictly decreasing")
            prev = e
            depth = max(depth, e.depth + 1)
            tms.append((e, c))
        if depth > _DEPTH_CAP:
            raise OrdinalDepthError(f"ordinal nesting depth {depth} exceeds cap {_DEPTH_CAP}")
        self.terms = tuple(tms)
        self.depth = depth
        self._hash = hash(self.terms)

    # -- classification ------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_finite(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and self.terms[0][0].is_zero())

    def is_successor(self) -> bool:
        return bool(self.terms) and self.terms[-1][0].is_zero()

    def is_limit(self) -> bool:
        return bool(self.terms) and not self.terms[-1][0].is_zero()

    def to_int(self) -> int:
        if not self.is_finite():
            raise OrdinalError(f"{self} is not a finite ordinal")
        return self.terms[0][1] if self.terms else 0

    def predecessor(self) -> "Ordinal":
        if not self.is_successor():
            raise OrdinalError(f"{self} is not a successor ordinal")
        head, (e, c) = self.terms[:-1], self.terms[-1]
        if c > 1:
            return Ordinal(head + ((e, c - 1),))
        return Ordinal(head)

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other: "Ordinal") -> "Ordinal":
        other = _coerce(other)
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        lead = other.terms[0][0]
        keep = []
        merge = 0
        for e, c in self.terms:
            cmp = compare(e, lead)
            if cmp > 0:
                keep.append((e, c))
            elif cmp == 0:
                merge = c
                break
            else:
                break
        first = (lead, other.terms[0][1] + merge)
        return Ordinal(tuple(keep) + (first,) + other.terms[1:])

    def __radd__(self, other):
        return _coerce(other) + self

    def __mul__(self, other: "Ordinal") -> "Ordinal":
        other = _coerce(other)
        if self.is_zero() or other.is_zero():
            return ZERO
        e1, c1 = self.terms[0]
        out = ZERO
        for e, c in other.terms:
            if e.is_zero():
                out = out + Ordinal(((e1, c1 * c),) + self.terms[1:])
            else:
                out = out + Ordinal(((e1 + e, c),))
        return out

    def __rmul__(self, other):
        return _coerce(other) * self

    # -- order ---------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, int):
            other = from_int(other)
        if not isinstance(other, Ordinal):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return compare(self, _coerce(other)) < 0

    def __le__(self, other):
        return compare(self, _coerce(other)) <= 0

    def __gt__(self, other):
        return compare(self, _coerce(other)) > 0

    def __ge__(self, other):
        return compare(self, _coerce(other)) >= 0

    def __repr__(self):
        return f"Ordinal({format_ordinal(self)!r})"

    def __str__(self):
        return format_ordinal(self)


def _coerce(x) -> Ordinal:
    if isinstance(x, Ordinal):
        return x
    if isinstance(x, int):
        return from_int(x)
    raise TypeError(f"cannot treat {x!r} as an ordinal")


def from_int(k: int) -> Ordinal:
    if k < 0:
        raise OrdinalError("ordinals are nonnegative")
    if k == 0:
        return Ordinal()
    return Ordinal(((Ordinal(), k),))


ZERO = from_int(0)
ONE = from_int(1)


def compare(a: Ordinal, b: Ordinal) -> int:
    """Total order on CNF ordinals: -1, 0 or 1."""
    for (ea, ca), (eb, cb) in zip(a.terms, b.terms):
        c = compare(ea, eb)
        if c != 0:
            return c
        if ca != cb:
            return -1 if ca < cb else 1
    if len(a.terms) != len(b.terms):
        return -1 if len(a.terms) < len(b.terms) else 1
    return 0


def ord_max(a: Ordinal, b: Ordinal) -> Ordinal:
    return a if compare(a, b) >= 0 else b


def omega_pow(a: Ordinal | int) -> Ordinal:
    """w**a as a single CNF term."""
    return Ordinal(((_coerce(a), 1),))


OMEGA = omega_pow(ONE)


def log_leading(a: Ordinal) -> Ordinal:
    """Leading exponent of the normal form; the CNF logarithm.

    Satisfies log(a*b) = log(a) + log(b) for a, b > 0.
    """
    if a.is_zero():
        raise OrdinalError("logarithm of 0 is undefined")
    return a.terms[0][0]


def fund_seq(a: Ordinal, n: int) -> Ordinal:
    """n-th element of the standard fundamental sequence of a limit ordinal.

    For a = head + w^e*c with e > 0 the rule splits on the last exponent:
    successor e gives head + w^e*(c-1) + w^(e-1)*n; limit e recurses into
    its own standard sequence, head + w^e*(c-1) + w^fund_seq(e, n).
    Strictly increasing in n with supremum a.
    """
    if n < 1:
        raise OrdinalError("fundamental sequence index must be >= 1")
    if not a.is_limit():
        raise OrdinalError(f"{a} is not a limit ordinal")
    head, (e, c) = a.terms[:-1], a.terms[-1]
    base = list(head)
    if c > 1:
        base.append((e, c - 1))
    if e.is_successor():
        base.append((e.predecessor(), n))
    else:
        base.append((fund_seq(e, n), 1))
    # appended exponent is strictly below e, so the term list stays in CNF
    return Ordinal(base)


# -- text syntax -------------------------------------------------------


class TextParseError(ValueError):
    """Syntax error in a text form; carries the input position."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


class OrdinalParseError(TextParseError, OrdinalError):
    pass


def _atomic(e: Ordinal) -> bool:
    # prints without '+' or '*'
    if e.is_finite():
        return True
    if len(e.terms) != 1:
        return False
    exp, c = e.terms[0]
    return c == 1 and _atomic(exp)


def format_ordinal(o: Ordinal) -> str:
    if o.is_zero():
        return "0"
    parts = []
    for e, c in o.terms:
        if e.is_zero():
            parts.append(str(c))
            continue
        if e == ONE:
            s = "w"
        else:
            es = format_ordinal(e)
            s = "w^" + (es if _atomic(e) else "(" + es + ")")
        if c != 1:
            s += "*" + str(c)
        parts.append(s)
    return "+".join(parts)


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, ch: str) -> None:
        if self.peek() != ch:
            raise TextParseError(f"expected {ch!r}", self.pos)
        self.pos += 1

    def nat(self) -> int:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            raise TextParseError("expected a number", start)
        return int(self.text[start:self.pos])


def parse_ordinal(text: str) -> Ordinal:
    sc = _Scanner(text)
    o = _parse_sum(sc)
    sc.skip_ws()
    if sc.pos != len(text):
        raise OrdinalParseError("trailing input", sc.pos)
    return o


def _parse_sum(sc: _Scanner) -> Ordinal:
    out = _parse_term(sc)
    while sc.peek() == "+":
        sc.take("+")
        out = out + _parse_term(sc)
    return out


def _parse_term(sc: _Scanner) -> Ordinal:
    ch = sc.peek()
    if ch.isdigit():
        return from_int(sc.nat())
    if ch != "w":
        raise OrdinalParseError("expected 'w' or a number", sc.pos)
    sc.take("w")
    exp = ONE
    if sc.peek() == "^":
        sc.take("^")
        exp = _parse_exponent(sc)
    coeff = 1
    if sc.peek() == "*":
        sc.take("*")
        coeff = sc.nat()
        if coeff < 1:
            raise OrdinalParseError("coefficient must be >= 1", sc.pos)
    return Ordinal(((exp, coeff),))


def _parse_exponent(sc: _Scanner) -> Ordinal:
    ch = sc.peek()
    if ch == "(":
        sc.take("(")
        o = _parse_sum(sc)
        sc.take(")")
        return o
    if ch.isdigit():
        return from_int(sc.nat())
    if ch == "w":
        # atomic exponent: w, w^atom (no '*' at this level)
        sc.take("w")
        if sc.peek() == "^":
            sc.take("^")
            inner = _parse_exponent(sc)
            return omega_pow(inner)
        return OMEGA
    raise OrdinalParseError("expected an exponent", sc.pos)
