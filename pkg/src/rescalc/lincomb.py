"""Coefficient semirings and finite formal linear combinations.

A `LinComb` maps canonical keys (simple terms or bags) to nonzero
coefficients in one of three semirings: booleans (1+1=1), arbitrary
precision naturals, or exact rationals (`fractions.Fraction`, always in
lowest terms with positive denominator).  All constructors of the term
syntax lift to combinations multilinearly; there is deliberately no
infinite-combination data type here, only truncated promotion with an
explicit degree bound.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .terms import Abs, App, Bag, SimpleTerm, format_term, lam, sort_key


@dataclass(frozen=True)
class Semiring:
    name: str
    zero: object
    one: object
    add: Callable = field(repr=False)
    mul: Callable = field(repr=False)
    from_int: Callable = field(repr=False)
    is_field: bool = False


BOOL = Semiring(
    "bool",
    0,
    1,
    add=lambda a, b: 1 if (a or b) else 0,
    mul=lambda a, b: 1 if (a and b) else 0,
    from_int=lambda n: 1 if n else 0,
)

NAT = Semiring("nat", 0, 1, add=lambda a, b: a + b, mul=lambda a, b: a * b,
               from_int=lambda n: n)

RAT = Semiring(
    "rat",
    Fraction(0),
    Fraction(1),
    add=lambda a, b: a + b,
    mul=lambda a, b: a * b,
    from_int=Fraction,
    is_field=True,
)


class LinComb:
    """Finite linear combination with zero-free support; treat as immutable."""

    __slots__ = ("ring", "_data", "_hash")

    def __init__(self, ring: Semiring, data: dict):
        self.ring = ring
        self._data = {k: c for k, c in data.items() if c != ring.zero}
        self._hash = None

    @staticmethod
    def zero(ring: Semiring) -> LinComb:
        return LinComb(ring, {})

    @staticmethod
    def unit(ring: Semiring, key, coeff=None) -> LinComb:
        return LinComb(ring, {key: ring.one if coeff is None else coeff})

    @staticmethod
    def from_pairs(ring: Semiring, pairs) -> LinComb:
        data: dict = {}
        for k, c in pairs:
            data[k] = ring.add(data.get(k, ring.zero), c)
        return LinComb(ring, data)

    def coeff(self, key):
        return self._data.get(key, self.ring.zero)

    def support(self):
        return frozenset(self._data)

    def items(self):
        return self._data.items()

    def sorted_items(self):
        return sorted(self._data.items(), key=lambda kv: sort_key(kv[0]))

    def is_zero(self) -> bool:
        return not self._data

    def __len__(self) -> int:
        return len(self._data)

    def __contains__(self, key) -> bool:
        return key in self._data

    def __eq__(self, other):
        return (
            isinstance(other, LinComb)
            and self.ring.name == other.ring.name
            and self._data == other._data
        )

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash((self.ring.name, frozenset(self._data.items())))
            object.__setattr__(self, "_hash", h)
        return h

    def map_keys(self, f) -> LinComb:
        return LinComb.from_pairs(self.ring, ((f(k), c) for k, c in self._data.items()))

    def __repr__(self):
        return f"LinComb({self.ring.name}, {format_lincomb(self)})"

    def __str__(self):
        return format_lincomb(self)


def add(a: LinComb, b: LinComb) -> LinComb:
    _check_ring(a, b)
    data = dict(a.items())
    ring = a.ring
    for k, c in b.items():
        data[k] = ring.add(data.get(k, ring.zero), c)
    return LinComb(ring, data)


def scale(alpha, a: LinComb) -> LinComb:
    ring = a.ring
    return LinComb(ring, {k: ring.mul(alpha, c) for k, c in a.items()})


def sub(a: LinComb, b: LinComb) -> LinComb:
    """a - b; defined for the rational semiring only."""
    if not a.ring.is_field:
        raise ValueError("subtraction needs field coefficients")
    return add(a, scale(Fraction(-1), b))


def lift_abs(x: str, a: LinComb) -> LinComb:
    """Abstraction applied key-wise: lambda x . sum a_s s  =  sum a_s (lambda x.s)."""
    return a.map_keys(lambda s: lam(x, s))


def lift_abs_raw(a: LinComb) -> LinComb:
    """Wrap keys (de Bruijn bodies) directly in an abstraction node."""
    return a.map_keys(Abs)


def lift_app(a: LinComb, A: LinComb) -> LinComb:
    """Bilinear application: <a>A = sum a_s A_S <s>S."""
    _check_ring(a, A)
    ring = a.ring
    pairs = []
    for s, c in a.items():
        for S, d in A.items():
            pairs.append((App(s, S), ring.mul(c, d)))
    return LinComb.from_pairs(ring, pairs)


def bag_product(factors) -> LinComb:
    """Multiset concatenation extended multilinearly to combinations.

    Each factor is a combination of simple terms and contributes one
    element to the bag; coinciding multiset keys from different factor
    orders merge, so coefficients pick up multinomial multiplicities.
    """
    factors = list(factors)
    if not factors:
        raise ValueError("bag_product of no factors; use a unit empty bag instead")
    ring = factors[0].ring
    acc = LinComb.unit(ring, Bag())
    for a in factors:
        _check_ring(acc, a)
        pairs = []
        for B, c in acc.items():
            for s, d in a.items():
                pairs.append((B.add(s), ring.mul(c, d)))
        acc = LinComb.from_pairs(ring, pairs)
    return acc


def power(a: LinComb, n: int) -> LinComb:
    """n-fold bag product; power(a, 0) is the unit empty bag."""
    if n < 0:
        raise ValueError("negative power")
    if n == 0:
        return LinComb.unit(a.ring, Bag())
    return bag_product([a] * n)


def promotion_truncated(a: LinComb, degree_bound: int) -> LinComb:
    """Exponential series sum 1/n! a^n truncated at the given degree."""
    if not a.ring.is_field:
        raise ValueError("promotion needs field coefficients (division by n!)")
    out = LinComb.zero(a.ring)
    for n in range(degree_bound + 1):
        out = add(out, scale(Fraction(1, math.factorial(n)), power(a, n)))
    return out


def nat_to_ring(a: LinComb, ring: Semiring) -> LinComb:
    """Reinterpret natural-number coefficients in another semiring."""
    return LinComb(ring, {k: ring.from_int(c) for k, c in a.items()})


def _check_ring(a: LinComb, b: LinComb):
    if a.ring.name != b.ring.name:
        raise ValueError(f"semiring mismatch: {a.ring.name} vs {b.ring.name}")


# ---------------------------------------------------------------------------
# text and JSON renderings


def format_coeff(c) -> str:
    return str(c)


def format_lincomb(a: LinComb) -> str:
    if a.is_zero():
        return "0"
    parts = []
    for k, c in a.sorted_items():
        text = format_term(k) if isinstance(k, SimpleTerm) else str(k)
        parts.append(text if c == a.ring.one else f"{format_coeff(c)}*{text}")
    return " + ".join(parts)


def lincomb_to_json(a: LinComb) -> list[dict]:
    """List of {"coeff": "p/q", "term": ...} sorted by term order."""
    return [
        {
            "coeff": format_coeff(c),
            "term": format_term(k) if isinstance(k, SimpleTerm) else str(k),
        }
        for k, c in a.sorted_items()
    ]


def parse_coeff(text: str) -> Fraction:
    return Fraction(text)


def parse_lincomb(text: str, ring: Semiring = RAT) -> LinComb:
    """Parse `coeff*term + coeff*term + ...`; a bare term means coefficient 1."""
    from .terms import Scanner, _parse_sterm

    sc = Scanner(text)
    pairs = []
    if sc.peek() == "0" and sc.text.strip() == "0":
        return LinComb.zero(ring)
    while True:
        sc.skip_ws()
        m = _COEFF_RE.match(sc.text, sc.pos)
        if m and sc.text[m.end():m.end() + 1] == "*":
            coeff = ring.from_int(0) + Fraction(m.group())
            sc.pos = m.end()
            sc.expect("*")
        else:
            coeff = ring.one
        term = _parse_sterm(sc)
        pairs.append((term, coeff))
        if not sc.eat("+"):
            break
    sc.done()
    return LinComb.from_pairs(ring, pairs)


import re as _re

_COEFF_RE = _re.compile(r"-?\d+(/\d+)?")
