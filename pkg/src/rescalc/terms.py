"""Resource-calculus terms: simple terms, bags, canonical forms and measures.

Terms are immutable and alpha-canonical: bound variables use a nameless
positional representation (`Bound`), free variables are named (`Var`).
Two alpha-equivalent terms are equal as Python values, so terms and bags
can serve directly as dictionary keys in linear combinations.

The concrete grammar (parse_term / format_term):

    sterm ::= ident | "\\" ident "." sterm | "<" sterm ">" "[" bag "]"
    bag   ::= <empty> | item ("," item)*
    item  ::= sterm ("^" nat)?
    ident ::= [a-zA-Z_][a-zA-Z0-9_']*

Example: ``<\\x.<x>[x,x]>[y^2,z]``.  The printer regenerates bound names
x0, x1, ... (skipping names that occur free) and lists bag elements in
`compare` order, so formatting is a canonical form of the external syntax.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache


class SimpleTerm:
    """Base class for the three term constructors (and internal `Bound`)."""

    __slots__ = ()

    def __str__(self) -> str:
        return format_term(self)


@dataclass(frozen=True, slots=True)
class Var(SimpleTerm):
    """A free variable."""

    name: str

    def __str__(self) -> str:
        return format_term(self)


@dataclass(frozen=True, slots=True)
class Bound(SimpleTerm):
    """A bound variable, as the number of binders between it and its own.

    Internal representation only: the public API speaks named syntax via
    `lam`, `parse_term` and `format_term`.
    """

    index: int

    def __str__(self) -> str:
        return f"#{self.index}"


@dataclass(frozen=True, slots=True)
class Abs(SimpleTerm):
    """An abstraction; the binder itself is nameless."""

    body: SimpleTerm

    def __str__(self) -> str:
        return format_term(self)


@dataclass(frozen=True, slots=True)
class App(SimpleTerm):
    """An application of a simple term to a bag of arguments."""

    head: SimpleTerm
    arg: Bag

    def __str__(self) -> str:
        return format_term(self)


@dataclass(frozen=True, slots=True)
class Bag:
    """A finite multiset of simple terms; the empty bag is the poly-term 1.

    `items` holds (term, multiplicity) pairs with multiplicity >= 1,
    sorted by term order with no duplicate keys.  Build bags with
    `Bag.of` or `bag`, which merge and sort.
    """

    items: tuple[tuple[SimpleTerm, int], ...] = ()

    @staticmethod
    def of(elements) -> Bag:
        """Build a bag from terms or (term, multiplicity) pairs."""
        counts: dict[SimpleTerm, int] = {}
        for e in elements:
            if isinstance(e, tuple):
                t, m = e
            else:
                t, m = e, 1
            if not isinstance(t, SimpleTerm):
                raise TypeError(f"bag element is not a term: {t!r}")
            if m < 0:
                raise ValueError("negative multiplicity")
            if m:
                counts[t] = counts.get(t, 0) + m
        return Bag(tuple(sorted(counts.items(), key=lambda kv: sort_key(kv[0]))))

    def cardinality(self) -> int:
        """Number of elements counted with multiplicity."""
        return sum(m for _, m in self.items)

    def count(self, t: SimpleTerm) -> int:
        for u, m in self.items:
            if u == t:
                return m
        return 0

    def add(self, t: SimpleTerm, m: int = 1) -> Bag:
        return Bag.of(list(self.items) + [(t, m)])

    def remove_one(self, t: SimpleTerm) -> Bag:
        out = []
        removed = False
        for u, m in self.items:
            if not removed and u == t:
                removed = True
                if m > 1:
                    out.append((u, m - 1))
            else:
                out.append((u, m))
        if not removed:
            raise ValueError(f"element not in bag: {t}")
        return Bag(tuple(out))

    def union(self, other: Bag) -> Bag:
        return Bag.of(list(self.items) + list(other.items))

    def tokens(self) -> list[SimpleTerm]:
        """Elements expanded with multiplicity, in term order."""
        out = []
        for t, m in self.items:
            out.extend([t] * m)
        return out

    def __str__(self) -> str:
        return format_bag(self)


EMPTY_BAG = Bag()


def bag(*terms: SimpleTerm) -> Bag:
    return Bag.of(terms)


def lam(name: str, body: SimpleTerm) -> SimpleTerm:
    """Abstract the free variable `name` out of `body` (alpha-canonically)."""
    return Abs(_close(body, name, 0))


def app(head: SimpleTerm, arg: Bag) -> SimpleTerm:
    return App(head, arg)


def _close(t: SimpleTerm, name: str, depth: int) -> SimpleTerm:
    if isinstance(t, Var):
        return Bound(depth) if t.name == name else t
    if isinstance(t, Bound):
        return t
    if isinstance(t, Abs):
        return Abs(_close(t.body, name, depth + 1))
    if isinstance(t, App):
        return App(
            _close(t.head, name, depth),
            Bag.of((_close(u, name, depth), m) for u, m in t.arg.items),
        )
    raise TypeError(t)


def open_abs(t: Abs, name: str) -> SimpleTerm:
    """Replace the binder of a locally closed abstraction by a free name."""
    return _open(t.body, name, 0)


def _open(t: SimpleTerm, name: str, depth: int) -> SimpleTerm:
    if isinstance(t, Bound):
        if t.index == depth:
            return Var(name)
        if t.index > depth:
            raise ValueError("open_abs applied to a non locally closed term")
        return t
    if isinstance(t, Var):
        return t
    if isinstance(t, Abs):
        return Abs(_open(t.body, name, depth + 1))
    if isinstance(t, App):
        return App(
            _open(t.head, name, depth),
            Bag.of((_open(u, name, depth), m) for u, m in t.arg.items),
        )
    raise TypeError(t)


def fresh_name(avoid, stem: str = "_v") -> str:
    """First name `<stem>N` not in `avoid`."""
    i = 0
    while f"{stem}{i}" in avoid:
        i += 1
    return f"{stem}{i}"


# ---------------------------------------------------------------------------
# measures


@lru_cache(maxsize=None)
def size(t) -> int:
    """Size of a term or bag: variables count 1, each node 1, bags by sum."""
    if isinstance(t, (Var, Bound)):
        return 1
    if isinstance(t, Abs):
        return 1 + size(t.body)
    if isinstance(t, App):
        return 1 + size(t.head) + size(t.arg)
    if isinstance(t, Bag):
        return sum(m * size(u) for u, m in t.items)
    raise TypeError(t)


@lru_cache(maxsize=None)
def free_variables(t) -> frozenset[str]:
    if isinstance(t, Var):
        return frozenset((t.name,))
    if isinstance(t, Bound):
        return frozenset()
    if isinstance(t, Abs):
        return free_variables(t.body)
    if isinstance(t, App):
        return free_variables(t.head) | free_variables(t.arg)
    if isinstance(t, Bag):
        out: frozenset[str] = frozenset()
        for u, _ in t.items:
            out |= free_variables(u)
        return out
    raise TypeError(t)


def occurrence_count(t, x: str) -> int:
    """Free occurrences of x, counting through bags with multiplicity."""
    if isinstance(t, Var):
        return 1 if t.name == x else 0
    if isinstance(t, Bound):
        return 0
    if isinstance(t, Abs):
        return occurrence_count(t.body, x)
    if isinstance(t, App):
        return occurrence_count(t.head, x) + occurrence_count(t.arg, x)
    if isinstance(t, Bag):
        return sum(m * occurrence_count(u, x) for u, m in t.items)
    raise TypeError(t)


@lru_cache(maxsize=None)
def loose_level(t) -> int:
    """Least binder depth at which `t` is closed; 0 means locally closed."""
    if isinstance(t, Bound):
        return t.index + 1
    if isinstance(t, Var):
        return 0
    if isinstance(t, Abs):
        return max(0, loose_level(t.body) - 1)
    if isinstance(t, App):
        return max(loose_level(t.head), loose_level(t.arg))
    if isinstance(t, Bag):
        return max((loose_level(u) for u, _ in t.items), default=0)
    raise TypeError(t)


# ---------------------------------------------------------------------------
# total order
#
# Variable < Abstraction < Application, then structural recursion; bound
# variables sort before free ones.  The induced keys are injective on
# canonical terms, so compare(a, b) == 0 iff a and b are alpha-equivalent.


@lru_cache(maxsize=None)
def sort_key(t):
    if isinstance(t, Bound):
        return (0, 0, t.index)
    if isinstance(t, Var):
        return (0, 1, t.name)
    if isinstance(t, Abs):
        return (1, sort_key(t.body))
    if isinstance(t, App):
        return (2, sort_key(t.head), sort_key(t.arg))
    if isinstance(t, Bag):
        return tuple((sort_key(u), m) for u, m in t.items)
    raise TypeError(t)


def compare(a, b) -> int:
    """Total order on terms (and bags): -1, 0 or 1."""
    ka, kb = sort_key(a), sort_key(b)
    return -1 if ka < kb else (0 if ka == kb else 1)


# ---------------------------------------------------------------------------
# printing

_IDENT_RE = re.compile(r"[a-zA-Z_][a-zA-Z0-9_']*")


def format_term(t: SimpleTerm) -> str:
    """Canonical external syntax; regenerates bound names x0, x1, ..."""
    avoid = set(free_variables(t))
    counter = [0]

    def fresh() -> str:
        while True:
            name = f"x{counter[0]}"
            counter[0] += 1
            if name not in avoid:
                return name

    def go(u: SimpleTerm, env: tuple[str, ...]) -> str:
        if isinstance(u, Var):
            return u.name
        if isinstance(u, Bound):
            if u.index >= len(env):
                return f"#{u.index}"
            return env[-1 - u.index]
        if isinstance(u, Abs):
            name = fresh()
            return f"\\{name}.{go(u.body, env + (name,))}"
        if isinstance(u, App):
            return f"<{go(u.head, env)}>[{go_bag(u.arg, env)}]"
        raise TypeError(u)

    def go_bag(B: Bag, env: tuple[str, ...]) -> str:
        parts = []
        for u, m in B.items:
            s = go(u, env)
            parts.append(s if m == 1 else f"{s}^{m}")
        return ",".join(parts)

    return go(t, ())


def format_bag(B: Bag) -> str:
    inner = ",".join(
        format_term(u) if m == 1 else f"{format_term(u)}^{m}" for u, m in B.items
    )
    return f"[{inner}]"


# ---------------------------------------------------------------------------
# parsing


class ParseError(ValueError):
    """Syntax error with 1-based line/column position."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class Scanner:
    """Minimal cursor over source text with line/column error reporting."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str):
        line = self.text.count("\n", 0, self.pos) + 1
        col = self.pos - (self.text.rfind("\n", 0, self.pos) + 1) + 1
        raise ParseError(message, line, col)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def eat(self, token: str) -> bool:
        self.skip_ws()
        if self.text.startswith(token, self.pos):
            self.pos += len(token)
            return True
        return False

    def expect(self, token: str):
        if not self.eat(token):
            self.error(f"expected {token!r}")

    def ident(self) -> str:
        self.skip_ws()
        m = _IDENT_RE.match(self.text, self.pos)
        if not m:
            self.error("expected an identifier")
        self.pos = m.end()
        return m.group()

    def nat(self) -> int:
        self.skip_ws()
        m = re.compile(r"\d+").match(self.text, self.pos)
        if not m:
            self.error("expected a number")
        self.pos = m.end()
        return int(m.group())

    def done(self):
        self.skip_ws()
        if self.pos < len(self.text):
            self.error("trailing input")


def parse_term(text: str) -> SimpleTerm:
    sc = Scanner(text)
    t = _parse_sterm(sc)
    sc.done()
    return t


def parse_bag(text: str) -> Bag:
    sc = Scanner(text)
    sc.expect("[")
    B = _parse_bag_body(sc)
    sc.expect("]")
    sc.done()
    return B


def _parse_sterm(sc: Scanner) -> SimpleTerm:
    c = sc.peek()
    if c == "\\":
        sc.eat("\\")
        name = sc.ident()
        sc.expect(".")
        body = _parse_sterm(sc)
        # closing on the way out makes the innermost binder win under
        # shadowing: inner occurrences are already Bound by the time an
        # outer binder of the same name closes over them
        return Abs(_close(body, name, 0))
    if c == "<":
        sc.eat("<")
        head = _parse_sterm(sc)
        sc.expect(">")
        sc.expect("[")
        B = _parse_bag_body(sc)
        sc.expect("]")
        return App(head, B)
    name = sc.ident()
    return Var(name)


def _parse_bag_body(sc: Scanner) -> Bag:
    if sc.peek() == "]":
        return EMPTY_BAG
    items = []
    while True:
        t = _parse_sterm(sc)
        m = 1
        if sc.eat("^"):
            m = sc.nat()
            if m < 1:
                sc.error("multiplicity must be >= 1")
        items.append((t, m))
        if not sc.eat(","):
            break
    return Bag.of(items)


# ---------------------------------------------------------------------------
# exhaustive enumeration (used by support/uniformity checks and test probes)


def all_terms(names: tuple[str, ...], max_size: int) -> list[SimpleTerm]:
    """All canonical terms of size <= max_size with free variables in `names`.

    Complete for coefficient checks: a term using any variable outside
    `names` cannot occur in the Taylor support of a term whose free
    variables lie in `names`.
    """
    out: list[SimpleTerm] = []
    for k in range(1, max_size + 1):
        out.extend(_terms_exact(names, k, 0))
    return out


@lru_cache(maxsize=None)
def _terms_exact(names: tuple[str, ...], k: int, depth: int) -> tuple[SimpleTerm, ...]:
    if k < 1:
        return ()
    out: list[SimpleTerm] = []
    if k == 1:
        out.extend(Var(n) for n in names)
        out.extend(Bound(i) for i in range(depth))
        return tuple(out)
    out.extend(Abs(b) for b in _terms_exact(names, k - 1, depth + 1))
    for head_size in range(1, k):
        bag_size = k - 1 - head_size
        for head in _terms_exact(names, head_size, depth):
            for B in _bags_exact(names, bag_size, depth):
                out.append(App(head, B))
    return tuple(out)


@lru_cache(maxsize=None)
def _bags_exact(names: tuple[str, ...], k: int, depth: int) -> tuple[Bag, ...]:
    """All bags of exactly size k over the enumerated terms."""
    if k == 0:
        return (EMPTY_BAG,)
    out = []
    # pick the least element (by size then order) and recurse on the rest
    for first_size in range(1, k + 1):
        for first in _terms_exact(names, first_size, depth):
            fkey = (first_size, sort_key(first))
            for rest in _bags_exact(names, k - first_size, depth):
                if rest.items:
                    rmin = min((size(u), sort_key(u)) for u, _ in rest.items)
                    if rmin < fkey:
                        continue
                out.append(rest.add(first))
    return tuple(dict.fromkeys(out))
