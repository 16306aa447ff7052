"""Cantor-normal-form ordinal arithmetic with epsilon-number atoms.

An ordinal is a finite sum  base^{e_k}.c_k + ... + base^{e_1}.c_1  with
strictly decreasing exponents and positive integer coefficients, where a
term head may instead be an atomic fixed point eps_i of  x -> base^x.
Everything below the omega-th fixed point of base-exponentiation is
representable.

Two bases exist, a countable one and an uncountable one.  The base tag is
display/type information only: the arithmetic of the two normal forms is
identical, but mixing bases in one operation is rejected, which keeps the
degree-embedding code honest about which side it is on.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Optional, Union


class Base(Enum):
    OMEGA = "w"
    OMEGA1 = "w1"


class Cofinality(Enum):
    ZERO = "0"
    ONE = "1"
    OMEGA = "w"
    OMEGA1 = "w1"


LT, EQ, GT = -1, 0, 1


class BaseMismatchError(TypeError):
    pass


class OrdinalParseError(ValueError):
    pass


# A term head is either an int i (the atom eps_i) or an Ordinal exponent e
# (the term base^e).  Heads equal to a bare eps atom are never stored as
# exponents: base^{eps_i} = eps_i is canonicalized to the atom form.
Head = Union[int, "Ordinal"]


@dataclass(frozen=True)
class Ordinal:
    base: Base
    terms: tuple[tuple[Head, int], ...]

    def __post_init__(self):
        prev: Optional[Head] = None
        for head, coeff in self.terms:
            if coeff < 1:
                raise ValueError("coefficients must be >= 1")
            if isinstance(head, Ordinal):
                if head.base is not self.base:
                    raise BaseMismatchError("exponent base differs from term base")
                if head.is_eps_atom():
                    raise ValueError("exponent equal to an eps atom must be stored as the atom")
            if prev is not None and _compare_heads(prev, head, self.base) != GT:
                raise ValueError("term heads must strictly decrease")
            prev = head

    # -- structure ----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_finite(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and _head_is_zero(self.terms[0][0]))

    def finite_value(self) -> int:
        """The integer value; only valid when is_finite()."""
        if self.is_zero():
            return 0
        if not self.is_finite():
            raise ValueError("not a finite ordinal")
        return self.terms[0][1]

    def is_successor(self) -> bool:
        return bool(self.terms) and _head_is_zero(self.terms[-1][0])

    def is_limit(self) -> bool:
        return bool(self.terms) and not _head_is_zero(self.terms[-1][0])

    def is_eps_atom(self) -> bool:
        """True iff this is exactly eps_i for some i (one atom term, coeff 1)."""
        return (
            len(self.terms) == 1
            and isinstance(self.terms[0][0], int)
            and self.terms[0][1] == 1
        )

    def eps_atom_index(self) -> int:
        if not self.is_eps_atom():
            raise ValueError("not an eps atom")
        return self.terms[0][0]  # type: ignore[return-value]

    def limit_and_finite_parts(self) -> tuple["Ordinal", int]:
        """Split as (limit-or-zero part, finite tail)."""
        if self.is_successor():
            return Ordinal(self.base, self.terms[:-1]), self.terms[-1][1]
        return self, 0

    def max_eps_index(self) -> int:
        """Largest atom index occurring anywhere, -1 if none."""
        best = -1
        for head, _ in self.terms:
            if isinstance(head, int):
                best = max(best, head)
            else:
                best = max(best, head.max_eps_index())
        return best

    # -- comparisons ---------------------------------------------------

    def __lt__(self, other: "Ordinal") -> bool:
        return compare(self, other) == LT

    def __le__(self, other: "Ordinal") -> bool:
        return compare(self, other) != GT

    def __gt__(self, other: "Ordinal") -> bool:
        return compare(self, other) == GT

    def __ge__(self, other: "Ordinal") -> bool:
        return compare(self, other) != LT

    def __add__(self, other: "Ordinal") -> "Ordinal":
        return add(self, other)

    def __str__(self) -> str:
        return format_ordinal(self)

    def __repr__(self) -> str:
        return f"Ordinal[{self.base.value}]({format_ordinal(self)})"


def _head_is_zero(head: Head) -> bool:
    return isinstance(head, Ordinal) and head.is_zero()


def zero(base: Base) -> Ordinal:
    return Ordinal(base, ())


def fin(n: int, base: Base) -> Ordinal:
    if n < 0:
        raise ValueError("ordinals are non-negative")
    if n == 0:
        return zero(base)
    return Ordinal(base, ((zero(base), n),))


def omega(base: Base) -> Ordinal:
    """The base itself, base^1."""
    return Ordinal(base, ((fin(1, base), 1),))


def eps(i: int, base: Base) -> Ordinal:
    if i < 0:
        raise ValueError("atom index must be a natural number")
    return Ordinal(base, ((i, 1),))


def _check_bases(a: Ordinal, b: Ordinal) -> None:
    if a.base is not b.base:
        raise BaseMismatchError(f"mixed bases {a.base.value} and {b.base.value}")


def _compare_heads(h1: Head, h2: Head, base: Base) -> int:
    if isinstance(h1, int) and isinstance(h2, int):
        return (h1 > h2) - (h1 < h2)
    # eps_i compares to an exponent e the way base^{eps_i} compares to
    # base^e, i.e. by comparing eps_i (as an ordinal) with e.
    o1 = eps(h1, base) if isinstance(h1, int) else h1
    o2 = eps(h2, base) if isinstance(h2, int) else h2
    return compare(o1, o2)


def compare(a: Ordinal, b: Ordinal) -> int:
    """Total order; returns LT, EQ or GT."""
    _check_bases(a, b)
    for (h1, c1), (h2, c2) in zip(a.terms, b.terms):
        hc = _compare_heads(h1, h2, a.base)
        if hc != EQ:
            return hc
        if c1 != c2:
            return GT if c1 > c2 else LT
    if len(a.terms) != len(b.terms):
        return GT if len(a.terms) > len(b.terms) else LT
    return EQ


def add(a: Ordinal, b: Ordinal) -> Ordinal:
    _check_bases(a, b)
    if b.is_zero():
        return a
    if a.is_zero():
        return b
    bhead = b.terms[0][0]
    keep = []
    for head, coeff in a.terms:
        if _compare_heads(head, bhead, a.base) == GT:
            keep.append((head, coeff))
        else:
            break
    rest = a.terms[len(keep):]
    if rest and _compare_heads(rest[0][0], bhead, a.base) == EQ:
        merged = (bhead, rest[0][1] + b.terms[0][1])
        return Ordinal(a.base, tuple(keep) + (merged,) + b.terms[1:])
    return Ordinal(a.base, tuple(keep) + b.terms)


def mul_nat(a: Ordinal, m: int) -> Ordinal:
    """a.m for a positive integer m (equals a added to itself m times)."""
    if m < 1:
        raise ValueError("scalar must be a positive integer")
    if a.is_zero():
        return a
    head, coeff = a.terms[0]
    return Ordinal(a.base, ((head, coeff * m),) + a.terms[1:])


def base_pow(e: Ordinal) -> Ordinal:
    """base^e in normal form; fixed-point exponents collapse to their atom."""
    if e.is_zero():
        return fin(1, e.base)
    if e.is_eps_atom():
        return e
    return Ordinal(e.base, ((e, 1),))


def minus_one(a: Ordinal) -> Ordinal:
    """Predecessor of a successor ordinal."""
    if not a.is_successor():
        raise ValueError("only successor ordinals have a predecessor")
    head, coeff = a.terms[-1]
    if coeff == 1:
        return Ordinal(a.base, a.terms[:-1])
    return Ordinal(a.base, a.terms[:-1] + ((head, coeff - 1),))


def cofinality(a: Ordinal) -> Cofinality:
    """Cofinality class: 0 for 0, 1 for successors, else the limit type.

    For the countable base every limit is countably cofinal.  For the
    uncountable base the last term decides: an atom eps_i is a countable
    sup of exponent towers; base^e is uncountably cofinal when e is a
    successor (base^{d+1} = base^d.base) and inherits cof(e) otherwise.
    """
    if a.is_zero():
        return Cofinality.ZERO
    if a.is_successor():
        return Cofinality.ONE
    if a.base is Base.OMEGA:
        return Cofinality.OMEGA
    head, _ = a.terms[-1]
    while True:
        if isinstance(head, int):
            return Cofinality.OMEGA
        e = head
        if e.is_successor():
            return Cofinality.OMEGA1
        head = e.terms[-1][0]


def is_fixed_point(a: Ordinal) -> bool:
    """True iff base^a = a, i.e. a is a single eps atom."""
    return a.is_eps_atom()


def next_fixed_point(a: Ordinal, strict: bool = False) -> Ordinal:
    """Smallest eps_i >= a (or > a when strict)."""
    i = 0
    while True:
        candidate = eps(i, a.base)
        c = compare(candidate, a)
        if c == GT or (not strict and c == EQ):
            return candidate
        i += 1
        if i > a.max_eps_index() + 2:  # unreachable; guards non-termination
            raise RuntimeError("no fixed point found in representable range")


# -- degree embedding -------------------------------------------------
#
# lift() embeds countable-base ordinals into uncountable-base ones:
# integers map to themselves, atoms map index-wise, and exponents are
# lifted recursively.  A "+1" shift is inserted whenever the raw image
# would end in a limit of countable cofinality that is not an atom; the
# shifted image avoids that shape entirely while staying strictly
# increasing, which is what the degree-realization code relies on.


def lift_cnf(a: Ordinal) -> Ordinal:
    """Raw exponent-wise image of a non-null countable-base ordinal."""
    if a.base is not Base.OMEGA:
        raise BaseMismatchError("lift_cnf expects a countable-base ordinal")
    if a.is_zero():
        raise ValueError("lift_cnf is defined for non-null ordinals")
    terms = []
    for head, coeff in a.terms:
        terms.append((_lift_head(head), coeff))
    return Ordinal(Base.OMEGA1, tuple(terms))


def _lift_head(head: Head) -> Head:
    if isinstance(head, int):
        return head
    if head.is_zero():
        return zero(Base.OMEGA1)
    image = lift(head)
    if image.is_eps_atom():
        return image.eps_atom_index()
    return image


def _needs_shift(d: Ordinal) -> bool:
    limit_part, _ = d.limit_and_finite_parts()
    if limit_part.is_zero() or limit_part.is_eps_atom():
        return False
    return cofinality(limit_part) is Cofinality.OMEGA


def lift(a: Ordinal) -> Ordinal:
    """Strictly increasing embedding into uncountable-base degrees."""
    if a.base is not Base.OMEGA:
        raise BaseMismatchError("lift expects a countable-base ordinal")
    if a.is_zero():
        raise ValueError("lift is defined for non-null ordinals")
    if a.is_finite():
        return fin(a.finite_value(), Base.OMEGA1)
    image = lift_cnf(a)
    if _needs_shift(image):
        return add(image, fin(1, Base.OMEGA1))
    return image


def unlift(d: Ordinal) -> Optional[Ordinal]:
    """Inverse of lift; None when d is not in the image."""
    if d.base is not Base.OMEGA1:
        raise BaseMismatchError("unlift expects an uncountable-base ordinal")
    if d.is_zero():
        raise ValueError("unlift is defined for non-null ordinals")
    if d.is_finite():
        return fin(d.finite_value(), Base.OMEGA)
    limit_part, n = d.limit_and_finite_parts()
    if _needs_shift(d):
        # only a shifted image can have this shape, so peel the +1
        if n == 0:
            return None
        raw = minus_one(d)
    else:
        raw = d
    candidate = _unlift_cnf(raw)
    if candidate is None:
        return None
    return candidate if compare(lift(candidate), d) == EQ else None


def _unlift_cnf(t: Ordinal) -> Optional[Ordinal]:
    terms = []
    for head, coeff in t.terms:
        if isinstance(head, int):
            terms.append((head, coeff))
            continue
        if head.is_zero():
            terms.append((zero(Base.OMEGA), coeff))
            continue
        pre = unlift(head)
        if pre is None:
            return None
        terms.append((pre if not pre.is_eps_atom() else pre.eps_atom_index(), coeff))
    try:
        return Ordinal(Base.OMEGA, tuple(terms))
    except ValueError:
        return None


# -- text syntax -------------------------------------------------------
#
# Grammar: 0, decimal integers, `w` for the base, `e<k>` for the k-th
# atom, right-associative `^` (base on the left only), `*` for scalar
# multiples, `+`, parentheses.  Example: e2*3 + w^(e1 + w^w) + w^(w^w + 2)

_TOKEN = re.compile(r"\s*(?:(\d+)|(e\d+)|(w1|w)|([()+*^])|(\S))")


def _tokenize(text: str) -> list[str]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            break
        if m.group(5):
            raise OrdinalParseError(f"unexpected character {m.group(5)!r} at {m.start(5)}")
        tokens.append(m.group(m.lastindex))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens: list[str], base: Base):
        self.tokens = tokens
        self.pos = 0
        self.base = base

    def peek(self) -> Optional[str]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            raise OrdinalParseError("unexpected end of input")
        self.pos += 1
        return tok

    def parse_expr(self) -> Ordinal:
        value = self.parse_term()
        while self.peek() == "+":
            self.take()
            value = add(value, self.parse_term())
        return value

    def parse_term(self) -> Ordinal:
        value = self.parse_factor()
        while self.peek() == "*":
            self.take()
            tok = self.take()
            if not tok.isdigit():
                raise OrdinalParseError("scalar multiple must be a decimal integer")
            if int(tok) == 0:
                raise OrdinalParseError("scalar multiple must be positive")
            value = mul_nat(value, int(tok))
        return value

    def parse_factor(self) -> Ordinal:
        tok = self.take()
        if tok.isdigit():
            value = fin(int(tok), self.base)
        elif tok.startswith("e"):
            value = eps(int(tok[1:]), self.base)
        elif tok in ("w", "w1"):
            if self.peek() == "^":
                self.take()
                return base_pow(self.parse_factor())
            value = omega(self.base)
        elif tok == "(":
            value = self.parse_expr()
            if self.take() != ")":
                raise OrdinalParseError("missing closing parenthesis")
        else:
            raise OrdinalParseError(f"unexpected token {tok!r}")
        if self.peek() == "^":
            raise OrdinalParseError("only the base symbol w can be exponentiated")
        return value


def parse_ordinal(text: str, base: Base = Base.OMEGA1) -> Ordinal:
    tokens = _tokenize(text)
    if not tokens:
        raise OrdinalParseError("empty ordinal expression")
    parser = _Parser(tokens, base)
    value = parser.parse_expr()
    if parser.peek() is not None:
        raise OrdinalParseError(f"trailing input at token {parser.pos}")
    return value


def format_ordinal(a: Ordinal) -> str:
    if a.is_zero():
        return "0"
    parts = []
    for head, coeff in a.terms:
        parts.append(_format_term(head, coeff, a.base))
    return " + ".join(parts)


def _format_term(head: Head, coeff: int, base: Base) -> str:
    if isinstance(head, int):
        body = f"e{head}"
    elif head.is_zero():
        return str(coeff)
    else:
        body = f"w^{_format_exponent(head)}" if compare(head, fin(1, base)) != EQ else "w"
    return f"{body}*{coeff}" if coeff > 1 else body


def _format_exponent(e: Ordinal) -> str:
    if e.is_finite():
        return str(e.finite_value())
    if len(e.terms) == 1 and e.terms[0][1] == 1:
        head = e.terms[0][0]
        if isinstance(head, Ordinal) and compare(head, fin(1, e.base)) == EQ:
            return "w"  # plain w needs no parentheses
    return f"({format_ordinal(e)})"


def iter_terms(a: Ordinal) -> Iterator[tuple[Ordinal, int]]:
    """CNF terms as (exponent ordinal, coefficient), atoms included."""
    for head, coeff in a.terms:
        if isinstance(head, int):
            yield eps(head, a.base), coeff
        else:
            yield head, coeff
