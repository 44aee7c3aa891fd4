"""Exact arithmetic in Q(t) (or Q(i)(t)) and a small expression parser."""

from __future__ import annotations

import re
from fractions import Fraction
from numbers import Rational
from typing import Tuple

from .scalars import GaussianRational, format_scalar, simplify

Poly = Tuple  # coefficients, constant term first, no trailing zeros


def _norm(p) -> Poly:
    p = list(p)
    while p and not p[-1]:
        p.pop()
    return tuple(simplify(c) for c in p)


def padd(a: Poly, b: Poly) -> Poly:
    if len(a) < len(b):
        a, b = b, a
    return _norm([x + (b[i] if i < len(b) else 0) for i, x in enumerate(a)])


def pneg(a: Poly) -> Poly:
    return tuple(-x for x in a)


def pmul(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return ()
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return _norm(out)


def pscale(a: Poly, c) -> Poly:
    return _norm([x * c for x in a])


def pdivmod(a: Poly, b: Poly) -> Tuple[Poly, Poly]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    lead = b[-1]
    while len(rem) >= len(b) and rem:
        shift = len(rem) - len(b)
        f = rem[-1] / lead
        q[shift] = f
        for i, y in enumerate(b):
            rem[shift + i] -= f * y
        rem = list(_norm(rem))
    return _norm(q), _norm(rem)


def pgcd(a: Poly, b: Poly) -> Poly:
    while b:
        a, b = b, pdivmod(a, b)[1]
    if not a:
        return ()
    return pscale(a, 1 / a[-1])


def peval(a: Poly, x):
    acc = Fraction(0)
    for c in reversed(a):
        acc = acc * x + c
    return simplify(acc)


def _coerce_scalar(x):
    return isinstance(x, (int, Rational, GaussianRational))


class RatFunc:
    """Reduced fraction ``num/den`` of polynomials in ``t`` with monic ``den``."""

    __slots__ = ("num", "den")

    def __init__(self, num=(), den=(1,)):
        num = _norm(num)
        den = _norm(den)
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not num:
            self.num, self.den = (), (Fraction(1),)
            return
        g = pgcd(num, den)
        if len(g) > 1:
            num = pdivmod(num, g)[0]
            den = pdivmod(den, g)[0]
        lead = den[-1]
        if lead != 1:
            num = pscale(num, 1 / lead)
            den = pscale(den, 1 / lead)
        self.num, self.den = num, den

    @classmethod
    def const(cls, c) -> "RatFunc":
        return cls((c,))

    @classmethod
    def t(cls) -> "RatFunc":
        return cls((0, 1))

    @staticmethod
    def _lift(other):
        if isinstance(other, RatFunc):
            return other
        if _coerce_scalar(other):
            return RatFunc((other,))
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        if self.den == o.den:
            return RatFunc(padd(self.num, o.num), self.den)
        return RatFunc(padd(pmul(self.num, o.den), pmul(o.num, self.den)), pmul(self.den, o.den))

    __radd__ = __add__

    def __neg__(self):
        r = RatFunc.__new__(RatFunc)
        r.num, r.den = pneg(self.num), self.den
        return r

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        if not self.num or not o.num:
            return RatFunc()
        return RatFunc(pmul(self.num, o.num), pmul(self.den, o.den))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        if not o.num:
            raise ZeroDivisionError("division by the zero rational function")
        return RatFunc(pmul(self.num, o.den), pmul(self.den, o.num))

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return o / self

    def __pow__(self, k: int):
        if k < 0:
            return RatFunc((1,)) / (self ** (-k))
        out = RatFunc((1,))
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        if self.den == (1,) and len(self.num) <= 1:
            return hash(self.num[0] if self.num else Fraction(0))
        return hash((self.num, self.den))

    def __bool__(self):
        return bool(self.num)

    def is_constant(self) -> bool:
        return len(self.num) <= 1 and self.den == (1,)

    def order_at_zero(self) -> int:
        """Valuation at ``t = 0`` (``+inf`` handled by callers for zero)."""
        if not self.num:
            raise ValueError("zero has infinite order")
        vn = next(i for i, c in enumerate(self.num) if c)
        vd = next(i for i, c in enumerate(self.den) if c)
        return vn - vd

    def has_pole_at_zero(self) -> bool:
        return bool(self.num) and not self.den[0]

    def __call__(self, x):
        d = peval(self.den, x)
        if not d:
            raise ZeroDivisionError(f"pole at t = {x}")
        return simplify(peval(self.num, x) / d)

    def at_zero(self):
        if self.has_pole_at_zero():
            raise ZeroDivisionError("pole at t = 0")
        return self(Fraction(0))

    def __repr__(self):
        return f"RatFunc({self})"

    def __str__(self):
        n = format_poly(self.num)
        if self.den == (1,):
            return n
        d = format_poly(self.den)
        if len([c for c in self.num if c]) > 1 or "/" in n:
            n = f"({n})"
        if len([c for c in self.den if c]) > 1 or (len(self.den) > 1 and self.den[-1] != 1):
            d = f"({d})"
        return f"{n}/{d}"


def format_poly(p: Poly) -> str:
    if not p:
        return "0"
    parts = []
    for k in range(len(p) - 1, -1, -1):
        c = p[k]
        if not c:
            continue
        cs = format_scalar(c)
        if isinstance(simplify(c), GaussianRational):
            cs = f"({cs})"
        neg = cs.startswith("-")
        mag = cs[1:] if neg else cs
        if k == 0:
            body = mag
        else:
            mono = "t" if k == 1 else f"t^{k}"
            body = mono if mag == "1" else f"{mag}*{mono}"
        parts.append(("-" if neg else "+", body))
    s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        s += f" {sign} {body}"
    return s


# ---------------------------------------------------------------------------
# parser

_TOKEN = re.compile(r"\s*(?:(\d+)|(t)|(i)|(\*\*|[-+*/^()]))")


class RatFuncSyntaxError(ValueError):
    def __init__(self, message: str, pos: int):
        self.pos = pos
        super().__init__(f"col {pos + 1}: {message}")


def _tokenize(text: str):
    pos = 0
    toks = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise RatFuncSyntaxError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(m.lastindex)
        if m.group(1):
            toks.append(("num", int(m.group(1)), start))
        elif m.group(2):
            toks.append(("t", None, start))
        elif m.group(3):
            toks.append(("i", None, start))
        else:
            op = m.group(4)
            toks.append(("op", "^" if op == "**" else op, start))
        pos = m.end()
    toks.append(("end", None, len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.k = 0

    def peek(self):
        return self.toks[self.k]

    def take(self):
        tok = self.toks[self.k]
        self.k += 1
        return tok

    def expect_op(self, op):
        tok = self.take()
        if tok[0] != "op" or tok[1] != op:
            raise RatFuncSyntaxError(f"expected {op!r}", tok[2])

    def expr(self) -> RatFunc:
        val = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            rhs = self.term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def term(self) -> RatFunc:
        val = self.unary()
        while True:
            tok = self.peek()
            if tok[0] == "op" and tok[1] in "*/":
                self.take()
                rhs = self.unary()
                if tok[1] == "*":
                    val = val * rhs
                else:
                    if not rhs:
                        raise RatFuncSyntaxError("division by the zero polynomial", tok[2])
                    val = val / rhs
            elif tok[0] in ("t", "i") or (tok[0] == "op" and tok[1] == "("):
                val = val * self.unary()  # implicit product, e.g. 2t
            else:
                return val

    def unary(self) -> RatFunc:
        tok = self.peek()
        if tok[0] == "op" and tok[1] in "+-":
            self.take()
            v = self.unary()
            return -v if tok[1] == "-" else v
        return self.power()

    def power(self) -> RatFunc:
        base = self.atom()
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "^":
            self.take()
            sign = 1
            nxt = self.peek()
            if nxt[0] == "op" and nxt[1] in "+-":
                self.take()
                sign = -1 if nxt[1] == "-" else 1
            e = self.take()
            if e[0] != "num":
                raise RatFuncSyntaxError("exponent must be an integer", e[2])
            if sign < 0 and not base:
                raise RatFuncSyntaxError("negative power of zero", e[2])
            return base ** (sign * e[1])
        return base

    def atom(self) -> RatFunc:
        tok = self.take()
        kind, val, pos = tok
        if kind == "num":
            return RatFunc.const(Fraction(val))
        if kind == "t":
            return RatFunc.t()
        if kind == "i":
            return RatFunc.const(GaussianRational(0, 1))
        if kind == "op" and val == "(":
            inner = self.expr()
            self.expect_op(")")
            return inner
        if kind == "end":
            raise RatFuncSyntaxError("unexpected end of expression", pos)
        raise RatFuncSyntaxError(f"unexpected {val!r}", pos)


def parse_ratfunc(text: str) -> RatFunc:
    """Parse integers, rationals, ``t``, ``i``, ``+ - * / ^`` and parentheses.

    >>> str(parse_ratfunc("(t^2+1)/(t+1)"))
    '(t^2 + 1)/(t + 1)'
    """
    p = _Parser(text)
    if p.peek()[0] == "end":
        raise RatFuncSyntaxError("empty expression", 0)
    val = p.expr()
    tok = p.peek()
    if tok[0] != "end":
        raise RatFuncSyntaxError(f"trailing input {tok[1]!r}", tok[2])
    return val
