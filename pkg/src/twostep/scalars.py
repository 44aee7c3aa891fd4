"""Exact scalars: :class:`fractions.Fraction` plus a Gaussian-rational extension."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational


class GaussianRational:
    """An element ``re + im*i`` of Q(i) with exact rational parts.

    Instances with ``im == 0`` compare equal to (and hash like) the
    corresponding :class:`Fraction`, so the two can be mixed freely.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @staticmethod
    def _coerce(other):
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, (int, Rational)):
            return GaussianRational(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GaussianRational(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    __rmul__ = __mul__

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(i)")
        p = self * o.conjugate()
        return GaussianRational(p.re / n, p.im / n)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o / self

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __repr__(self):
        return f"GaussianRational({self.re!s}, {self.im!s})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"({self.re}{sign}{abs(self.im)}i)"


def simplify(x):
    """Collapse a real Gaussian rational to a plain Fraction."""
    if isinstance(x, GaussianRational) and x.im == 0:
        return x.re
    if isinstance(x, int):
        return Fraction(x)
    return x


def parse_scalar(text: str):
    """Parse an integer, ``p/q`` rational, or a Gaussian literal like ``1+2i``."""
    s = text.strip().replace(" ", "")
    if not s:
        raise ValueError("empty scalar")
    if s.endswith("i"):
        body = s[:-1]
        # split at the last sign that is not leading and not part of an exponent
        cut = max(body.rfind("+"), body.rfind("-"))
        if cut > 0:
            re_part, im_part = body[:cut], body[cut:]
        else:
            re_part, im_part = "0", body
        if im_part in ("", "+"):
            im_part = "1"
        elif im_part == "-":
            im_part = "-1"
        return simplify(GaussianRational(Fraction(re_part), Fraction(im_part)))
    return Fraction(s)


def format_scalar(x) -> str:
    x = simplify(x)
    if isinstance(x, GaussianRational):
        sign = "+" if x.im >= 0 else "-"
        mag = abs(x.im)
        im = "" if mag == 1 else str(mag)
        if x.re == 0:
            return f"{'-' if x.im < 0 else ''}{im}i"
        return f"{x.re}{sign}{im}i"
    return str(x)
