"""Exact Gaussian rationals.

A :class:`Scalar` is ``(re + im*i) / den`` with integer ``re``, ``im`` and a
positive common denominator, kept in lowest terms.  Everything downstream
(operator entries, kernel bases, curvature tensors) lives in this field.
"""

from __future__ import annotations

import re as _re
from fractions import Fraction
from math import gcd

__all__ = ["Scalar", "ZERO", "ONE", "I", "as_scalar"]


class Scalar:
    __slots__ = ("_re", "_im", "_den", "_hash")

    def __init__(self, re=0, im=0):
        if isinstance(re, int) and isinstance(im, int):
            self._re, self._im, self._den = re, im, 1
        else:
            fr, fi = Fraction(re), Fraction(im)
            den = fr.denominator * fi.denominator // gcd(fr.denominator, fi.denominator)
            self._re = fr.numerator * (den // fr.denominator)
            self._im = fi.numerator * (den // fi.denominator)
            self._den = den
        self._hash = None

    @classmethod
    def _raw(cls, re: int, im: int, den: int) -> "Scalar":
        # den > 0 assumed
        if den != 1:
            g = gcd(gcd(re, im), den)
            if g != 1:
                re //= g
                im //= g
                den //= g
        s = object.__new__(cls)
        s._re, s._im, s._den, s._hash = re, im, den, None
        return s

    # -- parts ---------------------------------------------------------
    @property
    def real(self) -> Fraction:
        return Fraction(self._re, self._den)

    @property
    def imag(self) -> Fraction:
        return Fraction(self._im, self._den)

    @property
    def re_num(self) -> int:
        return self.real.numerator

    @property
    def re_den(self) -> int:
        return self.real.denominator

    @property
    def im_num(self) -> int:
        return self.imag.numerator

    @property
    def im_den(self) -> int:
        return self.imag.denominator

    def conjugate(self) -> "Scalar":
        return Scalar._raw(self._re, -self._im, self._den)

    def is_zero(self) -> bool:
        return self._re == 0 and self._im == 0

    def __bool__(self) -> bool:
        return self._re != 0 or self._im != 0

    # -- arithmetic ----------------------------------------------------
    def __add__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        if self._den == o._den:
            if self._den == 1:
                return Scalar._raw(self._re + o._re, self._im + o._im, 1)
            return Scalar._raw(self._re + o._re, self._im + o._im, self._den)
        return Scalar._raw(self._re * o._den + o._re * self._den,
                           self._im * o._den + o._im * self._den,
                           self._den * o._den)

    __radd__ = __add__

    def __neg__(self):
        return Scalar._raw(-self._re, -self._im, self._den)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __mul__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        a, b, c, d = self._re, self._im, o._re, o._im
        return Scalar._raw(a * c - b * d, a * d + b * c, self._den * o._den)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if not self:
            raise ZeroDivisionError("Scalar division by zero")
        # (a+bi)/d inverted is d(a-bi)/(a^2+b^2)
        a, b, d = self._re, self._im, self._den
        n = a * a + b * b
        re, im = d * a, -d * b
        if n < 0:
            re, im, n = -re, -im, -n
        return Scalar._raw(re, im, n)

    def __truediv__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        out, base = ONE, self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- comparison / hashing -----------------------------------------
    def __eq__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self._re == o._re and self._im == o._im and self._den == o._den

    def __hash__(self):
        if self._hash is None:
            if self._im == 0:
                self._hash = hash(Fraction(self._re, self._den))
            else:
                self._hash = hash((self._re, self._im, self._den))
        return self._hash

    # -- text ----------------------------------------------------------
    def __repr__(self):
        return f"Scalar({self})"

    def __str__(self):
        r, m = self.real, self.imag
        sign = "-" if m < 0 else "+"
        m = abs(m)
        return f"{r.numerator}/{r.denominator}{sign}{m.numerator}/{m.denominator}*i"

    def pretty(self) -> str:
        r, m = self.real, self.imag
        if m == 0:
            return str(r)
        if r == 0:
            return f"{m}*i"
        return f"{r}{'-' if m < 0 else '+'}{abs(m)}*i"

    _PATTERN = _re.compile(
        r"^\s*([+-]?\d+(?:/\d+)?)?\s*(?:([+-])\s*(\d+(?:/\d+)?)\s*\*?\s*i)?\s*$")

    @classmethod
    def parse(cls, text: str) -> "Scalar":
        """Parse the exact string form ``"a/b+c/d*i"`` (parts optional)."""
        t = text.strip()
        m = cls._PATTERN.match(t)
        if m is None or (m.group(1) is None and m.group(3) is None):
            # pure imaginary like "-3/2*i"
            mi = _re.match(r"^\s*([+-]?(?:\d+(?:/\d+)?)?)\s*\*?\s*i\s*$", t)
            if mi is None:
                raise ValueError(f"not a Gaussian rational: {text!r}")
            g = mi.group(1)
            coeff = Fraction(1) if g in ("", "+") else Fraction(-1) if g == "-" else Fraction(g)
            return cls(0, coeff)
        re_part = Fraction(m.group(1)) if m.group(1) else Fraction(0)
        im_part = Fraction(0)
        if m.group(3) is not None:
            im_part = Fraction(m.group(3)) * (-1 if m.group(2) == "-" else 1)
        return cls(re_part, im_part)


def _coerce(x):
    if isinstance(x, Scalar):
        return x
    if isinstance(x, int):
        return Scalar._raw(x, 0, 1)
    if isinstance(x, Fraction):
        return Scalar._raw(x.numerator, 0, x.denominator)
    if isinstance(x, complex):
        raise TypeError("floating complex values are not exact; use Scalar")
    return NotImplemented


def as_scalar(x) -> Scalar:
    """Coerce an int, Fraction or Scalar into a Scalar."""
    s = _coerce(x)
    if s is NotImplemented:
        raise TypeError(f"cannot convert {type(x).__name__} to Scalar")
    return s


ZERO = Scalar(0)
ONE = Scalar(1)
I = Scalar(0, 1)
