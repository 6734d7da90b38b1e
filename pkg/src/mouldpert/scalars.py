"""Exact arithmetic in the Gaussian rationals Q(i).

Every coefficient downstream (alphabet letters, Laurent coefficients,
matrix entries) is a :class:`GaussianRational`, so comparison against zero
is decidable and algebraic identities can be verified exactly.  Plain
rationals are handled by :class:`fractions.Fraction` from the standard
library; this module only adds the imaginary unit on top of it.
"""

from __future__ import annotations

import math
from fractions import Fraction

__all__ = [
    "GaussianRational",
    "ScalarParseError",
    "parse_scalar",
    "format_scalar",
    "ZERO",
    "ONE",
    "I",
]


class ScalarParseError(ValueError):
    """Malformed scalar literal; carries the offending position."""

    def __init__(self, text: str, pos: int, reason: str):
        super().__init__(f"bad scalar literal {text!r} at position {pos}: {reason}")
        self.text = text
        self.pos = pos
        self.reason = reason


class GaussianRational:
    """An exact complex number a + b*i with rational a and b.

    Values are immutable and canonical: internally a triple of integers
    (re_num, im_num, den) over a common positive denominator with
    gcd(re_num, im_num, den) == 1.  The integer triple keeps the hot
    arithmetic paths on machine-speed int operations instead of a pair
    of Fractions.
    """

    __slots__ = ("_a", "_b", "_d")

    def __init__(self, re=0, im=0):
        re = re if isinstance(re, Fraction) else Fraction(re)
        im = im if isinstance(im, Fraction) else Fraction(im)
        d = re.denominator * im.denominator // math.gcd(re.denominator, im.denominator)
        a = re.numerator * (d // re.denominator)
        b = im.numerator * (d // im.denominator)
        g = math.gcd(a, b, d)
        if g > 1:
            a //= g
            b //= g
            d //= g
        self._a = a
        self._b = b
        self._d = d

    @staticmethod
    def _raw(a: int, b: int, d: int) -> "GaussianRational":
        # trusted constructor: (a, b, d) must already be canonical
        self = object.__new__(GaussianRational)
        self._a = a
        self._b = b
        self._d = d
        return self

    # -- inspection ---------------------------------------------------

    @property
    def re(self) -> Fraction:
        return Fraction(self._a, self._d)

    @property
    def im(self) -> Fraction:
        return Fraction(self._b, self._d)

    @property
    def is_real(self) -> bool:
        return self._b == 0

    @property
    def is_imaginary(self) -> bool:
        return self._a == 0

    def conjugate(self) -> "GaussianRational":
        return GaussianRational._raw(self._a, -self._b, self._d)

    def norm_squared(self) -> Fraction:
        """|z|^2 as an exact rational."""
        return Fraction(self._a * self._a + self._b * self._b, self._d * self._d)

    def __bool__(self) -> bool:
        return self._a != 0 or self._b != 0

    def __complex__(self) -> complex:
        return complex(self._a / self._d, self._b / self._d)

    # -- field operations ---------------------------------------------

    def __neg__(self) -> "GaussianRational":
        return GaussianRational._raw(-self._a, -self._b, self._d)

    def __pos__(self) -> "GaussianRational":
        return self

    def __add__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return _make(
            self._a * o._d + o._a * self._d,
            self._b * o._d + o._b * self._d,
            self._d * o._d,
        )

    __radd__ = __add__

    def __sub__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return _make(
            self._a * o._d - o._a * self._d,
            self._b * o._d - o._b * self._d,
            self._d * o._d,
        )

    def __rsub__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return o.__sub__(self)

    def __mul__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return _make(
            self._a * o._a - self._b * o._b,
            self._a * o._b + self._b * o._a,
            self._d * o._d,
        )

    __rmul__ = __mul__

    def reciprocal(self) -> "GaussianRational":
        n = self._a * self._a + self._b * self._b
        if n == 0:
            raise ZeroDivisionError("reciprocal of zero")
        return _make(self._d * self._a, -self._d * self._b, n)

    def __truediv__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return self.__mul__(o.reciprocal())

    def __rtruediv__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return o.__mul__(self.reciprocal())

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return self.reciprocal() ** (-exponent)
        out = ONE
        base = self
        n = exponent
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- comparison ----------------------------------------------------

    def __eq__(self, other) -> bool:
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return self._a == o._a and self._b == o._b and self._d == o._d

    def __hash__(self) -> int:
        if self._b == 0:
            # agree with hash(int) / hash(Fraction) for real values
            return hash(Fraction(self._a, self._d))
        return hash((self._a, self._b, self._d))

    def __str__(self) -> str:
        return format_scalar(self)

    def __repr__(self) -> str:
        return f"GaussianRational({format_scalar(self)!r})"


def _make(a: int, b: int, d: int) -> GaussianRational:
    g = math.gcd(a, b, d)
    if g > 1:
        a //= g
        b //= g
        d //= g
    return GaussianRational._raw(a, b, d)


def _coerce(x) -> GaussianRational | None:
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, int):
        return GaussianRational._raw(x, 0, 1)
    if isinstance(x, Fraction):
        return GaussianRational._raw(x.numerator, 0, x.denominator)
    return None


ZERO = GaussianRational._raw(0, 0, 1)
ONE = GaussianRational._raw(1, 0, 1)
I = GaussianRational._raw(0, 1, 1)


# -- text form ----------------------------------------------------------
#
# Grammar:  [+-]? p (/q)? ([+-] (r (/s)?)? i)?   |   [+-]? (r (/s)?)? i
# No internal whitespace; denominators must be nonzero.


def parse_scalar(text: str) -> GaussianRational:
    """Parse a scalar literal such as "3/4", "-1/2+2/3i" or "i"."""
    stripped = text.strip()
    offset = text.index(stripped) if stripped else 0
    s = stripped
    n = len(s)
    i = 0

    def fail(pos: int, reason: str):
        raise ScalarParseError(text, offset + pos, reason)

    def read_sign() -> int:
        nonlocal i
        if i < n and s[i] in "+-":
            i += 1
            return -1 if s[i - 1] == "-" else 1
        return 1

    def read_uint(what: str) -> int:
        nonlocal i
        start = i
        while i < n and s[i].isdigit():
            i += 1
        if i == start:
            fail(start, f"expected {what}")
        return int(s[start:i])

    def read_rational() -> Fraction:
        nonlocal i
        p = read_uint("a numerator")
        if i < n and s[i] == "/":
            i += 1
            qpos = i
            q = read_uint("a denominator")
            if q == 0:
                fail(qpos, "zero denominator")
            return Fraction(p, q)
        return Fraction(p)

    if n == 0:
        fail(0, "empty scalar")

    sign1 = read_sign()
    if i < n and s[i] == "i":
        i += 1
        re_part, im_part = Fraction(0), Fraction(sign1)
    else:
        mag = read_rational()
        if i < n and s[i] == "i":
            i += 1
            re_part, im_part = Fraction(0), sign1 * mag
        else:
            re_part, im_part = sign1 * mag, Fraction(0)
            if i < n and s[i] in "+-":
                sign2 = read_sign()
                if i < n and s[i] == "i":
                    i += 1
                    im_part = Fraction(sign2)
                else:
                    mag2 = read_rational()
                    if i < n and s[i] == "i":
                        i += 1
                        im_part = sign2 * mag2
                    else:
                        fail(i, "expected 'i' after the imaginary part")
    if i != n:
        fail(i, "trailing characters")
    return GaussianRational(re_part, im_part)


def _frac_str(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def format_scalar(z: GaussianRational) -> str:
    """Canonical literal; round-trips through :func:`parse_scalar`."""
    re_, im_ = z.re, z.im
    if im_ == 0:
        return _frac_str(re_)
    mag = abs(im_)
    unit = "i" if mag == 1 else _frac_str(mag) + "i"
    if re_ == 0:
        return "-" + unit if im_ < 0 else unit
    return _frac_str(re_) + ("-" if im_ < 0 else "+") + unit
