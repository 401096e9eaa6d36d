"""Exact numbers: canonical rational text form and radical values ``c * b**e``.

Power moduli with fractional exponents leave the rationals, but every
quantity this package compares has the shape ``c * b**e`` with rational
``c >= 0``, ``b > 0`` and ``e``.  Two such values are ordered exactly by
raising both to a common integer power, so no floating point is needed.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from ultraqs.errors import FormatError

_RATIONAL_RE = re.compile(r"-?(0|[1-9][0-9]*)(/[1-9][0-9]*)?")


def parse_rational(value: object) -> Fraction:
    """Parse ``"p/q"`` / integer text (or a JSON integer) into a Fraction.

    Non-canonical spellings such as ``"2/4"``, ``"3/1"`` or ``"-0"`` are rejected
    so that serialization round-trips byte for byte.
    """
    if isinstance(value, bool):
        raise FormatError(f"expected a rational, got {value!r}", value=repr(value))
    if isinstance(value, int):
        return Fraction(value)
    if not isinstance(value, str) or not _RATIONAL_RE.fullmatch(value):
        raise FormatError(f"not a rational literal: {value!r}", value=repr(value))
    q = Fraction(value)
    if str(q) != value:
        raise FormatError(
            f"non-canonical rational {value!r} (canonical form is {str(q)!r})",
            value=value,
            canonical=str(q),
        )
    return q


def format_rational(q: Fraction) -> str:
    return str(q)


def _int_root(n: int, k: int) -> int | None:
    """Exact k-th root of a non-negative integer, or None."""
    if n < 2:
        return n
    # Newton from above converges monotonically to floor(n ** (1/k))
    r = 1 << (n.bit_length() // k + 1)
    while True:
        nr = ((k - 1) * r + n // r ** (k - 1)) // k
        if nr >= r:
            break
        r = nr
    return r if r**k == n else None


def rational_power(base: Fraction, exp: Fraction) -> Fraction | None:
    """``base**exp`` when it is rational, else None (base > 0)."""
    p, q = exp.numerator, exp.denominator
    num = _int_root(base.numerator, q)
    if num is None:
        return None
    den = _int_root(base.denominator, q)
    if den is None:
        return None
    return Fraction(num, den) ** p


@dataclass(frozen=True)
class Radical:
    """The positive real ``coef * base**exp`` (exact, possibly irrational)."""

    coef: Fraction
    base: Fraction
    exp: Fraction

    def __post_init__(self) -> None:
        if self.base <= 0:
            raise ValueError("Radical base must be positive")
        if self.coef < 0:
            raise ValueError("Radical coefficient must be non-negative")

    def _powered(self, k: int) -> Fraction:
        # (coef * base**exp) ** k, k a multiple of exp's denominator
        return self.coef**k * self.base ** int(self.exp * k)

    def __float__(self) -> float:
        return float(self.coef) * float(self.base) ** float(self.exp)

    def __mul__(self, other: object) -> "Real":
        if isinstance(other, (int, Fraction)):
            return make_power(self.coef * other, self.base, self.exp)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other: object) -> "Real":
        if isinstance(other, (int, Fraction)):
            return make_power(self.coef / other, self.base, self.exp)
        return NotImplemented

    def __rtruediv__(self, other: object) -> "Real":
        if isinstance(other, (int, Fraction)):
            return make_power(Fraction(other) / self.coef, self.base, -self.exp)
        return NotImplemented

    def __str__(self) -> str:
        head = "" if self.coef == 1 else f"{self.coef}*"
        return f"{head}({self.base})^({self.exp})"

    def __hash__(self) -> int:
        return hash((self.coef, self.base, self.exp))

    def __eq__(self, other: object) -> bool:
        c = compare(self, other) if isinstance(other, (int, Fraction, Radical)) else None
        return c == 0

    def __lt__(self, other: "Real") -> bool:
        return compare(self, other) < 0

    def __le__(self, other: "Real") -> bool:
        return compare(self, other) <= 0

    def __gt__(self, other: "Real") -> bool:
        return compare(self, other) > 0

    def __ge__(self, other: "Real") -> bool:
        return compare(self, other) >= 0


Real = Union[Fraction, Radical]


def make_power(coef: Fraction, base: Fraction, exp: Fraction) -> Real:
    """``coef * base**exp`` collapsed to a Fraction whenever that is exact."""
    coef, base, exp = Fraction(coef), Fraction(base), Fraction(exp)
    if coef == 0 or exp == 0 or base == 1:
        return coef
    r = rational_power(base, exp)
    if r is not None:
        return coef * r
    return Radical(coef, base, exp)


def _parts(x: Real) -> tuple[Fraction, Fraction, Fraction]:
    if isinstance(x, Radical):
        return x.coef, x.base, x.exp
    x = Fraction(x)
    if x < 0:
        raise ValueError("only non-negative values are compared exactly")
    return x, Fraction(1), Fraction(0)


def compare(a: Real, b: Real) -> int:
    """Exact three-way comparison of two non-negative reals."""
    ca, ba, ea = _parts(a)
    cb, bb, eb = _parts(b)
    if ca == 0 or cb == 0:
        return (ca > 0) - (cb > 0)
    k = math.lcm(ea.denominator, eb.denominator)
    left = ca**k * ba ** int(ea * k)
    right = cb**k * bb ** int(eb * k)
    return (left > right) - (left < right)


def format_real(x: Real) -> str:
    return str(x)


def exact_or_none(x: Real) -> Fraction | None:
    return x if isinstance(x, Fraction) else None
