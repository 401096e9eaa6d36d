"""Control functions (moduli) for quasisymmetry checks.

Spec strings::

    linear:C                 eta(t) = C*t
    power:alpha[,C[,S]]      eta(t) = C*(S*t)**alpha
    glued:alpha[,C[,S]]      eta(t) = C*max((S*t)**alpha, (S*t)**(1/alpha))
    pl:(t1,v1);(t2,v2);...   piecewise linear through (0,0) and the breakpoints,
                             extended past the last breakpoint with the last slope
    inv:<spec>               t -> 1/eta^-1(1/t) for the inner spec

Every kind is an increasing homeomorphism of [0, inf).  Linear and
piecewise-linear moduli evaluate to Fractions on Fraction input; power moduli
return :class:`~ultraqs.exact.Radical` values when the result is irrational.
"""

from __future__ import annotations

import re
from bisect import bisect_left
from fractions import Fraction

from ultraqs import errors
from ultraqs.exact import Real, make_power, parse_rational


class Modulus:
    """Base class.  Subclasses implement ``__call__``, ``inverse_at`` and ``dual``."""

    def __call__(self, t: Fraction) -> Real:
        raise NotImplementedError

    def inverse_at(self, s: Fraction) -> Real:
        """``eta^-1(s)``."""
        raise NotImplementedError

    def dual(self) -> "Modulus":
        """Modulus of the inverse map: ``t -> 1 / eta^-1(1/t)``."""
        raise NotImplementedError

    @property
    def spec(self) -> str:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.spec!r})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Modulus) and self.spec == other.spec

    def __hash__(self) -> int:
        return hash(self.spec)


def _positive(q: Fraction, what: str) -> Fraction:
    if q <= 0:
        raise errors.FormatError(f"{what} must be positive, got {q}")
    return q


class Linear(Modulus):
    def __init__(self, c: Fraction | int) -> None:
        self.c = _positive(Fraction(c), "linear constant")

    def __call__(self, t: Fraction) -> Fraction:
        return self.c * t

    def inverse_at(self, s: Fraction) -> Fraction:
        return s / self.c

    def dual(self) -> "Linear":
        return Linear(self.c)

    @property
    def spec(self) -> str:
        return f"linear:{self.c}"


class Power(Modulus):
    """``coef * g(scale * t)`` with ``g(u) = u**alpha`` (or the glued max form)."""

    def __init__(self, alpha, coef=1, scale=1, glued: bool = False) -> None:
        self.alpha = _positive(Fraction(alpha), "exponent")
        self.coef = _positive(Fraction(coef), "coefficient")
        self.scale = _positive(Fraction(scale), "scale")
        self.glued = glued

    def _exp(self, u: Fraction, inverse: bool) -> Fraction:
        a = self.alpha if not inverse else 1 / self.alpha
        if not self.glued:
            return a
        hi, lo = max(a, 1 / a), min(a, 1 / a)
        # g(u) = max(u^a, u^(1/a)); its inverse is min(v^a, v^(1/a))
        if inverse:
            hi, lo = lo, hi
        return hi if u >= 1 else lo

    def __call__(self, t: Fraction) -> Real:
        t = Fraction(t)
        if t == 0:
            return Fraction(0)
        u = self.scale * t
        return make_power(self.coef, u, self._exp(u, inverse=False))

    def inverse_at(self, s: Fraction) -> Real:
        s = Fraction(s)
        if s == 0:
            return Fraction(0)
        v = s / self.coef
        return make_power(1 / self.scale, v, self._exp(v, inverse=True))

    def dual(self) -> "Power":
        alpha = self.alpha if self.glued else 1 / self.alpha
        return Power(alpha, coef=self.scale, scale=self.coef, glued=self.glued)

    @property
    def spec(self) -> str:
        kind = "glued" if self.glued else "power"
        tail = ""
        if self.scale != 1:
            tail = f",{self.coef},{self.scale}"
        elif self.coef != 1:
            tail = f",{self.coef}"
        return f"{kind}:{self.alpha}{tail}"


class PiecewiseLinear(Modulus):
    def __init__(self, points) -> None:
        pts = [(Fraction(t), Fraction(v)) for t, v in points]
        if pts and pts[0] == (0, 0):
            pts = pts[1:]
        if not pts:
            raise errors.NotInvertible("piecewise-linear modulus needs a breakpoint besides (0,0)")
        prev_t = prev_v = Fraction(0)
        for t, v in pts:
            if t <= prev_t or v <= prev_v:
                raise errors.NotInvertible(
                    f"breakpoint ({t},{v}) does not strictly increase in both coordinates"
                )
            prev_t, prev_v = t, v
        self.points = tuple(pts)
        self._ts = [Fraction(0)] + [t for t, _ in pts]
        self._vs = [Fraction(0)] + [v for _, v in pts]

    @staticmethod
    def _interp(xs: list[Fraction], ys: list[Fraction], x: Fraction) -> Fraction:
        k = bisect_left(xs, x)
        if k < len(xs) and xs[k] == x:
            return ys[k]
        k = min(max(k, 1), len(xs) - 1)
        x0, x1, y0, y1 = xs[k - 1], xs[k], ys[k - 1], ys[k]
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0)

    def __call__(self, t: Fraction) -> Fraction:
        return self._interp(self._ts, self._vs, Fraction(t))

    def inverse_at(self, s: Fraction) -> Fraction:
        return self._interp(self._vs, self._ts, Fraction(s))

    def dual(self) -> "Dual":
        return Dual(self)

    @property
    def spec(self) -> str:
        return "pl:" + ";".join(f"({t},{v})" for t, v in self.points)


class Dual(Modulus):
    """``t -> 1 / base^-1(1/t)``; used where the closed form leaves the base family."""

    def __init__(self, base: Modulus) -> None:
        self.base = base

    def __call__(self, t: Fraction) -> Real:
        t = Fraction(t)
        if t == 0:
            return Fraction(0)
        return 1 / self.base.inverse_at(1 / t)

    def inverse_at(self, s: Fraction) -> Real:
        s = Fraction(s)
        if s == 0:
            return Fraction(0)
        return 1 / self.base(1 / s)

    def dual(self) -> Modulus:
        return self.base

    @property
    def spec(self) -> str:
        return f"inv:{self.base.spec}"


def inverse_modulus(eta: Modulus) -> Modulus:
    """The modulus ``eta'(t) = 1 / eta^-1(1/t)`` of the inverse map."""
    return eta.dual()


_PL_POINT = re.compile(r"\(([^,()]+),([^,()]+)\)")


def parse_modulus(text: str) -> Modulus:
    text = text.strip()
    kind, sep, rest = text.partition(":")
    if not sep:
        raise errors.FormatError(f"modulus spec needs 'kind:params', got {text!r}")
    if kind == "inv":
        return Dual(parse_modulus(rest))
    if kind == "linear":
        return Linear(parse_rational(rest.strip()))
    if kind in ("power", "glued"):
        args = [parse_rational(a.strip()) for a in rest.split(",")]
        if not 1 <= len(args) <= 3:
            raise errors.FormatError(f"{kind} takes alpha[,C[,S]], got {rest!r}")
        return Power(*args, glued=kind == "glued")
    if kind == "pl":
        chunks = [c.strip() for c in rest.split(";") if c.strip()]
        pts = []
        for c in chunks:
            m = _PL_POINT.fullmatch(c)
            if not m:
                raise errors.FormatError(f"bad breakpoint {c!r}")
            pts.append((parse_rational(m.group(1).strip()), parse_rational(m.group(2).strip())))
        return PiecewiseLinear(pts)
    raise errors.FormatError(f"unknown modulus kind {kind!r}")
