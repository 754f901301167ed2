"""Outward-rounded intervals over MPFR.

Every endpoint is produced by an MPFR operation rounded toward -inf (lower
endpoint) or +inf (upper endpoint).  MPFR rounds each basic operation,
``exp``, ``log`` and ``pow`` correctly in the requested direction, so the
enclosures below are rigorous: the true real result always lies in
``[lo, hi]``.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from numbers import Rational

import gmpy2
from gmpy2 import mpfr, mpq, mpz

__all__ = ["Interval", "down", "up"]


@lru_cache(maxsize=None)
def down(prec: int) -> gmpy2.context:
    """MPFR context rounding toward -inf at ``prec`` bits."""
    return gmpy2.context(precision=prec, round=gmpy2.RoundDown)


@lru_cache(maxsize=None)
def up(prec: int) -> gmpy2.context:
    """MPFR context rounding toward +inf at ``prec`` bits."""
    return gmpy2.context(precision=prec, round=gmpy2.RoundUp)


def _as_fraction(x: mpfr) -> Fraction:
    p, q = x.as_integer_ratio()
    return Fraction(int(p), int(q))


class Interval:
    """Closed interval ``[lo, hi]`` with MPFR endpoints at a fixed precision.

    Instances are immutable.  Arithmetic with ``int`` and ``Fraction``
    operands promotes them to outward-rounded enclosures at ``self.prec``;
    binary operations between intervals run at the larger precision.
    """

    __slots__ = ("lo", "hi", "prec")

    def __init__(self, lo: mpfr, hi: mpfr, prec: int):
        if gmpy2.is_nan(lo) or gmpy2.is_nan(hi):
            raise ValueError("interval endpoint is NaN")
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "prec", prec)

    def __setattr__(self, name, value):
        raise AttributeError("Interval is immutable")

    # ----------------------------------------------------------------- build

    @classmethod
    def from_rational(cls, q, prec: int) -> Interval:
        """Tightest enclosure of the rational ``q`` at ``prec`` bits."""
        if isinstance(q, Interval):
            return q
        if isinstance(q, int):
            num, den = mpz(q), mpz(1)
        elif isinstance(q, Rational):
            num, den = mpz(q.numerator), mpz(q.denominator)
        elif isinstance(q, type(mpq())):
            num, den = q.numerator, q.denominator
        else:
            raise TypeError(f"cannot enclose {type(q).__name__} exactly")
        return cls(down(prec).div(num, den), up(prec).div(num, den), prec)

    @classmethod
    def hull(cls, *items: Interval) -> Interval:
        prec = max(i.prec for i in items)
        return cls(min(i.lo for i in items), max(i.hi for i in items), prec)

    def _coerce(self, other) -> Interval | None:
        if isinstance(other, Interval):
            return other
        if isinstance(other, (int, Fraction)):
            return Interval.from_rational(other, self.prec)
        return None

    # ------------------------------------------------------------ inspection

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    @property
    def width(self) -> mpfr:
        return up(self.prec).sub(self.hi, self.lo)

    @property
    def mid(self) -> mpfr:
        ctx = gmpy2.context(precision=self.prec + 1)
        return ctx.div(ctx.add(self.lo, self.hi), 2)

    def contains(self, q) -> bool:
        """Exact membership test for a rational or another interval."""
        if isinstance(q, Interval):
            return self.lo <= q.lo and q.hi <= self.hi
        q = Fraction(q)
        return _as_fraction(self.lo) <= q <= _as_fraction(self.hi)

    def overlaps(self, other: Interval) -> bool:
        return not (self.hi < other.lo or other.hi < self.lo)

    def bounds(self) -> tuple[Fraction, Fraction]:
        """Endpoints as exact rationals."""
        return _as_fraction(self.lo), _as_fraction(self.hi)

    def __repr__(self) -> str:
        return f"Interval([{self.lo}, {self.hi}], prec={self.prec})"

    def __str__(self) -> str:
        return f"[{self.lo},{self.hi}]"

    def __eq__(self, other) -> bool:
        # structural identity, not numeric equality
        if not isinstance(other, Interval):
            return NotImplemented
        return (self.lo, self.hi, self.prec) == (other.lo, other.hi, other.prec)

    def __hash__(self) -> int:
        return hash((self.lo, self.hi, self.prec))

    def __float__(self) -> float:
        return float(self.mid)

    # ------------------------------------------------------------ arithmetic

    def __neg__(self) -> Interval:
        return Interval(-self.hi, -self.lo, self.prec)

    def __pos__(self) -> Interval:
        return self

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        p = max(self.prec, o.prec)
        return Interval(down(p).add(self.lo, o.lo), up(p).add(self.hi, o.hi), p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        p = max(self.prec, o.prec)
        return Interval(down(p).sub(self.lo, o.hi), up(p).sub(self.hi, o.lo), p)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        p = max(self.prec, o.prec)
        d, u = down(p), up(p)
        if self.lo >= 0 and o.lo >= 0:
            return Interval(d.mul(self.lo, o.lo), u.mul(self.hi, o.hi), p)
        pairs = [(self.lo, o.lo), (self.lo, o.hi), (self.hi, o.lo), (self.hi, o.hi)]
        return Interval(min(d.mul(x, y) for x, y in pairs),
                        max(u.mul(x, y) for x, y in pairs), p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.lo <= 0 <= o.hi:
            raise ZeroDivisionError(f"divisor {o} contains zero")
        p = max(self.prec, o.prec)
        d, u = down(p), up(p)
        pairs = [(self.lo, o.lo), (self.lo, o.hi), (self.hi, o.lo), (self.hi, o.hi)]
        return Interval(min(d.div(x, y) for x, y in pairs),
                        max(u.div(x, y) for x, y in pairs), p)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, k):
        if isinstance(k, int):
            return self.pow_int(k)
        if isinstance(k, Fraction) and k.denominator == 1:
            return self.pow_int(int(k))
        return NotImplemented

    def pow_int(self, k: int) -> Interval:
        """``self ** k`` for an integer exponent."""
        p = self.prec
        if k == 0:
            return Interval(mpfr(1), mpfr(1), p)
        if k < 0:
            return 1 / self.pow_int(-k)
        d, u = down(p), up(p)
        if self.lo >= 0:
            return Interval(d.pow(self.lo, k), u.pow(self.hi, k), p)
        if self.hi <= 0:
            if k % 2:
                return Interval(d.pow(self.lo, k), u.pow(self.hi, k), p)
            return Interval(d.pow(self.hi, k), u.pow(self.lo, k), p)
        if k % 2:
            return Interval(d.pow(self.lo, k), u.pow(self.hi, k), p)
        return Interval(mpfr(0), max(u.pow(self.lo, k), u.pow(self.hi, k)), p)

    def pow_real(self, r: Interval) -> Interval:
        """``self ** r`` for a positive base and an interval exponent.

        ``x ** r`` is monotone in each argument separately on ``x > 0``, so
        the extremes over the box sit at its corners.
        """
        if self.lo <= 0:
            raise ValueError(f"real power needs a positive base, got {self}")
        p = max(self.prec, r.prec)
        d, u = down(p), up(p)
        corners = [(x, e) for x in (self.lo, self.hi) for e in (r.lo, r.hi)]
        return Interval(min(d.pow(x, e) for x, e in corners),
                        max(u.pow(x, e) for x, e in corners), p)

    def exp(self) -> Interval:
        p = self.prec
        return Interval(down(p).exp(self.lo), up(p).exp(self.hi), p)

    def log(self) -> Interval:
        if self.lo <= 0:
            raise ValueError(f"log needs a positive argument, got {self}")
        p = self.prec
        return Interval(down(p).log(self.lo), up(p).log(self.hi), p)

    def sqrt(self) -> Interval:
        if self.lo < 0:
            raise ValueError(f"sqrt needs a nonnegative argument, got {self}")
        p = self.prec
        return Interval(down(p).sqrt(self.lo), up(p).sqrt(self.hi), p)
