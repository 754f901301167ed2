"""Power sums and the functions built from them.

All functions accept exact rational parameters (``int`` / ``Fraction``).
With ``prec=None`` they insist on an exact result; with ``prec`` set they
return exact values where possible and outward-rounded intervals elsewhere.
"""

from __future__ import annotations

import threading
from fractions import Fraction

import gmpy2

from .interval import Interval
from .kernel import (
    MPFR, DomainError, ModeError, UsageError, is_exact, ln, power, to_interval,
)

__all__ = [
    "PowerSumCache", "power_sum", "log_factorial", "p_ratio", "p_limit",
    "theorem1_exponent", "theorem1_term", "divided_difference", "g_func",
    "g_func_deriv", "ratio_fn_f", "ratio_fn_f_deriv_numerator", "lemma23_aux",
    "default_cache",
]


def _rational(r) -> Fraction:
    if isinstance(r, bool) or not is_exact(r):
        raise UsageError(f"parameter must be an exact rational, got {r!r}")
    return Fraction(r)


class PowerSumCache:
    """Memoized prefix sums ``S_0(r) = 0, S_1(r), S_2(r), ...``.

    Keyed by ``(exponent, prec)``; ``prec`` is ``None`` for exact sums.
    Integer exponents are summed exactly regardless of ``prec``.
    Extension takes a lock, so one cache may be shared between threads.
    """

    def __init__(self):
        self._sums: dict[tuple, list] = {}
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._sums)

    def clear(self) -> None:
        with self._lock:
            self._sums.clear()

    def prefix(self, n: int, r, prec: int | None = None):
        r = _rational(r)
        exact = r.denominator == 1 and (r >= 0 or prec is None)
        key = (r, None if exact else prec)
        sums = self._sums.get(key)
        if sums is not None and len(sums) > n:
            return sums[n]
        if not exact and prec is None:
            raise ModeError(f"S_n({r}) is irrational; an interval precision is required")
        with self._lock:
            sums = self._sums.setdefault(key, [0])
            if len(sums) <= n:
                self._extend(sums, n, r, exact, prec)
            return sums[n]

    @staticmethod
    def _extend(sums: list, n: int, r: Fraction, exact: bool, prec: int | None) -> None:
        acc = sums[-1]
        if exact:
            k = int(r)
            for i in range(len(sums), n + 1):
                acc = acc + (i ** k if k >= 0 else Fraction(1, i ** -k))
                sums.append(acc)
            return
        r_iv = Interval.from_rational(r, prec)
        if not isinstance(acc, Interval):
            acc = Interval.from_rational(acc, prec)
        for i in range(len(sums), n + 1):
            term = Interval.from_rational(i, prec).pow_real(r_iv) if i > 1 else 1
            acc = acc + term
            sums.append(acc)


_DEFAULT = PowerSumCache()


def default_cache() -> PowerSumCache:
    return _DEFAULT


def power_sum(n: int, r, cache: PowerSumCache | None = None, prec: int | None = None):
    """``S_n(r) = 1**r + 2**r + ... + n**r``.

    Exact (an ``int``) for nonnegative integer ``r``; a ``Fraction`` for
    negative integer ``r`` in exact mode; an enclosure otherwise.
    """
    if n < 1:
        raise UsageError(f"n must be >= 1, got {n}")
    if isinstance(r, Interval):
        # uncached: exponent known only up to an enclosure
        acc = Interval.from_rational(1, r.prec)
        for i in range(2, n + 1):
            acc = acc + Interval.from_rational(i, r.prec).pow_real(r)
        return acc
    return (cache or _DEFAULT).prefix(n, r, prec)


def log_factorial(n: int, prec: int, cache: PowerSumCache | None = None) -> Interval:
    """Enclosure of ``ln(n!) = sum of ln i`` (summed term by term)."""
    cache = cache or _DEFAULT
    key = ("ln", prec)
    sums = cache._sums.get(key)
    if sums is None or len(sums) <= n:
        with cache._lock:
            sums = cache._sums.setdefault(key, [Interval.from_rational(0, prec)])
            acc = sums[-1]
            for i in range(len(sums), n + 1):
                if i > 1:
                    acc = acc + Interval.from_rational(i, prec).log()
                sums.append(acc)
    return sums[n]


def p_ratio(n: int, r, prec: int | None = None, cache: PowerSumCache | None = None):
    """``P_n(r) = ((S_n(r)/n) / (S_{n+1}(r)/(n+1))) ** (1/r)``.

    For ``r = 0`` this is ``(n!)**(1/n) / ((n+1)!)**(1/(n+1))``, evaluated as
    ``exp(ln(n!)/n - ln((n+1)!)/(n+1))``.  Exact only for ``r = +-1``.
    """
    if n < 1:
        raise UsageError(f"n must be >= 1, got {n}")
    r = _rational(r)
    if r == 0:
        if prec is None:
            raise ModeError("P_n(0) is irrational; an interval precision is required")
        return (log_factorial(n, prec, cache) / n
                - log_factorial(n + 1, prec, cache) / (n + 1)).exp()
    s_n = power_sum(n, r, cache, prec)
    s_n1 = power_sum(n + 1, r, cache, prec)
    if is_exact(s_n) and is_exact(s_n1):
        s_n = Fraction(s_n)
    ratio = s_n * (n + 1) / (s_n1 * n)
    return power(ratio, 1 / r, prec)


def p_limit(n: int, direction: str) -> Fraction:
    """Limits of ``P_n(r)``: ``n/(n+1)`` as r -> +inf, ``1`` as r -> -inf."""
    if n < 1:
        raise UsageError(f"n must be >= 1, got {n}")
    if direction in ("+inf", "+", "inf"):
        return Fraction(n, n + 1)
    if direction in ("-inf", "-"):
        return Fraction(1)
    raise UsageError(f"direction must be '+inf' or '-inf', got {direction!r}")


def theorem1_exponent(r, alpha) -> Fraction:
    return _rational(alpha) * (_rational(r) + 1) - 1


def theorem1_term(n: int, r, alpha, prec: int | None = None,
                  cache: PowerSumCache | None = None):
    """``S_n(r)**alpha / S_n(alpha*(r+1) - 1)``."""
    if n < 1:
        raise UsageError(f"n must be >= 1, got {n}")
    alpha = _rational(alpha)
    num = power(power_sum(n, r, cache, prec), alpha, prec)
    den = power_sum(n, theorem1_exponent(r, alpha), cache, prec)
    if is_exact(num) and is_exact(den):
        return Fraction(num) / den
    return num / den


def divided_difference(x, y, r, prec: int | None = None):
    """``D_r(x, y) = (x**r - y**r) / (x - y)``, with ``r * x**(r-1)`` on the diagonal.

    For intervals the quotient enclosure is intersected with the
    mean-value enclosure ``r * t**(r-1)`` over the hull of ``x`` and ``y``;
    the latter alone is used when ``x`` and ``y`` overlap.
    """
    if isinstance(x, MPFR) or isinstance(y, MPFR):
        return _divided_difference_float(x, y, r)
    r = _rational(r)
    for v in (x, y):
        if (is_exact(v) and v <= 0) or (isinstance(v, Interval) and v.lo <= 0):
            raise DomainError(f"divided difference needs positive arguments, got {v}")
    if is_exact(x) and is_exact(y):
        if x == y:
            return r * power(Fraction(x), r - 1, prec)
        quotient = (power(Fraction(x), r, prec) - power(Fraction(y), r, prec)) / (Fraction(x) - Fraction(y))
        if is_exact(quotient):
            return quotient
        p = quotient.prec
        ix, iy = Interval.from_rational(x, p), Interval.from_rational(y, p)
        return _intersect(quotient, _mean_value_enclosure(ix, iy, r))
    p = max(v.prec for v in (x, y) if isinstance(v, Interval))
    if prec is not None:
        p = max(p, prec)
    ix, iy = to_interval(x, p), to_interval(y, p)
    mean = _mean_value_enclosure(ix, iy, r)
    if ix.overlaps(iy):
        return mean
    quotient = (power(ix, r, p) - power(iy, r, p)) / (ix - iy)
    return _intersect(quotient, mean)


def _mean_value_enclosure(x: Interval, y: Interval, r: Fraction) -> Interval:
    # D_r(x, y) = r * (mean of t**(r-1) over [y, x]); t**(r-1) is monotone
    hull = Interval.hull(x, y)
    ends = [power(Interval(e, e, hull.prec), r - 1) for e in (hull.lo, hull.hi)]
    return r * Interval.hull(*ends)


def _intersect(a: Interval, b: Interval) -> Interval:
    lo, hi = max(a.lo, b.lo), min(a.hi, b.hi)
    if lo > hi:
        # both are sound enclosures, so they cannot be disjoint
        raise AssertionError(f"disjoint enclosures {a} and {b}")
    return Interval(lo, hi, max(a.prec, b.prec))


def _divided_difference_float(x, y, r):
    prec = max(v.precision for v in (x, y) if isinstance(v, MPFR))
    ctx = gmpy2.context(precision=prec)
    x, y = ctx.plus(x), ctx.plus(y)
    r = ctx.div(Fraction(r).numerator, Fraction(r).denominator)
    if x <= 0 or y <= 0:
        raise DomainError(f"divided difference needs positive arguments, got {x}, {y}")
    if x == y:
        return ctx.mul(r, ctx.pow(x, ctx.sub(r, 1)))
    return ctx.div(ctx.sub(ctx.pow(x, r), ctx.pow(y, r)), ctx.sub(x, y))


def g_func(r, alpha, prec: int | None = None):
    """``g_r(alpha) = 1 + 2**(alpha*(r+1) - 1) - (1 + 2**r)**alpha``."""
    r, alpha = _rational(r), _rational(alpha)
    return 1 + power(2, theorem1_exponent(r, alpha), prec) - power(1 + power(2, r, prec), alpha, prec)


def g_func_deriv(r, alpha, prec: int | None = None):
    """Derivative of ``g_r`` in ``alpha``:
    ``(r+1) ln 2 * 2**(alpha(r+1)-1) - ln(1+2**r) * (1+2**r)**alpha``.
    """
    r, alpha = _rational(r), _rational(alpha)
    base = 1 + power(2, r, prec)
    return ((r + 1) * ln(2, prec) * power(2, theorem1_exponent(r, alpha), prec)
            - ln(base, prec) * power(base, alpha, prec))


def _check_open_unit(x, upper_closed: bool = False) -> None:
    if is_exact(x):
        lo_ok, hi_ok = x > 0, (x <= 1 if upper_closed else x < 1)
    elif isinstance(x, Interval):
        lo_ok, hi_ok = x.lo > 0, (x.hi <= 1 if upper_closed else x.hi < 1)
    else:
        raise UsageError(f"not a scalar: {x!r}")
    if not (lo_ok and hi_ok):
        raise DomainError(f"x must lie in (0, 1{']' if upper_closed else ')'}, got {x}")


def ratio_fn_f(x, r, prec: int | None = None):
    """``f(x) = (1 - x)(1 + x**r) / (1 - x**(r+1))`` on ``0 < x < 1``."""
    _check_open_unit(x)
    r = _rational(r)
    if is_exact(x):
        x = Fraction(x)
    return (1 - x) * (1 + power(x, r, prec)) / (1 - power(x, r + 1, prec))


def ratio_fn_f_deriv_numerator(x, r, prec: int | None = None):
    """Numerator of ``f'(x)``: ``x**(2r) - r x**(r+1) + r x**(r-1) - 1``."""
    _check_open_unit(x, upper_closed=True)
    r = _rational(r)
    if is_exact(x):
        x = Fraction(x)
    return power(x, 2 * r, prec) - r * power(x, r + 1, prec) + r * power(x, r - 1, prec) - 1


def lemma23_aux(x, which: str = "f", prec: int | None = None):
    """Auxiliary ``f(x) = 2x**2 ln(2x) - (1+x)**2 ln(1+x)`` and its derivatives.

    ``which`` selects ``"f"``, ``"f_deriv"`` (``4x ln(2x) + x - 1 - 2(1+x) ln(1+x)``)
    or ``"f_second_deriv"`` (``3 + 4 ln 2 + 2(ln x**2 - ln(1+x))``).
    ``g_r'(2)`` equals ``f(2**r)``.
    """
    if (is_exact(x) and x <= 0) or (isinstance(x, Interval) and x.lo <= 0):
        raise DomainError(f"x must be positive, got {x}")
    if is_exact(x):
        x = Fraction(x)
    if which == "f":
        return 2 * x * x * ln(2 * x, prec) - (1 + x) ** 2 * ln(1 + x, prec)
    if which == "f_deriv":
        return 4 * x * ln(2 * x, prec) + x - 1 - 2 * (1 + x) * ln(1 + x, prec)
    if which == "f_second_deriv":
        return 3 + 4 * ln(2, prec) + 2 * (ln(x * x, prec) - ln(1 + x, prec))
    raise UsageError(f"unknown auxiliary {which!r}")
