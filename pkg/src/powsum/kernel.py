"""Three arithmetic modes and the rigorous three-valued comparison.

Scalars are plain Python objects:

* exact rationals are ``int`` or ``fractions.Fraction``;
* advisory floats are ``gmpy2.mpfr`` values carrying their own precision;
* rigorous enclosures are :class:`powsum.interval.Interval`.

Operations keep a result exact whenever that is possible (an integer power
of an exact rational, for instance), and fall back to an enclosure at the
requested precision otherwise.  Passing ``prec=None`` demands an exact
result and raises :class:`ModeError` when none exists.
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Any, Callable, Iterable, Iterator, Sequence

import gmpy2
from gmpy2 import mpfr

from .interval import Interval

__all__ = [
    "PowsumError", "UsageError", "ModeError", "DomainError",
    "Mode", "mode_of", "is_exact", "PrecisionPolicy", "Outcome", "Verdict",
    "conjoin", "arith", "power", "ln", "exp", "to_interval", "compare_ge", "decide",
    "FLOAT_PREC",
]

MPFR = type(mpfr(0))
FLOAT_PREC = 64


class PowsumError(Exception):
    """Base class for library errors."""


class UsageError(PowsumError, ValueError):
    """Bad call: precondition outside a documented range, mode mismatch."""


class ModeError(UsageError):
    """The requested arithmetic mode cannot represent the result."""


class DomainError(PowsumError, ValueError):
    """Mathematical domain violation (log of a nonpositive number, ...)."""


class Mode(str, enum.Enum):
    EXACT = "exact"
    FLOAT = "float"
    INTERVAL = "interval"


def mode_of(x) -> Mode:
    if isinstance(x, Interval):
        return Mode.INTERVAL
    if isinstance(x, MPFR):
        return Mode.FLOAT
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        return Mode.EXACT
    raise UsageError(f"not a scalar: {x!r}")


def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def _is_integer(q) -> bool:
    return is_exact(q) and Fraction(q).denominator == 1


def to_interval(x, prec: int) -> Interval:
    if isinstance(x, Interval):
        return x
    if is_exact(x):
        return Interval.from_rational(x, prec)
    raise ModeError(f"{x!r} cannot be promoted to an interval")


# --------------------------------------------------------------------- policy


@dataclass(frozen=True)
class PrecisionPolicy:
    """Interval precision schedule: start, multiply, stop at the cap."""

    start_bits: int = 128
    max_bits: int = 4096
    escalation_factor: int = 2

    def __post_init__(self):
        if self.start_bits < 2 or self.max_bits < 2:
            raise UsageError("precision must be at least 2 bits")
        if self.start_bits > self.max_bits:
            raise UsageError(f"start_bits {self.start_bits} > max_bits {self.max_bits}")
        if self.escalation_factor < 2:
            raise UsageError("escalation_factor must be >= 2")

    def schedule(self) -> Iterator[int]:
        p = self.start_bits
        while p < self.max_bits:
            yield p
            p *= self.escalation_factor
        yield self.max_bits

    @classmethod
    def from_env(cls, environ=None) -> PrecisionPolicy:
        """Defaults, overridden by POWSUM_PRECISION_START / POWSUM_PRECISION_MAX."""
        env = os.environ if environ is None else environ
        kw = {}
        for var, key in (("POWSUM_PRECISION_START", "start_bits"),
                         ("POWSUM_PRECISION_MAX", "max_bits")):
            if env.get(var):
                try:
                    kw[key] = int(env[var])
                except ValueError:
                    raise UsageError(f"{var} must be an integer, got {env[var]!r}") from None
        return cls(**kw)


DEFAULT_POLICY = PrecisionPolicy()


# -------------------------------------------------------------------- verdict


class Outcome(str, enum.Enum):
    HOLDS = "holds"
    FAILS = "fails"
    INDETERMINATE = "indeterminate"
    # only produced by conditional checks whose hypotheses are false
    NOT_MET = "hypotheses-not-met"


@dataclass(frozen=True)
class Verdict:
    """Result of a rigorous comparison ``lhs >= rhs`` (or ``>``).

    ``precision_used`` is 0 when the decision was made in exact rational
    arithmetic.  ``equality`` is set when the two sides were proven equal.
    ``parts`` holds named sub-verdicts for composite checks.
    """

    outcome: Outcome
    lhs: Any = None
    rhs: Any = None
    precision_used: int = 0
    strict: bool = False
    equality: bool = False
    advisory: bool = False
    params: tuple = ()
    parts: tuple = ()
    note: str = ""

    @property
    def holds(self) -> bool:
        return self.outcome is Outcome.HOLDS

    @property
    def fails(self) -> bool:
        return self.outcome is Outcome.FAILS

    @property
    def indeterminate(self) -> bool:
        return self.outcome is Outcome.INDETERMINATE

    @property
    def witness(self) -> tuple | None:
        """``(params, lhs, rhs)`` for a failing verdict, else ``None``."""
        if self.outcome is not Outcome.FAILS:
            return None
        return (self.params, self.lhs, self.rhs)

    def with_params(self, **params) -> Verdict:
        return replace(self, params=tuple(params.items()))

    def part(self, name: str) -> Verdict:
        for key, v in self.parts:
            if key == name:
                return v
        raise KeyError(name)


def conjoin(parts: Sequence[tuple[str, Verdict]], note: str = "") -> Verdict:
    """Conjunction: Fails beats Indeterminate beats Holds.

    The headline values and witness come from the first non-holding part.
    """
    if not parts:
        raise UsageError("empty conjunction")
    verdicts = [v for _, v in parts]
    first = None
    for wanted in (Outcome.FAILS, Outcome.NOT_MET, Outcome.INDETERMINATE):
        first = next((v for v in verdicts if v.outcome is wanted), None)
        if first is not None:
            break
    head = first or verdicts[-1]
    return Verdict(
        outcome=head.outcome,
        lhs=head.lhs,
        rhs=head.rhs,
        precision_used=max(v.precision_used for v in verdicts),
        strict=head.strict,
        equality=first is None and all(v.equality for v in verdicts),
        advisory=any(v.advisory for v in verdicts),
        params=head.params,
        parts=tuple(parts),
        note=note or head.note,
    )


# ----------------------------------------------------------------- arithmetic


def _float_ctx(*xs) -> gmpy2.context:
    prec = max((x.precision for x in xs if isinstance(x, MPFR)), default=FLOAT_PREC)
    return gmpy2.context(precision=prec)


def arith(op: str, a, b=None):
    """Apply ``op`` in {add, sub, mul, div, neg} to same-mode scalars."""
    if op == "neg":
        ma = mode_of(a)
        if ma is Mode.FLOAT:
            return _float_ctx(a).minus(a)
        return -a
    if b is None:
        raise UsageError(f"{op} needs two operands")
    ma, mb = mode_of(a), mode_of(b)
    if ma is not mb:
        raise UsageError(f"mode mismatch: {ma.value} {op} {mb.value}")
    if ma is Mode.FLOAT:
        ctx = _float_ctx(a, b)
        if op == "div" and b == 0:
            raise DomainError("division by zero")
        fn = {"add": ctx.add, "sub": ctx.sub, "mul": ctx.mul, "div": ctx.div}.get(op)
        if fn is None:
            raise UsageError(f"unknown operation {op!r}")
        return fn(a, b)
    if ma is Mode.EXACT:
        a, b = Fraction(a), Fraction(b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        try:
            return a / b
        except ZeroDivisionError as exc:
            raise DomainError(str(exc)) from None
    raise UsageError(f"unknown operation {op!r}")


def power(x, r, prec: int | None = None):
    """``x ** r``.

    Exact when ``x`` is exact and ``r`` an integer; otherwise an enclosure
    at ``prec`` bits (or at the precision of an interval argument).
    """
    if isinstance(x, MPFR) or isinstance(r, MPFR):
        ctx = _float_ctx(x, r)
        if x <= 0 and not (isinstance(r, int) or (is_exact(r) and _is_integer(r))):
            raise DomainError(f"power of nonpositive base {x} to non-integer exponent")
        return ctx.pow(x, r if not isinstance(r, Fraction) else ctx.div(r.numerator, r.denominator))
    if _is_integer(r):
        k = int(r)
        if is_exact(x):
            x = Fraction(x)
            if x == 0 and k <= 0:
                raise DomainError(f"0 ** {k} is undefined")
            return x ** k
        if isinstance(x, Interval):
            if k <= 0 and x.lo <= 0 <= x.hi:
                raise DomainError(f"{x} ** {k}: base may be zero")
            return x.pow_int(k)
        raise UsageError(f"not a scalar: {x!r}")
    if is_exact(x) and x <= 0 or isinstance(x, Interval) and x.lo <= 0:
        raise DomainError(f"power of nonpositive base {x} to non-integer exponent {r}")
    if is_exact(x) and x == 1:
        return Fraction(1)
    p = _working_prec(prec, x, r)
    return to_interval(x, p).pow_real(to_interval(r, p))


def _working_prec(prec, *xs) -> int:
    ps = [x.prec for x in xs if isinstance(x, Interval)]
    if prec is not None:
        ps.append(prec)
    if not ps:
        raise ModeError("result is not exactly representable; an interval precision is required")
    return max(ps)


def ln(x, prec: int | None = None):
    """Natural logarithm; exact only for ``ln(1) = 0``."""
    if isinstance(x, MPFR):
        if x <= 0:
            raise DomainError(f"ln of nonpositive {x}")
        return _float_ctx(x).log(x)
    if is_exact(x):
        if x <= 0:
            raise DomainError(f"ln of nonpositive {x}")
        if x == 1:
            return Fraction(0)
    elif isinstance(x, Interval):
        if x.lo <= 0:
            raise DomainError(f"ln of interval touching zero: {x}")
    else:
        raise UsageError(f"not a scalar: {x!r}")
    return to_interval(x, _working_prec(prec, x)).log()


def exp(x, prec: int | None = None):
    """Exponential; exact only for ``exp(0) = 1``."""
    if isinstance(x, MPFR):
        return _float_ctx(x).exp(x)
    if is_exact(x) and x == 0:
        return Fraction(1)
    return to_interval(x, _working_prec(prec, x)).exp()


# ----------------------------------------------------------------- comparison


def _exact_verdict(a, b, strict: bool) -> Verdict:
    a, b = Fraction(a), Fraction(b)
    ok = a > b if strict else a >= b
    return Verdict(Outcome.HOLDS if ok else Outcome.FAILS, a, b, 0, strict, equality=a == b)


def _interval_outcome(a: Interval, b: Interval, strict: bool) -> tuple[Outcome | None, bool]:
    equal = a.is_point and b.is_point and a.lo == b.lo
    if strict:
        if a.lo > b.hi:
            return Outcome.HOLDS, False
        if a.hi <= b.lo:
            return Outcome.FAILS, equal
    else:
        if a.lo >= b.hi:
            return Outcome.HOLDS, equal
        if a.hi < b.lo:
            return Outcome.FAILS, False
    return None, False


def _static_verdict(a, b, strict: bool) -> Verdict:
    """Decide at whatever precision the operands already carry."""
    ma, mb = mode_of(a), mode_of(b)
    if ma is Mode.EXACT and mb is Mode.EXACT:
        return _exact_verdict(a, b, strict)
    if Mode.FLOAT in (ma, mb):
        if Mode.INTERVAL in (ma, mb):
            raise UsageError("cannot compare an advisory float with an interval")
        ctx = _float_ctx(a, b)
        fa, fb = ctx.plus(a), ctx.plus(b)
        ok = fa > fb if strict else fa >= fb
        return Verdict(Outcome.HOLDS if ok else Outcome.FAILS, fa, fb, ctx.precision,
                       strict, equality=fa == fb, advisory=True,
                       note="float estimate; not a proof")
    prec = max(x.prec for x in (a, b) if isinstance(x, Interval))
    ia, ib = to_interval(a, prec), to_interval(b, prec)
    outcome, equal = _interval_outcome(ia, ib, strict)
    return Verdict(outcome or Outcome.INDETERMINATE, a, b, prec, strict, equality=equal)


def _escalate(pair: Callable[[int], tuple], strict: bool, policy: PrecisionPolicy) -> Verdict:
    last = None
    for prec in policy.schedule():
        a, b = pair(prec)
        if is_exact(a) and is_exact(b):
            return _exact_verdict(a, b, strict)
        last = _static_verdict(a, b, strict)
        if last.outcome is not Outcome.INDETERMINATE:
            return replace(last, precision_used=prec)
    return replace(last, precision_used=policy.max_bits)


def compare_ge(a, b, strict: bool = False, policy: PrecisionPolicy | None = None) -> Verdict:
    """Rigorously decide ``a >= b`` (``a > b`` when ``strict``).

    ``a`` and ``b`` may be scalars or callables ``prec -> scalar``.  Callables
    are re-evaluated at each precision of ``policy`` until the enclosures
    separate; scalars can only be decided at the precision they carry.
    Exact rationals always decide.  Float operands give advisory verdicts.
    """
    policy = policy or DEFAULT_POLICY
    if callable(a) or callable(b):
        fa = a if callable(a) else (lambda p, v=a: v)
        fb = b if callable(b) else (lambda p, v=b: v)
        return _escalate(lambda p: (fa(p), fb(p)), strict, policy)
    return _static_verdict(a, b, strict)


def decide(sides: Callable[[int | None], tuple], strict: bool = False,
           policy: PrecisionPolicy | None = None, mode: str = "interval") -> Verdict:
    """Decide ``lhs >= rhs`` for ``sides(prec) -> (lhs, rhs)``.

    ``mode="exact"`` evaluates once with ``prec=None`` (raising
    :class:`ModeError` if a side is irrational); ``mode="interval"``
    escalates precision per ``policy``.  Exact sub-results stay exact in
    both modes.
    """
    if mode == "exact":
        a, b = sides(None)
        return _exact_verdict(a, b, strict)
    if mode != "interval":
        raise UsageError(f"unknown mode {mode!r}")
    return _escalate(sides, strict, policy or DEFAULT_POLICY)


def all_exact(xs: Iterable) -> bool:
    return all(is_exact(x) for x in xs)
