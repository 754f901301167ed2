"""Named inequality checks over ``P_n(r)`` and friends, and the scan for
monotonicity of ``P_n(r)`` in ``r``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .kernel import (
    Outcome, PrecisionPolicy, UsageError, Verdict, conjoin, decide,
)
from .powersum import g_func, lemma23_aux, p_ratio, theorem1_exponent
from .engine import ineq_311_check, theorem1_step

__all__ = [
    "CheckSpec", "CheckDef", "CHECKS", "check_named", "validate_spec",
    "exact_supported", "Record", "labels_for", "scan_problem1", "ScanResult",
    "lemma23_auxiliary", "problem1_pairs",
]

COVERED = "covered-by-corollary1"


@dataclass(frozen=True)
class CheckSpec:
    """One named check at one parameter point.

    ``strict=None`` uses the strictness of the original inequality.
    """

    name: str
    n: int | None = None
    r: Fraction | None = None
    alpha: Fraction | None = None
    rprime: Fraction | None = None
    strict: bool | None = None
    mode: str = "interval"

    def __post_init__(self):
        for key in ("r", "alpha", "rprime"):
            v = getattr(self, key)
            if v is not None and not isinstance(v, Fraction):
                object.__setattr__(self, key, Fraction(v))

    def params(self) -> dict:
        return {k: getattr(self, k) for k in ("n", "r", "alpha", "rprime")
                if getattr(self, k) is not None}

    def describe(self) -> str:
        return ", ".join(f"{k}={v}" for k, v in self.params().items())


@dataclass(frozen=True)
class CheckDef:
    name: str
    needs: tuple
    strict: bool
    statement: str
    valid: Callable[[CheckSpec], str | None]
    exact: Callable[[CheckSpec], bool]
    sides: Callable[[CheckSpec], Callable]


def _P(n, r):
    return lambda p: p_ratio(n, r, p)


def _sides(lhs, rhs):
    return lambda p: (lhs(p), rhs(p))


def _const(v):
    return lambda p: v


def _range(cond, msg):
    return lambda s: None if cond(s) else msg


CHECKS: dict[str, CheckDef] = {c.name: c for c in [
    CheckDef(
        "alzer", ("n", "r"), True, "n/(n+1) < P_n(r)",
        _range(lambda s: s.r > 0, "alzer needs r > 0"),
        lambda s: s.r == 1,
        lambda s: _sides(_P(s.n, s.r), _const(Fraction(s.n, s.n + 1)))),
    CheckDef(
        "martins", ("n", "r"), True, "P_n(r) < P_n(0)",
        _range(lambda s: s.r > 0, "martins needs r > 0"),
        lambda s: False,
        lambda s: _sides(_P(s.n, 0), _P(s.n, s.r))),
    CheckDef(
        "alzer_neg_lower", ("n", "r"), False, "P_n(0) <= P_n(r)",
        _range(lambda s: s.r < 0, "alzer_neg_lower needs r < 0"),
        lambda s: False,
        lambda s: _sides(_P(s.n, s.r), _P(s.n, 0))),
    CheckDef(
        "alzer_neg_upper", ("n", "r"), False, "P_n(r) <= 1",
        _range(lambda s: s.r < 0, "alzer_neg_upper needs r < 0"),
        lambda s: s.r == -1,
        lambda s: _sides(_const(Fraction(1)), _P(s.n, s.r))),
    CheckDef(
        "bennett_r1_upper", ("n", "r"), False, "P_n(r) <= P_n(1) = (n+1)/(n+2)",
        _range(lambda s: s.r >= 1, "bennett_r1_upper needs r >= 1"),
        lambda s: s.r == 1,
        lambda s: _sides(_P(s.n, 1), _P(s.n, s.r))),
    CheckDef(
        "bennett_r1_reversed", ("n", "r"), False, "P_n(r) >= P_n(1) = (n+1)/(n+2)",
        _range(lambda s: 0 < s.r <= 1, "bennett_r1_reversed needs 0 < r <= 1"),
        lambda s: s.r == 1,
        lambda s: _sides(_P(s.n, s.r), _P(s.n, 1))),
    CheckDef(
        "corollary1", ("n", "r", "rprime"), False, "P_n(r) >= P_n(r')",
        _range(lambda s: s.r >= 1 and s.rprime >= 2 * s.r + 1,
               "corollary1 needs r >= 1 and r' >= 2r+1"),
        lambda s: False,
        lambda s: _sides(_P(s.n, s.r), _P(s.n, s.rprime))),
    CheckDef(
        "problem1", ("n", "r", "rprime"), False, "P_n(r) >= P_n(r')",
        _range(lambda s: 1 <= s.r < s.rprime, "problem1 needs 1 <= r < r'"),
        lambda s: False,
        lambda s: _sides(_P(s.n, s.r), _P(s.n, s.rprime))),
    CheckDef(
        "lemma23_grid", ("r", "alpha"), False, "g_r(alpha) >= 0",
        _range(lambda s: s.r >= 1 and s.alpha >= 2, "lemma23_grid needs r >= 1, alpha >= 2"),
        lambda s: s.r.denominator == 1 and theorem1_exponent(s.r, s.alpha).denominator == 1
        and s.alpha.denominator == 1,
        lambda s: _sides(lambda p: g_func(s.r, s.alpha, p), _const(0))),
    CheckDef(
        "theorem1", ("n", "r", "alpha"), False, "term(n) >= term(n+1)",
        _range(lambda s: s.r >= 1 and s.alpha >= 2, "theorem1 needs r >= 1, alpha >= 2"),
        lambda s: s.r.denominator == 1 and s.alpha.denominator == 1,
        None),
    CheckDef(
        "quadruple_sum", ("n", "r"), False, "a + b >= c + d",
        _range(lambda s: s.r >= 1, "quadruple_sum needs r >= 1"),
        lambda s: s.r.denominator == 1,
        None),
]}


def validate_spec(spec: CheckSpec) -> CheckDef:
    """Raise :class:`UsageError` unless ``spec`` is evaluable as given."""
    cdef = CHECKS.get(spec.name)
    if cdef is None:
        raise UsageError(f"unknown check {spec.name!r}; known: {', '.join(sorted(CHECKS))}")
    for key in cdef.needs:
        if getattr(spec, key) is None:
            raise UsageError(f"check {spec.name} needs parameter {key}")
    if "n" in cdef.needs and (not isinstance(spec.n, int) or spec.n < 1):
        raise UsageError(f"n must be a positive integer, got {spec.n}")
    msg = cdef.valid(spec)
    if msg:
        raise UsageError(f"{msg} (got {spec.describe()})")
    if spec.mode not in ("exact", "interval"):
        raise UsageError(f"unknown mode {spec.mode!r}")
    if spec.mode == "exact" and not cdef.exact(spec):
        raise UsageError(f"check {spec.name} at {spec.describe()} is not exactly computable")
    return cdef


def exact_supported(spec: CheckSpec) -> bool:
    cdef = CHECKS.get(spec.name)
    return cdef is not None and cdef.exact(spec)


def check_named(spec: CheckSpec, policy: PrecisionPolicy | None = None) -> Verdict:
    """Evaluate one named inequality at one parameter point."""
    cdef = validate_spec(spec)
    strict = cdef.strict if spec.strict is None else spec.strict
    if cdef.name == "theorem1":
        v = theorem1_step(spec.n, spec.r, spec.alpha, policy, spec.mode)
    elif cdef.name == "quadruple_sum":
        v = ineq_311_check(spec.n, spec.r, policy, spec.mode)
    else:
        v = decide(cdef.sides(spec), strict=strict, policy=policy, mode=spec.mode)
    return v.with_params(**spec.params())


def labels_for(spec: CheckSpec) -> tuple:
    if spec.rprime is not None and spec.r is not None and spec.rprime >= 2 * spec.r + 1:
        return (COVERED,)
    return ()


@dataclass(frozen=True)
class Record:
    check: str
    n: int | None
    r: Fraction | None
    alpha: Fraction | None
    rprime: Fraction | None
    verdict: Verdict
    labels: tuple = ()

    @property
    def outcome(self) -> Outcome:
        return self.verdict.outcome

    def sort_key(self) -> tuple:
        return (self.check,) + tuple(
            (0, 0) if v is None else (1, v) for v in (self.n, self.r, self.alpha, self.rprime))

    @classmethod
    def from_spec(cls, spec: CheckSpec, verdict: Verdict) -> Record:
        return cls(spec.name, spec.n, spec.r, spec.alpha, spec.rprime, verdict, labels_for(spec))


@dataclass
class ScanResult:
    records: list[Record] = field(default_factory=list)

    @property
    def summary(self) -> dict:
        return tally(self.records)

    @property
    def findings(self) -> list[Record]:
        return [rec for rec in self.records if rec.outcome is Outcome.FAILS]


def tally(records: Iterable[Record]) -> dict:
    counts = {"holds": 0, "fails": 0, "indeterminate": 0}
    for rec in records:
        key = {Outcome.HOLDS: "holds", Outcome.FAILS: "fails"}.get(rec.outcome, "indeterminate")
        counts[key] += 1
    return counts


def problem1_pairs(r_grid: Sequence, rprime_grid: Sequence,
                   upto_corollary: bool = False) -> list[tuple[Fraction, Fraction]]:
    """Pairs ``(r, r')`` with ``r < r'``; optionally only ``r' <= 2r + 1``."""
    rs = [Fraction(r) for r in r_grid]
    rps = [Fraction(r) for r in rprime_grid]
    if not rs or not rps:
        raise UsageError("r and r' grids must be non-empty")
    bad = [r for r in rs if r < 1]
    if bad:
        raise UsageError(f"r must be >= 1, got {bad[0]}")
    pairs = sorted({(r, rp) for r in rs for rp in rps
                    if r < rp and (not upto_corollary or rp <= 2 * r + 1)})
    if not pairs:
        raise UsageError("no pair with r < r' in the grid")
    return pairs


def scan_problem1(n_range: Iterable[int], r_grid: Sequence, rprime_grid: Sequence,
                  policy: PrecisionPolicy | None = None,
                  upto_corollary: bool = False) -> ScanResult:
    """Test ``P_n(r) >= P_n(r')`` for every ``n`` and every ``r < r'``.

    Pairs with ``r' >= 2r + 1`` are labelled covered-by-corollary1.
    Failures are kept verbatim as findings; nothing is dropped.
    """
    pairs = problem1_pairs(r_grid, rprime_grid, upto_corollary)
    ns = list(n_range)
    if not ns or min(ns) < 1:
        raise UsageError("n range must be non-empty and positive")
    result = ScanResult()
    for n in ns:
        for r, rp in pairs:
            spec = CheckSpec("problem1", n=n, r=r, rprime=rp)
            result.records.append(Record.from_spec(spec, check_named(spec, policy)))
    result.records.sort(key=Record.sort_key)
    return result


def lemma23_auxiliary(xs: Iterable, policy: PrecisionPolicy | None = None) -> Verdict:
    """``f(2) > 0``, ``f'(2) > 0`` and ``f''(x) > 0`` at each sample ``x >= 2``."""
    parts = [
        ("f(2)>0", decide(lambda p: (lemma23_aux(2, "f", p), 0), strict=True, policy=policy)),
        ("f'(2)>0", decide(lambda p: (lemma23_aux(2, "f_deriv", p), 0), strict=True,
                           policy=policy)),
    ]
    for x in xs:
        x = Fraction(x)
        if x < 2:
            raise UsageError(f"samples must be >= 2, got {x}")
        parts.append((f"f''({x})>0",
                      decide(lambda p, x=x: (lemma23_aux(x, "f_second_deriv", p), 0),
                             strict=True, policy=policy).with_params(x=x)))
    return conjoin(parts)
