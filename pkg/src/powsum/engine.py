"""Executable proof machinery: majorization, Schur's criterion, Hadamard's
sandwich, Xu's ratio lemma, the divided-difference lemma, and the replay of
the monotonicity proof for ``S_n(r)**alpha / S_n(alpha(r+1)-1)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import gmpy2

from .interval import Interval
from .kernel import (
    DomainError, ModeError, Outcome, PrecisionPolicy, UsageError, Verdict,
    compare_ge, conjoin, decide, is_exact, mode_of, power,
)
from .powersum import (
    divided_difference, g_func, power_sum, ratio_fn_f, theorem1_term,
)

__all__ = [
    "MajorizationPair", "is_majorized", "schur_criterion_sample",
    "hadamard_sandwich", "xu_reduce", "lemma22_check", "Theorem1Quadruple",
    "theorem1_quadruple", "quadruple_dominance", "ineq_311_check",
    "ratio_fn_step", "theorem1_step", "TraceStep", "ReductionTrace",
    "replay_theorem1",
]


def _exactify(v):
    return Fraction(v) if is_exact(v) else v


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise UsageError(msg)


# --------------------------------------------------------------- majorization


@dataclass(frozen=True)
class MajorizationPair:
    """Candidate relation ``x <=_maj y`` between equal-length positive tuples."""

    x: tuple
    y: tuple

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(_exactify(v) for v in self.x))
        object.__setattr__(self, "y", tuple(_exactify(v) for v in self.y))
        if len(self.x) != len(self.y):
            raise UsageError(f"length mismatch: {len(self.x)} vs {len(self.y)}")
        if not self.x:
            raise UsageError("empty sequences")
        for v in self.x + self.y:
            mode_of(v)
            if (is_exact(v) and v <= 0) or (isinstance(v, Interval) and v.lo <= 0):
                raise UsageError(f"entries must be positive, got {v}")

    def normalized(self) -> MajorizationPair:
        """Both sequences sorted into decreasing order."""
        key = lambda v: v.mid if isinstance(v, Interval) else v  # noqa: E731
        return MajorizationPair(tuple(sorted(self.x, key=key, reverse=True)),
                                tuple(sorted(self.y, key=key, reverse=True)))


def is_majorized(pair: MajorizationPair) -> Verdict:
    """``x <=_maj y`` via partial sums of the decreasing rearrangements.

    Every proper prefix sum of ``x`` must be at most that of ``y`` and the
    totals must agree.  Equality of totals of intervals can only be proven
    for point enclosures, so interval inputs may give Indeterminate.
    """
    p = pair.normalized()
    parts = []
    sx = sy = Fraction(0)
    n = len(p.x)
    for j in range(n - 1):
        sx, sy = sx + p.x[j], sy + p.y[j]
        parts.append((f"prefix_{j + 1}", compare_ge(sy, sx).with_params(j=j + 1)))
    sx, sy = sx + p.x[-1], sy + p.y[-1]
    ge = compare_ge(sy, sx)
    le = compare_ge(sx, sy)
    if ge.holds and le.holds:
        total = Verdict(Outcome.HOLDS, sx, sy, max(ge.precision_used, le.precision_used),
                        equality=True)
    elif ge.fails or le.fails:
        total = Verdict(Outcome.FAILS, sx, sy, max(ge.precision_used, le.precision_used))
    else:
        total = Verdict(Outcome.INDETERMINATE, sx, sy, max(ge.precision_used, le.precision_used))
    parts.append(("total", total.with_params(j=n)))
    return conjoin(parts)


# ------------------------------------------------------------ Schur criterion


def schur_criterion_sample(f: Callable, points: Sequence[tuple], step,
                           prec: int = 128, tol: float = 1e-6) -> Verdict:
    """Sample ``(x - y) * (df/dx - df/dy) >= 0`` with central differences.

    Advisory only: finite differences prove nothing, so the verdict is
    flagged ``advisory``.  A point passes when the criterion is at least
    ``-tol * |x - y| * (1 + |f(x, y)|)``.  The criterion characterizes
    Schur convexity for symmetric ``f``; symmetry is not checked here.
    """
    ctx = gmpy2.context(precision=prec)

    def num(v):
        if isinstance(v, Fraction):
            return ctx.div(v.numerator, v.denominator)
        return ctx.plus(v)

    h = num(Fraction(step) if is_exact(step) else step)
    if h <= 0:
        raise UsageError("step must be positive")
    worst = None
    worst_at = None
    for pt in points:
        x, y = num(pt[0]), num(pt[1])
        try:
            with gmpy2.context(ctx):
                fxy = f(x, y)
                dfx = (f(x + h, y) - f(x - h, y)) / (2 * h)
                dfy = (f(x, y + h) - f(x, y - h)) / (2 * h)
                crit = (x - y) * (dfx - dfy)
                slack = crit + tol * abs(x - y) * (1 + abs(fxy))
        except (ArithmeticError, ValueError, DomainError) as exc:
            raise DomainError(f"evaluation failed at point {tuple(pt)}: {exc}") from exc
        if worst is None or slack < worst:
            worst, worst_at = slack, (pt, crit)
    pt, crit = worst_at
    outcome = Outcome.HOLDS if worst >= 0 else Outcome.FAILS
    return Verdict(outcome, crit, ctx.plus(0), prec, advisory=True,
                   params=(("x", pt[0]), ("y", pt[1])),
                   note="finite-difference sample; advisory")


# -------------------------------------------------------- Hadamard's sandwich


def hadamard_sandwich(r, x, y, policy: PrecisionPolicy | None = None,
                      mode: str = "interval") -> Verdict:
    """``r((x+y)/2)**(r-1) <= D_r(x, y) <= r(x**(r-1) + y**(r-1))/2``.

    Hadamard's inequality for the convex ``t**(r-1)`` on ``[y, x]``.
    """
    r, x, y = Fraction(r), Fraction(x), Fraction(y)
    _require(r >= 2, f"r must be >= 2, got {r}")
    _require(0 < y < x, f"need 0 < y < x, got x={x}, y={y}")

    def mid(p):
        return r * power((x + y) / 2, r - 1, p)

    def dd(p):
        return divided_difference(x, y, r, p)

    def upper(p):
        return r * (power(x, r - 1, p) + power(y, r - 1, p)) / 2

    params = dict(r=r, x=x, y=y)
    lower_v = decide(lambda p: (dd(p), mid(p)), policy=policy, mode=mode)
    upper_v = decide(lambda p: (upper(p), dd(p)), policy=policy, mode=mode)
    return conjoin([("lower", lower_v.with_params(**params)),
                    ("upper", upper_v.with_params(**params))])


# ---------------------------------------------------------------- Xu's lemma


def xu_reduce(B: Callable, C: Callable, n_max: int,
              policy: PrecisionPolicy | None = None, mode: str = "interval") -> Verdict:
    """Check the hypotheses of Xu's ratio lemma up to ``n_max``.

    ``B`` and ``C`` are callables ``(n, prec) -> value`` (``prec`` is
    ``None`` for exact evaluation).  The verdict is that of the hypotheses:
    ``B_1/B_2 <= C_1/C_2`` and, for ``n <= n_max``,
    ``(B_{n+1}-B_n)/(B_{n+2}-B_{n+1}) <= (C_{n+1}-C_n)/(C_{n+2}-C_{n+1})``.
    The conclusion ``B_n/B_{n+1} <= C_n/C_{n+1}`` is verified directly and
    attached as the ``conclusion`` part.
    """
    _require(n_max >= 1, f"n_max must be >= 1, got {n_max}")

    def seq(fn, k, p):
        return _exactify(fn(k, p))

    for name, fn in (("B", B), ("C", C)):
        for k in range(1, n_max + 3):
            pos = decide(lambda p: (seq(fn, k, p), 0), strict=True, policy=policy, mode=mode)
            if pos.fails:
                raise UsageError(f"{name}_{k} is not positive")
            if k > 1:
                inc = decide(lambda p: (seq(fn, k, p), seq(fn, k - 1, p)), strict=True,
                             policy=policy, mode=mode)
                if inc.fails:
                    raise UsageError(f"{name} is not strictly increasing at index {k}")

    def ratio(fn, k, p):
        return seq(fn, k, p) / seq(fn, k + 1, p)

    def diff_ratio(fn, k, p):
        return (seq(fn, k + 1, p) - seq(fn, k, p)) / (seq(fn, k + 2, p) - seq(fn, k + 1, p))

    base = decide(lambda p: (ratio(C, 1, p), ratio(B, 1, p)), policy=policy, mode=mode)
    hyps = [("base", base.with_params(n=1))]
    for k in range(1, n_max + 1):
        v = decide(lambda p: (diff_ratio(C, k, p), diff_ratio(B, k, p)), policy=policy, mode=mode)
        hyps.append((f"hypothesis_{k}", v.with_params(n=k)))
    hypothesis = conjoin(hyps)
    concl = [(f"conclusion_{k}",
              decide(lambda p: (ratio(C, k, p), ratio(B, k, p)), policy=policy,
                     mode=mode).with_params(n=k))
             for k in range(1, n_max + 1)]
    conclusion = conjoin(concl)
    return Verdict(hypothesis.outcome, hypothesis.lhs, hypothesis.rhs,
                   max(hypothesis.precision_used, conclusion.precision_used),
                   equality=hypothesis.equality, params=hypothesis.params,
                   parts=(("base", base), ("hypotheses", hypothesis),
                          ("conclusion", conclusion)))


# ----------------------------------------------- divided-difference lemma


def _lemma22(quad: Callable, r, policy, mode, params: dict) -> Verdict:
    a_ge = [decide(lambda p, i=i: (quad(p)[0], quad(p)[i]), policy=policy, mode=mode)
            for i in (1, 2, 3)]
    sums = decide(lambda p: (quad(p)[0] + quad(p)[1], quad(p)[2] + quad(p)[3]),
                  policy=policy, mode=mode)
    hyp = conjoin([("a>=b", a_ge[0]), ("a>=c", a_ge[1]), ("a>=d", a_ge[2]),
                   ("a+b>=c+d", sums)])
    if hyp.fails:
        return Verdict(Outcome.NOT_MET, hyp.lhs, hyp.rhs, hyp.precision_used,
                       params=tuple(params.items()), parts=(("hypotheses", hyp),),
                       note="hypotheses not met")
    if hyp.indeterminate:
        return Verdict(Outcome.INDETERMINATE, hyp.lhs, hyp.rhs, hyp.precision_used,
                       params=tuple(params.items()), parts=(("hypotheses", hyp),),
                       note="hypotheses undecided")
    a, b, c, d = quad(None) if _all_exact_quad(quad) else (None,) * 4
    if a is not None and sorted((a, b)) == sorted((c, d)):
        # D_r is symmetric, so equal multisets give equal values
        dv = divided_difference(a, b, r, policy.start_bits if policy else 128)
        concl = Verdict(Outcome.HOLDS, dv, dv, 0, equality=True, note="same arguments")
    else:
        concl = decide(lambda p: (divided_difference(quad(p)[0], quad(p)[1], r, p),
                                  divided_difference(quad(p)[2], quad(p)[3], r, p)),
                       policy=policy, mode=mode)
    out = conjoin([("hypotheses", hyp), ("conclusion", concl)])
    return Verdict(concl.outcome, concl.lhs, concl.rhs, out.precision_used,
                   equality=concl.equality, params=tuple(params.items()),
                   parts=out.parts, note=concl.note)


def _all_exact_quad(quad) -> bool:
    try:
        return all(is_exact(v) for v in quad(None))
    except ModeError:
        return False


def lemma22_check(a, b, c, d, r, policy: PrecisionPolicy | None = None,
                  mode: str = "interval") -> Verdict:
    """If ``a >= max(b, c, d)`` and ``a + b >= c + d`` then ``D_r(a,b) >= D_r(c,d)``.

    Returns ``Outcome.NOT_MET`` when a hypothesis is false, so a violated
    hypothesis is never reported as a failure of the lemma.
    """
    r = Fraction(r)
    _require(r >= 2, f"r must be >= 2, got {r}")
    vals = tuple(_exactify(v) for v in (a, b, c, d))
    for v in vals:
        if (is_exact(v) and v <= 0) or (isinstance(v, Interval) and v.lo <= 0):
            raise UsageError(f"arguments must be positive, got {v}")
    return _lemma22(lambda p: vals, r, policy, mode, dict(a=vals[0], b=vals[1], c=vals[2],
                                                           d=vals[3], r=r))


# ----------------------------------------------------------- proof of Thm 1


@dataclass(frozen=True)
class Theorem1Quadruple:
    """``a = S_{n+1}/(n+1)**(r+1)``, ``b = S_n/(n+1)**(r+1)``,
    ``c = S_{n+2}/(n+2)**(r+1)``, ``d = S_{n+1}/(n+2)**(r+1)``."""

    a: object
    b: object
    c: object
    d: object
    n: int
    r: Fraction

    def values(self) -> tuple:
        return (self.a, self.b, self.c, self.d)

    def dominance(self, policy=None, mode="interval") -> Verdict:
        return quadruple_dominance(self.n, self.r, policy, mode)

    def sum_condition(self, policy=None, mode="interval") -> Verdict:
        return ineq_311_check(self.n, self.r, policy, mode)


def _check_nr(n: int, r) -> Fraction:
    _require(isinstance(n, int) and n >= 1, f"n must be a positive integer, got {n}")
    r = Fraction(r)
    _require(r >= 1, f"r must be >= 1, got {r}")
    return r


def theorem1_quadruple(n: int, r, prec: int | None = None) -> Theorem1Quadruple:
    r = _check_nr(n, r)
    s0, s1, s2 = (_exactify(power_sum(k, r, prec=prec)) for k in (n, n + 1, n + 2))
    w1 = power(Fraction(n + 1), r + 1, prec)
    w2 = power(Fraction(n + 2), r + 1, prec)
    return Theorem1Quadruple(s1 / w1, s0 / w1, s2 / w2, s1 / w2, n, r)


def quadruple_dominance(n: int, r, policy=None, mode="interval") -> Verdict:
    """``a >= max(b, c, d)`` for the quadruple at ``(n, r)``."""
    r = _check_nr(n, r)
    q = lambda p: theorem1_quadruple(n, r, p).values()  # noqa: E731
    parts = [(name, decide(lambda p, i=i: (q(p)[0], q(p)[i]), policy=policy, mode=mode))
             for name, i in (("a>=b", 1), ("a>=c", 2), ("a>=d", 3))]
    return conjoin(parts).with_params(n=n, r=r)


def ineq_311_check(n: int, r, policy=None, mode="interval") -> Verdict:
    """``(S_{n+1} + S_n)/(n+1)**(r+1) >= (S_{n+2} + S_{n+1})/(n+2)**(r+1)``."""
    r = _check_nr(n, r)

    def sides(p):
        a, b, c, d = theorem1_quadruple(n, r, p).values()
        return a + b, c + d

    return decide(sides, policy=policy, mode=mode).with_params(n=n, r=r)


def ratio_fn_step(n: int, r, policy=None, mode="interval") -> Verdict:
    """``f(n/(n+1)) >= f((n+1)/(n+2))``: the difference-ratio hypothesis
    behind ``a + b >= c + d``, with ``B_n = n**(r+1)`` and ``C_n = S_n + S_{n-1}``."""
    r = _check_nr(n, r)
    return decide(lambda p: (ratio_fn_f(Fraction(n, n + 1), r, p),
                             ratio_fn_f(Fraction(n + 1, n + 2), r, p)),
                  policy=policy, mode=mode).with_params(n=n, r=r)


def theorem1_step(n: int, r, alpha, policy=None, mode="interval") -> Verdict:
    """Direct check of ``term(n) >= term(n+1)``."""
    r = _check_nr(n, r)
    alpha = Fraction(alpha)
    _require(alpha >= 2, f"alpha must be >= 2, got {alpha}")
    return decide(lambda p: (theorem1_term(n, r, alpha, p), theorem1_term(n + 1, r, alpha, p)),
                  policy=policy, mode=mode).with_params(n=n, r=r, alpha=alpha)


@dataclass(frozen=True)
class TraceStep:
    name: str
    description: str
    verdict: Verdict
    inputs: tuple = ()


@dataclass
class ReductionTrace:
    """Ordered proof steps; the overall verdict is their conjunction."""

    n: int
    r: Fraction
    alpha: Fraction
    steps: list[TraceStep] = field(default_factory=list)

    @property
    def verdict(self) -> Verdict:
        return conjoin([(s.name, s.verdict) for s in self.steps])

    @property
    def holds(self) -> bool:
        return all(s.verdict.holds for s in self.steps)

    @property
    def first_failure(self) -> TraceStep | None:
        return next((s for s in self.steps if not s.verdict.holds), None)

    def step(self, name: str) -> TraceStep:
        return next(s for s in self.steps if s.name == name)

    @property
    def chain_consistent(self) -> bool:
        """Proof steps all holding forces the direct check to hold."""
        chain = [s for s in self.steps if s.name != "direct"]
        return not all(s.verdict.holds for s in chain) or self.step("direct").verdict.holds

    def format(self) -> str:
        lines = [f"replay n={self.n} r={self.r} alpha={self.alpha}"]
        for i, s in enumerate(self.steps, 1):
            v = s.verdict
            eq = " (equality)" if v.equality else ""
            lines.append(f"  {i}. {s.name:<20} {v.outcome.value}{eq}  {s.description}")
            lines.append(f"     lhs={_short(v.lhs)} rhs={_short(v.rhs)} bits={v.precision_used}")
        lines.append(f"overall: {self.verdict.outcome.value}")
        return "\n".join(lines)


def _short(v) -> str:
    s = str(v)
    return s if len(s) <= 60 else s[:57] + "..."


def replay_theorem1(n: int, r, alpha, policy: PrecisionPolicy | None = None,
                    mode: str = "interval") -> ReductionTrace:
    """Replay the monotonicity proof at index ``n``.

    Steps, in order: the base case ``g_r(alpha) >= 0``; the quadruple's
    dominance ``a >= max(b, c, d)``; the sum condition ``a + b >= c + d`` and the
    ratio-function step that yields it; the divided-difference lemma
    ``D_alpha(a, b) >= D_alpha(c, d)`` (Xu's hypothesis at ``n``); and the
    direct comparison ``term(n) >= term(n+1)`` as cross-check.
    """
    r = _check_nr(n, r)
    alpha = Fraction(alpha)
    _require(alpha >= 2, f"alpha must be >= 2, got {alpha}")
    trace = ReductionTrace(n, r, alpha)
    add = lambda name, desc, v, **inp: trace.steps.append(  # noqa: E731
        TraceStep(name, desc, v, tuple(inp.items())))

    add("base_case", "g_r(alpha) >= 0 gives term(1) >= term(2)",
        decide(lambda p: (g_func(r, alpha, p), 0), policy=policy, mode=mode)
        .with_params(r=r, alpha=alpha), r=r, alpha=alpha)
    add("dominance", "a >= max(b, c, d)", quadruple_dominance(n, r, policy, mode), n=n, r=r)
    add("sum_condition", "a + b >= c + d", ineq_311_check(n, r, policy, mode), n=n, r=r)
    add("ratio_fn", "f(n/(n+1)) >= f((n+1)/(n+2))", ratio_fn_step(n, r, policy, mode), n=n, r=r)
    quad = lambda p: theorem1_quadruple(n, r, p).values()  # noqa: E731
    add("lemma22", "D_alpha(a, b) >= D_alpha(c, d)",
        _lemma22(quad, alpha, policy, mode, dict(n=n, r=r, alpha=alpha)), n=n, r=r, alpha=alpha)
    add("direct", "term(n) >= term(n+1)", theorem1_step(n, r, alpha, policy, mode),
        n=n, r=r, alpha=alpha)
    return trace
