import random
from fractions import Fraction as F

import gmpy2
import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from powsum.interval import Interval
from powsum.kernel import (
    DomainError, ModeError, Outcome, PrecisionPolicy, UsageError, Verdict, arith,
    compare_ge, conjoin, decide, ln, power,
)


def iv(lo, hi, prec=64):
    return Interval(gmpy2.mpfr(lo, prec), gmpy2.mpfr(hi, prec), prec)


class TestInterval:
    def test_rational_enclosure_is_tight_and_sound(self):
        x = Interval.from_rational(F(1, 3), 64)
        assert x.contains(F(1, 3))
        assert not x.is_point
        assert gmpy2.next_above(x.lo) == x.hi

    def test_dyadic_is_point(self):
        assert Interval.from_rational(F(3, 8), 53).is_point

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            iv(2, 1)

    def test_immutable(self):
        x = iv(1, 2)
        with pytest.raises(AttributeError):
            x.lo = gmpy2.mpfr(0)

    def test_mul_mixed_signs(self):
        x = iv(-1, 2) * iv(-3, 1)
        assert x.bounds() == (F(-6), F(3))

    def test_div_by_zero_interval(self):
        with pytest.raises(ZeroDivisionError):
            iv(1, 2) / iv(-1, 1)

    def test_even_power_straddling_zero(self):
        assert iv(-2, 1).pow_int(2).bounds() == (F(0), F(4))

    def test_pow_real_encloses_sqrt2(self):
        r = Interval.from_rational(2, 128).pow_real(Interval.from_rational(F(1, 2), 128))
        lo, hi = r.bounds()
        assert lo * lo <= 2 <= hi * hi

    def test_log_exp_roundtrip_encloses(self):
        x = Interval.from_rational(F(7, 3), 96)
        assert x.log().exp().contains(F(7, 3))

    def test_log_nonpositive(self):
        with pytest.raises(ValueError):
            iv(0, 1).log()


class TestArith:
    def test_add_exact(self):
        assert arith("add", F(1, 3), F(1, 6)) == F(1, 2)

    def test_mul_interval(self):
        assert arith("mul", iv(1, 2), iv(1, 2)).contains(iv(1, 4))

    def test_div_float64(self):
        q = arith("div", gmpy2.mpfr(1, 64), gmpy2.mpfr(3, 64))
        assert q.precision == 64
        assert abs(F(*q.as_integer_ratio()) - F(1, 3)) < F(1, 2 ** 64)

    def test_neg(self):
        assert arith("neg", F(2, 5)) == F(-2, 5)
        assert arith("neg", iv(1, 2)).bounds() == (F(-2), F(-1))

    def test_mode_mismatch(self):
        with pytest.raises(UsageError):
            arith("add", F(1), iv(1, 2))

    def test_division_by_interval_containing_zero(self):
        with pytest.raises(DomainError):
            arith("div", iv(1, 2), iv(-1, 1))

    def test_division_by_exact_zero(self):
        with pytest.raises(DomainError):
            arith("div", F(1), F(0))


class TestPowerLn:
    def test_integer_power_exact(self):
        assert power(2, 3) == 8
        assert isinstance(power(2, 3, prec=128), F)

    def test_sqrt2_enclosed(self):
        x = power(2, F(1, 2), prec=128)
        with mpmath.workdps(60):
            s = mpmath.sqrt(2)
            assert mpmath.mpf(x.lo) <= s <= mpmath.mpf(x.hi)

    @pytest.mark.parametrize("x", [F(1, 7), 2, F(13, 3)])
    def test_zero_exponent(self, x):
        assert power(x, 0) == 1

    def test_non_integer_exponent_needs_precision(self):
        with pytest.raises(ModeError):
            power(2, F(1, 2))

    def test_nonpositive_base_non_integer_exponent(self):
        with pytest.raises(DomainError):
            power(-2, F(1, 2), prec=64)
        with pytest.raises(DomainError):
            power(0, F(1, 2), prec=64)

    def test_zero_base_positive_integer_exponent(self):
        assert power(0, 3) == 0

    def test_ln_one_exact(self):
        assert ln(1) == 0

    def test_ln2_enclosed(self):
        x = ln(2, prec=128)
        with mpmath.workdps(60):
            assert mpmath.mpf(x.lo) <= mpmath.log(2) <= mpmath.mpf(x.hi)

    def test_log_law_enclosures_overlap(self):
        a = ln(power(2, 4), prec=128)
        b = 4 * ln(2, prec=128)
        assert a.overlaps(b)

    @pytest.mark.parametrize("x", [0, -1, F(-1, 2)])
    def test_ln_domain(self, x):
        with pytest.raises(DomainError):
            ln(x, prec=64)

    def test_ln_interval_touching_zero(self):
        with pytest.raises(DomainError):
            ln(iv(0, 1))


class TestCompare:
    def test_separated_intervals_hold(self):
        assert compare_ge(iv(3, 4), iv(1, 2)).outcome is Outcome.HOLDS

    def test_exact_equality_nonstrict(self):
        v = compare_ge(F(1, 2), F(1, 2))
        assert v.holds and v.equality and v.witness is None

    def test_exact_equality_strict_fails_with_witness(self):
        v = compare_ge(F(1, 2), F(1, 2), strict=True)
        assert v.fails
        assert v.witness == ((), F(1, 2), F(1, 2))

    def test_exact_never_indeterminate(self):
        v = compare_ge(F(10 ** 40 + 1, 10 ** 40), F(1))
        assert v.holds and v.precision_used == 0

    def test_overlap_indeterminate(self):
        assert compare_ge(iv(1, 3), iv(2, 4)).indeterminate

    def test_touching_strict_is_not_holds(self):
        v = compare_ge(iv(2, 3), iv(1, 2), strict=True)
        assert not v.holds

    def test_float_verdict_is_advisory(self):
        v = compare_ge(gmpy2.mpfr(2), gmpy2.mpfr(1))
        assert v.holds and v.advisory

    def test_float_vs_interval_rejected(self):
        with pytest.raises(UsageError):
            compare_ge(gmpy2.mpfr(2), iv(1, 2))

    def test_escalation_resolves_close_values(self):
        # 1 + 2^-200 vs 1: needs more than 128 bits
        eps = F(1, 2 ** 200)
        v = compare_ge(lambda p: ln(1 + eps, p), lambda p: ln(1 + eps / 2, p), strict=True)
        assert v.holds and v.precision_used == 256

    def test_true_equality_in_interval_is_indeterminate_at_cap(self):
        pol = PrecisionPolicy(64, 256)
        v = compare_ge(lambda p: ln(2, p) * 2, lambda p: ln(4, p), policy=pol)
        assert v.indeterminate and v.precision_used == 256

    def test_decide_exact_mode_rejects_irrational(self):
        with pytest.raises(ModeError):
            decide(lambda p: (ln(2, p), 0), mode="exact")

    def test_policy_validation(self):
        with pytest.raises(UsageError):
            PrecisionPolicy(256, 128)
        with pytest.raises(UsageError):
            PrecisionPolicy(escalation_factor=1)
        assert list(PrecisionPolicy().schedule()) == [128, 256, 512, 1024, 2048, 4096]
        assert list(PrecisionPolicy(100, 300, 2).schedule()) == [100, 200, 300]

    def test_policy_from_env(self):
        pol = PrecisionPolicy.from_env({"POWSUM_PRECISION_START": "64",
                                        "POWSUM_PRECISION_MAX": "512"})
        assert (pol.start_bits, pol.max_bits) == (64, 512)

    def test_conjoin_priorities(self):
        h = Verdict(Outcome.HOLDS, 1, 0)
        f = Verdict(Outcome.FAILS, 0, 1)
        i = Verdict(Outcome.INDETERMINATE, 0, 0, 128)
        assert conjoin([("a", h), ("b", i)]).indeterminate
        assert conjoin([("a", i), ("b", f)]).fails
        assert conjoin([("a", h), ("b", h)]).holds


# ----------------------------------------------------------------- properties


def _random_tree(rng, depth):
    """Random expression tree over rationals as nested (op, left, right) tuples."""
    if depth == 0 or rng.random() < 0.25:
        q = F(rng.randint(-50, 50), rng.randint(1, 30))
        return q
    op = rng.choice("+-*/")
    return (op, _random_tree(rng, depth - 1), _random_tree(rng, depth - 1))


def _eval(tree, to_leaf):
    if not isinstance(tree, tuple):
        return to_leaf(tree)
    op, a, b = tree
    x, y = _eval(a, to_leaf), _eval(b, to_leaf)
    if op == "+":
        return x + y
    if op == "-":
        return x - y
    if op == "*":
        return x * y
    return x / y


def test_enclosure_soundness_random_trees():
    rng = random.Random(20070417)
    checked = 0
    while checked < 10_000:
        tree = _random_tree(rng, 4)
        try:
            exact = _eval(tree, F)
        except ZeroDivisionError:
            continue
        prec = rng.choice([24, 53, 128])
        try:
            enc = _eval(tree, lambda q: Interval.from_rational(q, prec))
        except ZeroDivisionError:
            # interval divisor may straddle zero even if the exact one does not
            continue
        assert enc.contains(exact), (tree, prec)
        checked += 1


rationals = st.fractions(min_value=-1000, max_value=1000, max_denominator=10 ** 6)


@given(a=rationals, b=rationals)
def test_antisymmetry_exact(a, b):
    if compare_ge(a, b, strict=True).holds:
        assert compare_ge(b, a).fails


@given(a=rationals, b=rationals, prec=st.sampled_from([16, 53, 128]))
def test_antisymmetry_interval(a, b, prec):
    ia, ib = Interval.from_rational(a, prec), Interval.from_rational(b, prec)
    if compare_ge(ia, ib, strict=True).holds:
        assert compare_ge(ib, ia).fails


@settings(max_examples=50)
@given(a=st.fractions(min_value=F(1, 100), max_value=100, max_denominator=1000),
       b=st.fractions(min_value=F(1, 100), max_value=100, max_denominator=1000))
def test_escalation_monotone(a, b):
    """A decided verdict never flips at higher precision."""
    lhs = lambda p: ln(a, p)  # noqa: E731
    rhs = lambda p: ln(b, p)  # noqa: E731
    seen = set()
    for prec in (16, 32, 64, 128, 256):
        v = compare_ge(lhs(prec), rhs(prec))
        if not v.indeterminate:
            seen.add(v.outcome)
    assert len(seen) <= 1
    if a != b:
        assert seen
