import math
import random

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lowheight.eds import EDSTuple, conj_tuple, negate_tuple, term_naive
from lowheight.heights import (
    IncompleteFactorization,
    TorsionSuspected,
    abs_norm_term,
    estimate_from_norms,
    full_estimate,
    gcd_estimate,
    log_int,
    naive_height,
    prime_factors,
)
from lowheight.quadring import field
from lowheight.recovery import recover

from conftest import FIELDS, KNOWN_POINTS, random_tuple, table_tuple


def oracle_estimate(t, n):
    """gcd estimate from the halving oracle, math.gcd and mpmath logs."""
    En = abs(term_naive(t, n).norm())
    En1 = abs(term_naive(t, n + 1).norm())
    q = En // math.gcd(En, En1)
    with mpmath.workdps(30):
        return float(mpmath.log(q) / (2 * n * n))


@given(st.integers(1, 10**400))
def test_log_int_matches_mpmath(n):
    with mpmath.workdps(30):
        ref = float(mpmath.log(n))
    assert log_int(n) == pytest.approx(ref, rel=1e-15, abs=1e-15)


def test_log_int_rejects_nonpositive():
    with pytest.raises(ValueError):
        log_int(0)


def test_abs_norm_term():
    F = field(3)
    assert abs_norm_term(F(1, 1)) == 2
    assert abs_norm_term(field(-7)(1, 1)) == 4


@pytest.mark.parametrize("row", KNOWN_POINTS[::3], ids=lambda r: r[2])
@pytest.mark.parametrize("I", [2, 4, 6])
def test_gcd_estimate_matches_oracle(row, I):
    t = table_tuple(row)
    n = 2 ** (I + 1)
    ref = oracle_estimate(t, n)
    if ref == 0.0:
        # full gcd absorption at small n is reported as torsion-suspect
        with pytest.raises(TorsionSuspected):
            gcd_estimate(t, I)
        return
    est = gcd_estimate(t, I)
    assert est.n == n
    assert est.value == pytest.approx(ref, rel=1e-12)


def test_gcd_estimate_example():
    t = EDSTuple.parse("w;4-2*w;16-8*w", -7)
    assert gcd_estimate(t, 6).value == pytest.approx(0.0057743145, rel=1e-8)


def test_gcd_estimate_rejects_small_I():
    with pytest.raises(ValueError):
        gcd_estimate(EDSTuple.parse("1;w-1;2*w-2", 3), 0)


def test_torsion_detected():
    # 1, 1, 1 is the order-5 sequence 0, 1, 1, 1, 1, 0, ...; E_n = E_{n+1} = 1
    with pytest.raises(TorsionSuspected):
        gcd_estimate(EDSTuple.parse("1;1;1", 3), 6)
    # u4 = 0 forces u_{4k} = 0, so E_n = 0 for every n = 2^m >= 4
    with pytest.raises(TorsionSuspected):
        gcd_estimate(EDSTuple.parse("w;1;0", -7), 3)
    with pytest.raises(TorsionSuspected):
        estimate_from_norms(0, 5, 8)


@given(st.sampled_from(FIELDS), st.integers(0, 2**32))
def test_estimate_invariant_under_symmetries(D, seed):
    t = random_tuple(random.Random(seed), D, 5)
    try:
        base = gcd_estimate(t, 5)
    except TorsionSuspected:
        return
    for s in (conj_tuple(t), negate_tuple(t)):
        other = gcd_estimate(s, 5)
        assert (other.En, other.En1, other.value) == (base.En, base.En1, base.value)


def test_prime_factors():
    assert prime_factors(1) == []
    assert prime_factors(360) == [2, 3, 5]
    assert prime_factors(-1283 * 2**24) == [2, 1283]
    p = 2**61 - 1
    assert prime_factors(6 * p, bound=1000) == [2, 3, p]
    with pytest.raises(ValueError):
        prime_factors(0)
    q = (2**61 - 1) * (2**89 - 1)
    with pytest.raises(IncompleteFactorization):
        prime_factors(q, bound=1000)


def test_full_estimate_with_supplied_primes():
    t = EDSTuple.parse("1;w-1;2*w-2", 3)
    rp = recover(t)
    g = gcd_estimate(t, 5)
    none = full_estimate(t, rp.curve, 5, factors=[])
    assert none.Fn == g.En
    assert none.value == pytest.approx(log_int(g.En) / (2 * 64 * 64))
    # removing a prime that does not divide E_n changes nothing
    big = full_estimate(t, rp.curve, 5, factors=[1000003])
    assert big.Fn == g.En


@pytest.mark.parametrize("row", KNOWN_POINTS[:6], ids=lambda r: r[2])
def test_full_estimate_strips_bad_primes(row):
    t = table_tuple(row)
    rp = recover(t)
    full = full_estimate(t, rp.curve, 6, point=rp.point)
    for p in full.T:
        assert full.Fn % p != 0
    assert full.value > 0


def test_naive_height():
    F = field(3)
    # 1 + sqrt(3) = 2.732..., 1 - sqrt(3) = -0.732...
    assert naive_height(F(1, 1)) == pytest.approx(math.log(1 + math.sqrt(3)) / 2)
    assert naive_height(field(-1)(2)) == pytest.approx(math.log(2))
    assert naive_height(field(-1)(1, 1)) == pytest.approx(math.log(2) / 2)
    for v in (0, 1, -1):
        assert naive_height(F(v)) == 0.0
