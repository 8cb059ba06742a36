"""Height estimates from the absolute norms E_n = |N(u_n)| of a sequence.

The workhorse is the gcd estimate

    h_n = log(E_n / gcd(E_n, E_{n+1})) / (d n^2),

with a slower cross-check that strips every prime of bad reduction out of
E_n instead of relying on the gcd.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import gmpy2
import mpmath

from .divpoly import integral_translate
from .eds import EDSTuple, _cached_context
from .quadring import FieldSpec, RingElem

__all__ = [
    "FullEstimate",
    "GcdEstimate",
    "IncompleteFactorization",
    "TorsionSuspected",
    "abs_norm_term",
    "full_estimate",
    "gcd_estimate",
    "log_int",
    "naive_height",
    "prime_factors",
]

LOG2 = math.log(2.0)
DEFAULT_TRIAL_BOUND = 10**6


class TorsionSuspected(ArithmeticError):
    """E_n or E_{n+1} vanished, or the gcd absorbed all of E_n."""


class IncompleteFactorization(ArithmeticError):
    pass


def log_int(n: int) -> float:
    """Natural log of a positive integer of any size."""
    if n <= 0:
        raise ValueError("log_int needs a positive integer")
    n = int(n)
    e = n.bit_length() - 64
    if e <= 0:
        return math.log(n)
    # top 64 bits; relative error of the mantissa < 2^-63
    return math.log(n >> e) + e * LOG2


def abs_norm_term(u: RingElem, F: FieldSpec | None = None) -> int:
    return abs(u.norm())


@dataclass(frozen=True)
class GcdEstimate:
    n: int
    En: int = dc_field(repr=False)
    En1: int = dc_field(repr=False)
    gcd: int = dc_field(repr=False)
    value: float
    d: int = 2

    @property
    def log10_En(self) -> float:
        return log_int(self.En) / math.log(10)

    def summary(self) -> dict:
        return {
            "n": self.n,
            "h_tilde": self.value,
            "log10_En": round(self.log10_En, 6),
            "bits_En": self.En.bit_length(),
            "bits_En1": self.En1.bit_length(),
            "bits_gcd": self.gcd.bit_length(),
        }


def estimate_from_norms(En: int, En1: int, n: int, d: int = 2) -> GcdEstimate:
    En, En1 = int(En), int(En1)
    if En == 0 or En1 == 0:
        raise TorsionSuspected(f"E_{n} = {En if En == 0 else '...'}, E_{n + 1} = {En1 if En1 == 0 else '...'}")
    g = int(gmpy2.gcd(En, En1))
    q = En // g
    value = log_int(q) / (d * n * n) if q > 1 else 0.0
    return GcdEstimate(n, En, En1, g, value, d)


def gcd_estimate(t: EDSTuple, I: int) -> GcdEstimate:
    """Estimate at n = 2^(I+1).

    Raises TorsionSuspected when E_n or E_{n+1} is zero, and also when the
    estimate is exactly 0 (gcd(E_n, E_{n+1}) = E_n), as happens for torsion
    points whose order divides neither n nor n+1.
    """
    if I < 1:
        raise ValueError("I must be at least 1")
    n = 2 ** (I + 1)
    En, En1 = _cached_context(t.u2).norms(t.u3, t.u4, I)
    est = estimate_from_norms(En, En1, n, t.field.degree)
    if est.value == 0.0:
        raise TorsionSuspected(f"E_{n} divides gcd(E_{n}, E_{n + 1}); estimate is 0")
    return est


def prime_factors(N: int, bound: int = DEFAULT_TRIAL_BOUND) -> list[int]:
    """Distinct primes dividing N, by trial division up to ``bound``.

    A leftover cofactor is accepted as prime if it is below bound^2 or passes
    a BPSW probable-prime test; otherwise IncompleteFactorization is raised.
    """
    N = abs(int(N))
    if N == 0:
        raise ValueError("0 has no finite prime factorization")
    primes = []
    for p in (2, 3):
        if N % p == 0:
            primes.append(p)
            while N % p == 0:
                N //= p
    p = 5
    step = 2
    while p <= bound and p * p <= N:
        if N % p == 0:
            primes.append(p)
            while N % p == 0:
                N //= p
        p += step
        step = 6 - step
    if N > 1:
        if N < bound * bound or p * p > N or gmpy2.is_bpsw_prp(N):
            primes.append(N)
        else:
            raise IncompleteFactorization(
                f"cofactor of {N.bit_length()} bits is composite after trial division to {bound}"
            )
    return sorted(primes)


@dataclass(frozen=True)
class FullEstimate:
    n: int
    Fn: int = dc_field(repr=False)
    T: tuple[int, ...]
    value: float
    d: int = 2


def full_estimate(
    t: EDSTuple, curve, I: int, factors=None, bound: int = DEFAULT_TRIAL_BOUND, point=None
) -> FullEstimate:
    """E_n with every p-part, p in T, removed.

    ``factors`` overrides the set T. Otherwise T is the set of primes of
    N(Delta) for an integral model on which the point is integral. If
    ``curve`` (with ``point``) is not already such a model, a shift
    x -> x + r, y -> y + s x + t is tried first, which keeps Delta and E_n;
    failing that, the model is rescaled and the primes of the cleared
    denominators join T.
    """
    if factors is None:
        nd = Fraction(curve.delta.norm())
        if nd == 0:
            raise ValueError("singular curve has no finite set of bad primes")
        T = set(prime_factors(nd.numerator, bound)) | set(prime_factors(nd.denominator, bound))
        model, pt = curve, point
        if point is not None:
            found = integral_translate(curve, point)
            if found is not None:
                model, pt = found
        dens = [a.den for a in model.ainvs]
        if pt is not None and not pt.is_infinity:
            dens += [pt.x.den, pt.y.den]
        for d in dens:
            T |= set(prime_factors(d, bound))
        T = sorted(T)
    else:
        T = sorted(set(int(p) for p in factors))
    n = 2 ** (I + 1)
    En, _ = _cached_context(t.u2).norms(t.u3, t.u4, I)
    Fn = int(En)
    if Fn == 0:
        raise TorsionSuspected(f"E_{n} = 0")
    for p in T:
        Fn = int(gmpy2.remove(Fn, p)[0])
    return FullEstimate(n, Fn, tuple(T), log_int(Fn) / (t.field.degree * n * n), t.field.degree)


def naive_height(a: RingElem, F: FieldSpec | None = None) -> float:
    """Absolute logarithmic height of an algebraic integer of K."""
    F = a.F
    with mpmath.workdps(40):
        r = mpmath.sqrt(F.D) if F.D > 0 else mpmath.mpc(0, mpmath.sqrt(-F.D))
        w = r if F.t == 0 else (1 + r) / 2
        wbar = -r if F.t == 0 else (1 - r) / 2
        if F.D > 0:
            total = sum(mpmath.log(max(1, abs(a.x + a.y * v))) for v in (w, wbar))
        else:
            total = mpmath.log(max(1, abs(a.x + a.y * w) ** 2))
        return float(total / 2)
