"""Proper elliptic divisibility sequences over O_K.

A proper sequence (u_0 = 0, u_1 = 1, u_2*u_3 != 0) is fixed by the triple
(u_2, u_3, u_4) with u_2 | u_4. Terms at n = 2^m are reached by repeatedly
doubling a seven-term window <u_k> = [u_{k-3}, ..., u_{k+3}] using

    u_{2l}   = u_l (u_{l+2} u_{l-1}^2 - u_{l-2} u_{l+1}^2) / u_2
    u_{2l+1} = u_{l+2} u_l^3 - u_{l-1} u_{l+1}^3
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache

from .quadring import FieldSpec, RingElem, field, parse_elem

try:
    from gmpy2 import divexact as _divexact
    from gmpy2 import mpz as _mpz
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    _mpz = int

    def _divexact(a, b):
        return a // b


__all__ = [
    "Block",
    "DoublingContext",
    "EDSTuple",
    "InvalidTuple",
    "conj_tuple",
    "double",
    "initial_block",
    "negate_tuple",
    "sequence",
    "term_naive",
    "terms_at_power",
]


class InvalidTuple(ValueError):
    """The triple does not define a proper elliptic divisibility sequence."""


@dataclass(frozen=True)
class EDSTuple:
    u2: RingElem
    u3: RingElem
    u4: RingElem

    def __post_init__(self):
        D = self.u2.F.D
        if self.u3.F.D != D or self.u4.F.D != D:
            raise InvalidTuple("tuple entries live in different fields")
        if self.u2.is_zero() or self.u3.is_zero():
            raise InvalidTuple(f"u2*u3 must be nonzero, got {self}")
        if not self.u2.divides(self.u4):
            raise InvalidTuple(f"u2 = {self.u2} does not divide u4 = {self.u4}")

    @property
    def field(self) -> FieldSpec:
        return self.u2.F

    @classmethod
    def parse(cls, text: str, D: int) -> EDSTuple:
        """From ``"u2;u3;u4"`` (commas also accepted)."""
        parts = [p for p in text.replace(",", ";").split(";")]
        if len(parts) != 3:
            raise ValueError(f"expected three ';'-separated elements, got {text!r}")
        F = field(D)
        return cls(*(parse_elem(p, F) for p in parts))

    @classmethod
    def from_coords(cls, D: int, u2, u3, u4) -> EDSTuple:
        F = field(D)
        return cls(F(*u2), F(*u3), F(*u4))

    def coords(self) -> tuple[tuple[int, int], ...]:
        return tuple((u.x, u.y) for u in (self.u2, self.u3, self.u4))

    def as_strings(self) -> tuple[str, str, str]:
        return str(self.u2), str(self.u3), str(self.u4)

    def __str__(self) -> str:
        return ";".join(self.as_strings())


def conj_tuple(t: EDSTuple) -> EDSTuple:
    return EDSTuple(t.u2.conj(), t.u3.conj(), t.u4.conj())


def negate_tuple(t: EDSTuple) -> EDSTuple:
    return EDSTuple(-t.u2, t.u3, -t.u4)


@dataclass(frozen=True)
class Block:
    """The window <u_k>; ``terms[3]`` is u_k."""

    k: int
    terms: tuple[RingElem, ...]

    def __post_init__(self):
        if len(self.terms) != 7:
            raise ValueError("a block holds exactly seven terms")

    def __getitem__(self, i: int) -> RingElem:
        return self.terms[i]

    def term(self, n: int) -> RingElem:
        """u_n for k-3 <= n <= k+3."""
        i = n - self.k + 3
        if not 0 <= i < 7:
            raise IndexError(f"u_{n} is outside the block centred at {self.k}")
        return self.terms[i]


def fifth_term(t: EDSTuple) -> RingElem:
    return t.u4 * t.u2 * t.u2.square() - t.u3 * t.u3.square()


def initial_block(t: EDSTuple) -> Block:
    F = t.field
    return Block(2, (-F.one, F.zero, F.one, t.u2, t.u3, t.u4, fifth_term(t)))


class _Counted:
    """Ring element proxy that tallies the operations performed on it."""

    __slots__ = ("v", "counter")

    def __init__(self, v: RingElem, counter: Counter):
        self.v = v
        self.counter = counter

    def square(self) -> _Counted:
        self.counter["squarings"] += 1
        return _Counted(self.v.square(), self.counter)

    def __mul__(self, other: _Counted) -> _Counted:
        self.counter["multiplications"] += 1
        return _Counted(self.v * other.v, self.counter)

    def __sub__(self, other: _Counted) -> _Counted:
        return _Counted(self.v - other.v, self.counter)

    def exact_div(self, d: RingElem) -> _Counted:
        # one multiplication by conj(d), then two exact integer divisions
        self.counter["multiplications"] += 1
        self.counter["exact_divs"] += 1
        return _Counted(self.v.exact_div(d), self.counter)


def double(b: Block, t: EDSTuple, counter: Counter | None = None) -> Block:
    """<u_k> -> <u_{2k}> using 5 squarings and 22 multiplications.

    Multiplication by u_2^{-1} is an exact division in O_K and is tallied as
    one multiplication. Pass a Counter to have the operations recorded under
    ``squarings``, ``multiplications`` and ``exact_divs``.
    """
    terms = b.terms if counter is None else [_Counted(v, counter) for v in b.terms]
    V = [None, *terms]
    u2 = t.u2
    A = [None] * 6
    B = [None] * 6
    for i in range(1, 6):
        A[i] = V[i + 1].square()
        B[i] = V[i] * V[i + 2]
    W = [None] * 8
    for i in range(4):
        W[2 * i + 1] = B[i + 2] * A[i + 1] - B[i + 1] * A[i + 2]
        if i > 0:
            W[2 * i] = (B[i + 2] * A[i] - B[i] * A[i + 2]).exact_div(u2)
    out = W[1:] if counter is None else [w.v for w in W[1:]]
    return Block(2 * b.k, tuple(out))


def terms_at_power(t: EDSTuple, I: int) -> tuple[RingElem, RingElem]:
    """(u_n, u_{n+1}) for n = 2^(I+1), via I doublings of <u_2>."""
    if I < 0:
        raise ValueError("I must be nonnegative")
    if I == 0:
        return t.u2, t.u3
    ctx = DoublingContext(t.u2)
    (a, b), (c, d) = ctx.last_pair(t.u3, t.u4, I)
    F = t.field
    return RingElem(int(a), int(b), F), RingElem(int(c), int(d), F)


def term_naive(t: EDSTuple, n: int) -> RingElem:
    """u_n by memoized top-down halving; independent of the block code."""
    return _TermOracle(t)(n)


def sequence(t: EDSTuple, N: int) -> list[RingElem]:
    """[u_0, ..., u_N]."""
    oracle = _TermOracle(t)
    return [oracle(n) for n in range(N + 1)]


class _TermOracle:
    def __init__(self, t: EDSTuple):
        F = t.field
        self.u2 = t.u2
        self.memo = {0: F.zero, 1: F.one, 2: t.u2, 3: t.u3, 4: t.u4}

    def __call__(self, n: int) -> RingElem:
        if n < 0:
            return -self(-n)
        memo = self.memo
        if n in memo:
            return memo[n]
        l = n // 2
        if n % 2:
            v = self(l + 2) * self(l) ** 3 - self(l - 1) * self(l + 1) ** 3
        else:
            inner = self(l + 2) * self(l - 1).square() - self(l - 2) * self(l + 1).square()
            v = (self(l) * inner).exact_div(self.u2)
        memo[n] = v
        return v


class DoublingContext:
    """Per-u_2 state for the search hot path.

    Caches conj(u_2) and N(u_2) so that every sequence sharing the same u_2
    divides by it without recomputing them. Elements are raw (x, y) pairs of
    gmpy2 integers; no RingElem objects are created inside the loop.
    """

    __slots__ = ("F", "s", "t", "u2", "u2c", "u2n", "unit")

    def __init__(self, u2: RingElem):
        if u2.is_zero():
            raise InvalidTuple("u2 must be nonzero")
        self.F = u2.F
        self.s, self.t = _mpz(u2.F.s), _mpz(u2.F.t)
        self.u2 = (_mpz(u2.x), _mpz(u2.y))
        c = u2.conj()
        self.u2c = (_mpz(c.x), _mpz(c.y))
        n = u2.norm()
        self.u2n = _mpz(n)
        # N(u2) = +-1: division is multiplication by +-conj(u2)
        self.unit = n in (1, -1)

    def _mul(self, a, b):
        ac = a[0] * b[0]
        bd = a[1] * b[1]
        return ac + self.s * bd, (a[0] + a[1]) * (b[0] + b[1]) - ac - bd + self.t * bd

    def _sq(self, a):
        x, y = a
        yy = y * y
        return x * x + self.s * yy, 2 * x * y + self.t * yy

    def _div_u2(self, a):
        p = self._mul(a, self.u2c)
        if self.unit:
            return (p[0], p[1]) if self.u2n == 1 else (-p[0], -p[1])
        n = self.u2n
        return _divexact(p[0], n), _divexact(p[1], n)

    def initial(self, u3: RingElem, u4: RingElem) -> list:
        u2 = self.u2
        u3 = (_mpz(u3.x), _mpz(u3.y))
        u4 = (_mpz(u4.x), _mpz(u4.y))
        a = self._mul(u4, self._mul(u2, self._sq(u2)))
        b = self._mul(u3, self._sq(u3))
        u5 = (a[0] - b[0], a[1] - b[1])
        return [(_mpz(-1), _mpz(0)), (_mpz(0), _mpz(0)), (_mpz(1), _mpz(0)), u2, u3, u4, u5]

    def double(self, V: list) -> list:
        mul, sq = self._mul, self._sq
        A = [None] + [sq(V[i]) for i in range(1, 6)]
        B = [None] + [mul(V[i - 1], V[i + 1]) for i in range(1, 6)]
        W = [None] * 7
        for i in range(4):
            p = mul(B[i + 2], A[i + 1])
            q = mul(B[i + 1], A[i + 2])
            W[2 * i] = (p[0] - q[0], p[1] - q[1])
            if i > 0:
                p = mul(B[i + 2], A[i])
                q = mul(B[i], A[i + 2])
                W[2 * i - 1] = self._div_u2((p[0] - q[0], p[1] - q[1]))
        return W

    def last_pair(self, u3: RingElem, u4: RingElem, I: int):
        """(u_n, u_{n+1}) for n = 2^(I+1) as raw coordinate pairs.

        The final doubling only forms the two entries that are returned.
        """
        mul, sq = self._mul, self._sq
        V = self.initial(u3, u4)
        for _ in range(I - 1):
            V = self.double(V)
        # middle entries of the last doubling (i = 2 in both loops)
        A2, A3, A4 = sq(V[2]), sq(V[3]), sq(V[4])
        B2, B3, B4 = mul(V[1], V[3]), mul(V[2], V[4]), mul(V[3], V[5])
        p, q = mul(B4, A2), mul(B2, A4)
        even = self._div_u2((p[0] - q[0], p[1] - q[1]))
        p, q = mul(B4, A3), mul(B3, A4)
        odd = (p[0] - q[0], p[1] - q[1])
        return even, odd

    def norms(self, u3: RingElem, u4: RingElem, I: int) -> tuple:
        """(|N(u_n)|, |N(u_{n+1})|) for n = 2^(I+1)."""
        a, b = self.last_pair(u3, u4, I)
        return abs(self._norm(a)), abs(self._norm(b))

    def _norm(self, a):
        x, y = a
        return x * x + self.t * x * y - self.s * y * y


@lru_cache(maxsize=256)
def _cached_context(u2: RingElem) -> DoublingContext:
    return DoublingContext(u2)
