"""Exact arithmetic in the ring of integers Z[w] of a quadratic field Q(sqrt(D)).

Elements are stored in the basis {1, w} where w = (1 + sqrt(D))/2 when
D = 1 mod 4 and w = sqrt(D) otherwise, so that w^2 = s + t*w with
(s, t) = ((D - 1)/4, 1) or (D, 0).
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass
from functools import lru_cache

__all__ = [
    "FieldElem",
    "FieldSpec",
    "NotDivisible",
    "OmegaKind",
    "RingElem",
    "conj",
    "exact_div",
    "field",
    "mul",
    "norm",
    "parse_elem",
    "parse_field_elem",
]


class NotDivisible(ArithmeticError):
    """An exact division in O_K had a nonzero remainder."""


class OmegaKind(enum.Enum):
    HALF_PLUS_SQRT_OVER_2 = "(1+sqrt(D))/2"
    SQRT = "sqrt(D)"


def _is_squarefree(n: int) -> bool:
    n = abs(n)
    if n % 4 == 0:
        return False
    p = 3
    while p * p <= n:
        if n % (p * p) == 0:
            return False
        p += 2
    return True


@dataclass(frozen=True)
class FieldSpec:
    D: int

    def __post_init__(self):
        if self.D in (0, 1) or not _is_squarefree(self.D):
            raise ValueError(f"D must be squarefree and not 0 or 1, got {self.D}")

    @property
    def omega_kind(self) -> OmegaKind:
        if self.D % 4 == 1:
            return OmegaKind.HALF_PLUS_SQRT_OVER_2
        return OmegaKind.SQRT

    @property
    def omega_square(self) -> tuple[int, int]:
        if self.D % 4 == 1:
            return (self.D - 1) // 4, 1
        return self.D, 0

    @property
    def s(self) -> int:
        return self.omega_square[0]

    @property
    def t(self) -> int:
        return self.omega_square[1]

    @property
    def degree(self) -> int:
        return 2

    def __call__(self, x: int = 0, y: int = 0) -> RingElem:
        return RingElem(int(x), int(y), self)

    @property
    def one(self) -> RingElem:
        return RingElem(1, 0, self)

    @property
    def zero(self) -> RingElem:
        return RingElem(0, 0, self)

    @property
    def omega(self) -> RingElem:
        return RingElem(0, 1, self)

    def embeddings(self) -> tuple[complex, complex]:
        """Complex values of w and its conjugate."""
        r = complex(self.D) ** 0.5
        if self.omega_kind is OmegaKind.SQRT:
            return r, -r
        return (1 + r) / 2, (1 - r) / 2


@lru_cache(maxsize=None)
def field(D: int) -> FieldSpec:
    return FieldSpec(D)


def _check_same(a: RingElem, b: RingElem) -> None:
    if a.F.D != b.F.D:
        raise ValueError(f"elements from different fields: D={a.F.D} and D={b.F.D}")


@dataclass(frozen=True, slots=True, eq=False)
class RingElem:
    """x + y*w in O_K. Integers on either side of an operator are coerced."""

    x: int
    y: int
    F: FieldSpec

    def _coerce(self, other) -> RingElem | None:
        if isinstance(other, RingElem):
            _check_same(self, other)
            return other
        if isinstance(other, int):
            return RingElem(other, 0, self.F)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RingElem(self.x + o.x, self.y + o.y, self.F)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RingElem(self.x - o.x, self.y - o.y, self.F)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self) -> RingElem:
        return RingElem(-self.x, -self.y, self.F)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        s, t = self.F.omega_square
        a, b, c, d = self.x, self.y, o.x, o.y
        bd = b * d
        return RingElem(a * c + s * bd, a * d + b * c + t * bd, self.F)

    __rmul__ = __mul__

    def square(self) -> RingElem:
        s, t = self.F.omega_square
        yy = self.y * self.y
        return RingElem(self.x * self.x + s * yy, 2 * self.x * self.y + t * yy, self.F)

    def __pow__(self, e: int) -> RingElem:
        if e < 0:
            raise ValueError("negative powers are not ring elements")
        result, base = self.F.one, self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base.square()
        return result

    def conj(self) -> RingElem:
        if self.F.t:
            return RingElem(self.x + self.y, -self.y, self.F)
        return RingElem(self.x, -self.y, self.F)

    def norm(self) -> int:
        s, t = self.F.omega_square
        x, y = self.x, self.y
        return x * x + t * x * y - s * y * y

    def is_zero(self) -> bool:
        return self.x == 0 and self.y == 0

    def __bool__(self) -> bool:
        return not self.is_zero()

    def exact_div(self, other: RingElem | int) -> RingElem:
        o = self._coerce(other)
        if o is None:
            raise TypeError(f"cannot divide by {other!r}")
        if o.is_zero():
            raise ZeroDivisionError("division by zero in O_K")
        if o.y == 0:
            qx, rx = divmod(self.x, o.x)
            qy, ry = divmod(self.y, o.x)
        else:
            n = o.norm()
            p = self * o.conj()
            qx, rx = divmod(p.x, n)
            qy, ry = divmod(p.y, n)
        if rx or ry:
            raise NotDivisible(f"{self} is not divisible by {o} in O_K (D={self.F.D})")
        return RingElem(qx, qy, self.F)

    def divides(self, other: RingElem | int) -> bool:
        if self.is_zero():
            return self._coerce(other).is_zero()
        try:
            self._coerce(other).exact_div(self)
        except NotDivisible:
            return False
        return True

    def content(self) -> int:
        return math.gcd(self.x, self.y)

    def __eq__(self, other) -> bool:
        if isinstance(other, RingElem):
            return self.F.D == other.F.D and self.x == other.x and self.y == other.y
        if isinstance(other, int):
            return self.y == 0 and self.x == other
        if isinstance(other, FieldElem):
            return other == self
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.x, self.y, self.F.D))

    def __str__(self) -> str:
        return format_elem(self.x, self.y)

    def __repr__(self) -> str:
        return f"RingElem({self}, D={self.F.D})"

    def to_complex(self, which: int = 0) -> complex:
        return self.x + self.y * self.F.embeddings()[which]


def format_elem(x: int, y: int) -> str:
    if y == 0:
        return str(x)
    if y == 1:
        ypart = "w"
    elif y == -1:
        ypart = "-w"
    else:
        ypart = f"{y}*w"
    if x == 0:
        return ypart
    if ypart.startswith("-"):
        return f"{x}{ypart}"
    return f"{x}+{ypart}"


_TERM = re.compile(r"[+-]?[^+-]+")


def _parse_coords(text: str) -> tuple[int, int]:
    s = text.replace(" ", "").replace("ω", "w")
    if not s:
        raise ValueError("empty element")
    m = re.fullmatch(r"([+-]?)\((.*)\)", s)
    if m:
        x, y = _parse_coords(m.group(2))
        return (-x, -y) if m.group(1) == "-" else (x, y)
    x = y = 0
    pos = 0
    for term in _TERM.finditer(s):
        if term.start() != pos:
            raise ValueError(f"cannot parse element {text!r}")
        pos = term.end()
        tok = term.group()
        if tok.endswith("w"):
            coeff = tok[:-1].rstrip("*")
            if coeff in ("", "+"):
                y += 1
            elif coeff == "-":
                y -= 1
            else:
                y += int(coeff)
        else:
            x += int(tok)
    if pos != len(s):
        raise ValueError(f"cannot parse element {text!r}")
    return x, y


def parse_elem(text: str, F: FieldSpec) -> RingElem:
    """Parse the textual form ``x+y*w`` (also ``-(2*w+10)``, ``w``, ``5``)."""
    x, y = _parse_coords(text)
    return RingElem(x, y, F)


def mul(a: RingElem, b: RingElem, F: FieldSpec | None = None) -> RingElem:
    return a * b


def conj(a: RingElem, F: FieldSpec | None = None) -> RingElem:
    return a.conj()


def norm(a: RingElem, F: FieldSpec | None = None) -> int:
    return a.norm()


def exact_div(a: RingElem, b: RingElem, F: FieldSpec | None = None) -> RingElem:
    return a.exact_div(b)


@dataclass(frozen=True, slots=True, eq=False)
class FieldElem:
    """num/den in K, with den > 0 and gcd(den, content(num)) == 1."""

    num: RingElem
    den: int = 1

    def __post_init__(self):
        if self.den <= 0:
            raise ValueError("denominator must be positive; use FieldElem.make")
        if math.gcd(self.den, self.num.x, self.num.y) != 1:
            raise ValueError("FieldElem is not normalized; use FieldElem.make")

    @classmethod
    def make(cls, num: RingElem, den: int = 1) -> FieldElem:
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        if den < 0:
            num, den = -num, -den
        g = math.gcd(den, num.x, num.y)
        if g != 1:
            num = RingElem(num.x // g, num.y // g, num.F)
            den //= g
        return cls(num, den)

    @classmethod
    def from_ring(cls, a: RingElem) -> FieldElem:
        return cls(a, 1)

    @property
    def F(self) -> FieldSpec:
        return self.num.F

    def _coerce(self, other) -> FieldElem | None:
        if isinstance(other, FieldElem):
            _check_same(self.num, other.num)
            return other
        if isinstance(other, RingElem):
            _check_same(self.num, other)
            return FieldElem(other, 1)
        if isinstance(other, int):
            return FieldElem(RingElem(other, 0, self.F), 1)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FieldElem.make(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FieldElem.make(self.num * o.den - o.num * self.den, self.den * o.den)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self) -> FieldElem:
        return FieldElem(-self.num, self.den)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FieldElem.make(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def square(self) -> FieldElem:
        return FieldElem.make(self.num.square(), self.den * self.den)

    def __pow__(self, e: int) -> FieldElem:
        if e < 0:
            return FieldElem.from_ring(self.F.one) / self ** (-e)
        return FieldElem.make(self.num**e, self.den**e)

    def inverse(self) -> FieldElem:
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of zero in K")
        n = self.num.norm()
        return FieldElem.make(self.num.conj() * self.den, n)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.num.is_zero():
            raise ZeroDivisionError("division by zero in K")
        n = o.num.norm()
        return FieldElem.make(self.num * o.num.conj() * o.den, self.den * n)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def conj(self) -> FieldElem:
        return FieldElem(self.num.conj(), self.den)

    def norm(self):
        from fractions import Fraction

        return Fraction(self.num.norm(), self.den * self.den)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self) -> bool:
        return not self.is_zero()

    def is_integral(self) -> bool:
        """True when the value lies in O_K."""
        return self.den == 1

    def to_ring(self) -> RingElem:
        if self.den != 1:
            raise NotDivisible(f"{self} is not in O_K")
        return self.num

    def __eq__(self, other) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.den == o.den and self.num == o.num

    def __hash__(self) -> int:
        return hash((self.num.x, self.num.y, self.den, self.F.D))

    def __str__(self) -> str:
        s = str(self.num)
        if self.den == 1:
            return s
        if self.num.x and self.num.y:
            s = f"({s})"
        return f"{s}/{self.den}"

    def __repr__(self) -> str:
        return f"FieldElem({self}, D={self.F.D})"

    def to_complex(self, which: int = 0) -> complex:
        return self.num.to_complex(which) / self.den


def parse_field_elem(text: str, F: FieldSpec) -> FieldElem:
    """Parse ``x+y*w``, ``(x+y*w)/q`` or ``p/q``."""
    s = text.replace(" ", "")
    if "/" in s:
        num, den = s.rsplit("/", 1)
        if num.startswith("(") and num.endswith(")"):
            num = num[1:-1]
        return FieldElem.make(parse_elem(num, F), int(den))
    return FieldElem.from_ring(parse_elem(s, F))


def as_field(v, F: FieldSpec) -> FieldElem:
    if isinstance(v, FieldElem):
        return v
    if isinstance(v, RingElem):
        return FieldElem.from_ring(v)
    if isinstance(v, int):
        return FieldElem(RingElem(v, 0, F), 1)
    if isinstance(v, str):
        return parse_field_elem(v, F)
    raise TypeError(f"cannot interpret {v!r} as an element of K")
