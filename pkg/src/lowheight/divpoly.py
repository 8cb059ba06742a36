"""Weierstrass curves y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 over K and
division polynomial values psi_n(P) at a K-rational point."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .quadring import FieldElem, FieldSpec, as_field, parse_field_elem

__all__ = [
    "Curve",
    "EvenRecursionDivisionByZero",
    "INFINITY",
    "Point",
    "SingularCurve",
    "change_coordinates",
    "integral_translate",
    "is_nonsingular",
    "j_invariant",
    "make_curve",
    "point_on_curve",
    "psi_eval",
    "psi_values",
]


class SingularCurve(ArithmeticError):
    pass


class EvenRecursionDivisionByZero(ZeroDivisionError):
    """psi_2(P) = 0 but an even-index psi_n needs to divide by it."""


@dataclass(frozen=True)
class Curve:
    a1: FieldElem
    a2: FieldElem
    a3: FieldElem
    a4: FieldElem
    a6: FieldElem

    @property
    def F(self) -> FieldSpec:
        return self.a1.F

    @property
    def ainvs(self) -> tuple[FieldElem, ...]:
        return self.a1, self.a2, self.a3, self.a4, self.a6

    @cached_property
    def b2(self) -> FieldElem:
        return self.a1.square() + 4 * self.a2

    @cached_property
    def b4(self) -> FieldElem:
        return 2 * self.a4 + self.a1 * self.a3

    @cached_property
    def b6(self) -> FieldElem:
        return self.a3.square() + 4 * self.a6

    @cached_property
    def b8(self) -> FieldElem:
        a1, a2, a3, a4, a6 = self.ainvs
        return a1.square() * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3.square() - a4.square()

    @cached_property
    def delta(self) -> FieldElem:
        b2, b4, b6, b8 = self.b2, self.b4, self.b6, self.b8
        return -b2.square() * b8 - 8 * b4 ** 3 - 27 * b6.square() + 9 * b2 * b4 * b6

    @cached_property
    def c4(self) -> FieldElem:
        return self.b2.square() - 24 * self.b4

    def is_integral(self) -> bool:
        return all(a.is_integral() for a in self.ainvs)

    def is_nonsingular(self) -> bool:
        return not self.delta.is_zero()

    def j_invariant(self) -> FieldElem:
        if self.delta.is_zero():
            raise SingularCurve("j-invariant of a singular curve")
        return self.c4 ** 3 / self.delta

    def __str__(self) -> str:
        return "[" + ", ".join(str(a) for a in self.ainvs) + "]"

    def equation(self) -> str:
        def side(lead, terms):
            out = [lead]
            for c, mono in terms:
                if c.is_zero():
                    continue
                if not mono:
                    out.append(f"({c})")
                else:
                    out.append(mono if c == 1 else f"({c})*{mono}")
            return " + ".join(out)

        return side("y^2", [(self.a1, "x*y"), (self.a3, "y")]) + " = " + side(
            "x^3", [(self.a2, "x^2"), (self.a4, "x"), (self.a6, "")]
        )

    def to_dict(self) -> dict:
        return {"a": [str(a) for a in self.ainvs]}

    @classmethod
    def from_strings(cls, coeffs, F: FieldSpec) -> Curve:
        return make_curve(*(parse_field_elem(c, F) for c in coeffs), F=F)


def make_curve(a1, a2, a3, a4, a6, F: FieldSpec | None = None) -> Curve:
    """Curve from coefficients given as FieldElem, RingElem, int or text."""
    if F is None:
        for a in (a1, a2, a3, a4, a6):
            if hasattr(a, "F"):
                F = a.F
                break
        else:
            raise ValueError("field must be given when all coefficients are plain integers")
    return Curve(*(as_field(a, F) for a in (a1, a2, a3, a4, a6)))


def is_nonsingular(c: Curve) -> bool:
    return c.is_nonsingular()


def j_invariant(c: Curve) -> FieldElem:
    return c.j_invariant()


@dataclass(frozen=True)
class Point:
    """Affine point (x, y), or the point at infinity when both are None."""

    x: FieldElem | None = None
    y: FieldElem | None = None

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def __neg__(self):
        raise NotImplementedError("negation depends on the curve; use Point.negate(curve)")

    def negate(self, c: Curve) -> Point:
        if self.is_infinity:
            return self
        return Point(self.x, -self.y - c.a1 * self.x - c.a3)

    def __str__(self) -> str:
        if self.is_infinity:
            return "inf"
        return f"({self.x}, {self.y})"

    def to_json(self):
        return "inf" if self.is_infinity else [str(self.x), str(self.y)]

    @classmethod
    def make(cls, x, y, F: FieldSpec) -> Point:
        return cls(as_field(x, F), as_field(y, F))


INFINITY = Point()


def point_on_curve(c: Curve, p: Point) -> bool:
    if p.is_infinity:
        return True
    x, y = p.x, p.y
    a1, a2, a3, a4, a6 = c.ainvs
    lhs = y.square() + a1 * x * y + a3 * y
    rhs = x ** 3 + a2 * x.square() + a4 * x + a6
    return lhs == rhs


def change_coordinates(c: Curve, p: Point, r, s, t) -> tuple[Curve, Point]:
    """Substitute x = x' + r, y = y' + s x' + t.

    The discriminant and every psi_n(P) are unchanged by such a shift.
    """
    F = c.F
    r, s, t = (as_field(v, F) for v in (r, s, t))
    a1, a2, a3, a4, a6 = c.ainvs
    new = Curve(
        a1 + 2 * s,
        a2 - s * a1 + 3 * r - s.square(),
        a3 + r * a1 + 2 * t,
        a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r.square() - 2 * s * t,
        a6 + r * a4 + r.square() * a2 + r ** 3 - t * a3 - t.square() - r * t * a1,
    )
    if p.is_infinity:
        return new, p
    x = p.x - r
    return new, Point(x, p.y - s * x - t)


def integral_translate(c: Curve, p: Point, r_box: int = 4) -> tuple[Curve, Point] | None:
    """A shifted model on which both the curve and P are integral, or None.

    Tries s, t in (1/2)O_K mod O_K and r = x + y w with 0 <= x, y < r_box.
    """
    def integral(cc, pp):
        return cc.is_integral() and (pp.is_infinity or (pp.x.is_integral() and pp.y.is_integral()))

    if integral(c, p):
        return c, p
    F = c.F
    halves = [FieldElem.make(F(x, y), 2) for x in (0, 1) for y in (0, 1)]
    for rx in range(r_box):
        for ry in range(r_box):
            r = as_field(F(rx, ry), F)
            for s in halves:
                for t in halves:
                    cc, pp = change_coordinates(c, p, r, s, t)
                    if integral(cc, pp):
                        return cc, pp
    return None


class _PsiAtPoint:
    def __init__(self, c: Curve, p: Point):
        if p.is_infinity:
            raise ValueError("psi_n is evaluated at affine points only")
        x, y = p.x, p.y
        b2, b4, b6, b8 = c.b2, c.b4, c.b6, c.b8
        x2 = x.square()
        x3 = x2 * x
        x4 = x2.square()
        psi2 = 2 * y + c.a1 * x + c.a3
        psi3 = 3 * x4 + b2 * x3 + 3 * b4 * x2 + 3 * b6 * x + b8
        inner = (
            2 * x4 * x2 + b2 * x4 * x + 5 * b4 * x4 + 10 * b6 * x3 + 10 * b8 * x2
            + (b2 * b8 - b4 * b6) * x + b4 * b8 - b6.square()
        )
        F = c.F
        self.memo = {
            0: as_field(0, F),
            1: as_field(1, F),
            2: psi2,
            3: psi3,
            4: psi2 * inner,
        }

    def __call__(self, n: int) -> FieldElem:
        if n < 0:
            return -self(-n)
        memo = self.memo
        if n in memo:
            return memo[n]
        m = (n + 1) // 2
        if n % 2:
            # n = 2m - 1
            v = self(m + 1) * self(m - 1) ** 3 - self(m - 2) * self(m) ** 3
        else:
            m = n // 2
            psi2 = memo[2]
            if psi2.is_zero():
                raise EvenRecursionDivisionByZero(f"psi_2(P) = 0 while computing psi_{n}")
            v = self(m) * (self(m + 2) * self(m - 1).square() - self(m - 2) * self(m + 1).square()) / psi2
        memo[n] = v
        return v


def psi_eval(c: Curve, p: Point, n: int) -> FieldElem:
    return _PsiAtPoint(c, p)(n)


def psi_values(c: Curve, p: Point, N: int) -> list[FieldElem]:
    """[psi_0(P), ..., psi_N(P)] sharing one memo table."""
    ev = _PsiAtPoint(c, p)
    return [ev(n) for n in range(N + 1)]
