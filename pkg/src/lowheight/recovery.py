"""Rebuild a curve and point from a defining triple (u2, u3, u4) and check them.

Two families of models are tried. Shipsey's put the point at (0, 0) on

    y^2 + a1 xy + u2 y = x^3 + a2 x^2 + a4 x            (a1 = 0 or 1)

and Ward's give a point on y^2 = 4x^3 - g2 x - g3.
"""

from __future__ import annotations

import enum
from dataclasses import asdict, dataclass

from .divpoly import (
    Curve,
    EvenRecursionDivisionByZero,
    Point,
    make_curve,
    point_on_curve,
    psi_values,
)
from .eds import EDSTuple
from .heights import TorsionSuspected, gcd_estimate
from .quadring import FieldElem, as_field

__all__ = [
    "DegenerateModel",
    "RecoveredPair",
    "RecoveryFailed",
    "Route",
    "TranscriptionInconsistent",
    "Verification",
    "recover",
    "shipsey1",
    "shipsey2",
    "torsion_screen",
    "ward_curve",
    "ward_model",
]

TORSION_SCREEN_MAX = 24
REFINE_I = 7


class RecoveryFailed(ValueError):
    pass


class DegenerateModel(ArithmeticError):
    """The recovered model has zero discriminant."""


class TranscriptionInconsistent(ArithmeticError):
    """Ward's point does not satisfy y^2 = 4x^3 - g2 x - g3."""


class Route(str, enum.Enum):
    SHIPSEY1 = "Shipsey1"
    SHIPSEY2 = "Shipsey2"
    WARD = "Ward"


@dataclass(frozen=True)
class Verification:
    nonsingular: bool
    on_curve: bool
    tuple_match: bool
    torsion_screen: bool

    def all(self) -> bool:
        return self.nonsingular and self.on_curve and self.tuple_match and self.torsion_screen


@dataclass(frozen=True)
class RecoveredPair:
    route: Route
    curve: Curve
    point: Point
    verified: Verification
    g2: FieldElem | None = None
    g3: FieldElem | None = None

    def to_dict(self) -> dict:
        out = {
            "route": self.route.value,
            "curve": [str(a) for a in self.curve.ainvs],
            "equation": self.curve.equation(),
            "point": self.point.to_json(),
            "j": str(self.curve.j_invariant()) if self.verified.nonsingular else None,
            "delta": str(self.curve.delta),
            "integral": self.curve.is_integral(),
            "verified": asdict(self.verified),
        }
        if self.route is Route.WARD:
            out["g2"], out["g3"] = str(self.g2), str(self.g3)
        return out


def _fields(t: EDSTuple):
    F = t.field
    return F, as_field(t.u2, F), as_field(t.u3, F), as_field(t.u4, F)


def shipsey1(t: EDSTuple) -> tuple[Curve, Point]:
    F, u2, u3, u4 = _fields(t)
    a4 = (u4 + u2 ** 5) / (2 * u2 * u3)
    a2 = (u3 + a4.square()) / u2.square()
    return make_curve(0, a2, u2, a4, 0, F=F), Point.make(0, 0, F)


def shipsey2(t: EDSTuple) -> tuple[Curve, Point]:
    F, u2, u3, u4 = _fields(t)
    a1, a3 = as_field(1, F), u2
    a4 = (u4 - u2.square() * u3 + u2 ** 5) / (2 * u2 * u3)
    a2 = (u3 + a1 * a3 * a4 + a4.square()) / u2.square()
    return make_curve(a1, a2, a3, a4, 0, F=F), Point.make(0, 0, F)


def ward_model(t: EDSTuple) -> tuple[FieldElem, FieldElem, FieldElem, FieldElem]:
    """(g2, g3, x, y) with (x, y) on y^2 = 4x^3 - g2 x - g3.

    The u2*u3^3 term of x is taken with u2 squared, the only exponent that
    keeps x homogeneous of weight 2 when u_n has weight n^2 - 1.
    """
    F, u2, u3, u4 = _fields(t)
    p = {k: u2 ** k for k in (2, 4, 5, 6, 7, 8, 9, 10, 12, 14, 15, 17, 20, 22, 25, 30)}
    c3, c6, c9 = u3 ** 3, u3 ** 6, u3 ** 9
    q2, q3, q4, q5, q6 = u4.square(), u4 ** 3, u4 ** 4, u4 ** 5, u4 ** 6
    x = (q2 + 2 * p[5] * u4 + 4 * p[2] * c3 + p[10]) / (12 * p[4] * u3.square())
    y = -u2
    g2 = (
        p[20] + 4 * p[15] * u4 - 16 * p[12] * c3 + 6 * p[10] * q2 - 8 * p[7] * c3 * u4
        + 4 * p[5] * q3 + 16 * p[4] * c6 + 8 * p[2] * c3 * q2 + q4
    ) / (12 * p[8] * u3 ** 4)
    g3 = -(
        p[30] + 6 * p[25] * u4 - 24 * p[22] * c3 + 15 * p[20] * q2 - 60 * p[17] * c3 * u4
        + 20 * p[15] * q3 + 120 * p[14] * c6 - 36 * p[12] * c3 * q2 + 15 * p[10] * q4
        - 48 * p[9] * c6 * u4 + 12 * p[7] * c3 * q3 + 64 * p[6] * c9 + 6 * p[5] * q5
        + 48 * p[4] * c6 * q2 + 12 * p[2] * c3 * q4 + q6
    ) / (216 * p[12] * c6)
    if y.square() != 4 * x ** 3 - g2 * x - g3:
        raise TranscriptionInconsistent(f"Ward point misses its curve for {t}")
    return g2, g3, x, y


def ward_curve(g2: FieldElem, g3: FieldElem, x: FieldElem, y: FieldElem) -> tuple[Curve, Point]:
    """Y^2 = 4X^3 - g2 X - g3 as y'^2 = x^3 - (g2/4) x - g3/4 with Y = -2y'.

    The sign makes psi_2 of the new model equal to -Y, matching u2 = -Y.
    """
    F = g2.F
    return make_curve(0, 0, 0, -g2 / 4, -g3 / 4, F=F), Point(x, -y / 2)


def _tuple_match(c: Curve, p: Point, t: EDSTuple) -> bool:
    try:
        psi = psi_values(c, p, 4)
    except ZeroDivisionError:
        return False
    return psi[2] == t.u2 and psi[3] == t.u3 and psi[4] == t.u4


def torsion_screen(
    c: Curve, p: Point, t: EDSTuple | None = None, max_m: int = TORSION_SCREEN_MAX, refine_I: int = REFINE_I
) -> bool:
    """Heuristic nontorsion check.

    Passes iff psi_m(P) != 0 for 2 <= m <= max_m and the gcd estimate at
    n = 2^(refine_I+1) is positive. The estimate needs an integral triple:
    ``t`` if given, else psi_2..psi_4 at P when they are integral; without
    one only the psi test is applied.
    """
    if p.is_infinity:
        return False
    try:
        psi = psi_values(c, p, max_m)
    except EvenRecursionDivisionByZero:
        return False
    if any(v.is_zero() for v in psi[2:]):
        return False
    if t is None:
        if not all(v.is_integral() for v in psi[2:5]):
            return True
        try:
            t = EDSTuple(*(v.to_ring() for v in psi[2:5]))
        except ValueError:
            return False
    try:
        return gcd_estimate(t, refine_I).value > 0
    except TorsionSuspected:
        return False


def _assess(route, curve, point, t, g2=None, g3=None):
    nonsingular = curve.is_nonsingular()
    on_curve = point_on_curve(curve, point)
    match = _tuple_match(curve, point, t)
    return route, curve, point, nonsingular, on_curve, match, g2, g3


def recover(t: EDSTuple, screen_max: int = TORSION_SCREEN_MAX, refine_I: int = REFINE_I) -> RecoveredPair:
    """Shipsey variant 1, then variant 2, then Ward.

    An integral nonsingular Shipsey model whose psi values reproduce the
    triple is preferred; a non-integral one is accepted next; Ward's model
    is the last resort.
    """
    candidates = [
        _assess(Route.SHIPSEY1, *shipsey1(t), t),
        _assess(Route.SHIPSEY2, *shipsey2(t), t),
    ]
    good = [c for c in candidates if c[3] and c[4] and c[5]]
    integral = [c for c in good if c[1].is_integral()]
    chosen = (integral or good or [None])[0]
    if chosen is None:
        try:
            g2, g3, x, y = ward_model(t)
        except TranscriptionInconsistent as exc:
            raise RecoveryFailed(str(exc)) from exc
        curve, point = ward_curve(g2, g3, x, y)
        w = _assess(Route.WARD, curve, point, t, g2, g3)
        if not (w[3] and w[4] and w[5]):
            raise RecoveryFailed(f"no nonsingular model reproduces {t} (D={t.field.D})")
        chosen = w
    route, curve, point, nonsingular, on_curve, match, g2, g3 = chosen
    screen = torsion_screen(curve, point, t, screen_max, refine_I)
    return RecoveredPair(route, curve, point, Verification(nonsingular, on_curve, match, screen), g2, g3)
