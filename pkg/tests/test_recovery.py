import pytest

from lowheight.divpoly import Point, make_curve, point_on_curve, psi_values
from lowheight.eds import EDSTuple, negate_tuple, sequence
from lowheight.quadring import field
from lowheight.recovery import (
    RecoveryFailed,
    Route,
    recover,
    shipsey1,
    shipsey2,
    torsion_screen,
    ward_curve,
    ward_model,
)

from conftest import KNOWN_POINTS, table_tuple


def test_shipsey1_reproduces_published_model():
    F = field(3)
    w = F.omega
    c, P = shipsey1(EDSTuple.parse("w+1;2*w+2;4*w+4", 3))
    assert c == make_curve(0, 3 + w, 1 + w, 2 + 2 * w, 0)
    assert P == Point.make(0, 0, F)


def test_shipsey2_places_point_at_origin():
    t = EDSTuple.parse("w;4-2*w;16-8*w", -7)
    c, P = shipsey2(t)
    assert c.a1 == 1 and c.a3 == t.u2 and c.a6 == 0
    assert point_on_curve(c, P)
    assert psi_values(c, P, 4)[2:] == [t.u2, t.u3, t.u4]


def test_recover_picks_integral_model():
    rp = recover(EDSTuple.parse("w;3*w;-9*w", 3))
    assert rp.curve.is_integral()
    assert rp.route in (Route.SHIPSEY1, Route.SHIPSEY2)
    assert rp.verified.all()


@pytest.mark.parametrize("row", KNOWN_POINTS, ids=lambda r: f"{r[1]}:{r[2]}")
def test_ward_model_on_curve(row):
    t = table_tuple(row)
    g2, g3, x, y = ward_model(t)
    assert y.square() == 4 * x ** 3 - g2 * x - g3
    c, P = ward_curve(g2, g3, x, y)
    assert c.is_nonsingular()
    assert point_on_curve(c, P)
    assert psi_values(c, P, 4)[2:] == [t.u2, t.u3, t.u4]


@pytest.mark.parametrize("row", KNOWN_POINTS[::4], ids=lambda r: f"{r[1]}:{r[2]}")
def test_ward_negation_symmetry(row):
    t = table_tuple(row)
    g2, g3, x, y = ward_model(t)
    h2, h3, x2, y2 = ward_model(negate_tuple(t))
    assert (h2, h3, x2) == (g2, g3, x)
    assert y2 == -y


@pytest.mark.parametrize("row", KNOWN_POINTS, ids=lambda r: f"{r[1]}:{r[2]}")
def test_recover_table_rows(row):
    t = table_tuple(row)
    rp = recover(t)
    assert rp.verified.all()
    assert not rp.curve.delta.is_zero()
    assert point_on_curve(rp.curve, rp.point)
    d = rp.to_dict()
    assert d["route"] == rp.route.value
    assert d["verified"]["tuple_match"]


def test_psi_round_trip_matches_sequence():
    for row in KNOWN_POINTS[:8]:
        t = table_tuple(row)
        rp = recover(t)
        assert psi_values(rp.curve, rp.point, 16) == sequence(t, 16)


def test_torsion_tuple():
    t = EDSTuple.parse("1;1;1", 3)
    rp = recover(t)
    assert not rp.verified.torsion_screen
    assert not rp.verified.all()
    assert not torsion_screen(rp.curve, rp.point, t)
    assert not torsion_screen(rp.curve, rp.point)


def test_torsion_screen_two_torsion():
    F = field(5)
    c = make_curve(0, 0, 0, -1, 0, F=F)
    assert not torsion_screen(c, Point.make(1, 0, F))


def test_torsion_screen_accepts_table_point():
    t = EDSTuple.parse("1;w-1;2*w-2", 3)
    rp = recover(t)
    assert torsion_screen(rp.curve, rp.point)
    assert torsion_screen(rp.curve, rp.point, t)


def test_recovery_failure():
    # every route for (1, -2, -3) lands on a singular model
    t = EDSTuple.parse("1;-2;-3", 3)
    assert shipsey1(t)[0].delta == 0 and shipsey2(t)[0].delta == 0
    g2, g3, _, _ = ward_model(t)
    assert g2 ** 3 == 27 * g3.square()
    with pytest.raises(RecoveryFailed):
        recover(t)
