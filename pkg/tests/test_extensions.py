from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from twostep.algebra import LieAlgebra, ParseError, jacobi_residual
from twostep.catalog import data_path, load_algebra_file
from twostep.extensions import (
    Cocycle,
    CocycleError,
    central_extension,
    cocycle_check,
    cocycle_defects,
    load_cocycle,
    parse_cocycle,
    perp_center_condition,
    perp_report,
    radical,
    render_cocycle,
)
from twostep.invariants import center, profile
from twostep.isomorphism import load_isomorphism

from conftest import small_ints, two_step_algebras

COC = data_path("cocycles")
H3C3 = load_algebra_file(COC / "h3_c3.alg")
B0 = load_cocycle(COC / "b0.coc")
B1 = {
    "cocycle_table": load_cocycle(COC / "b1_cocycle_table.coc"),
    "product_table": load_cocycle(COC / "b1_product_table.coc"),
}
B1_ISO = {"cocycle_table": "N7_8_3_cocycle_table.iso", "product_table": "N7_8_3.iso"}


def test_b0_extension_is_n51_plus_n31(catalog):
    ext = central_extension(H3C3, B0)
    assert ext.dim == 8 and not jacobi_residual(ext)
    iso = load_isomorphism(COC / "n5_1_plus_n3_1.iso")
    assert iso.check(target=ext, catalog=catalog)
    assert profile(ext).signature() == profile(catalog["n5_1+n3_1"].algebra).signature()


@pytest.mark.parametrize("reading", sorted(B1))
def test_b1_readings_give_n7_8_3(catalog, reading):
    ext = central_extension(H3C3, B1[reading])
    iso = load_isomorphism(COC / B1_ISO[reading])
    assert iso.check(target=ext, catalog=catalog)
    assert iso.check(catalog=catalog)


@pytest.mark.parametrize("b", [B0, *B1.values()], ids=lambda b: b.name)
def test_radical_contains_e3(b):
    ok, meet = perp_center_condition(H3C3, b)
    assert not ok
    e3 = [Fraction(int(i == 2)) for i in range(6)]
    assert meet.dim == 1 and meet.contains(e3)
    assert radical(b).contains(e3)


def test_perp_report_shape():
    rep = perp_report(H3C3, B0)
    assert rep["condition_holds"] is False
    assert rep["intersection"] == [["0", "0", "1", "0", "0", "0"]]


def test_non_cocycle_rejected():
    g = LieAlgebra(4, {(1, 2): {3: 1}})
    b = Cocycle(4, 1, {(3, 4): {1: 1}})
    assert cocycle_defects(g, b)
    with pytest.raises(CocycleError, match="cocycle condition"):
        central_extension(g, b)


def test_dimension_check():
    with pytest.raises(ValueError):
        cocycle_check(H3C3, Cocycle.zero(5))


def test_cocycle_normalizes_order():
    b = Cocycle(3, 1, {(2, 1): {1: 3}})
    assert b(1, 2) == {1: -3} and b(2, 1) == {1: 3} and b(1, 1) == {}
    with pytest.raises(ValueError):
        Cocycle(3, 1, {(1, 1): {1: 1}})
    with pytest.raises(ValueError):
        Cocycle(3, 1, {(1, 2): {2: 1}})


def test_parse_render_round_trip():
    for b in [B0, *B1.values()]:
        again = parse_cocycle(render_cocycle(b))
        assert again == b


def test_parse_requires_rank():
    with pytest.raises(ParseError, match="rank"):
        parse_cocycle("dim 3\nb[1,2] = z1")


@st.composite
def algebra_and_map(draw):
    g = draw(two_step_algebras(max_dim=5))
    r = draw(st.integers(1, 2))
    f = [[Fraction(draw(small_ints)) for _ in range(g.dim)] for _ in range(r)]
    return g, f


@given(algebra_and_map())
def test_coboundaries_are_cocycles(pair):
    g, f = pair
    b = Cocycle.coboundary(g, f)
    assert cocycle_check(g, b)
    ext = central_extension(g, b)
    assert not jacobi_residual(ext)


@given(two_step_algebras(max_dim=5), st.data())
def test_extension_center_contains_new_directions(g, data):
    # a map vanishing whenever one argument lies in [g, g] is a cocycle
    r = data.draw(st.integers(1, 2))
    gens = [i for i in range(1, g.dim + 1) if not any(i in v for v in g.brackets.values())]
    vals = {}
    for i in gens:
        for j in gens:
            if i < j and data.draw(st.booleans()):
                vals[(i, j)] = {s: data.draw(small_ints) for s in range(1, r + 1)}
    b = Cocycle(g.dim, r, vals)
    assert cocycle_check(g, b)
    ext = central_extension(g, b)
    assert center(ext).dim >= r
    last = [[Fraction(int(k == g.dim + s)) for k in range(ext.dim)] for s in range(r)]
    assert all(center(ext).contains(v) for v in last)
