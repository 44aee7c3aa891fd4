from fractions import Fraction
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from twostep.algebra import LieAlgebra
from twostep.catalog import catalog_algebra
from twostep.isomorphism import shipped
from twostep.obstructions import (
    act_on_basis,
    bstable_fuzz,
    bstable_membership,
    bstable_sets,
    check_assignment,
    random_triangular,
)
from twostep.catalog import load_algebra_file, data_path

from conftest import small_ints

SETS = bstable_sets("corrected")
LITERAL = bstable_sets("literal")


def members():
    return {
        "S1": catalog_algebra("N3_8_2"),
        "S2": catalog_algebra("N1_8_3"),
        "S3": catalog_algebra("N3_8_3"),
        "S4": load_algebra_file(data_path("adapted", "n5_1_plus_n3_1_s4.alg")),
    }


@pytest.mark.parametrize("name", ["S1", "S2", "S3", "S4"])
def test_cited_presentations_are_members(name):
    a = members()[name]
    vals = bstable_membership(SETS[name], a)
    assert vals is not None
    assert check_assignment(SETS[name], a, vals)


def test_literal_reading_keeps_s2_member():
    assert bstable_membership(LITERAL["S2"], catalog_algebra("N1_8_3")) is not None


def test_catalog_n51_n31_presentation_is_not_in_s4(catalog):
    assert bstable_membership(SETS["S4"], catalog["n5_1+n3_1"].algebra) is None
    assert shipped("n5_1_plus_n3_1_s4.iso").check(catalog=catalog)


@pytest.mark.parametrize("name", ["S1", "S2", "S3", "S4"])
def test_upper_fuzz_is_stable(name):
    rep = bstable_fuzz(SETS[name], members()[name], trials=100, seed=0)
    assert rep["stable"], rep["counterexamples"][:1]


@pytest.mark.parametrize("mode", ["diagonal", "identity"])
@pytest.mark.parametrize("name", ["S1", "S2", "S3", "S4"])
def test_torus_and_identity_modes(name, mode):
    assert bstable_fuzz(LITERAL[name], members()[name], trials=20, mode=mode)["stable"]


def test_literal_s2_has_counterexample():
    rep = bstable_fuzz(LITERAL["S2"], members()["S2"], trials=100, seed=0)
    assert not rep["stable"]
    ce = rep["counterexamples"][0]
    m = [[Fraction(x) for x in row] for row in ce["matrix"]]
    assert bstable_membership(LITERAL["S2"], act_on_basis(members()["S2"], m)) is None


def test_fuzz_is_reproducible():
    a = bstable_fuzz(LITERAL["S2"], members()["S2"], trials=30, seed=5)
    b = bstable_fuzz(LITERAL["S2"], members()["S2"], trials=30, seed=5)
    assert a == b


def test_fuzz_rejects_non_member(catalog):
    with pytest.raises(ValueError, match="not in"):
        bstable_fuzz(SETS["S1"], catalog["N5_8_2"].algebra)


def test_random_triangular_shapes():
    rng = random.Random(1)
    up = random_triangular(8, rng, "upper")
    low = random_triangular(8, rng, "lower")
    assert all(up[i][j] == 0 for i in range(8) for j in range(i))
    assert all(low[i][j] == 0 for i in range(8) for j in range(i + 1, 8))
    assert all(up[i][i] and low[i][i] for i in range(8))


@st.composite
def set_members(draw, name):
    """Random algebras with [e_r, e_s] in <e6, e7, e8> (r < s <= 5) meeting S_i."""
    s = SETS[name]
    values = {p: Fraction(draw(small_ints)) for p in s.params}
    c = {(r, t, k): Fraction(draw(small_ints)) for t in range(2, 6) for r in range(1, t) for k in (6, 7, 8)}
    for _ in range(3):
        for con in s.constraints:
            if con.lhs in c:
                c[con.lhs] = Fraction(0) if con.param is None else values[con.param] * c.get(con.rhs, 0)
    brackets = {}
    for (r, t, k), v in c.items():
        if v:
            brackets.setdefault((r, t), {})[k] = v
    return LieAlgebra(8, brackets)


@pytest.mark.parametrize("name", ["S1", "S2", "S3", "S4"])
@given(data=st.data())
def test_random_members_stay_in_set(name, data):
    a = data.draw(set_members(name))
    assert bstable_membership(SETS[name], a) is not None
    assert bstable_fuzz(SETS[name], a, trials=5, seed=3)["stable"]
