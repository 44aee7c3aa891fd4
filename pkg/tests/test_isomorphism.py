from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from twostep.algebra import ParseError, change_basis, render_algebra
from twostep.catalog import data_path
from twostep.isomorphism import IsomorphismWitness, load_isomorphism, parse_isomorphism, render_isomorphism, shipped

from conftest import invertible_matrices

SHIPPED = sorted(data_path("adapted").glob("*.iso")) + sorted(data_path("cocycles").glob("*.iso"))


@pytest.mark.parametrize("path", SHIPPED, ids=lambda p: p.stem)
def test_shipped_witnesses_check(catalog, path):
    assert load_isomorphism(path).check(catalog=catalog)


def test_shipped_helper(catalog):
    assert shipped("n5_1_plus_n3_1_s4.iso").check(catalog=catalog)


@pytest.mark.parametrize("path", SHIPPED, ids=lambda p: p.stem)
def test_render_round_trip(path):
    w = load_isomorphism(path)
    again = parse_isomorphism(render_isomorphism(w), base_dir=w.base_dir)
    assert again.matrix == w.matrix and again.source == w.source and again.target == w.target


@given(st.sampled_from(["N1_8_2", "N7_8_3", "n6_2"]).flatmap(lambda n: st.tuples(st.just(n), invertible_matrices(8))))
def test_random_witness_checks(tmp_path_factory, pair):
    from twostep.catalog import catalog_algebra

    name, m = pair
    a = catalog_algebra(name)
    target = change_basis(a, m)
    d = tmp_path_factory.mktemp("iso")
    (d / "t.alg").write_text(render_algebra(target))
    w = IsomorphismWitness(name, "t.alg", tuple(tuple(r) for r in m), d)
    assert w.check()
    again = parse_isomorphism(render_isomorphism(w), base_dir=d)
    assert again.check()


def test_wrong_matrix_fails(catalog):
    w = load_isomorphism(SHIPPED[0])
    bad = IsomorphismWitness(w.source, w.target, tuple(
        tuple(Fraction(int(i == j)) for j in range(8)) for i in range(8)), w.base_dir)
    assert not bad.check(catalog=catalog)


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("source a\ndim 2", "missing 'target'"),
        ("source a\ntarget b\ndim 2\nx1 = e1\nx1 = e2", "duplicate"),
        ("source a\ntarget b\ndim 2\nx3 = e1", "out of range"),
        ("source a\ntarget b\ndim 2\nx1 = e2", "singular"),
        ("source a\ntarget b\nsize 2", "unknown"),
    ],
)
def test_parse_errors(text, fragment):
    with pytest.raises(ParseError, match=fragment):
        parse_isomorphism(text)
