import pytest

from germforge.exactpoly import Ring
from germforge.germs import (
    CurveGerm,
    GermError,
    MapGerm,
    Unfolding,
    augment,
    corank,
    curve_multiplicity,
    dump_germ,
    instantiate,
    is_unfolding_of,
    multiplicity,
    parse_germ_text,
    specialize,
)
from germforge.workbench.catalog import load, same_germ

A2HAT = MapGerm.from_strings("xyz", ["x", "y^2+x*z+x^2*y", "y*z", "z^2+y^3"], label="A2hat")


def test_corank():
    assert corank(A2HAT) == 2
    assert corank(MapGerm.from_strings("xyz", ["x", "y", "z"])) == 0
    assert corank(MapGerm.from_strings("xyz", ["x", "y", "z^2"])) == 1


def test_multiplicity():
    assert multiplicity(MapGerm.from_strings("xy", ["x", "y"])) == 1
    assert curve_multiplicity(CurveGerm.parse("(u^2)", "u")) == 2
    for l in (1, 2, 3):
        gamma = CurveGerm.parse(instantiate("(u^l,-u^l,0,0,0)", {"l": l}), "u")
        assert curve_multiplicity(gamma) == l


def test_germ_must_fix_origin():
    with pytest.raises(GermError):
        MapGerm.from_strings("xy", ["x+1", "y", "x*y"])
    with pytest.raises(GermError):
        CurveGerm.parse("(w, 1)")


def test_augment_gives_c_hat():
    F = load("F_A2hat")
    for l in (1, 2, 3):
        g = CurveGerm.parse(f"(0,w^{l},0)")
        assert same_germ(augment(F, g), load("C_l", l=l))


def test_augment_constant_curve_is_trivial():
    F = load("F_A2hat")
    g = augment(F, CurveGerm.parse("(0,0,0)"))
    assert g.components[:-1] == tuple(c.to_ring(g.ring) for c in F.base.components)
    assert g.components[-1] == g.ring.gen("w")


def test_augment_hhat_gives_f_l():
    F = load("F_hhat1")
    for l in (1, 2):
        g = augment(F, CurveGerm.parse(f"(x^{l},-x^{l},0,0,0)", "x"))
        assert same_germ(g, load("f_l", l=l))


def test_specialize():
    F = load("F_A2hat")
    assert specialize(F, (0, 0, 0)).components == F.base.components
    shifted = specialize(F, (0, 1, 0))
    assert str(shifted.components[2]) == "y*z+y"
    with pytest.raises(GermError):
        specialize(F, (0, 0))


def test_trivial_unfolding():
    F = Unfolding.trivial(A2HAT, ("u",))
    assert specialize(F, (5,)).components == A2HAT.components
    assert is_unfolding_of(F, A2HAT)


def test_is_unfolding_of():
    F = load("F_A2hat")
    assert is_unfolding_of(F, A2HAT)
    assert not is_unfolding_of(F, load("B3hat"))


def test_unfolding_must_restrict_to_base():
    with pytest.raises(GermError):
        Unfolding(A2HAT, ("u",), ("x+u", "y^2+x*z", "y*z", "z^2+y^3"))


def test_germ_file_roundtrip():
    F = load("F_A2hat")
    again = parse_germ_text(dump_germ(F)).build()
    assert again.deformed == F.deformed and again.params == F.params
    f = load("A2hat")
    assert parse_germ_text(dump_germ(f)).build().components == f.components


def test_family_indices():
    text = "label demo\nindex l\nvars x y\ncomponent x\ncomponent y^(2*l+1)+x^l*y\ncomponent y^2\n"
    f = parse_germ_text(text, {"l": 2}).build()
    assert str(f.components[1]) in ("y^5+x^2*y", "x^2*y+y^5")
    with pytest.raises(GermError, match="needs values"):
        parse_germ_text(text)


def test_instantiate():
    assert instantiate("w^(l-1)*x^l", {"l": 3}) == "w^2*x^3"
    with pytest.raises(GermError):
        instantiate("w^(l-2)", {"l": 1})
    with pytest.raises(GermError):
        instantiate("w^(l/2)", {"l": 4})


def test_unknown_keyword():
    with pytest.raises(GermError, match="unknown keyword"):
        parse_germ_text("vars x\nfoo bar\n")


def test_same_germ_rename():
    R = Ring(("y", "z", "x"))
    f = MapGerm(R, (R.parse("y"), R.parse("z^2"), R.parse("x")))
    g = MapGerm.from_strings("xyz", ["x", "y", "z^2"])
    assert not same_germ(f, g, {"y": "x"})
    assert same_germ(f, g)
