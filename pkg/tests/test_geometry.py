import pytest

from germforge.exactpoly import Ring
from germforge.geometry import (
    Discriminant,
    ImageError,
    VectorFieldModule,
    curve_meets_only_origin,
    derlog,
    euler_field,
    image_equation,
    kv_discriminant_identity,
    pullback,
    trho_components,
)
from germforge.germs import CurveGerm, MapGerm, Unfolding
from germforge.standard_basis import PolyVector
from germforge.workbench.catalog import load


def germ(vars_, comps):
    return MapGerm.from_strings(vars_, comps)


def test_image_of_cusp():
    H = image_equation(germ("t", ["t^2", "t^3"])).equation
    assert H == H.ring.parse("Y1^3-Y2^2") or H == H.ring.parse("Y2^2-Y1^3")


def test_image_of_line():
    H = image_equation(germ("t", ["t", "0"])).equation
    assert H == H.ring.parse("Y2")


def test_image_of_crosscap():
    H = image_equation(germ("xy", ["x", "y^2", "x*y"])).equation
    assert H.monic() == H.ring.parse("Y3^2-Y1^2*Y2").monic()


def test_image_needs_n_plus_one():
    with pytest.raises(ImageError):
        image_equation(germ("xy", ["x", "y"]))


def test_image_of_non_finite_germ():
    with pytest.raises(ImageError):
        image_equation(germ("xy", ["x", "x*y", "x^2*y"]))


def _same_module(M, gens):
    other = VectorFieldModule(M.ring, M.rank, gens)
    return all(M.contains(g) for g in gens) and all(other.contains(g) for g in M.nonzero())


def test_derlog_smooth():
    R = Ring(("Y1", "Y2"))
    M = derlog(R.parse("Y1"))
    assert _same_module(M, [PolyVector.of(["Y1", "0"], R), PolyVector.of(["0", "1"], R)])


def test_derlog_normal_crossing():
    R = Ring(("Y1", "Y2"))
    M = derlog(R.parse("Y1*Y2"))
    assert _same_module(M, [PolyVector.of(["Y1", "0"], R), PolyVector.of(["0", "Y2"], R)])


def test_derlog_fields_are_logarithmic():
    V = image_equation(load("A2hat"))
    H = V.equation
    for value in derlog(V).apply(H):
        # xi(H) is a multiple of H
        assert value.is_zero() or _divisible(value, H)


def _divisible(p, h):
    from germforge.exactpoly import exact_divide

    try:
        exact_divide(p, h)
    except ArithmeticError:
        return False
    return True


def test_euler_field_membership():
    V = image_equation(load("A2hat"))
    E = euler_field(V.equation)
    assert E is not None and derlog(V).contains(E)


def test_mode_h_annihilates():
    V = image_equation(germ("xy", ["x", "y^2", "x*y"]))
    for value in derlog(V, "H").apply(V.equation):
        assert value.is_zero()


def test_trho_projection():
    R = Ring(("Y1", "Y2", "U1"))
    M = VectorFieldModule(R, 3, [PolyVector.of(["Y1", "0", "U1"], R)])
    T = trho_components(M, ["U1"])
    assert T.rank == 1 and T.generators == [PolyVector.of(["U1"], R)]
    empty = trho_components(VectorFieldModule(R, 3, []), ["U1"])
    assert empty.generators == []


def test_pullback():
    R = Ring(("Y1", "U1", "U2", "U3"))
    M = VectorFieldModule(R, 3, [PolyVector.of(["0", "U2", "0"], R)])
    P = pullback(M, CurveGerm.parse("(0,w,0)"), ["U1", "U2", "U3"])
    assert P.ring.variables == ("Y1", "w")
    assert str(P.generators[0]) == "[0, w, 0]"
    Z = pullback(M, None, ["U1", "U2", "U3"])
    assert Z.generators[0].is_zero()


def test_discriminant_of_smooth_image_is_empty():
    F = Unfolding(germ("x", ["x", "0"]), ("u",), ("x", "u*x"))
    D = kv_discriminant_identity(F)
    assert D.is_empty


def test_discriminant_without_parameters():
    F = Unfolding(germ("xy", ["x", "y^2", "x*y"]), (), ("x", "y^2", "x*y"))
    D = kv_discriminant_identity(F)
    assert D.ring.nvars == 0 and D.generators == []


def test_discriminant_of_trivial_crosscap_unfolding():
    F = Unfolding.trivial(germ("xy", ["x", "y^2", "x*y"]), ("u",))
    assert kv_discriminant_identity(F).is_empty


def test_discriminant_slice_of_f_a2hat():
    F = load("F_A2hat")
    D = kv_discriminant_identity(F, restrict={"U1": "0", "U3": "0"})
    assert str(D) == "(U2)"
    assert curve_meets_only_origin(CurveGerm.parse("(w)"), D)


def test_restriction_must_name_parameters():
    with pytest.raises(Exception):
        kv_discriminant_identity(load("F_A2hat"), restrict={"X": "0"})


def test_curve_meets_only_origin_examples():
    R = Ring(("U1", "U2"))
    assert curve_meets_only_origin(CurveGerm.parse("(u^2,u)", "u"), [R.parse("U1")])
    assert not curve_meets_only_origin(CurveGerm.parse("(u,u)", "u"), [R.parse("U1-U2")])
    S = Ring(("U1",))
    assert not curve_meets_only_origin(CurveGerm.parse("(u)", "u"), [S.parse("U1*(U1-1)")])
    # the germ question ignores the far root
    assert curve_meets_only_origin(CurveGerm.parse("(u)", "u"), [S.parse("U1*(U1-1)")], local_only=True)
    D = Discriminant(S, [S.zero()])
    assert D.is_everything and not curve_meets_only_origin(CurveGerm.parse("(u)", "u"), D)
