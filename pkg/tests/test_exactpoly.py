import pytest

from germforge.exactpoly import (
    ContextError,
    PolySyntaxError,
    Ring,
    exact_divide,
    find_weights,
    gcd,
    squarefree_part,
    weighted_degree,
)

R = Ring(("x", "y", "z"))


def P(text, ring=R):
    return ring.parse(text)


def test_cancellation_and_identities():
    assert P("x+y") + P("-x") == P("y")
    assert P("x+y") * P("x-y") == P("x^2-y^2")
    assert P("y^2+x*z") * R.one() == P("y^2+x*z")


def test_parse_and_print_roundtrip():
    p = P("-277/229*x^7 + 3*x*y - 1/2")
    assert P(str(p)) == p
    assert str(P("(x+y*z)^2")) == str(P("x^2+2*x*y*z+y^2*z^2"))


def test_parse_errors():
    with pytest.raises(PolySyntaxError):
        P("x+*y")
    with pytest.raises(PolySyntaxError, match="unknown variable"):
        P("x+q")


def test_context_mismatch():
    S = Ring(("x", "y"))
    with pytest.raises(ContextError):
        P("x") + P("x", S)


@pytest.mark.parametrize(
    "poly, var, expected",
    [("y^2+x*z", "z", "x"), ("y^3", "x", "0"), ("z^2+y^3", "y", "3*y^2")],
)
def test_diff(poly, var, expected):
    assert P(poly).diff(var) == P(expected)


def test_substitution():
    S = Ring(("U2", "w", "q"))
    out = (S.gen("U2") * S.gen("q")).subs({"U2": S.gen("w") ** 3})
    assert out == P("w^3*q", S)
    T = Ring(("t",))
    cusp = Ring(("x", "y")).parse("y^2-x^3")
    assert cusp.subs({"x": T.parse("t^2"), "y": T.parse("t^3")}, T).is_zero()
    S2 = Ring(("x", "y", "z", "w"))
    assert P("y^2+x*z+w*y", S2).subs({"w": 0}) == P("y^2+x*z", S2)


def test_weighted_degree():
    assert weighted_degree(P("y^2+x*z"), (1, 2, 3)) == (4, True)
    assert weighted_degree(P("z^2+y^3"), (1, 2, 3)) == (6, True)
    S = Ring(("x", "y"))
    assert weighted_degree(P("x+y^2", S), (1, 1))[1] is False


def test_find_weights():
    a2 = [P("x"), P("y^2+x*z+x^2*y"), P("y*z"), P("z^2+y^3")]
    assert find_weights(a2) == (1, 2, 3)
    b3 = [P("x"), P("y^2+x^2*z"), P("z^2"), P("y*z+x^3*y")]
    assert find_weights(b3) is not None
    S = Ring(("x", "y"))
    assert find_weights([P("x+y^2", S)]) == (2, 1)
    assert find_weights([P("x+y^2", S), P("x^2+y^2", S)]) is None


def test_gcd_examples():
    U = Ring(("u",))
    assert gcd(P("u^3", U), P("u^4", U)) == P("u^3", U)
    assert gcd(P("u^2-u^3", U), P("u^2", U)) == P("u^2", U)
    assert gcd(P("x*y+x", R), P("y^2-1", R)) == P("y+1")


def test_squarefree_part():
    S = Ring(("Y1", "Y2"))
    assert squarefree_part(P("(Y1^3-Y2^2)^2", S)) == P("Y1^3-Y2^2", S).monic()
    assert squarefree_part(P("x^2*y", R)) == P("x*y")


def test_exact_divide():
    assert exact_divide(P("x^2-y^2"), P("x+y")) == P("x-y")
    with pytest.raises(ArithmeticError):
        exact_divide(P("x^2+1"), P("x+1"))
