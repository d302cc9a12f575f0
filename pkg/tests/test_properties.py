"""Randomized property suites (1000 cases each)."""

import itertools
from functools import lru_cache

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from germforge.exactpoly import Polynomial, Ring, find_weights, weighted_degree
from germforge.geometry import derlog, euler_field, image_equation
from germforge.germs import CurveGerm, Unfolding, augment
from germforge.standard_basis import MonomialOrdering, PolyVector, buchberger
from germforge.workbench.catalog import germ_names, load

CASES = settings(max_examples=1000, deadline=None, suppress_health_check=[HealthCheck.too_slow])

R3 = Ring(("x", "y", "z"))
coeffs = st.fractions(min_value=-9, max_value=9, max_denominator=5)


def polys(ring=R3, max_exp=3, max_terms=4, constant=True):
    n = ring.nvars
    exps = st.tuples(*[st.integers(0, max_exp)] * n)
    if not constant:
        exps = exps.filter(lambda e: sum(e) > 0)
    terms = st.dictionaries(exps, coeffs.filter(bool), max_size=max_terms)
    return terms.map(lambda t: Polynomial(ring, t))


# ---------------------------------------------------------------------------
# ring axioms and the Leibniz rule


@CASES
@given(polys(), polys(), polys())
def test_ring_axioms(p, q, r):
    zero, one = R3.zero(), R3.one()
    assert p + q == q + p and p * q == q * p
    assert (p + q) + r == p + (q + r)
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert p + zero == p and p * one == p and (p - p).is_zero()
    assert R3.parse(str(p)) == p


@CASES
@given(polys(), polys(), st.sampled_from(R3.variables))
def test_leibniz_rule(p, q, v):
    assert (p * q).diff(v) == p.diff(v) * q + p * q.diff(v)
    assert (p + q).diff(v) == p.diff(v) + q.diff(v)


# ---------------------------------------------------------------------------
# standard bases


R2 = Ring(("x", "y"))


@CASES
@given(st.lists(polys(R2, max_exp=3, max_terms=3, constant=False).filter(bool), min_size=1, max_size=3),
       st.sampled_from(["global", "local"]))
def test_spairs_reduce_to_zero(gens, kind):
    gb = buchberger(gens, MonomialOrdering(kind))
    assert gb.spairs_reduce_to_zero()
    for g in gens:
        assert gb.contains(g)


# ---------------------------------------------------------------------------
# colength against staircase enumeration


def _oracle(mons, n):
    """Count monomials outside a monomial ideal by brute force (None if infinite)."""
    bounds = []
    for i in range(n):
        pure = [m[i] for m in mons if all(m[j] == 0 for j in range(n) if j != i) and m[i] > 0]
        if not pure and not any(sum(m) == 0 for m in mons):
            return None
        bounds.append(min(pure) if pure else 1)
    return sum(1 for e in itertools.product(*[range(b) for b in bounds])
               if not any(all(a >= b for a, b in zip(e, m)) for m in mons))


def _power_bound(mons, n):
    """Least N with every monomial of degree N inside the monomial ideal."""
    d = 1
    while True:
        degree_d = [e for e in itertools.product(range(d + 1), repeat=n) if sum(e) == d]
        if all(any(all(a >= b for a, b in zip(e, m)) for m in mons) for e in degree_d):
            return d
        d += 1


@st.composite
def monomial_ideals(draw):
    n = draw(st.integers(1, 3))
    mons = draw(st.lists(st.tuples(*[st.integers(0, 4)] * n).filter(lambda e: sum(e) > 0), min_size=1, max_size=5))
    # usually add pure powers so the quotient is finite
    for i in range(n):
        if draw(st.integers(0, 5)):
            mons.append(tuple(draw(st.integers(1, 5)) if j == i else 0 for j in range(n)))
    return n, mons


@CASES
@given(monomial_ideals(), st.lists(coeffs, min_size=3, max_size=3), st.sampled_from(["global", "local"]))
def test_colength_matches_staircase(ideal, shear, kind):
    n, mons = ideal
    ring = Ring(("x", "y", "z")[:n])
    if kind == "local":
        # local cases get all pure powers: Mora on a sheared ideal of infinite
        # colength can run for minutes, and the global cases cover that branch
        mons = mons + [tuple(6 if j == i else 0 for j in range(n)) for i in range(n)]
    expected = _oracle(mons, n)
    gens = [ring.monomial(m) for m in mons]
    # a triangular change of coordinates fixing 0 preserves the colength
    images = {v: ring.gen(v) for v in ring.variables}
    if n >= 2:
        images["y"] = ring.gen("y") + ring.gen("x") ** 2 * shear[0]
    if n == 3:
        images["z"] = ring.gen("z") + ring.gen("x") * ring.gen("y") * shear[1] + ring.gen("x") * shear[2]
    moved = [g.subs(images, ring) for g in gens]
    if kind == "local":
        # m^N lies in the ideal and is fixed by the coordinate change; listing
        # its pure powers lets the local engine find the highest corner early
        N = _power_bound(mons, n)
        moved += [ring.gen(v) ** N for v in ring.variables]
    got = buchberger(moved, MonomialOrdering(kind), budget=60).colength()
    assert got == expected


# ---------------------------------------------------------------------------
# Euler fields of weighted homogeneous catalog hypersurfaces

# catalog germs and full unfoldings whose image equation takes seconds
EULER_CATALOG = [("A2hat", {}), ("Ahat_k", {"k": 1}), ("B3hat", {}), ("Bhat_l_p", {"l": 1}),
                 ("Bhat_l_m", {"l": 1}), ("C_l", {"l": 1}), ("D_l", {"l": 1}), ("F_A2hat", {}),
                 ("crosscap", {}), ("hhat_l", {"l": 1}), ("f_l", {"l": 1})]


@lru_cache(maxsize=None)
def _hypersurface(i):
    name, idx = EULER_CATALOG[i]
    obj = load(name, **idx)
    f = obj.full_map() if isinstance(obj, Unfolding) else obj
    V = image_equation(f)
    w = find_weights([V.equation])
    M = derlog(V)
    return V.equation, w, M, M.basis()


def test_euler_catalog_is_weighted_homogeneous():
    for i in range(len(EULER_CATALOG)):
        H, w, _, _ = _hypersurface(i)
        assert w is not None, EULER_CATALOG[i]


@CASES
@given(st.integers(0, len(EULER_CATALOG) - 1), coeffs.filter(bool), st.data())
def test_euler_field_in_derlog(i, scale, data):
    H, w, M, gb = _hypersurface(i)
    E = euler_field(H, w)
    deg = weighted_degree(H, w)[0]
    # xi_E(H) = deg * H
    assert sum((c * H.diff(v) for c, v in zip(E, H.ring.variables)), H.ring.zero()) == H * deg
    # random element E * scale + sum of generator multiples stays in the module
    ring = H.ring
    v = E.scale(ring.const(scale))
    k = data.draw(st.integers(0, min(3, len(M.generators))))
    for j in data.draw(st.lists(st.integers(0, len(M.generators) - 1), min_size=k, max_size=k)):
        mult = data.draw(polys(ring, max_exp=1, max_terms=2))
        v = v + M.generators[j].scale(mult)
    assert gb.contains(v)


# ---------------------------------------------------------------------------
# augmentation restricts to (f, 0) at w = 0


def _unfoldings():
    out = []
    for name in germ_names():
        for idx in ({"l": 1, "k": 1}, {"l": 2, "k": 1}, {"l": 3, "k": 2}):
            obj = load(name, **idx)
            if isinstance(obj, Unfolding) and obj.d:
                out.append(obj)
    return out


UNFOLDINGS = _unfoldings()


def _curve_ring(F):
    var = next(v for v in ("w", "t", "s") if v not in F.base.ring.variables)
    return Ring((var,))


@CASES
@given(st.integers(0, len(UNFOLDINGS) - 1), st.data())
def test_augmentation_specializes(i, data):
    F = UNFOLDINGS[i]
    T = _curve_ring(F)
    var = T.variables[0]
    comps = data.draw(st.lists(polys(T, max_exp=4, max_terms=2, constant=False), min_size=F.d, max_size=F.d))
    g = augment(F, CurveGerm(var, tuple(comps)))
    at0 = [c.subs({var: 0}) for c in g.components]
    assert at0[-1].is_zero()
    for a, b in zip(at0[:-1], F.base.components):
        assert a == b.to_ring(g.ring)
