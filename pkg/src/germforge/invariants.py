"""Normal spaces, codimensions, Cohen-Macaulay and double point tests."""

from __future__ import annotations

import itertools
import logging
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .exactpoly import Polynomial, Rational, Ring, as_rational, find_weights, weighted_degree
from .geometry import (
    Discriminant,
    _det,
    curve_meets_only_origin,
    derlog,
    image_equation,
    kv_discriminant_identity,
    minimal_generators,
    pullback,
    trho_components,
)
from .germs import CurveGerm, GermError, MapGerm, Unfolding, is_unfolding_of
from .standard_basis import (
    MonomialOrdering,
    PolyVector,
    StandardBasis,
    buchberger,
    find_module_weights,
    ideal_quotient,
)

log = logging.getLogger(__name__)

INFINITE = math.inf


def _finite(n):
    return INFINITE if n is None else n


# ---------------------------------------------------------------------------
# quotient modules


@dataclass
class QuotientPresentation:
    """The module ring^free_rank / (relations)."""

    ring: Ring
    free_rank: int
    relations: list
    label: str = ""
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        for r in self.relations:
            if r.rank != self.free_rank or r.ring != self.ring:
                raise ValueError("relation does not match the presentation")
        self.relations = [r for r in self.relations if not r.is_zero()]

    def ordering(self, scope: str = "auto") -> MonomialOrdering:
        """Weighted global ordering when the relations are homogeneous
        (local and global colengths agree then). Otherwise "auto" and
        "local" fall back to the local ordering, "affine" to degrevlex over
        the whole affine space; "global" always means plain degrevlex."""
        if scope == "global":
            return MonomialOrdering("global")
        if scope not in ("auto", "local", "affine"):
            raise ValueError(f"unknown scope {scope!r}")
        hom = find_module_weights(self.relations) if self.relations else None
        if hom is not None:
            return MonomialOrdering("global", hom[0], shifts=hom[1])
        return MonomialOrdering("global") if scope == "affine" else MonomialOrdering("local")

    def basis(self, scope: str = "auto", budget: float | None = None) -> StandardBasis | None:
        if not self.relations:
            return None
        key = ("basis", scope)
        if key not in self._cache:
            self._cache[key] = buchberger(self.relations, self.ordering(scope), rank=self.free_rank, budget=budget)
        return self._cache[key]

    def colength(self, scope: str = "auto", budget: float | None = None):
        """dim_C of the quotient (localized at 0 unless scope is global)."""
        if self.free_rank == 0:
            return 0
        gb = self.basis(scope, budget)
        if gb is None:
            return self.free_rank if self.ring.nvars == 0 else INFINITE
        return _finite(gb.colength())

    def krull_dimension(self, budget: float | None = None, scope: str = "affine") -> int:
        """Dimension of the support; -1 for the zero module.

        The default affine scope measures the whole support (equal to the
        local dimension at 0 for homogeneous relations)."""
        if self.free_rank == 0:
            return -1
        gb = self.basis(scope, budget)
        if gb is None:
            return self.ring.nvars
        return gb.krull_dimension()

    def specialize(self, var: str, value) -> QuotientPresentation:
        rest = Ring(tuple(v for v in self.ring.variables if v != var))
        if len(rest.variables) == self.ring.nvars:
            raise GermError(f"{var!r} is not a variable of the presentation")
        images = {v: rest.gen(v) for v in rest.variables}
        images[var] = rest.const(as_rational(value))
        rels = [PolyVector([c.subs(images, rest) for c in r], rest) for r in self.relations]
        return QuotientPresentation(rest, self.free_rank, rels, label=f"{self.label}|{var}={value}")

    def fitting_ideal(self) -> list:
        from .geometry import fitting_ideal

        return fitting_ideal(self.free_rank, minimal_generators(self.relations), self.ring)


# ---------------------------------------------------------------------------
# K_V normal spaces and codimensions


def _tangent_column(gamma: CurveGerm, ring: Ring) -> PolyVector:
    return PolyVector([c.diff(gamma.variable).to_ring(ring) for c in gamma.components], ring)


def normal_space_kv(F: Unfolding, gamma: CurveGerm | None = None, mode: str = "V",
                    budget: float | None = None) -> QuotientPresentation:
    """N K_{V,e} of the inclusion (gamma None) or of Y -> (Y, gamma(w))."""
    if F.d == 0:
        return QuotientPresentation(Ring(F.base.targets()), 0, [], label=f"NKV({F.label})")
    V = image_equation(F.full_map(), budget)
    M = derlog(V, mode, budget)
    params = F.parameter_targets()
    T = trho_components(M, params)
    P = pullback(T, gamma, params)
    rels = list(P.generators)
    if gamma is not None:
        rels.append(_tangent_column(gamma, P.ring))
    label = f"NKV({F.label}{', ' + str(gamma) if gamma else ''})"
    return QuotientPresentation(P.ring, F.d, rels, label=label)


def ae_codim(f: MapGerm, F: Unfolding, mode: str = "V", budget: float | None = None):
    """A_e-codimension of f, read off a stable unfolding F of f."""
    if not is_unfolding_of(F, f):
        raise GermError(f"{F.label or 'F'} is not an unfolding of {f.label or 'f'}")
    return normal_space_kv(F, None, mode, budget).colength(budget=budget)


def ae_codim_augmentation(F: Unfolding, gamma: CurveGerm, mode: str = "V", budget: float | None = None):
    return normal_space_kv(F, gamma, mode, budget).colength(budget=budget)


@dataclass
class FinitenessReport:
    finite: bool
    method: str
    detail: str = ""

    def __bool__(self):
        return self.finite


def curve_discriminant_test(F: Unfolding, gamma: CurveGerm, local_only: bool = False,
                            budget: float | None = None) -> FinitenessReport:
    """Does gamma meet D_V(G) at the origin only? Decided on the pulled-back module.

    The support of t rho(Der(-log V)) restricted to U = gamma(w) projects onto
    gamma^{-1}(D_V(G)); it lies over w = 0 iff the restricted module has finite
    colength and w acts nilpotently on it.
    """
    if gamma.is_constant():
        raise GermError("curve germ is constant")
    V = image_equation(F.full_map(), budget)
    params = F.parameter_targets()
    T = trho_components(derlog(V, "V", budget), params)
    P = pullback(T, gamma, params)
    Q = QuotientPresentation(P.ring, F.d, list(P.generators))
    scope = "local" if local_only else "affine"
    n = Q.colength(scope, budget)
    if n == INFINITE:
        return FinitenessReport(False, "curve", "restricted module has infinite colength")
    gb = Q.basis(scope, budget)
    if gb is None:
        return FinitenessReport(True, "curve", "restricted module is zero")
    if gb.ordering.weights is not None or local_only:
        # conic support (or a local question): finite length means support {0}
        return FinitenessReport(True, "curve", f"restricted colength {n}")
    w = P.ring.gen(gamma.variable) ** max(n, 1)
    for i in range(F.d):
        e = PolyVector([w if j == i else P.ring.zero() for j in range(F.d)], P.ring)
        if not gb.contains(e):
            return FinitenessReport(False, "curve", "support has points with w != 0")
    return FinitenessReport(True, "curve", f"restricted colength {n}, w nilpotent")


def curve_slice(gamma: CurveGerm, params: Sequence[str]):
    """Smallest slice of parameter space spanned by coordinate and
    proportionality relations that contains the image of gamma.

    Returns (restriction, reduced curve): identically zero components are
    pinned to 0 and a component that is a constant multiple of an earlier
    one is tied to it.
    """
    restriction: dict = {}
    kept: list = []
    comps: list = []
    for u, c in zip(params, gamma.components):
        if c.is_zero():
            restriction[u] = "0"
            continue
        for v, d in zip(kept, comps):
            lead = next(iter(d.terms))
            if lead in c.terms:
                ratio = c.terms[lead] / d.terms[lead]
                if c == d * ratio:
                    restriction[u] = str(Ring((v,)).gen(v) * ratio)
                    break
        else:
            kept.append(u)
            comps.append(c)
    return restriction, CurveGerm(gamma.variable, tuple(comps))


def augmentation_finite(F: Unfolding, gamma: CurveGerm, method: str = "discriminant", local_only: bool = False,
                        budget: float | None = None) -> FinitenessReport:
    """Sufficient criterion for A-finiteness of the augmentation A_{F,gamma}(f).

    "discriminant" computes D_V(G) on the slice of parameter space carrying
    gamma and substitutes the curve; "curve" works on the restricted module.
    """
    if gamma.is_constant():
        raise GermError("curve germ is constant")
    if gamma.dim != F.d:
        raise GermError(f"curve has {gamma.dim} components for {F.d} parameters")
    if method == "discriminant":
        restriction, reduced = curve_slice(gamma, F.parameter_targets())
        D = kv_discriminant_identity(F, budget, restrict=restriction)
        ok = curve_meets_only_origin(reduced, D, local_only=local_only)
        where = ", ".join(f"{k}={v}" for k, v in restriction.items())
        return FinitenessReport(ok, "discriminant", f"D_V(G) on slice [{where}] = {D}")
    if method != "curve":
        raise ValueError(f"unknown method {method!r}")
    return curve_discriminant_test(F, gamma, local_only, budget)


# ---------------------------------------------------------------------------
# relative normal spaces and the Cohen-Macaulay test


def relative_normal_space(F: Unfolding, gamma: CurveGerm | None, deformation: Sequence | None,
                          deform_var: str = "v", mode: str = "H",
                          budget: float | None = None) -> QuotientPresentation:
    """Relative normal space of G(Y, w, v) = (Y, gamma(w) + alpha(Y, v)).

    With neither gamma nor a deformation this is O^d / t rho(Der(-log V)) over
    (Y, U), the module whose support defines D_V(G) for G the identity.
    """
    V = image_equation(F.full_map(), budget)
    M = derlog(V, mode, budget)
    params = list(F.parameter_targets())
    ys = [v for v in M.ring.variables if v not in params]
    if gamma is None and deformation is None:
        T = trho_components(M, params)
        return QuotientPresentation(T.ring, F.d, T.generators, label=f"NKV/C^d({F.label})")
    names = list(ys)
    if gamma is not None:
        if gamma.dim != F.d:
            raise GermError("curve arity does not match the unfolding")
        names.append(gamma.variable)
    if deformation is not None:
        names.append(deform_var)
    if len(set(names)) != len(names):
        raise GermError("variable names of the deformation clash")
    ring = Ring(tuple(names))
    if deformation is None:
        alpha = [ring.zero()] * F.d
    else:
        if len(deformation) != F.d:
            raise GermError(f"deformation needs {F.d} components")
        alpha = [a if isinstance(a, Polynomial) and a.ring == ring else
                 (ring.parse(a) if isinstance(a, str) else a.to_ring(ring)) for a in deformation]
        at0 = {deform_var: 0}
        for a in alpha:
            if not a.evaluate(at0).is_zero():
                raise GermError("deformation must vanish at v = 0")
            if gamma is not None and a.degree(gamma.variable) > 0:
                raise GermError("deformation may not depend on the curve variable")
    base = [g.to_ring(ring) for g in gamma.components] if gamma is not None else [ring.zero()] * F.d
    images = {y: ring.gen(y) for y in ys}
    for u, b, a in zip(params, base, alpha):
        images[u] = b + a
    dalpha = [[a.diff(y) for a in alpha] for y in ys]
    pidx = [M.ring.index(u) for u in params]
    yidx = [M.ring.index(y) for y in ys]
    rels = []
    for xi in M.generators:
        pulled = {i: xi[i].subs(images, ring) for i in pidx + yidx}
        comps = []
        for j, i in enumerate(pidx):
            c = pulled[i]
            for k, yi in enumerate(yidx):
                if not dalpha[k][j].is_zero() and not pulled[yi].is_zero():
                    c = c - pulled[yi] * dalpha[k][j]
            comps.append(c)
        rels.append(PolyVector(comps, ring))
    if gamma is not None:
        rels.append(_tangent_column(gamma, ring))
    return QuotientPresentation(ring, F.d, rels, label=f"NKH/C({F.label})")


@dataclass
class CMReport:
    is_cm: bool
    dimension: int
    fiber_lengths: dict
    seed: int
    reason: str = ""

    def __bool__(self):
        return self.is_cm


def _random_values(seed: int, count: int, max_den: int = 7, max_num: int = 7):
    rng = random.Random(seed)
    seen = set()
    while len(seen) < count:
        num = rng.randint(1, max_num) * rng.choice((-1, 1))
        den = rng.randint(1, max_den)
        v = Fraction(num, den)
        if v not in seen:
            seen.add(v)
            yield v


class NotFiniteOverLine(ValueError):
    """A fiber of the module over the parameter line has infinite length."""


def is_cm_dim1(P: QuotientPresentation, t: str, seed: int = 0, samples: int = 2,
               budget: float | None = None) -> CMReport:
    """Cohen-Macaulay of dimension 1, certified by constant fiber length over t."""
    log.info("cm-test seed %d", seed)
    dim = P.krull_dimension(budget)
    if dim != 1:
        return CMReport(False, dim, {}, seed, f"support has dimension {dim}")
    lengths = {}
    n0 = P.specialize(t, 0).colength("affine", budget)
    if n0 == INFINITE:
        raise NotFiniteOverLine("special fiber has infinite length")
    lengths[Fraction(0)] = n0
    tries = 0
    got = 0
    for c in _random_values(seed, samples + 6):
        if got == samples:
            break
        tries += 1
        n = P.specialize(t, c).colength("global", budget)
        if n == INFINITE:
            continue  # degenerate specialization, draw again
        lengths[c] = n
        got += 1
    if got < samples:
        raise NotFiniteOverLine("generic fibers have infinite length")
    ok = len(set(lengths.values())) == 1
    return CMReport(ok, dim, lengths, seed, "" if ok else "fiber length jumps")


# ---------------------------------------------------------------------------
# double points of surface germs


def _primed(name: str, taken) -> str:
    cand = name + "_"
    while cand in taken:
        cand += "_"
    return cand


def double_point_ideal(f: MapGerm, budget: float | None = None) -> list:
    """(f(x) - f(x')) : (x - x') in the doubled source."""
    if f.source_dim != 2 or f.target_dim != 3:
        raise GermError("double_point_ideal needs a germ C^2 -> C^3")
    names = list(f.ring.variables)
    primes = []
    for v in names:
        primes.append(_primed(v, set(names) | set(primes)))
    ring = Ring(tuple(names) + tuple(primes))
    second = {v: ring.gen(p) for v, p in zip(names, primes)}
    first = {v: ring.gen(v) for v in names}
    diffs = [c.subs(first, ring) - c.subs(second, ring) for c in f.components]
    diag = [ring.gen(v) - ring.gen(p) for v, p in zip(names, primes)]
    return ideal_quotient(diffs, diag, budget)


@dataclass
class DoublePointReport:
    determined: bool
    dimension: int
    colength: object = None
    generators: list = field(default_factory=list)
    note: str = ""

    def __bool__(self):
        return self.determined


def _ideal_ordering(gens, affine: bool = False):
    w = find_weights(gens)
    if w:
        return MonomialOrdering("global", w)
    return MonomialOrdering("global") if affine else MonomialOrdering("local")


def is_finitely_determined_2_3(f: MapGerm, budget: float | None = None) -> DoublePointReport:
    """D^2 is a curve (or less) with at most an isolated singularity at 0."""
    I = [g for g in double_point_ideal(f, budget) if not g.is_zero()]
    if not I:
        return DoublePointReport(False, 4, note="double point ideal is zero")
    if any(g.is_constant() for g in I):
        return DoublePointReport(True, -1, 0, I, "no double points")
    ring = I[0].ring
    # affine answers bound the local ones, and avoid Mora whenever they suffice
    gb = buchberger(I, _ideal_ordering(I, affine=True), budget=budget)
    dim = gb.krull_dimension()
    if dim > 1 and gb.ordering.weights is None:
        gb = buchberger(I, _ideal_ordering(I), budget=budget)
        dim = gb.krull_dimension()
    if dim > 1:
        return DoublePointReport(False, dim, None, I, "double point set has dimension > 1")
    if dim <= 0:
        return DoublePointReport(True, dim, gb.colength(), I, "double point set is finite")
    codim = ring.nvars - dim
    gens = minimal_generators([PolyVector([g], ring) for g in I])
    gens = [v[0] for v in gens]
    jac = [[g.diff(v) for v in ring.variables] for g in gens]
    minors = []
    for rows in itertools.combinations(range(len(gens)), codim):
        for cols in itertools.combinations(range(ring.nvars), codim):
            d = _det([[jac[r][c] for c in cols] for r in rows], ring)
            if not d.is_zero():
                minors.append(d)
    J = gens + minors
    sing = buchberger(J, _ideal_ordering(J, affine=True), budget=budget)
    n = _finite(sing.colength())
    if n == INFINITE and sing.ordering.weights is None:
        sing = buchberger(J, _ideal_ordering(J), budget=budget)
        n = _finite(sing.colength())
    note = "" if len(gens) == codim else "D^2 is not a complete intersection; the test is conservative"
    return DoublePointReport(n != INFINITE, dim, n, gens, note)


# ---------------------------------------------------------------------------
# quadruple lines


@dataclass
class QuadrupleLineWitness:
    exists: bool
    alpha: Rational | None
    note: str = ""

    def __bool__(self):
        return self.exists


def _divisors(n: int):
    n = abs(n)
    small = [d for d in range(1, math.isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def _rational_roots(coeffs: dict) -> list:
    """Nonzero rational roots of sum c_k a^k (integer-izable coefficients)."""
    den = 1
    for c in coeffs.values():
        den = den * int(c.denominator) // math.gcd(den, int(c.denominator))
    ints = {k: int(c * den) for k, c in coeffs.items() if c}
    low, high = min(ints), max(ints)
    a0, an = ints[low], ints[high]
    roots = []
    for p in _divisors(a0):
        for q in _divisors(an):
            for s in (1, -1):
                r = Fraction(s * p, q)
                val = sum(Fraction(c) * r ** (k - low) for k, c in ints.items())
                if val == 0 and r not in roots:
                    roots.append(r)
    return sorted(roots, key=lambda r: (abs(r), r < 0))


def quadruple_line_witness(P: Polynomial, names: Sequence[str] = ("x", "y", "z")) -> QuadrupleLineWitness:
    """alpha != 0 with P(0,t,alpha t) = P(0,t,-alpha t), or none."""
    ring = P.ring
    ix, iy, iz = (ring.index(v) for v in names)
    deg, hom = weighted_degree(P, [1] * ring.nvars)
    if P.is_zero() or not hom or deg % 2:
        raise ValueError("P must be homogeneous of even degree")
    if deg < 4:
        raise ValueError("quadruple line analysis needs degree 2d with d >= 2")
    odd = {}
    for e, c in P.terms.items():
        if e[ix] == 0 and e[iz] % 2 == 1:
            odd[e[iz]] = odd.get(e[iz], 0) + 2 * Fraction(int(c.numerator), int(c.denominator))
    odd = {k: c for k, c in odd.items() if c}
    if not odd:
        return QuadrupleLineWitness(True, as_rational(1), "odd part vanishes; any alpha works")
    if len(odd) == 1:
        return QuadrupleLineWitness(False, None, "odd part is a monomial; only alpha = 0")
    roots = _rational_roots(odd)
    if roots:
        r = roots[0]
        return QuadrupleLineWitness(True, as_rational(r), "rational witness")
    return QuadrupleLineWitness(True, None, "exists over C, no rational witness")


def assemble_quadruple_germ(P: Polynomial, a=1, b=1) -> MapGerm:
    """(x, y^2 + a xz, z^2 + b xy, P) for the quadruple line check."""
    ring = P.ring
    x, y, z = (ring.gen(v) for v in ("x", "y", "z"))
    comps = (x, y ** 2 + x * z * a, z ** 2 + x * y * b, P)
    return MapGerm(ring, comps, label="h")


def four_point_identity(h: MapGerm, alpha) -> bool:
    """h(0,t,at) = h(0,t,-at) = h(0,-t,-at) = h(0,-t,at) symbolically in t."""
    line = Ring(("t",))
    t = line.gen("t")
    a = as_rational(alpha)
    pts = [(t, t * a), (t, -(t * a)), (-t, -(t * a)), (-t, t * a)]
    images = []
    for yy, zz in pts:
        sub = {"x": line.zero(), "y": yy, "z": zz}
        images.append(tuple(c.subs(sub, line) for c in h.components))
    return all(im == images[0] for im in images)
