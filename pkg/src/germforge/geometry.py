"""Images of finite germs, logarithmic vector fields and the K_V-discriminant."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Sequence

from .exactpoly import Polynomial, Ring, find_weights, gcd, squarefree_part
from .germs import CurveGerm, GermError, MapGerm, Unfolding, multiplicity
from .standard_basis import (
    MonomialOrdering,
    PolyVector,
    _drop,
    buchberger,
    eliminate,
    find_module_weights,
    ideal_intersection,
    syzygy_module,
)

log = logging.getLogger(__name__)


class ImageError(ValueError):
    """The image of a germ is not a reduced hypersurface we can compute."""


@dataclass(frozen=True)
class Hypersurface:
    equation: Polynomial

    def __post_init__(self):
        if self.equation.constant_term():
            raise ImageError("hypersurface does not pass through the origin")

    @property
    def ambient(self) -> Ring:
        return self.equation.ring

    def __str__(self):
        return str(self.equation)


@dataclass
class VectorFieldModule:
    """Submodule of the free module ring^rank, given by generators."""

    ring: Ring
    rank: int
    generators: list
    kind: str = ""

    def __post_init__(self):
        for g in self.generators:
            if g.rank != self.rank or g.ring != self.ring:
                raise ValueError("vector field generator does not match the module")

    def __len__(self):
        return len(self.generators)

    def nonzero(self) -> list:
        return [g for g in self.generators if not g.is_zero()]

    def basis(self, ordering: MonomialOrdering | None = None):
        gens = self.nonzero()
        if not gens:
            return None
        if ordering is None:
            hom = find_module_weights(gens)
            ordering = MonomialOrdering("global", hom[0], shifts=hom[1]) if hom else MonomialOrdering("global")
        return buchberger(gens, ordering)

    def contains(self, v: PolyVector) -> bool:
        gb = self.basis()
        if gb is None:
            return v.is_zero()
        return gb.contains(v)

    def apply(self, H: Polynomial) -> list:
        """xi(H) for every generator xi."""
        names = self.ring.variables
        parts = [H.diff(v) for v in names[: self.rank]]
        out = []
        for g in self.generators:
            acc = self.ring.zero()
            for c, dh in zip(g, parts):
                if not c.is_zero():
                    acc = acc + c * dh
            out.append(acc)
        return out


# ---------------------------------------------------------------------------
# image equations


def _identity_components(f: MapGerm):
    """(component index, source variable) pairs where f_i is a bare coordinate."""
    used = set()
    pairs = []
    for i, c in enumerate(f.components):
        if len(c.terms) != 1:
            continue
        (e, a), = c.terms.items()
        if a != 1 or sum(e) != 1:
            continue
        var = f.ring.variables[e.index(1)]
        if var in used:
            continue
        used.add(var)
        pairs.append((i, var))
    return pairs


def image_equation(f: MapGerm, budget: float | None = None, check_finite: bool = True) -> Hypersurface:
    """Reduced equation of the image of a finite germ C^n -> C^{n+1}."""
    n, p = f.source_dim, f.target_dim
    if p != n + 1:
        raise ImageError(f"image_equation needs target dimension n+1, got {n} -> {p}")
    targets = f.targets()
    clash = set(targets) & set(f.ring.variables)
    if clash:
        raise ImageError(f"target names clash with source variables: {sorted(clash)}")
    if check_finite and multiplicity(f) == float("inf"):
        raise ImageError(f"{f.label or 'germ'} is not finite (infinite multiplicity)")

    # coordinates that appear verbatim are substituted rather than eliminated
    ident = _identity_components(f)
    subst = {var: targets[i] for i, var in ident}
    keep_src = [v for v in f.ring.variables if v not in subst]
    ring = Ring(tuple(keep_src) + tuple(targets))
    images = {v: ring.gen(y) for v, y in subst.items()}
    ident_idx = {i for i, _ in ident}
    gens = []
    for i, c in enumerate(f.components):
        if i in ident_idx:
            continue
        gens.append(ring.gen(targets[i]) - c.subs(images, ring))
    target_ring = Ring(tuple(targets))
    if keep_src:
        elim = eliminate(gens, keep_src, budget)
    else:
        elim = gens
    elim = [_drop(q, target_ring) for q in elim if not q.is_zero()]
    if not elim:
        raise ImageError("image is not a hypersurface (elimination ideal is zero)")
    if len(elim) > 1:
        w = find_weights(elim)
        gb = buchberger(elim, MonomialOrdering("global", w) if w else None)
        elim = gb.polynomials
        if len(elim) > 1:
            raise ImageError(f"elimination ideal is not principal ({len(elim)} generators)")
    H = squarefree_part(elim[0]).monic()
    return Hypersurface(H)


# ---------------------------------------------------------------------------
# logarithmic vector fields

_DERLOG_CACHE: dict = {}


def derlog(V: Hypersurface | Polynomial, mode: str = "V", budget: float | None = None) -> VectorFieldModule:
    """Der(-log V) (mode "V") or the fields annihilating H (mode "H")."""
    H = V.equation if isinstance(V, Hypersurface) else V
    if mode not in ("V", "H"):
        raise ValueError("mode must be 'V' or 'H'")
    key = (H.ring.variables, str(H), mode)
    hit = _DERLOG_CACHE.get(key)
    if hit is not None:
        return hit
    ring = H.ring
    p = ring.nvars
    partials = [H.diff(v) for v in ring.variables]
    if all(d.is_zero() for d in partials):
        raise ValueError("constant hypersurface equation")
    if mode == "V":
        syz = syzygy_module(partials + [H], budget)
        gens = [PolyVector(list(s)[:p], ring) for s in syz]
    else:
        syz = syzygy_module(partials, budget)
        gens = list(syz)
    gens = [g for g in gens if not g.is_zero()]
    mod = VectorFieldModule(ring, p, gens, kind=f"derlog-{mode}")
    _DERLOG_CACHE[key] = mod
    return mod


def euler_field(H: Polynomial, weights: Sequence[int] | None = None) -> PolyVector | None:
    w = weights or find_weights([H])
    if w is None:
        return None
    ring = H.ring
    return PolyVector([ring.gen(v) * wi for v, wi in zip(ring.variables, w)], ring)


def trho_components(M: VectorFieldModule, params: Sequence[str]) -> VectorFieldModule:
    """Keep the components belonging to the parameter coordinates."""
    idx = [M.ring.index(u) for u in params]
    gens = [PolyVector([g[i] for i in idx], M.ring) for g in M.generators] if idx else []
    return VectorFieldModule(M.ring, len(idx), gens, kind="trho")


def pullback(M: VectorFieldModule, gamma: CurveGerm | None, params: Sequence[str]) -> VectorFieldModule:
    """Substitute U_j -> gamma_j(w) (or 0 when gamma is None) in every generator."""
    params = list(params)
    rest = [v for v in M.ring.variables if v not in params]
    if gamma is None:
        target = Ring(tuple(rest))
        images = {u: target.zero() for u in params}
    else:
        if gamma.dim != len(params):
            raise GermError(f"curve has {gamma.dim} components for {len(params)} parameters")
        if gamma.variable in rest:
            raise GermError(f"curve variable {gamma.variable!r} clashes with the ambient ring")
        target = Ring(tuple(rest) + (gamma.variable,))
        images = {u: g.to_ring(target) for u, g in zip(params, gamma.components)}
    for v in rest:
        images[v] = target.gen(v)
    gens = []
    for g in M.generators:
        gens.append(PolyVector([c.subs(images, target) for c in g], target))
    return VectorFieldModule(target, M.rank, gens, kind=M.kind + "*")


# ---------------------------------------------------------------------------
# minimal generators and Fitting ideals


def minimal_generators(gens: list) -> list:
    """Drop generators lying in the span of the others.

    For homogeneous input generators are scanned by increasing degree, which
    yields a minimal system; otherwise the result is merely irredundant-ish.
    """
    gens = [g for g in gens if not g.is_zero()]
    if len(gens) <= 1:
        return gens
    hom = find_module_weights(gens)
    if hom is not None:
        w, sh = hom
        def deg(v):
            t = next(iter(v.to_terms()))
            return sum(a * b for a, b in zip(w, t[:-1])) + sh[t[-1]]
        order = sorted(range(len(gens)), key=lambda i: (deg(gens[i]), i))
        ordering = MonomialOrdering("global", w, shifts=sh)
    else:
        order = list(range(len(gens)))
        ordering = MonomialOrdering("global")
    kept: list = []
    gb = None
    for i in order:
        g = gens[i]
        if gb is not None and gb.contains(g):
            continue
        kept.append(g)
        gb = buchberger(kept, ordering)
    return kept


def _det(m: list, ring: Ring) -> Polynomial:
    k = len(m)
    if k == 1:
        return m[0][0]
    if k == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    total = ring.zero()
    for j in range(k):
        if m[0][j].is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * _det(minor, ring)
        total = total + term if j % 2 == 0 else total - term
    return total


def fitting_ideal(rank: int, relations: list, ring: Ring) -> list:
    """Zeroth Fitting ideal of ring^rank / (relations): the rank x rank minors."""
    rels = [r for r in relations if not r.is_zero()]
    if rank == 0:
        return [ring.one()]
    if len(rels) < rank:
        return [ring.zero()]
    out = []
    seen = set()
    for cols in itertools.combinations(range(len(rels)), rank):
        m = [[rels[c][i] for c in cols] for i in range(rank)]
        d = _det(m, ring)
        if d.is_zero():
            continue
        d = d.monic()
        if d not in seen:
            seen.add(d)
            out.append(d)
    return out or [ring.zero()]


def annihilator_components(rank: int, relations: list, ring: Ring, budget: float | None = None) -> list:
    """The ideals (N : e_i) for the submodule N spanned by ``relations``.

    Their intersection is the annihilator of ring^rank / N, so the union of
    their zero sets is the support. Each one is read off a position-over-term
    basis with e_i as the least significant position.
    """
    rels = [r for r in relations if not r.is_zero()]
    if rank == 0:
        return []
    if not rels:
        return [[ring.zero()] for _ in range(rank)]
    hom = find_module_weights(rels)
    w, sh = hom if hom is not None else (ring.weights, None)
    out = []
    for i in range(rank):
        pot = tuple(j for j in range(rank) if j != i) + (i,)
        gb = buchberger(rels, MonomialOrdering("global", w, shifts=sh, pot=pot), budget=budget)
        ideal = [g[i] for g in gb.generators
                 if not g[i].is_zero() and all(g[j].is_zero() for j in range(rank) if j != i)]
        out.append(ideal or [ring.zero()])
    return out


def _project(ideal: list, drop: Sequence[str], target: Ring, budget: float | None) -> list:
    """Eliminate ``drop`` one variable at a time (last first) and land in ``target``."""
    cur = [g for g in ideal if not g.is_zero()]
    if not cur:
        return [target.zero()]
    for v in reversed(list(drop)):
        if any(g.is_constant() for g in cur):
            return [target.one()]
        cur = eliminate(cur, [v], budget)
        if not cur:
            return [target.zero()]
    return [_drop(g, target) for g in cur]


@dataclass
class Discriminant:
    """K_V-discriminant of the identity, as an ideal in the parameters.

    ``restriction`` records parameter substitutions made before projecting;
    the ideal then lives in the remaining parameters and cuts out the
    discriminant intersected with that linear slice.
    """

    ring: Ring
    generators: list
    restriction: tuple = ()

    @property
    def is_empty(self) -> bool:
        return any(g.is_constant() and not g.is_zero() for g in self.generators)

    @property
    def is_everything(self) -> bool:
        return all(g.is_zero() for g in self.generators)

    def __str__(self):
        return "(" + ", ".join(str(g) for g in self.generators) + ")"


_DISC_CACHE: dict = {}


def kv_discriminant_identity(F: Unfolding, budget: float | None = None,
                             restrict: dict | None = None, method: str = "annihilator") -> Discriminant:
    """Projection to parameter space of the support of O^d / t rho(Der(-log V)).

    ``restrict`` maps some parameter targets to polynomials (given as text or
    Polynomial) in the remaining ones. Support commutes with base change, so
    the answer is the discriminant cut by that slice; this is often far
    cheaper than the full elimination.

    ``method`` picks the support ideal: "annihilator" (default, via module
    quotients) or "fitting" (maximal minors).
    """
    if method not in ("annihilator", "fitting"):
        raise ValueError(f"unknown method {method!r}")
    full = F.full_map()
    ptargets = list(F.parameter_targets())
    restrict = dict(restrict or {})
    unknown = set(restrict) - set(ptargets)
    if unknown:
        raise GermError(f"cannot restrict non-parameters {sorted(unknown)}")
    kept = [u for u in ptargets if u not in restrict]
    pring = Ring(tuple(kept))
    if F.d == 0:
        return Discriminant(pring, [])
    rkey = tuple(sorted((k, str(v)) for k, v in restrict.items()))
    key = (tuple(str(c) for c in full.components), full.ring.variables, full.targets(), rkey, method)
    hit = _DISC_CACHE.get(key)
    if hit is not None:
        return hit
    V = image_equation(full, budget)
    M = derlog(V, "V", budget)
    T = trho_components(M, ptargets)
    ring = T.ring
    rels = T.nonzero()
    if restrict:
        small = Ring(tuple(v for v in ring.variables if v not in restrict))
        images = {v: small.gen(v) for v in small.variables}
        for u, val in restrict.items():
            val = pring.parse(val) if isinstance(val, str) else val
            images[u] = val.to_ring(small) if val.ring != small else val
        rels = [PolyVector([c.subs(images, small) for c in r], small) for r in rels]
        ring = small
    rels = minimal_generators(rels)
    others = [v for v in ring.variables if v not in kept]
    if method == "fitting":
        pieces = [fitting_ideal(T.rank, rels, ring)]
    else:
        pieces = annihilator_components(T.rank, rels, ring, budget)
    projected = [_project(p, others, pring, budget) for p in pieces]
    if any(all(g.is_zero() for g in p) for p in projected):
        gens = [pring.zero()]
    else:
        live = [p for p in projected if not any(g.is_constant() for g in p)]
        if not live:
            gens = [pring.one()]
        else:
            gens = ideal_intersection(live, budget) if len(live) > 1 else live[0]
            w = find_weights(gens)
            if len(gens) > 1:
                gens = buchberger(gens, MonomialOrdering("global", w) if w else None).polynomials
            if len(gens) == 1:
                gens = [squarefree_part(gens[0])]
            gens = [g.monic() for g in gens]
    out = Discriminant(pring, gens, rkey)
    _DISC_CACHE[key] = out
    return out


def curve_meets_only_origin(gamma: CurveGerm, ideal, local_only: bool = False) -> bool:
    """Does the image of gamma meet V(ideal) at the origin only?

    With ``local_only`` the germ question is answered: any nonzero pullback
    suffices. Otherwise the whole affine representative is tested.
    """
    if gamma.is_constant():
        raise GermError("curve germ is constant")
    gens = ideal.generators if isinstance(ideal, Discriminant) else list(ideal)
    if not gens:
        return False
    ring = gens[0].ring
    if ring.nvars != gamma.dim:
        raise GermError(f"ideal has {ring.nvars} variables, curve has {gamma.dim} components")
    line = gamma.ring
    images = dict(zip(ring.variables, (c.to_ring(line) for c in gamma.components)))
    qs = [g.subs(images, line) for g in gens]
    qs = [q for q in qs if not q.is_zero()]
    if not qs:
        return False
    if local_only:
        return True
    g = qs[0]
    for q in qs[1:]:
        g = gcd(g, q)
    # common zeros are roots of g; only the origin is allowed
    return len(g.terms) == 1
