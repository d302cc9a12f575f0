"""Standard bases for submodules of free modules over Q[x].

Global orderings use Buchberger's algorithm with the Gebauer-Moeller
criteria and full reduction; local orderings (``1 > x_i``) use Mora's
weak normal form with ecart. Internally a module element is a ``dict``
mapping a *term* to an ``mpq`` coefficient, where a term is the exponent
tuple with the component index appended: ``(e_0, ..., e_{n-1}, pos)``.
"""

from __future__ import annotations

import heapq
import itertools
import logging
import time
from dataclasses import dataclass, field
from operator import add, sub
from typing import Iterable, Sequence

from gmpy2 import mpq

from fractions import Fraction

from .exactpoly import (
    ContextError,
    Polynomial,
    Ring,
    _nullspace,
    as_rational,
    find_weights,
    integer_kernel_point,
    weighted_degree,
)

log = logging.getLogger(__name__)

_ZERO = mpq(0)
_ONE = mpq(1)


class BudgetExceeded(RuntimeError):
    """A standard-basis computation ran past its time budget."""


# ---------------------------------------------------------------------------
# orderings


@dataclass(frozen=True)
class MonomialOrdering:
    """Monomial ordering extended to module terms.

    ``kind`` is ``"global"`` (weighted degrevlex), ``"local"`` (negative
    weighted degrevlex) or ``"elim"`` (variables in ``block`` first, by their
    weighted degree, then weighted degrevlex). Module terms are compared
    term-over-position with lower component index winning ties; ``shifts``
    adds a degree offset per component. ``tag_from = r`` makes components
    ``>= r`` smaller than the first r ones: after the degree when
    ``tag_by_degree`` is set (valid for homogeneous input only), otherwise
    before anything else. ``pot`` switches to position-over-term, listing
    the components from the most to the least significant.
    """

    kind: str = "global"
    weights: tuple | None = None
    block: tuple = ()
    shifts: tuple | None = None
    tag_from: int | None = None
    tag_by_degree: bool = False
    pot: tuple | None = None

    def __post_init__(self):
        if self.kind not in ("global", "local", "elim"):
            raise ValueError(f"unknown ordering kind {self.kind!r}")
        if self.weights is not None:
            object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
            if any(w < 1 for w in self.weights):
                raise ValueError("ordering weights must be positive")
        object.__setattr__(self, "block", tuple(self.block))
        if self.shifts is not None:
            object.__setattr__(self, "shifts", tuple(int(s) for s in self.shifts))
        if self.pot is not None:
            object.__setattr__(self, "pot", tuple(int(p) for p in self.pot))

    @property
    def is_local(self) -> bool:
        return self.kind == "local"

    def describe(self) -> str:
        parts = [self.kind]
        if self.weights:
            parts.append("w=" + ",".join(map(str, self.weights)))
        if self.block:
            parts.append("block=" + ",".join(map(str, self.block)))
        if self.shifts:
            parts.append("shifts=" + ",".join(map(str, self.shifts)))
        if self.tag_from is not None:
            parts.append(f"tag>={self.tag_from}{'/deg' if self.tag_by_degree else ''}")
        if self.pot is not None:
            parts.append("pot=" + ">".join(map(str, self.pot)))
        return ";".join(parts)


class _Order:
    """Compiled ordering for a fixed number of variables."""

    def __init__(self, ordering: MonomialOrdering, nvars: int):
        self.ordering = ordering
        self.n = nvars
        w = ordering.weights or (1,) * nvars
        if len(w) != nvars:
            raise ContextError(f"ordering has {len(w)} weights for {nvars} variables")
        self.w = w
        self.shifts = ordering.shifts
        self.local = ordering.is_local
        self.block = ordering.block
        self._memo: dict = {}
        self.hkey = self._build()

    def degree(self, t) -> int:
        d = 0
        for a, b in zip(self.w, t):
            d += a * b
        if self.shifts is not None:
            d += self.shifts[t[-1]]
        return d

    def _build(self):
        n, w, shifts = self.n, self.w, self.shifts
        memo = self._memo
        rev = tuple(range(n - 1, -1, -1))
        sign = 1 if self.local else -1
        tag = self.ordering.tag_from
        tag_deg = self.ordering.tag_by_degree
        block = self.block
        pot = self.ordering.pot
        prio = {p: i for i, p in enumerate(pot)} if pot is not None else None

        # hkey: ascending hkey == descending term order (heap friendly)
        def hkey(t):
            k = memo.get(t)
            if k is not None:
                return k
            d = 0
            for i in range(n):
                d += w[i] * t[i]
            pos = t[n]
            if shifts is not None:
                d += shifts[pos]
            tail = tuple(t[i] for i in rev) + (pos,)
            if prio is not None:
                k = (prio.get(pos, len(prio)), sign * d) + tail
            elif block:
                b = 0
                for i in block:
                    b += w[i] * t[i]
                k = (-b, sign * d) + tail
            elif tag is not None:
                flag = 0 if pos < tag else 1
                k = (sign * d, flag) + tail if tag_deg else (flag, sign * d) + tail
            else:
                k = (sign * d,) + tail
            memo[t] = k
            return k

        return hkey


_ORDER_CACHE: dict = {}


def _compile(ordering: MonomialOrdering, nvars: int) -> _Order:
    key = (ordering, nvars)
    o = _ORDER_CACHE.get(key)
    if o is None:
        if len(_ORDER_CACHE) > 64:
            _ORDER_CACHE.clear()
        o = _ORDER_CACHE[key] = _Order(ordering, nvars)
    return o


# ---------------------------------------------------------------------------
# module elements


class PolyVector:
    """Immutable vector of polynomials over one ring."""

    __slots__ = ("ring", "components")

    def __init__(self, components: Sequence[Polynomial], ring: Ring | None = None):
        comps = tuple(components)
        if ring is None:
            if not comps:
                raise ValueError("empty PolyVector needs an explicit ring")
            ring = comps[0].ring
        for c in comps:
            if c.ring != ring:
                raise ContextError("PolyVector components must share a ring")
        self.ring = ring
        self.components = comps

    @classmethod
    def of(cls, polys: Sequence, ring: Ring) -> PolyVector:
        return cls([p if isinstance(p, Polynomial) else ring.parse(p) if isinstance(p, str) else ring.const(p) for p in polys], ring)

    @property
    def rank(self) -> int:
        return len(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def __iter__(self):
        return iter(self.components)

    def __len__(self):
        return len(self.components)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def __add__(self, other: PolyVector) -> PolyVector:
        _check_rank(self, other)
        return PolyVector([a + b for a, b in zip(self, other)], self.ring)

    def __sub__(self, other: PolyVector) -> PolyVector:
        _check_rank(self, other)
        return PolyVector([a - b for a, b in zip(self, other)], self.ring)

    def __neg__(self):
        return PolyVector([-a for a in self], self.ring)

    def scale(self, p) -> PolyVector:
        return PolyVector([c * p for c in self], self.ring)

    __mul__ = scale
    __rmul__ = scale

    def __eq__(self, other):
        return isinstance(other, PolyVector) and self.ring == other.ring and self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def map(self, fn) -> PolyVector:
        comps = [fn(c) for c in self.components]
        return PolyVector(comps, comps[0].ring if comps else self.ring)

    def __str__(self):
        return "[" + ", ".join(str(c) for c in self.components) + "]"

    __repr__ = __str__

    def to_terms(self) -> dict:
        out = {}
        for pos, c in enumerate(self.components):
            for e, a in c.terms.items():
                out[e + (pos,)] = a
        return out

    @classmethod
    def from_terms(cls, terms: dict, ring: Ring, rank: int) -> PolyVector:
        comps = [dict() for _ in range(rank)]
        for t, a in terms.items():
            comps[t[-1]][t[:-1]] = a
        return cls([Polynomial._raw(ring, c) for c in comps], ring)


def _check_rank(a: PolyVector, b: PolyVector):
    if a.rank != b.rank:
        raise ValueError(f"rank mismatch: {a.rank} vs {b.rank}")
    if a.ring != b.ring:
        raise ContextError("PolyVector ring mismatch")


def as_vectors(gens) -> list:
    """Accept Polynomials (rank-1) or PolyVectors; return PolyVectors."""
    out = []
    for g in gens:
        if isinstance(g, Polynomial):
            out.append(PolyVector([g], g.ring))
        elif isinstance(g, PolyVector):
            out.append(g)
        else:
            raise TypeError(f"expected Polynomial or PolyVector, got {type(g).__name__}")
    return out


# ---------------------------------------------------------------------------
# low-level helpers on term dicts


def _mask(t, n):
    m = 0
    for i in range(n):
        if t[i]:
            m |= 1 << i
    return m


class _Elem:
    """A basis element: terms sorted by decreasing order, monic."""

    __slots__ = ("terms", "lt", "lmask", "sugar", "ecart", "items")

    def __init__(self, terms: dict, order: _Order, sugar=None):
        hk = order.hkey
        items = sorted(terms.items(), key=lambda kv: hk(kv[0]))
        lt, lc = items[0]
        if lc != 1:
            inv = 1 / lc
            items = [(t, c * inv) for t, c in items]
        self.items = items
        self.terms = dict(items)
        self.lt = lt
        self.lmask = _mask(lt, order.n)
        degs = [order.degree(t) for t, _ in items]
        self.ecart = max(degs) - order.degree(lt)
        self.sugar = max(degs) if sugar is None else sugar


def _divides(a, b, n) -> bool:
    if a[n] != b[n]:
        return False
    for i in range(n):
        if a[i] > b[i]:
            return False
    return True


def _lcm(a, b, n):
    return tuple(max(a[i], b[i]) for i in range(n)) + (a[n],)


def _leading(terms: dict, order: _Order):
    return min(terms, key=order.hkey)


class _Reducer:
    """Index of basis leading terms by component for divisor lookup."""

    def __init__(self, n):
        self.n = n
        self.by_pos: dict = {}

    def add(self, el: _Elem):
        self.by_pos.setdefault(el.lt[self.n], []).append(el)

    def find(self, t, tmask):
        n = self.n
        for el in self.by_pos.get(t[n], ()):
            if el.lmask & ~tmask:
                continue
            lt = el.lt
            for i in range(n):
                if lt[i] > t[i]:
                    break
            else:
                return el
        return None


def _reduce_global(p: dict, red: _Reducer, order: _Order, full=True) -> dict:
    """Normal form of p (consumed) by a global-ordering basis."""
    if not p:
        return p
    n = order.n
    hk = order.hkey
    heap = [(hk(t), t) for t in p]
    heapq.heapify(heap)
    rem = {}
    push, pop = heapq.heappush, heapq.heappop
    while heap:
        _, t = pop(heap)
        c = p.pop(t, None)
        if c is None:
            continue
        el = red.find(t, _mask(t, n))
        if el is None:
            rem[t] = c
            if not full:
                for t2, c2 in p.items():
                    rem[t2] = c2
                return rem
            continue
        m = tuple(map(sub, t, el.lt))
        items = el.items
        for i in range(1, len(items)):
            gt, gc = items[i]
            nt = tuple(map(add, gt, m))
            v = p.get(nt)
            if v is None:
                p[nt] = -c * gc
                push(heap, (hk(nt), nt))
            else:
                v -= c * gc
                if v:
                    p[nt] = v
                else:
                    del p[nt]
    return rem


def _spoly(a: _Elem, b: _Elem, n) -> dict:
    lcm = _lcm(a.lt, b.lt, n)
    ma = tuple(map(sub, lcm, a.lt))
    mb = tuple(map(sub, lcm, b.lt))
    out = {}
    for t, c in a.items[1:]:
        out[tuple(map(add, t, ma))] = c
    for t, c in b.items[1:]:
        nt = tuple(map(add, t, mb))
        v = out.get(nt, _ZERO) - c
        if v:
            out[nt] = v
        else:
            out.pop(nt, None)
    return out


def _sub_multiple(h: dict, c, m, el: _Elem):
    for t, gc in el.items:
        nt = tuple(map(add, t, m))
        v = h.get(nt, _ZERO) - c * gc
        if v:
            h[nt] = v
        else:
            h.pop(nt, None)


def _truncate(h: dict, corner: int, order: _Order) -> dict:
    return {t: c for t, c in h.items() if order.degree(t) < corner}


def _mora_reduce(h: dict, basis: list, order: _Order, extra: list | None = None,
                 deadline: float | None = None, corner: int | None = None) -> dict:
    """Mora's weak normal form (ecart strategy); ``h`` is consumed.

    With ``corner`` every term of degree >= corner is known to lie in the
    ideal and is dropped as soon as it appears."""
    n = order.n
    hk = order.hkey
    T = list(basis) if extra is None else extra
    steps = 0
    while h:
        steps += 1
        if deadline is not None and not steps % 64 and time.monotonic() > deadline:
            raise BudgetExceeded("standard basis exceeded its budget during reduction")
        if corner is not None:
            h = _truncate(h, corner, order)
            if not h:
                break
        lt = min(h, key=hk)
        tmask = _mask(lt, n)
        best = None
        for el in T:
            if el.lt[n] != lt[n] or el.lmask & ~tmask:
                continue
            if _divides(el.lt, lt, n) and (best is None or el.ecart < best.ecart):
                best = el
                if best.ecart == 0:
                    break
        if best is None:
            return h
        hd = [order.degree(t) for t in h]
        ecart_h = max(hd) - order.degree(lt)
        if best.ecart > ecart_h:
            T.append(_Elem(dict(h), order))
        c = h[lt]
        m = tuple(map(sub, lt, best.lt))
        _sub_multiple(h, c, m, best)
    return h


# ---------------------------------------------------------------------------
# Buchberger / Mora main loop


@dataclass
class _Pair:
    i: int
    j: int
    lcm: tuple
    sugar: int


def _compute_basis(gens: list, order: _Order, rank: int, budget: float | None = None,
                   degree_bound: int | None = None) -> list:
    n = order.n
    local = order.local
    start = time.monotonic()
    deadline = None if budget is None else start + budget
    polys: list = []
    active: list = []
    pairs: list = []
    red = _Reducer(n)
    ideal_case = rank == 1

    def sugar_of(i, lcm):
        el = polys[i]
        return el.sugar + order.degree(lcm) - order.degree(el.lt)

    def update(h_idx):
        nonlocal pairs, active
        h = polys[h_idx]
        hl = h.lt
        cand = []
        for g in active:
            gl = polys[g].lt
            if gl[n] != hl[n]:
                continue
            lcm = _lcm(hl, gl, n)
            cand.append((g, lcm, ideal_case and all(not (hl[k] and gl[k]) for k in range(n))))
        # chain criterion among new pairs
        keep = []
        for idx, (g, lcm, coprime) in enumerate(cand):
            if coprime:
                keep.append((g, lcm, coprime))
                continue
            dominated = False
            for idx2, (g2, lcm2, _c2) in enumerate(cand):
                if idx2 == idx:
                    continue
                if lcm2 != lcm and _divides(lcm2, lcm, n):
                    dominated = True
                    break
                if lcm2 == lcm and idx2 < idx:
                    # keep only the first of equal lcms
                    dominated = True
                    break
            if not dominated:
                keep.append((g, lcm, coprime))
        # drop pairs (g, h) whose leading monomials are coprime (product criterion)
        new_pairs = [(g, lcm) for g, lcm, coprime in keep if not coprime]
        # Gebauer-Moeller filter on old pairs
        kept_old = []
        for pr in pairs:
            if _divides(hl, pr.lcm, n):
                l1 = _lcm(polys[pr.i].lt, hl, n)
                l2 = _lcm(polys[pr.j].lt, hl, n)
                if l1 != pr.lcm and l2 != pr.lcm:
                    continue
            kept_old.append(pr)
        pairs = kept_old
        for g, lcm in new_pairs:
            s = max(sugar_of(g, lcm), sugar_of(h_idx, lcm))
            pairs.append(_Pair(g, h_idx, lcm, s))
        active = [g for g in active if not _divides(hl, polys[g].lt, n)] + [h_idx]

    def insert(terms, sugar=None):
        el = _Elem(terms, order, sugar)
        polys.append(el)
        idx = len(polys) - 1
        update(idx)
        red.add(el)
        return idx

    # highest corner: for a plain local degree ordering on an ideal, once the
    # leading monomials contain a pure power of every variable, all monomials
    # of degree >= corner lie in the ideal (Krull intersection theorem)
    corner = None
    use_corner = (local and ideal_case and not order.block and order.ordering.pot is None
                  and order.ordering.tag_from is None and order.shifts is None)

    def find_corner():
        pure = [None] * n
        for i in active:
            lt = polys[i].lt
            nz = [k for k in range(n) if lt[k]]
            if not nz:
                return None  # unit ideal, nothing to gain
            if len(nz) == 1:
                k = nz[0]
                pure[k] = lt[k] if pure[k] is None else min(pure[k], lt[k])
        if any(p is None for p in pure):
            return None
        return sum(order.w[k] * (pure[k] - 1) for k in range(n)) + 1

    def refresh_corner():
        nonlocal corner
        if not use_corner:
            return
        c = find_corner()
        if c is None or (corner is not None and c >= corner):
            return
        corner = c
        for i in active:
            el = polys[i]
            if any(order.degree(t) >= corner for t in el.terms if t != el.lt):
                tail = _truncate(el.terms, corner, order)
                tail[el.lt] = el.terms[el.lt]
                polys[i] = _Elem(tail, order, el.sugar)
        pairs[:] = [pr for pr in pairs if order.degree(pr.lcm) < corner]

    if local:
        # low-ecart inputs first: pure powers fix the corner before long reductions
        def input_key(g):
            degs = [order.degree(t) for t in g]
            return max(degs) - min(degs), min(degs)

        gens = sorted((g for g in gens if g), key=input_key)
    for g in gens:
        if not g:
            continue
        if local:
            h = _mora_reduce(dict(g), [polys[i] for i in active], order, deadline=deadline, corner=corner)
        else:
            h = _reduce_global(dict(g), red, order, full=True)
        if h:
            insert(h)
            refresh_corner()

    hk = order.hkey
    steps = 0
    while pairs:
        if budget is not None and time.monotonic() - start > budget:
            raise BudgetExceeded(f"standard basis exceeded {budget:.1f}s")
        best = min(range(len(pairs)), key=lambda k: (pairs[k].sugar, hk(pairs[k].lcm)))
        pr = pairs.pop(best)
        if degree_bound is not None and pr.sugar > degree_bound:
            continue
        if corner is not None and order.degree(pr.lcm) >= corner:
            continue
        a, b = polys[pr.i], polys[pr.j]
        s = _spoly(a, b, n)
        if local:
            h = _mora_reduce(s, [polys[i] for i in active], order, deadline=deadline, corner=corner)
        else:
            red_active = red
            h = _reduce_global(s, red_active, order, full=True)
        steps += 1
        if h:
            insert(h, sugar=pr.sugar)
            refresh_corner()
        if steps % 200 == 0:
            log.debug("basis: %d elements, %d pairs pending", len(active), len(pairs))
    basis = [polys[i] for i in active]
    return _minimize(basis, order, local)


def _minimize(basis: list, order: _Order, local: bool) -> list:
    n = order.n
    hk = order.hkey
    basis = sorted(basis, key=lambda el: hk(el.lt))
    minimal = []
    for el in reversed(basis):
        if any(_divides(o.lt, el.lt, n) for o in minimal):
            continue
        minimal = [o for o in minimal if not _divides(el.lt, o.lt, n)] + [el]
    minimal.sort(key=lambda el: hk(el.lt))
    if local:
        return minimal
    # tail reduction (leading terms are fixed)
    out = []
    for i, el in enumerate(minimal):
        red = _Reducer(n)
        for j, o in enumerate(minimal):
            if j != i:
                red.add(o)
        tail = dict(el.items[1:])
        rest = _reduce_global(tail, red, order, full=True)
        rest[el.lt] = _ONE
        out.append(_Elem(rest, order, el.sugar))
    return out


# ---------------------------------------------------------------------------
# public API


@dataclass
class StaircaseReport:
    finite: bool
    standard_monomials: list | None
    colength: int | None

    @property
    def infinite(self) -> bool:
        return not self.finite


class StandardBasis:
    """A standard basis of a submodule of ``R^rank`` for a given ordering."""

    def __init__(self, ring: Ring, rank: int, ordering: MonomialOrdering, elements: list):
        self.ring = ring
        self.rank = rank
        self.ordering = ordering
        self._order = _compile(ordering, ring.nvars)
        self._elements = elements
        self._reducer = None
        self._generators = None

    @property
    def generators(self) -> list:
        if self._generators is None:
            self._generators = [PolyVector.from_terms(el.terms, self.ring, self.rank) for el in self._elements]
        return self._generators

    @property
    def polynomials(self) -> list:
        """Generators as polynomials (rank-1 case)."""
        return [v[0] for v in self.generators]

    @property
    def leading_module(self) -> list:
        return [(el.lt[-1], el.lt[:-1]) for el in self._elements]

    def __len__(self):
        return len(self._elements)

    def reducer(self) -> _Reducer:
        if self._reducer is None:
            self._reducer = _Reducer(self.ring.nvars)
            for el in self._elements:
                self._reducer.add(el)
        return self._reducer

    def normal_form_terms(self, terms: dict) -> dict:
        if self.ordering.is_local:
            return _mora_reduce(dict(terms), self._elements, self._order)
        return _reduce_global(dict(terms), self.reducer(), self._order, full=True)

    def normal_form(self, v) -> PolyVector | Polynomial:
        is_poly = isinstance(v, Polynomial)
        vec = as_vectors([v])[0]
        if vec.rank != self.rank:
            raise ValueError(f"rank mismatch: vector of rank {vec.rank}, basis of rank {self.rank}")
        if vec.ring != self.ring:
            raise ContextError("normal_form ring mismatch")
        out = PolyVector.from_terms(self.normal_form_terms(vec.to_terms()), self.ring, self.rank)
        return out[0] if is_poly else out

    def contains(self, v) -> bool:
        vec = as_vectors([v])[0]
        return not self.normal_form_terms(vec.to_terms())

    def staircase(self, limit: int = 2_000_000) -> StaircaseReport:
        return staircase(self.leading_module, self.ring.nvars, self.rank, limit)

    def colength(self):
        """Number of standard terms, or None when infinite."""
        return self.staircase().colength

    def krull_dimension(self) -> int:
        return krull_dimension_of_leading(self.leading_module, self.ring.nvars, self.rank)

    def spairs_reduce_to_zero(self) -> bool:
        """Independent re-check of the Buchberger/Mora criterion."""
        els = self._elements
        n = self.ring.nvars
        for a, b in itertools.combinations(els, 2):
            if a.lt[n] != b.lt[n]:
                continue
            s = _spoly(a, b, n)
            if self.normal_form_terms(s):
                return False
        return True


def buchberger(gens, ordering: MonomialOrdering | None = None, rank: int | None = None,
               budget: float | None = None, degree_bound: int | None = None) -> StandardBasis:
    """Standard basis of the submodule generated by ``gens``.

    ``gens`` holds Polynomials (ideal case) or PolyVectors of equal rank.
    Mora's weak normal form replaces full reduction for local orderings.
    """
    vecs = as_vectors(gens)
    if not vecs:
        raise ValueError("buchberger needs at least one generator")
    ring = vecs[0].ring
    r = vecs[0].rank if rank is None else rank
    for v in vecs:
        if v.ring != ring:
            raise ContextError("generators live in different rings")
        if v.rank != r:
            raise ValueError("generators have different ranks")
    ordering = ordering or MonomialOrdering("global", ring.weights)
    order = _compile(ordering, ring.nvars)
    elements = _compute_basis([v.to_terms() for v in vecs], order, r, budget, degree_bound)
    return StandardBasis(ring, r, ordering, elements)


def normal_form(v, basis: StandardBasis):
    return basis.normal_form(v)


def staircase(leading, nvars: int, rank: int, limit: int = 2_000_000) -> StaircaseReport:
    """Count terms (position, monomial) outside a monomial submodule."""
    by_pos: dict = {p: [] for p in range(rank)}
    for pos, mon in leading:
        by_pos[pos].append(tuple(mon))
    std = []
    for pos in range(rank):
        mons = _minimal_monomials(by_pos[pos])
        bounds = []
        for i in range(nvars):
            pure = [m[i] for m in mons if m[i] and all(m[j] == 0 for j in range(nvars) if j != i)]
            if not pure and not any(all(a == 0 for a in m) for m in mons):
                return StaircaseReport(False, None, None)
            bounds.append(min(pure) if pure else 0)
        if any(all(a == 0 for a in m) for m in mons):
            continue
        for mon in _enumerate_outside(mons, bounds, nvars):
            std.append((pos, mon))
            if len(std) > limit:
                raise RuntimeError("staircase enumeration limit exceeded")
    return StaircaseReport(True, std, len(std))


def _minimal_monomials(mons):
    mons = sorted(set(mons), key=sum)
    out = []
    for m in mons:
        if not any(all(a <= b for a, b in zip(o, m)) for o in out):
            out.append(m)
    return out


def _enumerate_outside(mons, bounds, n):
    # depth-first over exponents, pruning as soon as a generator divides
    cur = [0] * n

    def divisible():
        for m in mons:
            for i in range(n):
                if m[i] > cur[i]:
                    break
            else:
                return True
        return False

    def rec(i):
        if i == n:
            yield tuple(cur)
            return
        for a in range(bounds[i]):
            cur[i] = a
            if divisible():
                break
            yield from rec(i + 1)
        cur[i] = 0

    if n == 0:
        yield ()
        return
    yield from rec(0)


def krull_dimension_of_leading(leading, nvars: int, rank: int) -> int:
    """Dimension of R^rank / (leading module): max over positions of the
    largest variable set avoided by every leading monomial of that position.
    Returns -1 for the zero module."""
    best = -1
    by_pos: dict = {p: [] for p in range(rank)}
    for pos, mon in leading:
        by_pos[pos].append(tuple(mon))
    for pos in range(rank):
        mons = _minimal_monomials(by_pos[pos])
        if any(all(a == 0 for a in m) for m in mons):
            continue
        supports = [frozenset(i for i, a in enumerate(m) if a) for m in mons]
        best = max(best, _max_independent(supports, nvars))
    return best


def _max_independent(supports, n) -> int:
    for size in range(n, -1, -1):
        for subset in itertools.combinations(range(n), size):
            s = frozenset(subset)
            if not any(sup <= s for sup in supports):
                return size
    return 0


# ---------------------------------------------------------------------------
# derived constructions


def homogeneity_data(vecs: list, weights: tuple | None = None):
    """(weights, shifts) making every vector homogeneous, or None.

    Rank-1 input may omit weights (find_weights is tried). Component shifts
    are inferred: a vector is homogeneous when deg(component) + shift is the
    same for all its nonzero components.
    """
    if not vecs:
        return None
    r = vecs[0].rank
    if weights is None:
        if r != 1:
            return find_module_weights(vecs)
        weights = find_weights([v[0] for v in vecs])
        if weights is None:
            return None
    degs = []
    for v in vecs:
        d = {}
        for pos, c in enumerate(v):
            if c.is_zero():
                continue
            deg, hom = weighted_degree(c, weights)
            if not hom:
                return None
            d[pos] = deg
        if d:
            degs.append(d)
    shifts: list = [None] * r
    todo = list(degs)
    while todo:
        progress = False
        rest = []
        for d in todo:
            known = [p for p in d if shifts[p] is not None]
            if not known:
                rest.append(d)
                continue
            total = d[known[0]] + shifts[known[0]]
            for p, deg in d.items():
                if shifts[p] is None:
                    shifts[p] = total - deg
                    progress = True
                elif deg + shifts[p] != total:
                    return None
        todo = rest
        if todo and not progress:
            shifts[next(iter(todo[0]))] = 0
    return tuple(weights), tuple(0 if s is None else s for s in shifts)


def find_module_weights(vecs: list):
    """Variable weights (all >= 1) and integer component shifts making every
    vector homogeneous, or None. Solved like find_weights with the shifts as
    extra free unknowns."""
    vecs = [v for v in vecs if not v.is_zero()]
    if not vecs:
        return None
    n, r = vecs[0].ring.nvars, vecs[0].rank
    rows = []
    for v in vecs:
        terms = list(v.to_terms())
        t0 = terms[0]
        for t in terms[1:]:
            row = [Fraction(a - b) for a, b in zip(t[:n], t0[:n])] + [Fraction(0)] * r
            row[n + t[n]] += 1
            row[n + t0[n]] -= 1
            rows.append(row)
    basis = _nullspace(rows, n + r)
    if not basis:
        return None
    point = integer_kernel_point(basis, n)
    if point is None:
        return None
    w, sh = point[:n], point[n:]
    low = min(sh)
    sh = tuple(s - low for s in sh)
    for v in vecs:
        degs = {sum(a * b for a, b in zip(w, t[:n])) + sh[t[n]] for t in v.to_terms()}
        if len(degs) != 1:
            return None
    return tuple(w), sh


def syzygy_module(gens, budget: float | None = None, weights: tuple | None = None) -> list:
    """Generators of the relations sum c_i * gens_i = 0, via a tagged basis.

    Each generator g_i is extended to (g_i, e_i) in rank r+k; basis elements
    with leading term among the tags are exactly the syzygies.
    """
    vecs = as_vectors(gens)
    if not vecs:
        return []
    ring = vecs[0].ring
    r = vecs[0].rank
    k = len(vecs)
    tagged = []
    for i, v in enumerate(vecs):
        terms = v.to_terms()
        zero = (0,) * ring.nvars
        terms[zero + (r + i,)] = _ONE
        tagged.append(terms)
    hom = homogeneity_data(vecs, weights)
    if hom is not None:
        w, sh = hom
        tag_shifts = []
        for v in vecs:
            pos = next((p for p, c in enumerate(v) if not c.is_zero()), None)
            tag_shifts.append(0 if pos is None else weighted_degree(v[pos], w)[0] + sh[pos])
        ordering = MonomialOrdering("global", w, shifts=sh + tuple(tag_shifts), tag_from=r, tag_by_degree=True)
    else:
        ordering = MonomialOrdering("global", ring.weights, tag_from=r)
    order = _compile(ordering, ring.nvars)
    elements = _compute_basis(tagged, order, r + k, budget)
    out = []
    for el in elements:
        if el.lt[-1] < r:
            continue
        comps = [dict() for _ in range(k)]
        for t, c in el.terms.items():
            pos = t[-1]
            if pos < r:
                raise AssertionError("tagged basis element leaked into the module part")
            comps[pos - r][t[:-1]] = c
        out.append(PolyVector([Polynomial._raw(ring, c) for c in comps], ring))
    return out


def eliminate(ideal: Sequence[Polynomial], block: Iterable[str], budget: float | None = None) -> list:
    """Generators of ``ideal`` intersected with the subring free of ``block``."""
    ideal = [p for p in ideal if not p.is_zero()]
    if not ideal:
        return []
    ring = ideal[0].ring
    idx = tuple(sorted(ring.index(v) for v in block))
    w = find_weights(ideal)
    ordering = MonomialOrdering("elim", w or ring.weights, block=idx)
    gb = buchberger(ideal, ordering, budget=budget)
    out = []
    for p in gb.polynomials:
        if not any(e[i] for e in p.terms for i in idx):
            out.append(p)
    return out


def ideal_intersection(ideals: Sequence[Sequence[Polynomial]], budget: float | None = None) -> list:
    """Intersection of ideals by the t-trick: eliminate t from t*I + (1-t)*J."""
    ideals = [list(i) for i in ideals]
    ring = ideals[0][0].ring
    current = ideals[0]
    for other in ideals[1:]:
        t = _fresh_name(ring, "t_")
        big = ring.extend([t], [1] if ring.weights else None)
        tt = big.gen(t)
        gens = [tt * p.to_ring(big) for p in current] + [(1 - tt) * q.to_ring(big) for q in other]
        elim = eliminate(gens, [t], budget)
        current = [_drop(p, ring) for p in elim]
        if not current:
            current = [ring.zero()]
    return current


def _drop(p: Polynomial, ring: Ring) -> Polynomial:
    keep = [p.ring.index(v) for v in ring.variables]
    return Polynomial._raw(ring, {tuple(e[i] for i in keep): c for e, c in p.terms.items()})


def _fresh_name(ring: Ring, stem: str) -> str:
    k = 0
    while f"{stem}{k}" in ring.variables:
        k += 1
    return f"{stem}{k}"


def ideal_quotient(I: Sequence[Polynomial], J: Sequence[Polynomial], budget: float | None = None) -> list:
    """Generators of I : J = {p : p*J subset I}."""
    from .exactpoly import exact_divide

    I = [p for p in I if not p.is_zero()]
    J = [q for q in J if not q.is_zero()]
    if not J:
        raise ValueError("ideal quotient by the zero ideal is the whole ring")
    ring = J[0].ring
    if not I:
        return [ring.zero()]
    parts = []
    for q in J:
        inter = ideal_intersection([I, [q]], budget)
        parts.append([exact_divide(p, q) for p in inter if not p.is_zero()] or [ring.zero()])
    if len(parts) == 1:
        result = parts[0]
    else:
        result = ideal_intersection(parts, budget)
    gb = buchberger(result, MonomialOrdering("global", find_weights(result) or ring.weights), budget=budget)
    return gb.polynomials


def krull_dimension(gens_or_basis, ordering: MonomialOrdering | None = None) -> int:
    if isinstance(gens_or_basis, StandardBasis):
        return gens_or_basis.krull_dimension()
    gens = [g for g in as_vectors(gens_or_basis)]
    if all(v.is_zero() for v in gens):
        return gens[0].ring.nvars if gens else 0
    gens = [v for v in gens if not v.is_zero()]
    return buchberger(gens, ordering).krull_dimension()


def colength(gens_or_basis, ordering: MonomialOrdering | None = None):
    if isinstance(gens_or_basis, StandardBasis):
        return gens_or_basis.colength()
    return buchberger(gens_or_basis, ordering).colength()
