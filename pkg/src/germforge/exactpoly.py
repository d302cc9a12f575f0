"""Exact multivariate polynomials over the rationals.

A polynomial lives in a :class:`Ring` (an ordered tuple of variable names,
optionally carrying positive integer weights) and is stored sparsely as a
mapping from dense exponent tuples to nonzero ``gmpy2.mpq`` coefficients.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from gmpy2 import mpq, mpz

Rational = type(mpq(0))
Exponent = tuple

_ZERO = mpq(0)
_ONE = mpq(1)


def as_rational(value) -> mpq:
    """Coerce an int, Fraction, mpq or ``"a/b"`` string to an exact rational."""
    if isinstance(value, Rational):
        return value
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, str):
        num, _, den = value.strip().partition("/")
        return mpq(int(num), int(den)) if den else mpq(int(num))
    if isinstance(value, (int, type(mpz(0)))):
        return mpq(value)
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


class ContextError(ValueError):
    """Raised when polynomials from incompatible rings are combined."""


class PolySyntaxError(ValueError):
    """Raised on malformed polynomial text."""


@dataclass(frozen=True)
class Ring:
    """Ordered variable names with optional positive integer weights."""

    variables: tuple
    weights: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        if len(set(self.variables)) != len(self.variables):
            raise ValueError(f"duplicate variable names in {self.variables}")
        if self.weights is not None:
            w = tuple(int(a) for a in self.weights)
            if len(w) != len(self.variables) or any(a < 1 for a in w):
                raise ValueError("weights must be positive and one per variable")
            object.__setattr__(self, "weights", w)

    def __eq__(self, other):
        return isinstance(other, Ring) and self.variables == other.variables

    def __hash__(self):
        return hash(self.variables)

    @property
    def nvars(self) -> int:
        return len(self.variables)

    def index(self, name: str) -> int:
        try:
            return self.variables.index(name)
        except ValueError:
            raise ContextError(f"unknown variable {name!r} in ring {self.variables}") from None

    def gen(self, name: str) -> Polynomial:
        e = [0] * self.nvars
        e[self.index(name)] = 1
        return Polynomial(self, {tuple(e): _ONE})

    def gens(self) -> list:
        return [self.gen(v) for v in self.variables]

    def const(self, c) -> Polynomial:
        c = as_rational(c)
        return Polynomial(self, {(0,) * self.nvars: c} if c else {})

    def zero(self) -> Polynomial:
        return Polynomial(self, {})

    def one(self) -> Polynomial:
        return self.const(1)

    def monomial(self, exp: Sequence[int], coeff=1) -> Polynomial:
        return Polynomial(self, {tuple(exp): as_rational(coeff)})

    def parse(self, text: str) -> Polynomial:
        return parse_polynomial(text, self)

    def with_weights(self, weights) -> Ring:
        return Ring(self.variables, tuple(weights) if weights is not None else None)

    def extend(self, names: Iterable[str], weights: Iterable[int] | None = None) -> Ring:
        names = tuple(names)
        if self.weights is not None and weights is not None:
            return Ring(self.variables + names, self.weights + tuple(weights))
        return Ring(self.variables + names)

    def display_key(self, exp):
        w = self.weights or (1,) * self.nvars
        return (sum(a * b for a, b in zip(w, exp)), tuple(-a for a in reversed(exp)))


@dataclass(frozen=True, eq=False)
class Polynomial:
    """Immutable sparse polynomial; ``terms`` maps exponent tuples to mpq."""

    ring: Ring
    terms: Mapping = field(default_factory=dict)

    def __post_init__(self):
        n = self.ring.nvars
        clean = {}
        for e, c in self.terms.items():
            if len(e) != n:
                raise ContextError(f"exponent {e} has wrong arity for {self.ring.variables}")
            c = as_rational(c)
            if c:
                clean[tuple(e)] = c
        object.__setattr__(self, "terms", clean)

    @classmethod
    def _raw(cls, ring: Ring, terms: dict) -> Polynomial:
        # trusted constructor: terms already clean
        p = object.__new__(cls)
        object.__setattr__(p, "ring", ring)
        object.__setattr__(p, "terms", terms)
        return p

    # -- basic queries ---------------------------------------------------
    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_term(self) -> mpq:
        return self.terms.get((0,) * self.ring.nvars, _ZERO)

    def __len__(self):
        return len(self.terms)

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree(self, var: str) -> int:
        i = self.ring.index(var)
        return max((e[i] for e in self.terms), default=-1)

    def support(self) -> set:
        """Names of the variables that actually occur."""
        used = set()
        for e in self.terms:
            used.update(i for i, a in enumerate(e) if a)
        return {self.ring.variables[i] for i in used}

    def valuation(self) -> int:
        """Lowest total degree of a term (order at the origin); -1 for zero."""
        return min((sum(e) for e in self.terms), default=-1)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: self.ring.display_key(t[0]), reverse=True)

    def leading_coefficient(self) -> mpq:
        if not self.terms:
            return _ZERO
        return self.sorted_terms()[0][1]

    def monic(self) -> Polynomial:
        if not self.terms:
            return self
        return self * (1 / self.leading_coefficient())

    # -- arithmetic ------------------------------------------------------
    def _coerce(self, other) -> Polynomial:
        if isinstance(other, Polynomial):
            if other.ring != self.ring:
                raise ContextError(f"ring mismatch: {self.ring.variables} vs {other.ring.variables}")
            return other
        return self.ring.const(other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, _ZERO) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Polynomial._raw(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            c = as_rational(other)
            if not c:
                return self.ring.zero()
            return Polynomial._raw(self.ring, {e: a * c for e, a in self.terms.items()})
        other = self._coerce(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e, _ZERO) + c1 * c2
                if s:
                    out[e] = s
                else:
                    del out[e]
        return Polynomial._raw(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only natural powers are supported")
        result, base = self.ring.one(), self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __truediv__(self, other):
        c = as_rational(other)
        if not c:
            raise ZeroDivisionError("polynomial division by zero constant")
        return self * (1 / c)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.ring == other.ring and self.terms == other.terms
        try:
            return self == self.ring.const(other)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash((self.ring, frozenset(self.terms.items())))

    # -- calculus and substitution ---------------------------------------
    def diff(self, var: str) -> Polynomial:
        i = self.ring.index(var)
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                ne = e[:i] + (e[i] - 1,) + e[i + 1:]
                out[ne] = c * e[i]
        return Polynomial._raw(self.ring, out)

    def subs(self, assignment: Mapping[str, object], target: Ring | None = None) -> Polynomial:
        """Ring-homomorphism image under ``var -> polynomial`` substitution.

        Unassigned variables map to themselves and must exist in ``target``
        (default: the images' common ring, else this ring).
        """
        images = {}
        for name, val in assignment.items():
            self.ring.index(name)
            images[name] = val
        if target is None:
            rings = {v.ring for v in images.values() if isinstance(v, Polynomial)}
            if len(rings) > 1:
                raise ContextError("substitution images live in different rings")
            target = rings.pop() if rings else self.ring
        for name, val in list(images.items()):
            if isinstance(val, Polynomial):
                if val.ring != target:
                    raise ContextError("substitution image outside target ring")
            else:
                images[name] = target.const(val)
        for name in self.ring.variables:
            if name not in images:
                images[name] = target.gen(name)
        return self.compose([images[v] for v in self.ring.variables], target)

    def compose(self, images: Sequence[Polynomial], target: Ring) -> Polynomial:
        """Evaluate with variable i replaced by ``images[i]`` (all in ``target``)."""
        cache: dict = {}

        def power(i, k):
            key = (i, k)
            if key not in cache:
                cache[key] = images[i] ** k
            return cache[key]

        out: dict = {}
        for e, c in self.terms.items():
            term = None
            for i, k in enumerate(e):
                if k:
                    term = power(i, k) if term is None else term * power(i, k)
            if term is None:
                items = {(0,) * target.nvars: _ONE}.items()
            else:
                items = term.terms.items()
            for te, tc in items:
                s = out.get(te, _ZERO) + c * tc
                if s:
                    out[te] = s
                else:
                    out.pop(te, None)
        return Polynomial._raw(target, out)

    def evaluate(self, point: Mapping[str, object]) -> Polynomial:
        """Substitute rational values for some variables (same ring)."""
        vals = {self.ring.index(k): as_rational(v) for k, v in point.items()}
        out: dict = {}
        for e, c in self.terms.items():
            ne = list(e)
            for i, v in vals.items():
                if e[i]:
                    c = c * v ** e[i]
                    ne[i] = 0
            ne = tuple(ne)
            s = out.get(ne, _ZERO) + c
            if s:
                out[ne] = s
            else:
                out.pop(ne, None)
        return Polynomial._raw(self.ring, out)

    def to_ring(self, target: Ring) -> Polynomial:
        """Re-embed into a ring whose variables include all used ones."""
        pos = [target.index(v) for v in self.ring.variables]
        out = {}
        n = target.nvars
        for e, c in self.terms.items():
            ne = [0] * n
            for i, a in enumerate(e):
                if a:
                    ne[pos[i]] = a
                elif self.ring.variables[i] not in target.variables:
                    pass
            out[tuple(ne)] = c
        for e in self.terms:
            for i, a in enumerate(e):
                if a and self.ring.variables[i] not in target.variables:
                    raise ContextError(f"variable {self.ring.variables[i]} missing from target")
        return Polynomial._raw(target, out)

    # -- weights -----------------------------------------------------------
    def weighted_degree(self, weights: Sequence[int] | None = None):
        return weighted_degree(self, weights)

    # -- text ----------------------------------------------------------------
    def __str__(self):
        return format_polynomial(self)

    def __repr__(self):
        return f"Polynomial({format_polynomial(self)!r})"


# ---------------------------------------------------------------------------
# text syntax

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


def _tokenize(text: str):
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise PolySyntaxError(f"unexpected character at {pos} in {text!r}")
        num, ident, op = m.groups()
        if num is not None:
            out.append(("num", int(num)))
        elif ident is not None:
            out.append(("id", ident))
        else:
            out.append(("op", "^" if op == "**" else op))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str, ring: Ring):
        self.toks = _tokenize(text)
        self.i = 0
        self.ring = ring
        self.text = text

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, op):
        kind, val = self.take()
        if kind != "op" or val != op:
            raise PolySyntaxError(f"expected {op!r} in {self.text!r}")

    def parse(self) -> Polynomial:
        if not self.toks:
            raise PolySyntaxError("empty polynomial text")
        p = self.expr()
        if self.i != len(self.toks):
            raise PolySyntaxError(f"trailing input in {self.text!r}")
        return p

    def expr(self):
        sign = 1
        kind, val = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            sign = -1 if val == "-" else 1
        acc = self.term() * sign
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                t = self.term()
                acc = acc + t if val == "+" else acc - t
            else:
                return acc

    def term(self):
        acc = self.power()
        while True:
            kind, val = self.peek()
            if kind == "op" and val == "*":
                self.take()
                acc = acc * self.power()
            elif kind == "op" and val == "/":
                self.take()
                d = self.power()
                if not d.is_constant() or d.is_zero():
                    raise PolySyntaxError("division only by nonzero constants")
                acc = acc / d.constant_term()
            elif kind in ("num", "id") or (kind == "op" and val == "("):
                acc = acc * self.power()  # implicit multiplication
            else:
                return acc

    def power(self):
        base = self.atom()
        kind, val = self.peek()
        if kind == "op" and val == "^":
            self.take()
            neg = False
            k2, v2 = self.peek()
            if k2 == "op" and v2 == "-":
                raise PolySyntaxError("negative exponents are not polynomial")
            kind, val = self.take()
            if kind == "num":
                return base ** val
            if kind == "op" and val == "(":
                e = self.expr()
                self.expect(")")
                if not e.is_constant() or e.constant_term().denominator != 1 or e.constant_term() < 0:
                    raise PolySyntaxError("exponent must be a natural number")
                return base ** int(e.constant_term())
            raise PolySyntaxError(f"bad exponent in {self.text!r}")
        return base

    def atom(self):
        kind, val = self.take()
        if kind == "num":
            return self.ring.const(val)
        if kind == "id":
            try:
                return self.ring.gen(val)
            except ContextError as exc:
                raise PolySyntaxError(str(exc)) from None
        if kind == "op" and val == "(":
            e = self.expr()
            self.expect(")")
            return e
        if kind == "op" and val == "-":
            return -self.power()
        raise PolySyntaxError(f"unexpected token {val!r} in {self.text!r}")


def parse_polynomial(text: str, ring: Ring) -> Polynomial:
    return _Parser(text, ring).parse()


def _format_coeff(c: mpq) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_monomial(exp, names) -> str:
    parts = []
    for name, a in zip(names, exp):
        if a == 1:
            parts.append(name)
        elif a:
            parts.append(f"{name}^{a}")
    return "*".join(parts)


def format_polynomial(p: Polynomial) -> str:
    if not p.terms:
        return "0"
    out = []
    for e, c in p.sorted_terms():
        mono = format_monomial(e, p.ring.variables)
        sign = "-" if c < 0 else "+"
        a = -c if c < 0 else c
        if not mono:
            body = _format_coeff(a)
        elif a == 1:
            body = mono
        else:
            body = f"{_format_coeff(a)}*{mono}"
        out.append((sign, body))
    first_sign, first = out[0]
    text = ("-" if first_sign == "-" else "") + first
    for sign, body in out[1:]:
        text += f"{sign}{body}"
    return text


# ---------------------------------------------------------------------------
# weights


def weighted_degree(p: Polynomial, weights: Sequence[int] | None = None):
    """Return ``(degree, homogeneous)``; degree is the maximum weighted degree.

    The zero polynomial gives ``(0, True)``.
    """
    w = tuple(weights) if weights is not None else (p.ring.weights or (1,) * p.ring.nvars)
    if any(a < 1 for a in w):
        raise ValueError("weights must be positive")
    degs = {sum(a * b for a, b in zip(w, e)) for e in p.terms}
    if not degs:
        return 0, True
    return max(degs), len(degs) == 1


def find_weights(polys: Sequence[Polynomial]):
    """Positive integer weights making every polynomial weighted homogeneous.

    Solves the linear constraints ``<w, e - e'> = 0`` for exponents within one
    polynomial; among the positive integer solutions the one with the smallest
    weight sum is returned. None when no positive solution exists.
    """
    polys = [p for p in polys if not p.is_zero()]
    if not polys:
        return None
    ring = polys[0].ring
    n = ring.nvars
    rows = []
    for p in polys:
        if p.ring != ring:
            raise ContextError("find_weights needs a common ring")
        exps = list(p.terms)
        for e in exps[1:]:
            rows.append([Fraction(a - b) for a, b in zip(e, exps[0])])
    basis = _nullspace(rows, n)
    if not basis:
        return None
    w = integer_kernel_point(basis, n)
    if w is None or not all(weighted_degree(p, w)[1] for p in polys):
        return None
    return w


def integer_kernel_point(basis, npos: int):
    """Integer vector in span(basis) whose first ``npos`` entries are >= 1.

    Remaining entries are free integers. Minimizes the sum of the positive
    part; None when infeasible.
    """
    import numpy as np
    from scipy.optimize import Bounds, LinearConstraint, milp

    n, k = len(basis[0]), len(basis)
    # unknowns: n integer coordinates, then k real kernel coordinates
    a = np.zeros((n, n + k))
    for i in range(n):
        a[i, i] = 1.0
        for j, b in enumerate(basis):
            a[i, n + j] = -float(b[i])
    cost = np.concatenate([np.ones(npos), np.zeros(n - npos + k)])
    lower = np.concatenate([np.ones(npos), np.full(n - npos + k, -np.inf)])
    res = milp(
        cost,
        constraints=LinearConstraint(a, np.zeros(n), np.zeros(n)),
        integrality=np.concatenate([np.ones(n), np.zeros(k)]),
        bounds=Bounds(lower, np.full(n + k, np.inf)),
    )
    if res.status != 0:
        return None
    return tuple(int(round(x)) for x in res.x[:n])


def _nullspace(rows, n):
    """Exact rational kernel basis of the matrix with the given rows."""
    m = [list(r) for r in rows]
    pivots = []
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][col]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col] != 0:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * n
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -m[i][fc]
        basis.append(v)
    return basis


def matrix_rank(rows) -> int:
    """Rank of a rational matrix by exact Gaussian elimination."""
    m = [[Fraction(x) if not isinstance(x, Fraction) else x for x in r] for r in rows]
    if not m:
        return 0
    ncols = len(m[0])
    rank = 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(rank + 1, len(m)):
            if m[i][col] != 0:
                f = m[i][col] / m[rank][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        rank += 1
    return rank


# ---------------------------------------------------------------------------
# gcd and squarefree part
#
# Recursive representation: a polynomial in variables v_0..v_{k-1} is a dict
# {degree in v_0: polynomial in v_1..v_{k-1}}; at depth k it is an mpq.


def _to_rec(p: Polynomial, order: Sequence[int]):
    def build(items, depth):
        if depth == len(order):
            total = _ZERO
            for _, c in items:
                total += c
            return total
        groups: dict = {}
        i = order[depth]
        for e, c in items:
            groups.setdefault(e[i], []).append((e, c))
        out = {}
        for d, sub in groups.items():
            v = build(sub, depth + 1)
            if not _rzero(v):
                out[d] = v
        return out

    return build(list(p.terms.items()), 0)


def _from_rec(r, order, ring: Ring) -> Polynomial:
    out = {}
    n = ring.nvars

    def walk(node, depth, exp):
        if depth == len(order):
            if node:
                out[tuple(exp)] = node
            return
        for d, sub in node.items():
            exp[order[depth]] = d
            walk(sub, depth + 1, exp)
        exp[order[depth]] = 0

    walk(r, 0, [0] * n)
    return Polynomial._raw(ring, out)


def _rzero(a) -> bool:
    return not a


def _radd(a, b, depth, k):
    if depth == k:
        return a + b
    out = dict(a)
    for d, v in b.items():
        if d in out:
            s = _radd(out[d], v, depth + 1, k)
            if _rzero(s):
                del out[d]
            else:
                out[d] = s
        else:
            out[d] = v
    return out


def _rneg(a, depth, k):
    if depth == k:
        return -a
    return {d: _rneg(v, depth + 1, k) for d, v in a.items()}


def _rmul(a, b, depth, k):
    if depth == k:
        return a * b
    out: dict = {}
    for d1, v1 in a.items():
        for d2, v2 in b.items():
            prod = _rmul(v1, v2, depth + 1, k)
            d = d1 + d2
            if d in out:
                s = _radd(out[d], prod, depth + 1, k)
                if _rzero(s):
                    del out[d]
                else:
                    out[d] = s
            elif not _rzero(prod):
                out[d] = prod
    return out


def _rscale_shift(a, c, shift, depth, k):
    """c * v_depth^shift * a, with c living one level down."""
    return {d + shift: _rmul(c, v, depth + 1, k) for d, v in a.items()}


def _rexact_div(a, b, depth, k):
    """a / b when b divides a exactly; None otherwise."""
    if depth == k:
        return a / b
    if _rzero(a):
        return {}
    q: dict = {}
    r = a
    db = max(b)
    lb = b[db]
    while not _rzero(r):
        dr = max(r)
        if dr < db:
            return None
        c = _rexact_div(r[dr], lb, depth + 1, k)
        if c is None:
            return None
        q[dr - db] = c
        r = _radd(r, _rneg(_rscale_shift(b, c, dr - db, depth, k), depth, k), depth, k)
    return q


def _rcontent(a, depth, k):
    """gcd of the coefficients (one level down), normalized."""
    g = None
    for v in a.values():
        g = v if g is None else _rgcd(g, v, depth + 1, k)
        if depth + 1 == k:
            break
        if _is_unit(g, depth + 1, k):
            break
    return g


def _is_unit(a, depth, k):
    if depth == k:
        return bool(a)
    return len(a) == 1 and 0 in a and _is_unit(a[0], depth + 1, k)


def _rlc(a, depth, k):
    """Leading rational coefficient (lexicographic)."""
    while depth < k:
        a = a[max(a)]
        depth += 1
    return a


def _rnormalize(a, depth, k):
    if depth == k:
        return _ONE if a else _ZERO
    lc = _rlc(a, depth, k)
    inv = 1 / lc
    return _rmul_const(a, inv, depth, k)


def _rmul_const(a, c, depth, k):
    if depth == k:
        return a * c
    return {d: _rmul_const(v, c, depth + 1, k) for d, v in a.items()}


def _rgcd(a, b, depth, k):
    if depth == k:
        return _ONE if (a or b) else _ZERO
    if _rzero(a):
        return _rnormalize(b, depth, k)
    if _rzero(b):
        return _rnormalize(a, depth, k)
    ca = _rcontent(a, depth, k)
    cb = _rcontent(b, depth, k)
    cont = _rgcd(ca, cb, depth + 1, k)
    pa = _rexact_div(a, {0: ca}, depth, k)
    pb = _rexact_div(b, {0: cb}, depth, k)
    if max(pa) < max(pb):
        pa, pb = pb, pa
    # primitive polynomial remainder sequence in v_depth
    while max(pb) > 0:
        r = _rprem(pa, pb, depth, k)
        if _rzero(r):
            break
        cr = _rcontent(r, depth, k)
        pa, pb = pb, _rexact_div(r, {0: cr}, depth, k)
    else:
        # pb has degree 0 in v_depth, so the primitive gcd is trivial
        return _rnormalize({0: cont}, depth, k)
    g = _rmul(pb, {0: cont}, depth, k)
    return _rnormalize(g, depth, k)


def _rprem(a, b, depth, k):
    """Pseudo-remainder of a by b in v_depth."""
    db = max(b)
    lb = b[db]
    r = a
    while not _rzero(r) and max(r) >= db:
        dr = max(r)
        lr = r[dr]
        r = _radd(
            _rscale_shift(r, lb, 0, depth, k),
            _rneg(_rscale_shift(b, lr, dr - db, depth, k), depth, k),
            depth,
            k,
        )
    return r


def _gcd_order(p: Polynomial, q: Polynomial):
    used = set()
    for e in list(p.terms) + list(q.terms):
        used.update(i for i, a in enumerate(e) if a)
    # innermost (last) variable gets the highest degree: cheaper base case
    return sorted(used, key=lambda i: max([e[i] for e in p.terms] + [e[i] for e in q.terms]))


def gcd(p: Polynomial, q: Polynomial) -> Polynomial:
    """Greatest common divisor, normalized to leading coefficient 1."""
    if p.ring != q.ring:
        raise ContextError("gcd needs a common ring")
    if p.is_zero():
        return q.monic()
    if q.is_zero():
        return p.monic()
    order = _gcd_order(p, q)
    k = len(order)
    g = _rgcd(_to_rec(p, order), _to_rec(q, order), 0, k)
    return _from_rec(g, order, p.ring).monic()


def exact_divide(p: Polynomial, q: Polynomial) -> Polynomial:
    """Quotient p/q; raises ArithmeticError when q does not divide p."""
    if q.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    order = _gcd_order(p, q)
    k = len(order)
    if k == 0:
        return p * (1 / q.constant_term())
    r = _rexact_div(_to_rec(p, order), _to_rec(q, order), 0, k)
    if r is None:
        raise ArithmeticError("not an exact division")
    return _from_rec(r, order, p.ring)


def _squarefree_certified(p: Polynomial, seed: int = 0) -> bool:
    """Cheap certificate: p is squarefree if, for each variable it involves,
    a random specialization of the other variables leaves a squarefree
    univariate polynomial of the same degree."""
    rng = random.Random(seed)
    for v in sorted(p.support()):
        deg = p.degree(v)
        others = [u for u in p.ring.variables if u != v]
        point = {u: mpq(rng.randint(-50, 50), rng.randint(1, 7)) for u in others}
        uni = p.evaluate(point)
        if uni.degree(v) != deg:
            return False
        if gcd(uni, uni.diff(v)).total_degree() > 0:
            return False
    return True


def squarefree_part(p: Polynomial) -> Polynomial:
    """Product of the distinct irreducible factors of p (monic)."""
    if p.is_zero() or p.is_constant():
        return p.monic()
    if _squarefree_certified(p):
        return p.monic()
    g = p
    for v in sorted(p.support()):
        g = gcd(g, p.diff(v))
        if g.is_constant():
            return p.monic()
    # g collects all repeated factors (with multiplicity - 1); strip them
    r = exact_divide(p, g)
    return squarefree_part(r) if not _squarefree_certified(r) else r.monic()
