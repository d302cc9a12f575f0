"""Map-germs, unfoldings, curve germs and the augmentation construction."""

from __future__ import annotations

import ast
import math
import operator
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .exactpoly import Polynomial, Ring, as_rational, find_weights, matrix_rank
from .standard_basis import MonomialOrdering, buchberger

INFINITE = math.inf


class GermError(ValueError):
    """Malformed germ, unfolding or curve data."""


def _poly(ring: Ring, p) -> Polynomial:
    if isinstance(p, Polynomial):
        if p.ring != ring:
            return p.to_ring(ring)
        return p
    if isinstance(p, str):
        return ring.parse(p)
    return ring.const(p)


@dataclass(frozen=True)
class MapGerm:
    """Polynomial representative of a germ (C^n,0) -> (C^p,0)."""

    ring: Ring
    components: tuple
    label: str = ""
    weights: tuple | None = None
    target_names: tuple | None = None
    check_dimensions: bool = True

    def __post_init__(self):
        comps = tuple(_poly(self.ring, c) for c in self.components)
        object.__setattr__(self, "components", comps)
        for i, c in enumerate(comps):
            if c.constant_term():
                raise GermError(f"component {i + 1} of {self.label or 'germ'} does not vanish at 0")
        if self.check_dimensions and len(comps) < self.ring.nvars:
            raise GermError("target dimension is smaller than source dimension")
        if self.target_names is not None:
            names = tuple(self.target_names)
            if len(names) != len(comps):
                raise GermError("one target name per component required")
            object.__setattr__(self, "target_names", names)

    @classmethod
    def from_strings(cls, variables: Sequence[str], components: Sequence[str], **kw) -> MapGerm:
        ring = Ring(tuple(variables))
        return cls(ring, tuple(ring.parse(c) for c in components), **kw)

    @property
    def source_dim(self) -> int:
        return self.ring.nvars

    @property
    def target_dim(self) -> int:
        return len(self.components)

    def targets(self) -> tuple:
        return self.target_names or tuple(f"Y{i + 1}" for i in range(self.target_dim))

    def source_weights(self):
        """Weights on source variables making all components homogeneous."""
        if self.weights is not None:
            return self.weights
        return find_weights(list(self.components))

    def __str__(self):
        body = ", ".join(str(c) for c in self.components)
        return f"({', '.join(self.ring.variables)}) -> ({body})"


@dataclass(frozen=True)
class CurveGerm:
    """A curve germ (C,0) -> (C^d,0) given by univariate polynomials."""

    variable: str
    components: tuple

    def __post_init__(self):
        ring = Ring((self.variable,))
        comps = tuple(_poly(ring, c) for c in self.components)
        for c in comps:
            if c.constant_term():
                raise GermError("curve components must vanish at 0")
        object.__setattr__(self, "components", comps)

    @classmethod
    def parse(cls, text: str, variable: str = "w") -> CurveGerm:
        """Parse ``"(0,w^l,0)"`` style text; ``l`` must already be substituted."""
        body = text.strip()
        if body.startswith("(") and body.endswith(")"):
            body = body[1:-1]
        parts = [s.strip() for s in body.split(",")]
        return cls(variable, tuple(parts))

    @property
    def ring(self) -> Ring:
        return Ring((self.variable,))

    @property
    def dim(self) -> int:
        return len(self.components)

    def is_constant(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def valuation(self):
        """Smallest exponent present among the components."""
        vals = [c.valuation() for c in self.components if not c.is_zero()]
        return min(vals) if vals else INFINITE

    def derivative(self) -> tuple:
        return tuple(c.diff(self.variable) for c in self.components)

    def __str__(self):
        return f"{self.variable} -> (" + ", ".join(str(c) for c in self.components) + ")"


@dataclass(frozen=True)
class Unfolding:
    """A d-parameter unfolding F(x,u) = (F_u(x), u) of a map-germ f."""

    base: MapGerm
    params: tuple
    deformed: tuple
    label: str = ""
    param_weights: tuple | None = None
    param_targets: tuple | None = None

    def __post_init__(self):
        params = tuple(self.params)
        object.__setattr__(self, "params", params)
        clash = set(params) & set(self.base.ring.variables)
        if clash:
            raise GermError(f"parameter names clash with source variables: {sorted(clash)}")
        ring = self.ring
        deformed = tuple(_poly(ring, c) for c in self.deformed)
        if len(deformed) != self.base.target_dim:
            raise GermError("deformed components must match the base target dimension")
        object.__setattr__(self, "deformed", deformed)
        zero = {u: 0 for u in params}
        for d, c in zip(deformed, self.base.components):
            if _drop_params(d.evaluate(zero), self.base.ring) != c:
                raise GermError(f"{self.label or 'unfolding'} does not restrict to its base germ at u=0")

    @property
    def ring(self) -> Ring:
        return Ring(self.base.ring.variables + self.params)

    @property
    def d(self) -> int:
        return len(self.params)

    def parameter_targets(self) -> tuple:
        return self.param_targets or tuple(u.upper() if u.upper() not in self.base.targets() else f"U_{u}" for u in self.params)

    def full_map(self) -> MapGerm:
        """The map (x,u) -> (F_u(x), u) as a germ C^{n+d} -> C^{p+d}."""
        ring = self.ring
        comps = self.deformed + tuple(ring.gen(u) for u in self.params)
        return MapGerm(
            ring,
            comps,
            label=f"{self.label or 'F'}(full)",
            target_names=self.base.targets() + self.parameter_targets(),
        )

    @classmethod
    def trivial(cls, f: MapGerm, params: Sequence[str]) -> Unfolding:
        ring = Ring(f.ring.variables + tuple(params))
        return cls(f, tuple(params), tuple(c.to_ring(ring) for c in f.components), label=f"{f.label}x1")


def _drop_params(p: Polynomial, ring: Ring) -> Polynomial:
    keep = [p.ring.index(v) for v in ring.variables]
    out = {}
    for e, c in p.terms.items():
        out[tuple(e[i] for i in keep)] = c
    return Polynomial._raw(ring, out)


# ---------------------------------------------------------------------------
# invariants


def linear_part(f: MapGerm) -> list:
    n = f.source_dim
    rows = []
    for c in f.components:
        row = [0] * n
        for e, a in c.terms.items():
            if sum(e) == 1:
                row[e.index(1)] = a
        rows.append(row)
    return rows


def corank(f: MapGerm) -> int:
    """Source dimension minus the rank of df(0)."""
    from fractions import Fraction

    rows = [[Fraction(int(a.numerator), int(a.denominator)) for a in row] for row in linear_part(f)]
    return f.source_dim - matrix_rank(rows)


def multiplicity(f: MapGerm):
    """dim Q(f) = colength of the ideal of components in the local ring."""
    comps = [c for c in f.components if not c.is_zero()]
    if not comps:
        return INFINITE if f.source_dim else 1
    w = find_weights(comps)
    ordering = MonomialOrdering("global", w) if w else MonomialOrdering("local")
    gb = buchberger(comps, ordering)
    n = gb.colength()
    return INFINITE if n is None else n


def curve_multiplicity(gamma: CurveGerm):
    return multiplicity(MapGerm(gamma.ring, gamma.components, check_dimensions=False))


def augment(F: Unfolding, gamma: CurveGerm, label: str = "") -> MapGerm:
    """A_{F,gamma}(f): (x, w) -> (F_{gamma(w)}(x), w)."""
    if gamma.dim != F.d:
        raise GermError(f"curve has {gamma.dim} components, unfolding has {F.d} parameters")
    if gamma.variable in F.base.ring.variables:
        raise GermError(f"curve variable {gamma.variable!r} clashes with a source variable")
    src = Ring(F.base.ring.variables + (gamma.variable,))
    big = Ring(F.ring.variables + (gamma.variable,))
    images = {u: g.to_ring(big) for u, g in zip(F.params, gamma.components)}
    comps = []
    for c in F.deformed:
        comps.append(_drop_params(c.to_ring(big).subs(images, big), src))
    comps.append(src.gen(gamma.variable))
    targets = F.base.targets() + (gamma.variable.upper() if gamma.variable.upper() not in F.base.targets() else "T",)
    return MapGerm(src, tuple(comps), label=label or f"A({F.label},{gamma})", target_names=targets)


def specialize(F: Unfolding, point: Sequence) -> MapGerm:
    """F_{u0}; refuses results that do not fix the origin."""
    if len(point) != F.d:
        raise GermError(f"expected {F.d} parameter values")
    vals = {u: as_rational(v) for u, v in zip(F.params, point)}
    comps = [_drop_params(c.evaluate(vals), F.base.ring) for c in F.deformed]
    for i, c in enumerate(comps):
        if c.constant_term():
            raise GermError(f"F_u0 component {i + 1} does not vanish at the origin")
    return MapGerm(F.base.ring, tuple(comps), label=f"{F.label}@{tuple(point)}",
                   target_names=F.base.target_names, check_dimensions=F.base.check_dimensions)


def is_unfolding_of(F: Unfolding, f: MapGerm) -> bool:
    if F.base.ring != f.ring or F.base.target_dim != f.target_dim:
        return False
    g = specialize(F, [0] * F.d)
    return all(a == b for a, b in zip(g.components, f.components))


# ---------------------------------------------------------------------------
# germ files
#
#   vars x y z          source variables
#   params u1 u2 u3     (unfolding only) parameters
#   targets X Y Z W     optional names of target coordinates
#   ptargets U1 U2 U3   optional names of the parameter target coordinates
#   weights 1 2 3       optional source weights
#   component <poly>    repeated; for unfoldings these are F_u(x)
#   label A2hat


@dataclass
class GermFile:
    label: str = ""
    variables: list = field(default_factory=list)
    params: list = field(default_factory=list)
    targets: list | None = None
    ptargets: list | None = None
    weights: list | None = None
    components: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    indices: dict = field(default_factory=dict)

    def build(self):
        """MapGerm, or Unfolding when parameters are declared."""
        if not self.variables:
            raise GermError("germ file lacks a 'vars' line")
        src = Ring(tuple(self.variables))
        if not self.params:
            return MapGerm(src, tuple(src.parse(c) for c in self.components), label=self.label,
                           weights=tuple(self.weights) if self.weights else None,
                           target_names=tuple(self.targets) if self.targets else None)
        full = Ring(tuple(self.variables) + tuple(self.params))
        deformed = [full.parse(c) for c in self.components]
        zero = {u: 0 for u in self.params}
        base_comps = [_drop_params(c.evaluate(zero), src) for c in deformed]
        base = MapGerm(src, tuple(base_comps), label=self.label.removeprefix("F_"),
                       target_names=tuple(self.targets) if self.targets else None)
        return Unfolding(base, tuple(self.params), tuple(deformed), label=self.label,
                         param_targets=tuple(self.ptargets) if self.ptargets else None)


_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul}


def _int_expr(expr: str, values: Mapping[str, int]) -> int:
    """Evaluate a small integer expression such as ``2*l-1``."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return node.value
        if isinstance(node, ast.Name):
            if node.id not in values:
                raise GermError(f"no value for index {node.id!r}")
            return int(values[node.id])
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
            return -ev(node.operand)
        raise GermError(f"unsupported index expression {expr!r}")

    return ev(ast.parse(expr, mode="eval"))


_EXP = re.compile(r"\^\(([^()]*)\)|\^([A-Za-z_]\w*)")


def instantiate(text: str, values: Mapping[str, int]) -> str:
    """Replace symbolic exponents ``^l`` and ``^(2*l)`` by integers."""

    def sub(m):
        expr = m.group(1) if m.group(1) is not None else m.group(2)
        n = _int_expr(expr, values)
        if n < 0:
            raise GermError(f"negative exponent from {expr!r}")
        return f"^{n}"

    return _EXP.sub(sub, text)


def parse_germ_text(text: str, indices: Mapping[str, int] | None = None) -> GermFile:
    """Parse the line-oriented germ format.

    Families declare ``index l`` and use symbolic exponents; ``indices``
    supplies their values.
    """
    gf = GermFile()
    declared = re.search(r"^\s*index\s+(.*)$", text, flags=re.M)
    if declared:
        names = declared.group(1).split("#", 1)[0].split()
        missing = [n for n in names if n not in (indices or {})]
        if missing:
            raise GermError(f"germ family needs values for {missing}")
        gf.indices = {n: int(indices[n]) for n in names}
        text = instantiate(text, gf.indices)
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(" ")
        rest = rest.strip()
        if key == "vars":
            gf.variables = rest.split()
        elif key == "params":
            gf.params = rest.split()
        elif key == "targets":
            gf.targets = rest.split()
        elif key == "ptargets":
            gf.ptargets = rest.split()
        elif key == "weights":
            gf.weights = [int(a) for a in rest.split()]
        elif key == "component":
            gf.components.append(rest)
        elif key == "label":
            gf.label = rest
        elif key == "note":
            gf.notes.append(rest)
        elif key == "index":
            pass
        else:
            raise GermError(f"line {lineno}: unknown keyword {key!r}")
    return gf


def load_germ(path, **indices) -> MapGerm | Unfolding:
    return parse_germ_text(Path(path).read_text(), indices).build()


def dump_germ(obj: MapGerm | Unfolding) -> str:
    lines = []
    if isinstance(obj, Unfolding):
        f = obj.base
        lines.append(f"label {obj.label}")
        lines.append("vars " + " ".join(f.ring.variables))
        lines.append("params " + " ".join(obj.params))
        if f.target_names:
            lines.append("targets " + " ".join(f.target_names))
        if obj.param_targets:
            lines.append("ptargets " + " ".join(obj.param_targets))
        lines += [f"component {c}" for c in obj.deformed]
    else:
        lines.append(f"label {obj.label}")
        lines.append("vars " + " ".join(obj.ring.variables))
        if obj.target_names:
            lines.append("targets " + " ".join(obj.target_names))
        if obj.weights:
            lines.append("weights " + " ".join(map(str, obj.weights)))
        lines += [f"component {c}" for c in obj.components]
    return "\n".join(lines) + "\n"
