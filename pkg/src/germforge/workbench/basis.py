"""Check a transcribed standard basis of the F_A2hat augmentation module.

The catalog file ``basis_m0.txt`` lists generators m1..m17 of

    M0 = gamma^* tau_rho(Der(-log V)),   gamma = (0, w, 0),

for the stable unfolding F_A2hat, plus three generators m19..m21 that enter
the basis of the l-th module (gamma = (0, w^l, 0), tangent column included).
The checks below compare these against bases computed by the engine.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction

from ..exactpoly import Ring
from ..geometry import derlog, image_equation, pullback, trho_components
from ..germs import CurveGerm, GermError, instantiate
from ..standard_basis import MonomialOrdering, PolyVector, buchberger, colength, find_module_weights
from .catalog import CATALOG_DIR, load

BASIS_FILE = CATALOG_DIR / "basis_m0.txt"

# Monomial summands of the leading module of M_l, one per free generator,
# written with the symbolic exponent l; their colengths are 10l-5, 11l-11, 9l-2.
STAIRCASE = (
    ("X^8", "X^2*Y", "Y^2", "Z", "W", "X^5*w^(l-1)", "Y*w^(l-1)", "w^l"),
    ("X^9", "X^2*Y", "Y^2", "Z", "W", "w^(l-1)"),
    ("X^9", "Y", "Z", "W", "X^7*w^(l-1)", "w^l"),
)
STAIRCASE_FORMULAS = ("10*l-5", "11*l-11", "9*l-2")


class BasisFileError(ValueError):
    pass


@dataclass
class TranscribedBasis:
    ring: Ring
    fixed: dict  # name -> PolyVector
    templates: dict  # name -> list of component texts with symbolic l

    def generators(self, names=None) -> list:
        names = names or list(self.fixed)
        return [self.fixed[n] for n in names]

    @property
    def corrections(self) -> set:
        """Names of printed generators that have a starred replacement."""
        return {n[:-1] for n in self.templates if n.endswith("*")}

    def family(self, l: int, corrected: bool = True) -> dict:
        """Listed generators of M_l (without the undisplayed w^(l-1) dU2).

        With ``corrected`` a starred template replaces its printed namesake."""
        wl = {v: self.ring.gen(v) for v in self.ring.variables}
        wl["w"] = self.ring.gen("w") ** l
        out = {}
        for name, vec in self.fixed.items():
            if name == "m16":
                continue
            if name in ("m15", "m17"):
                vec = PolyVector([c.subs(wl, self.ring) for c in vec], self.ring)
            out[name] = vec
        for name, comps in self.templates.items():
            if name.endswith("*") != corrected and (name.endswith("*") or name in self.corrections):
                continue
            out[name] = PolyVector([self.ring.parse(instantiate(c, {"l": l})) for c in comps], self.ring)
        return out


def parse_basis(text: str) -> TranscribedBasis:
    ring = None
    fixed, templates = {}, {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#")[0].strip()
        if not line:
            continue
        if line.startswith("ring "):
            ring = Ring(tuple(line.split()[1:]))
            continue
        if ring is None:
            raise BasisFileError(f"line {lineno}: generator before the ring line")
        family = line.startswith("l ")
        if family:
            line = line[2:]
        name, *comps = [c.strip() for c in line.split("|")]
        if len(comps) != 3:
            raise BasisFileError(f"line {lineno}: expected 3 components, got {len(comps)}")
        if family:
            templates[name] = comps
        else:
            fixed[name] = PolyVector([ring.parse(c) for c in comps], ring)
    if ring is None:
        raise BasisFileError("missing ring line")
    return TranscribedBasis(ring, fixed, templates)


def load_basis() -> TranscribedBasis:
    return parse_basis(BASIS_FILE.read_text())


def mutate(basis: TranscribedBasis, name: str = "m3", component: int = 0, delta=Fraction(1, 229)):
    """Copy of ``basis`` with one coefficient of ``name`` perturbed."""
    vec = basis.fixed[name]
    comps = list(vec)
    c = comps[component]
    lead = max(c.terms)  # any fixed term will do
    comps[component] = c + basis.ring.monomial(lead, delta)
    fixed = dict(basis.fixed)
    fixed[name] = PolyVector(comps, basis.ring)
    return TranscribedBasis(basis.ring, fixed, basis.templates)


def module_generators(l: int | None, budget: float | None = None) -> list:
    """Engine generators: l None gives M0 (no tangent column), else M_l."""
    F = load("F_A2hat")
    params = F.parameter_targets()
    T = trho_components(derlog(image_equation(F.full_map(), budget), budget=budget), params)
    e = 1 if l is None else l
    gamma = CurveGerm.parse(f"(0,w^{e},0)", "w")
    P = pullback(T, gamma, params)
    gens = P.nonzero()
    if l is not None:
        gens.append(PolyVector([c.diff("w").to_ring(P.ring) for c in gamma.components], P.ring))
    return gens


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL':<5} {self.name}" + (f"  ({self.detail})" if self.detail else "")


@dataclass
class BasisReport:
    checks: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def text(self) -> str:
        lines = [c.line() for c in self.checks] + [f"note  {n}" for n in self.notes]
        return "\n".join(lines) + "\n"


def _ordering(gens) -> MonomialOrdering:
    hom = find_module_weights(gens)
    if hom is None:
        raise GermError("module is not weighted homogeneous")
    return MonomialOrdering("global", hom[0], shifts=hom[1])


def compare(ours: list, theirs: list, budget: float | None = None):
    """Two-sided membership. Returns (theirs not in ours, ours not in theirs, basis of ours)."""
    order = _ordering(ours)
    gb = buchberger(ours, order, budget=budget)
    missing = [i for i, m in enumerate(theirs) if not gb.contains(m)]
    gt = buchberger(theirs, order, budget=budget)
    extra = [i for i, g in enumerate(gb.generators) if not gt.contains(g)]
    return missing, extra, gb


def staircase_colength(i: int, l: int) -> int:
    R = Ring(("X", "Y", "Z", "W", "w"))
    gens = [R.parse(instantiate(m, {"l": l})) for m in STAIRCASE[i]]
    n = colength(gens)
    return n


def verify_reference_basis(levels=(1, 2, 3), staircase_levels=(1, 2), budget: float | None = None,
                           mutation: bool = True) -> BasisReport:
    report = BasisReport()
    t0 = time.perf_counter()
    basis = load_basis()
    theirs = basis.generators()
    ours = module_generators(None, budget)
    missing, extra, gb = compare(ours, theirs, budget)
    names = list(basis.fixed)
    report.checks.append(Check("m1..m17 lie in the computed M0", not missing,
                               "missing " + ", ".join(names[i] for i in missing) if missing else f"{len(theirs)} generators"))
    report.checks.append(Check("computed M0 basis lies in <m1..m17>", not extra,
                               f"{len(extra)} of {len(gb)} outside" if extra else f"{len(gb)} basis elements"))
    direct = buchberger(theirs, gb.ordering, budget=budget)
    report.checks.append(Check("m1 reduces to zero against the computed basis", gb.contains(basis.fixed["m1"])))
    report.notes.append(f"completing m1..m17 to a standard basis gives {len(direct)} elements")
    report.timings["M0"] = time.perf_counter() - t0

    if mutation:
        bad = mutate(basis)
        m_missing, m_extra, _ = compare(ours, bad.generators(), budget)
        report.checks.append(Check("perturbed m3 is rejected", bool(m_missing or m_extra),
                                   "mismatch detected" if (m_missing or m_extra) else "mutation went unnoticed"))

    for l in levels:
        t1 = time.perf_counter()
        family = basis.family(l)
        R = basis.ring
        m18 = PolyVector([R.zero(), R.gen("w") ** (l - 1), R.zero()], R)
        ours_l = module_generators(l, budget)
        missing, extra, gb_l = compare(ours_l, list(family.values()) + [m18], budget)
        names = list(family)
        report.checks.append(Check(f"l={l}: listed generators lie in M_l", not missing,
                                   "missing " + ", ".join(names[i] for i in missing if i < len(names))
                                   if missing else f"{len(names)} generators"))
        report.checks.append(Check(f"l={l}: M_l equals their span with w^(l-1) dU2", not missing and not extra))
        for name, vec in basis.family(l, corrected=False).items():
            if name in basis.corrections and not gb_l.contains(vec):
                report.notes.append(f"l={l}: {name} as printed is not in M_l")
        n = gb_l.colength()
        expected = 30 * l - 18
        report.checks.append(Check(f"l={l}: colength of M_l is 30l-18", n == expected, f"{n} vs {expected}"))
        if l in staircase_levels:
            parts = [staircase_colength(i, l) for i in range(3)]
            want = [10 * l - 5, 11 * l - 11, 9 * l - 2]
            report.checks.append(Check(f"l={l}: staircase summands give 10l-5, 11l-11, 9l-2",
                                       parts == want and sum(parts) == n, f"{parts}, sum {sum(parts)}"))
        report.timings[f"l={l}"] = time.perf_counter() - t1
    return report
