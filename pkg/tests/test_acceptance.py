"""Acceptance criteria. Each test prints exactly one PASS/FAIL line.

Optional long-running targets (criterion 9) use the budget in seconds from
GERMFORGE_LONG_BUDGET (default 60); over-budget targets count as
SKIPPED(time), which is a pass for that criterion.
"""

import os
import time

import pytest

from germforge.exactpoly import Ring
from germforge.germs import CurveGerm
from germforge.geometry import kv_discriminant_identity
from germforge.invariants import (
    QuotientPresentation,
    ae_codim_augmentation,
    augmentation_finite,
    is_cm_dim1,
    is_finitely_determined_2_3,
    relative_normal_space,
)
from germforge.standard_basis import PolyVector
from germforge.workbench import cli
from germforge.workbench.basis import verify_reference_basis
from germforge.workbench.catalog import load
from germforge.workbench.runner import run_reproduction

LONG_BUDGET = float(os.environ.get("GERMFORGE_LONG_BUDGET", "60"))


@pytest.fixture
def report(capsys):
    """Call report(n, ok, detail) once per criterion."""

    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\nCRITERION {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail

    return emit


def _single(table, label, budget):
    t0 = time.perf_counter()
    rep = run_reproduction(table, [label], budget=budget)
    return rep.results[0], time.perf_counter() - t0


def test_criterion_01_a2hat(report):
    r, dt = _single("table1", "A2hat", 15 * 60)
    report(1, r.status == "PASS" and r.value == 18, f"reproduce table1 A2hat -> {r.status} {r.value} ({dt:.0f}s)")


def test_criterion_02_b3hat(report):
    r, dt = _single("table1", "B3hat", 30 * 60)
    report(2, r.status == "PASS" and r.value == 33, f"reproduce table1 B3hat -> {r.status} {r.value} ({dt:.0f}s)")


def test_criterion_03_c_hat_family(report):
    F = load("F_A2hat")
    got = [ae_codim_augmentation(F, CurveGerm.parse(f"(0,w^{l},0)")) for l in (1, 2, 3)]
    want = [30 * l - 18 for l in (1, 2, 3)]
    report(3, got == want, f"aug-codim F_A2hat (0,w^l,0), l=1,2,3 -> {got} (30l-18: {want})")


def test_criterion_04_reference_basis(report):
    t0 = time.perf_counter()
    rep = verify_reference_basis(levels=(1, 2, 3), staircase_levels=(1, 2))
    dt = time.perf_counter() - t0
    failed = [c.name for c in rep.checks if not c.passed]
    report(4, rep.passed and dt < 600, f"verify-basis: {len(rep.checks)} checks, failed {failed or 'none'} ({dt:.0f}s)")


def test_criterion_05_augmentation_finiteness(report):
    F = load("F_A2hat")
    a2 = augmentation_finite(F, CurveGerm.parse("(0,w,0)"))
    H = load("F_hhat1")
    fl = [augmentation_finite(H, CurveGerm.parse(f"(w^{l},-w^{l},0,0,0)")).finite for l in (1, 2)]
    # a curve inside the computed discriminant: on the slice U3 = 0 the
    # discriminant contains the factor U2, so the U1-axis lies inside it
    D = kv_discriminant_identity(F, restrict={"U3": "0"})
    line = {"U1": D.ring.gen("U1"), "U2": D.ring.zero()}
    inside = all(g.subs(line, D.ring).is_zero() for g in D.generators)
    bad = augmentation_finite(F, CurveGerm.parse("(w,0,0)"))
    ok = a2.finite and all(fl) and inside and not bad.finite
    report(5, ok, f"aug-finite: A2hat (0,w,0) {a2.finite}; f_l l=1,2 {fl}; "
                  f"(w,0,0) inside D={D} {inside} -> {bad.finite}")


def test_criterion_06_cohen_macaulay(report):
    R = Ring(("x", "y"))
    t0 = time.perf_counter()
    fixture = is_cm_dim1(QuotientPresentation(R, 1, [PolyVector.of(["x*y"], R), PolyVector.of(["y^2"], R)]), "x")
    t_fix = time.perf_counter() - t0
    P = relative_normal_space(load("F_A2hat"), CurveGerm.parse("(0,w,0)"), ["v", "0", "0"])
    c1 = is_cm_dim1(P, "v")
    ok = c1.is_cm and not fixture.is_cm and t_fix < 1.0
    lengths = sorted(set(c1.fiber_lengths.values()))
    report(6, ok, f"cm-test: C_1 deformation {c1.is_cm} (lengths {lengths}); "
                  f"O/(xy,y^2) over x {fixture.is_cm} ({t_fix:.2f}s)")


def test_criterion_07_double_points(report):
    h1 = is_finitely_determined_2_3(load("hhat_l", l=1))
    h2 = is_finitely_determined_2_3(load("h_k", k=2))
    report(7, h1.determined and h2.determined, f"d2: hhat_1 {h1.determined}, h_2 {h2.determined}")


def test_criterion_08_property_suites(report):
    import test_properties as props

    names = [n for n in dir(props) if n.startswith("test_")]
    counts = {}
    for n in names:
        fn = getattr(props, n)
        settings = getattr(fn, "_hypothesis_internal_use_settings", None)
        if settings is not None:
            counts[n] = settings.max_examples
        fn()
    small = {n: c for n, c in counts.items() if c < 1000}
    report(8, len(counts) >= 6 and not small,
           f"property suites: {len(counts)} randomized suites x >= 1000 cases, all passed")


def test_criterion_09_long_targets(report):
    targets = [("table1", "A3hat"), ("table1", "B5hat_p"), ("props", "f_2"), ("props", "M_1,1")]
    lines = []
    ok = True
    for table, label in targets:
        rep = run_reproduction(table, [label], budget=LONG_BUDGET)
        r = rep.results[0]
        ok &= r.status in ("PASS", "SKIPPED(time)")
        lines.append(f"{label} {r.status}" + (f" {r.value}" if r.value is not None else ""))
    report(9, ok, f"long targets (budget {LONG_BUDGET:g}s): " + ", ".join(lines))


def test_criterion_10_scope(report):
    verbs = set(cli.VERBS)
    no_mu = not any("mu" in v for v in verbs)
    route = {"codim", "aug-codim", "cm-test"} <= verbs
    report(10, no_mu and route, "image Milnor numbers excluded; route is finite codimension plus cm-test")
