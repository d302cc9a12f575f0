"""``germforge`` command line.

Every computing verb produces one ResultRecord; it is looked up in and
stored to the result cache unless ``--no-cache`` is given. Exit codes:
0 success (or all PASS), 1 a FAIL or an exceeded budget, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import re
import resource
import sys
import time
from pathlib import Path

from ..exactpoly import PolySyntaxError, Ring
from ..geometry import ImageError, derlog, image_equation, kv_discriminant_identity
from ..germs import CurveGerm, GermError, MapGerm, Unfolding, dump_germ, instantiate, load_germ
from ..invariants import (
    INFINITE,
    QuotientPresentation,
    ae_codim,
    ae_codim_augmentation,
    augmentation_finite,
    four_point_identity,
    assemble_quadruple_germ,
    is_cm_dim1,
    is_finitely_determined_2_3,
    quadruple_line_witness,
    relative_normal_space,
)
from ..standard_basis import BudgetExceeded, MonomialOrdering, PolyVector, buchberger
from .basis import verify_reference_basis
from .cache import ResultCache, ResultRecord, cache_key
from .catalog import TABLES, CatalogError, germ_path, load_entries
from .runner import run_reproduction

log = logging.getLogger("germforge")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# argument helpers


def _indices(args) -> dict:
    out = {}
    if getattr(args, "l", None) is not None:
        out["l"] = args.l
    if getattr(args, "k", None) is not None:
        out["k"] = args.k
    for item in getattr(args, "index", None) or []:
        name, _, value = item.partition("=")
        try:
            out[name.strip()] = int(value)
        except ValueError:
            raise UsageError(f"bad --index {item!r}; expected NAME=INT") from None
    return out


def resolve_germ(ref: str, indices: dict):
    """A germ file path, or the name of a catalog germ."""
    path = Path(ref)
    try:
        if path.suffix == ".germ" or path.exists():
            if not path.exists():
                raise UsageError(f"no such germ file: {ref}")
            return load_germ(path, **indices)
        return load_germ(germ_path(ref), **indices)
    except CatalogError as exc:
        raise UsageError(str(exc)) from None


def _unfolding(ref: str, indices: dict) -> Unfolding:
    obj = resolve_germ(ref, indices)
    if not isinstance(obj, Unfolding):
        raise UsageError(f"{ref} is a map-germ; this verb needs an unfolding (a file with a params line)")
    return obj


def _map_germ(ref: str, indices: dict) -> MapGerm:
    obj = resolve_germ(ref, indices)
    return obj.base if isinstance(obj, Unfolding) else obj


def _gamma(text: str, var: str, indices: dict) -> CurveGerm:
    return CurveGerm.parse(instantiate(text, indices), var)


_IDENT = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


def _ring_for(texts, names) -> Ring:
    if names:
        return Ring(tuple(names))
    found = sorted({m.group(0) for t in texts for m in _IDENT.finditer(t)})
    if not found:
        found = ["x"]
    return Ring(tuple(found))


def _ordering(args, ring: Ring) -> MonomialOrdering:
    weights = None
    if args.weights:
        try:
            weights = tuple(int(a) for a in args.weights.split(","))
        except ValueError:
            raise UsageError(f"bad --weights {args.weights!r}") from None
        if len(weights) != ring.nvars:
            raise UsageError(f"--weights needs {ring.nvars} entries for variables {' '.join(ring.variables)}")
    kind = "global" if args.ordering in ("auto", "global") else args.ordering
    return MonomialOrdering(kind, weights)


def _ordering_tag(args) -> str:
    return f"{args.ordering}:{args.weights or ''}"


def _num(n):
    return "inf" if n == INFINITE else int(n)


# ---------------------------------------------------------------------------
# verbs: each returns (canonical input text, compute function)


def v_gb(args):
    R = _ring_for(args.polys, args.vars)
    polys = [R.parse(p) for p in args.polys]
    order = _ordering(args, R)

    def run():
        gb = buchberger(polys, order, budget=args.budget)
        return [str(g) for g in gb.polynomials]

    return f"{R.variables}|{order.describe()}|{';'.join(map(str, polys))}", run


def v_nf(args):
    R = _ring_for([args.poly] + args.ideal, args.vars)
    p = R.parse(args.poly)
    ideal = [R.parse(q) for q in args.ideal]
    order = _ordering(args, R)

    def run():
        return str(buchberger(ideal, order, budget=args.budget).normal_form(p))

    return f"{R.variables}|{order.describe()}|{p}|{';'.join(map(str, ideal))}", run


def v_colength(args):
    R = _ring_for(args.polys, args.vars)
    polys = [R.parse(p) for p in args.polys]
    if args.ordering == "auto":
        Q = QuotientPresentation(R, 1, [PolyVector([p], R) for p in polys])

        def run():
            return _num(Q.colength("auto", args.budget))
    else:
        order = _ordering(args, R)

        def run():
            n = buchberger(polys, order, budget=args.budget).colength()
            return "inf" if n is None else n

    return f"{R.variables}|{_ordering_tag(args)}|{';'.join(map(str, polys))}", run


def v_image(args):
    f = _map_germ(args.germ, _indices(args))
    return dump_germ(f), lambda: str(image_equation(f, args.budget))


def v_derlog(args):
    f = _map_germ(args.germ, _indices(args))

    def run():
        M = derlog(image_equation(f, args.budget), args.mode, args.budget)
        return {"ambient": list(M.ring.variables), "generators": [str(g) for g in M.generators]}

    return dump_germ(f) + f"|{args.mode}", run


def _restriction(items) -> dict:
    out = {}
    for item in items or []:
        name, eq, value = item.partition("=")
        if not eq:
            raise UsageError(f"bad --restrict {item!r}; expected NAME=POLY")
        out[name.strip()] = value.strip()
    return out


def v_discriminant(args):
    F = _unfolding(args.unfolding, _indices(args))
    restrict = _restriction(args.restrict)

    def run():
        D = kv_discriminant_identity(F, args.budget, restrict=restrict or None, method=args.method)
        return {"ring": list(D.ring.variables), "generators": [str(g) for g in D.generators],
                "restriction": dict(restrict)}

    return dump_germ(F) + f"|{sorted(restrict.items())}|{args.method}", run


def v_codim(args):
    idx = _indices(args)
    obj = resolve_germ(args.germ, idx)
    if args.unfolding:
        F = _unfolding(args.unfolding, idx)
        f = obj.base if isinstance(obj, Unfolding) else obj
    elif isinstance(obj, Unfolding):
        F, f = obj, obj.base
    else:
        F, f = _catalog_unfolding(args.germ, idx), obj
    return dump_germ(f) + "|" + dump_germ(F), lambda: _num(ae_codim(f, F, budget=args.budget))


def _catalog_unfolding(name: str, idx: dict) -> Unfolding:
    """The stable unfolding the catalog pairs with a germ name."""
    for e in load_entries():
        if e.op == "codim" and e.germ == name and e.unfolding:
            return _unfolding(e.unfolding, idx)
    raise UsageError(f"no stable unfolding known for {name}; pass one with --unfolding")


def v_aug_codim(args):
    idx = _indices(args)
    F = _unfolding(args.unfolding, idx)
    g = _gamma(args.gamma, args.curve_var, idx)
    return dump_germ(F) + f"|{g}", lambda: _num(ae_codim_augmentation(F, g, budget=args.budget))


def v_aug_finite(args):
    idx = _indices(args)
    F = _unfolding(args.unfolding, idx)
    g = _gamma(args.gamma, args.curve_var, idx)

    def run():
        rep = augmentation_finite(F, g, args.method, args.local_only, args.budget)
        return {"finite": rep.finite, "method": rep.method, "detail": rep.detail}

    return dump_germ(F) + f"|{g}|{args.method}|{args.local_only}", run


def _cm_presentation(args):
    idx = _indices(args)
    if args.ideal:
        R = _ring_for(args.ideal + [args.param], args.vars)
        rels = [PolyVector([R.parse(p)], R) for p in args.ideal]
        return QuotientPresentation(R, 1, rels, label="ideal"), args.param, f"{R.variables}|{args.ideal}"
    if not args.unfolding:
        raise UsageError("cm-test needs an unfolding or --ideal")
    F = _unfolding(args.unfolding, idx)
    g = _gamma(args.gamma, args.curve_var, idx) if args.gamma else None
    alpha = [a.strip() for a in instantiate(args.deformation, idx).strip("()").split(",")] if args.deformation else None
    P = relative_normal_space(F, g, alpha, deform_var=args.param, budget=args.budget)
    return P, args.param, dump_germ(F) + f"|{g}|{alpha}|{args.param}"


def v_cm_test(args):
    P, t, text = _cm_presentation(args)

    def run():
        rep = is_cm_dim1(P, t, seed=args.seed, budget=args.budget)
        return {"is_cm": rep.is_cm, "dimension": rep.dimension, "reason": rep.reason,
                "fiber_lengths": {str(k): _num(v) for k, v in rep.fiber_lengths.items()}}

    return text, run


def v_d2(args):
    f = _map_germ(args.germ, _indices(args))

    def run():
        rep = is_finitely_determined_2_3(f, args.budget)
        return {"determined": rep.determined, "dimension": rep.dimension,
                "colength": None if rep.colength is None else _num(rep.colength),
                "generators": [str(g) for g in rep.generators], "note": rep.note}

    return dump_germ(f), run


def v_quadline(args):
    R = Ring(("x", "y", "z"))
    P = R.parse(args.poly)

    def run():
        wit = quadruple_line_witness(P)
        out = {"exists": wit.exists, "alpha": None if wit.alpha is None else str(wit.alpha), "note": wit.note}
        if wit.alpha is not None:
            out["four_point_identity"] = four_point_identity(assemble_quadruple_germ(P), wit.alpha)
        return out

    return str(P), run


VERBS = {
    "gb": v_gb, "nf": v_nf, "colength": v_colength, "image": v_image, "derlog": v_derlog,
    "discriminant": v_discriminant, "codim": v_codim, "aug-codim": v_aug_codim,
    "aug-finite": v_aug_finite, "cm-test": v_cm_test, "d2": v_d2, "quadline": v_quadline,
}


def _format(verb: str, outcome) -> str:
    if isinstance(outcome, list):
        return "\n".join(outcome)
    if not isinstance(outcome, dict):
        return str(outcome)
    if verb == "discriminant":
        where = ", ".join(f"{k}={v}" for k, v in outcome["restriction"].items())
        head = f"D_V(G) in {' '.join(outcome['ring']) or '(no parameters)'}" + (f" on [{where}]" if where else "")
        return head + "\n" + "\n".join(outcome["generators"])
    if verb == "derlog":
        return "\n".join(outcome["generators"])
    return "\n".join(f"{k}: {v}" for k, v in outcome.items() if k != "generators")


def run_verb(args) -> int:
    text, compute = VERBS[args.verb](args)
    key = cache_key(args.verb, text, _ordering_tag(args), args.seed)
    cache = None if args.no_cache else ResultCache()
    rec = cache.lookup(key) if cache else None
    if rec is None:
        t0 = time.perf_counter()
        outcome = compute()
        params = {k: v for k, v in vars(args).items()
                  if k in ("l", "k", "index", "ordering", "weights", "seed", "gamma", "restrict") and v is not None}
        rec = ResultRecord(task_id=f"{args.verb}:{key[:12]}", input_hash=key, operation=args.verb,
                           parameters=params, outcome=outcome, wall_time=round(time.perf_counter() - t0, 6),
                           peak_memory_kb=resource.getrusage(resource.RUSAGE_SELF).ru_maxrss)
        if cache:
            cache.store(rec)
    if args.json:
        print(rec.to_json())
    else:
        print(_format(args.verb, rec.outcome))
    return EXIT_OK


def run_reproduce(args) -> int:
    cache = None if args.no_cache else ResultCache()
    budget = args.budget if args.budget is not None else 600.0
    try:
        report = run_reproduction(args.table, args.filter, budget, args.jobs, cache)
    except CatalogError as exc:
        raise UsageError(str(exc)) from None
    if args.json:
        print(json.dumps(report.to_json(), indent=1))
    else:
        sys.stdout.write(report.text)
    return EXIT_FAIL if report.failed else EXIT_OK


def run_verify_basis(args) -> int:
    report = verify_reference_basis(budget=args.budget)
    if args.json:
        print(json.dumps({"passed": report.passed, "notes": report.notes,
                          "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in report.checks]},
                         indent=1))
    else:
        sys.stdout.write(report.text)
    return EXIT_OK if report.passed else EXIT_FAIL


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ordering", default="auto", choices=("auto", "global", "local"),
                        help="monomial ordering for gb/nf/colength (auto: weighted if homogeneous)")
    common.add_argument("--weights", help="comma separated positive variable weights")
    common.add_argument("--budget", type=float, help="time budget in seconds")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized checks (default 0)")
    common.add_argument("--local-only", action="store_true", help="decide curve questions in the local ring")
    common.add_argument("--json", action="store_true", help="print the JSON result record")
    common.add_argument("--no-cache", action="store_true", help="neither read nor write the result cache")
    common.add_argument("-v", "--verbose", action="store_true")

    idx = argparse.ArgumentParser(add_help=False)
    idx.add_argument("-l", type=int, help="family index l")
    idx.add_argument("-k", type=int, help="family index k")
    idx.add_argument("--index", action="append", metavar="NAME=INT", help="other family indices")

    p = argparse.ArgumentParser(prog="germforge", description="Invariants of map-germs over the rationals.")
    sub = p.add_subparsers(dest="verb", required=True, metavar="verb")

    def add(name, help_, *parents):
        return sub.add_parser(name, help=help_, parents=[common, *parents])

    s = add("gb", "standard basis of an ideal")
    s.add_argument("polys", nargs="+")
    s.add_argument("--vars", nargs="+", help="ring variables (default: sorted identifiers)")
    s = add("nf", "normal form of a polynomial modulo an ideal")
    s.add_argument("poly")
    s.add_argument("--ideal", nargs="+", required=True)
    s.add_argument("--vars", nargs="+")
    s = add("colength", "dimension of the quotient by an ideal")
    s.add_argument("polys", nargs="+")
    s.add_argument("--vars", nargs="+")

    s = add("image", "reduced image equation of a germ C^n -> C^(n+1)", idx)
    s.add_argument("germ", help="catalog name or .germ file")
    s = add("derlog", "generators of Der(-log V) for the image V", idx)
    s.add_argument("germ")
    s.add_argument("--mode", default="V", choices=("V", "H"))
    s = add("discriminant", "K_V-discriminant of the identity of an unfolding", idx)
    s.add_argument("unfolding")
    s.add_argument("--restrict", nargs="+", metavar="U=POLY", help="substitute parameters first (slice)")
    s.add_argument("--method", default="annihilator", choices=("annihilator", "fitting"))

    s = add("codim", "A_e-codimension via a stable unfolding", idx)
    s.add_argument("germ")
    s.add_argument("--unfolding", help="stable unfolding of GERM (default: GERM itself)")
    s = add("aug-codim", "A_e-codimension of an augmentation", idx)
    s.add_argument("unfolding")
    s.add_argument("--gamma", required=True, help='curve, e.g. "(0,w^l,0)"')
    s.add_argument("--curve-var", default="w")
    s = add("aug-finite", "sufficient test for A-finiteness of an augmentation", idx)
    s.add_argument("unfolding")
    s.add_argument("--gamma", required=True)
    s.add_argument("--curve-var", default="w")
    s.add_argument("--method", default="discriminant", choices=("discriminant", "curve"))
    s = add("cm-test", "Cohen-Macaulay test of a module over a parameter line", idx)
    s.add_argument("unfolding", nargs="?")
    s.add_argument("--gamma")
    s.add_argument("--curve-var", default="w")
    s.add_argument("--deformation", help='components of alpha(Y, v), e.g. "(v,0,0)"')
    s.add_argument("--param", default="v", help="parameter of the line (default v)")
    s.add_argument("--ideal", nargs="+", help="test O/(ideal) instead of a normal space")
    s.add_argument("--vars", nargs="+")
    s = add("d2", "double point test for germs C^2 -> C^3", idx)
    s.add_argument("germ")
    s = add("quadline", "quadruple-line witness for a polynomial P(x, y, z)")
    s.add_argument("poly")

    s = add("reproduce", "recompute a catalog table against its expected values")
    s.add_argument("table", choices=TABLES)
    s.add_argument("--filter", nargs="+", metavar="LABEL")
    s.add_argument("--jobs", type=int, default=1)
    add("verify-basis", "check the transcribed basis of the F_A2hat augmentation module")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.verb == "reproduce":
            return run_reproduce(args)
        if args.verb == "verify-basis":
            return run_verify_basis(args)
        return run_verb(args)
    except UsageError as exc:
        print(f"germforge: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (GermError, ImageError, PolySyntaxError, ValueError) as exc:
        print(f"germforge: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"SKIPPED(time): {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
