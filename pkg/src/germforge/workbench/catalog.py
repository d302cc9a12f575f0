"""The germ catalog: germ files plus the entries tying them to expected values."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..germs import CurveGerm, GermError, MapGerm, Unfolding, _int_expr, augment, instantiate, load_germ

CATALOG_DIR = Path(__file__).resolve().parent.parent / "catalog"
TABLES = ("table1", "table2", "props", "table4")


class CatalogError(LookupError):
    pass


def germ_path(name: str) -> Path:
    path = CATALOG_DIR / f"{name}.germ"
    if not path.exists():
        raise CatalogError(f"no catalog germ named {name!r}")
    return path


def germ_names() -> list:
    return sorted(p.stem for p in CATALOG_DIR.glob("*.germ"))


def load(name: str, **indices):
    """Load a catalog germ or unfolding, instantiating family indices."""
    return load_germ(germ_path(name), **indices)


def _eval_map(spec: dict, values: dict) -> dict:
    out = {}
    for k, v in spec.items():
        out[k] = int(v) if isinstance(v, int) else _int_expr(str(v), values)
    return out


@dataclass
class CatalogEntry:
    label: str
    tables: list
    op: str
    reference: str
    tier: str = "fast"
    expected: object = None
    unfolding: str | None = None
    unfolding_index: dict | None = None
    germ: str | None = None
    germ_index: dict | None = None
    gamma: str | None = None
    curve_var: str = "w"
    instances: list = field(default_factory=lambda: [{}])
    rename: dict = field(default_factory=dict)
    germ_check: str = "equal"
    note: str = ""
    germ_text: str = ""
    initial: str = ""
    initial_label: str = ""

    def tasks(self) -> list:
        return [Task(self, dict(v)) for v in self.instances]


def instance_label(label: str, values: dict) -> str:
    """``C_l`` with l=2 becomes ``C_2``; ``M_kl`` with k=1, l=2 becomes ``M_1,2``."""
    if not values or "_" not in label:
        return label
    head, _, tail = label.partition("_")
    parts = [str(values[c]) if c in values else c for c in tail]
    return head + "_" + ",".join(parts) if len(parts) > 1 else head + "_" + parts[0]


@dataclass
class Task:
    """One concrete computation: an entry at fixed index values."""

    entry: CatalogEntry
    values: dict

    @property
    def label(self) -> str:
        return instance_label(self.entry.label, self.values)

    @property
    def expected(self):
        exp = self.entry.expected
        if exp is None or isinstance(exp, int):
            return exp
        return _int_expr(str(exp), self.values)

    def unfolding(self) -> Unfolding:
        idx = _eval_map(self.entry.unfolding_index or {}, self.values)
        return load(self.entry.unfolding, **idx)

    def gamma(self) -> CurveGerm | None:
        if self.entry.gamma is None:
            return None
        return CurveGerm.parse(instantiate(self.entry.gamma, self.values), self.entry.curve_var)

    def germ(self) -> MapGerm | None:
        if self.entry.germ is None:
            return None
        spec = self.entry.germ_index
        idx = _eval_map(spec, self.values) if spec is not None else dict(self.values)
        return load(self.entry.germ, **idx)

    def describe(self) -> str:
        """Canonical text of the inputs, used for cache keys."""
        F = self.unfolding()
        parts = [self.entry.op, F.label, ";".join(str(c) for c in F.deformed)]
        g = self.gamma()
        if g is not None:
            parts.append(g.variable + ":" + ",".join(str(c) for c in g.components))
        return "|".join(parts)

    def computed_germ(self) -> MapGerm:
        F = self.unfolding()
        g = self.gamma()
        return F.base if g is None else augment(F, g)


def load_entries() -> list:
    raw = json.loads((CATALOG_DIR / "entries.json").read_text())
    return [CatalogEntry(**e) for e in raw]


def entry(label: str) -> CatalogEntry:
    for e in load_entries():
        if e.label == label:
            return e
    raise CatalogError(f"no catalog entry {label!r}")


def select(table: str, labels=None) -> list:
    """Tasks of ``table``, optionally restricted to entry or instance labels."""
    if table not in TABLES:
        raise CatalogError(f"unknown table {table!r}; expected one of {', '.join(TABLES)}")
    tasks = [t for e in load_entries() if table in e.tables for t in e.tasks()]
    if labels:
        wanted = set(labels)
        chosen = [t for t in tasks if t.label in wanted or t.entry.label in wanted]
        found = {t.label for t in chosen} | {t.entry.label for t in chosen}
        missing = wanted - found
        if missing:
            raise CatalogError(f"no catalog entry for {sorted(missing)} in {table}")
        tasks = chosen
    return tasks


def same_germ(f: MapGerm, g: MapGerm, rename: dict | None = None) -> bool:
    """Equal after renaming source variables positionally and permuting targets.

    ``rename`` maps variable names of f to names of g where they differ.
    """
    rename = rename or {}
    names = [rename.get(v, v) for v in f.ring.variables]
    if sorted(names) != sorted(g.ring.variables) or f.target_dim != g.target_dim:
        return False
    images = {v: g.ring.gen(n) for v, n in zip(f.ring.variables, names)}
    try:
        mine = sorted(str(c.subs(images, g.ring)) for c in f.components)
    except GermError:
        return False
    return mine == sorted(str(c) for c in g.components)
