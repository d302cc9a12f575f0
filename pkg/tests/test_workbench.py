import json

import pytest

from germforge.workbench import cli
from germforge.workbench.basis import BasisFileError, load_basis, mutate, parse_basis, verify_reference_basis, compare, module_generators
from germforge.workbench.cache import ENGINE_VERSION, ResultCache, ResultRecord, cache_key
from germforge.workbench.catalog import (
    CatalogError,
    germ_names,
    instance_label,
    load,
    load_entries,
    select,
    same_germ,
)
from germforge.workbench.runner import run_reproduction


@pytest.fixture
def cache_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("GERMFORGE_CACHE", str(tmp_path / "cache"))
    return tmp_path / "cache"


# ---------------------------------------------------------------------------
# catalog


def test_every_germ_file_loads():
    for name in germ_names():
        obj = load(name, l=1, k=1)
        assert obj is not None, name


def test_entries_have_references():
    entries = load_entries()
    assert len({e.label for e in entries}) == len(entries)
    for e in entries:
        assert e.reference.split(":")[0] in e.tables
        if e.op != "data":
            assert e.unfolding and e.expected is not None


def test_catalog_germs_match_augmentations():
    for table in ("table1", "table2", "props"):
        for task in select(table):
            if task.entry.op == "data" or task.entry.germ is None:
                continue
            ok = same_germ(task.computed_germ(), task.germ(), task.entry.rename)
            assert ok == (task.entry.germ_check != "differs"), task.label


def test_instance_labels():
    assert instance_label("C_l", {"l": 2}) == "C_2"
    assert instance_label("M_kl", {"k": 1, "l": 2}) == "M_1,2"
    assert instance_label("A2hat", {}) == "A2hat"


def test_select():
    assert [t.label for t in select("table2", ["C_1", "C_2"])] == ["C_1", "C_2"]
    assert [t.expected for t in select("props", ["M_kl"])] == [13, 53, 38]
    with pytest.raises(CatalogError):
        select("table1", ["nosuch"])
    with pytest.raises(CatalogError):
        select("table9")


def test_table4_is_data_only():
    tasks = select("table4")
    assert tasks and all(t.entry.op == "data" for t in tasks)


# ---------------------------------------------------------------------------
# cache


def _record(key="k" * 64, outcome=18):
    return ResultRecord(task_id="codim:A2hat", input_hash=key, operation="codim",
                        parameters={"ordering": "auto"}, outcome=outcome, wall_time=1.5, peak_memory_kb=10)


def test_cache_roundtrip(tmp_path):
    c = ResultCache(tmp_path)
    rec = _record()
    c.store(rec)
    assert c.lookup(rec.input_hash) == rec
    assert c.lookup("0" * 64) is None


def test_cache_is_append_only(tmp_path):
    c = ResultCache(tmp_path)
    c.store(_record(outcome=18))
    c.store(_record(outcome=19))
    assert c.lookup("k" * 64).outcome == 18


def test_corrupt_record_is_quarantined(tmp_path):
    c = ResultCache(tmp_path)
    path = c.store(_record())
    path.write_text(path.read_text().replace("18", "81"))
    assert c.lookup("k" * 64) is None
    assert not path.exists() and (tmp_path / "quarantine" / path.name).exists()


def test_cache_keys():
    base = cache_key("codim", "text")
    assert base == cache_key("codim", "text")
    assert base != cache_key("codim", "text", ordering="local:")
    assert base != cache_key("codim", "text", version=ENGINE_VERSION + "+1")
    assert base != cache_key("codim", "text", seed=1)


# ---------------------------------------------------------------------------
# runner


def test_reproduce_a2hat(tmp_path):
    rep = run_reproduction("table1", ["A2hat"], budget=300, cache=ResultCache(tmp_path))
    assert [r.status for r in rep.results] == ["PASS"]
    assert rep.results[0].line().startswith("PASS") and "[table1:A2hat]" in rep.results[0].line()
    again = run_reproduction("table1", ["A2hat"], budget=300, cache=ResultCache(tmp_path))
    assert again.results[0].cached and again.text == rep.text


def test_reproduce_c_hat_in_table2():
    rep = run_reproduction("table2", ["C_1", "C_2"], budget=300)
    assert [(r.status, r.value) for r in rep.results] == [("PASS", 12), ("PASS", 42)]
    assert not rep.failed


def test_budget_gives_skipped():
    rep = run_reproduction("table1", ["A4hat"], budget=1)
    assert rep.results[0].status == "SKIPPED(time)"
    assert not rep.failed
    assert "SKIPPED(time)" in rep.text


def test_wrong_expectation_fails(monkeypatch):
    from germforge.workbench import runner

    real = runner.compute_task
    monkeypatch.setattr(runner, "compute_task", lambda t: dict(real(t), value=17))
    rep = run_reproduction("table1", ["A2hat"], budget=300)
    assert rep.results[0].status == "FAIL" and rep.failed


# ---------------------------------------------------------------------------
# reference basis


def test_basis_file_parses():
    b = load_basis()
    assert len(b.fixed) == 17 and {"m19", "m20", "m21"} <= set(b.templates)
    with pytest.raises(BasisFileError):
        parse_basis("m1 | X | 0 | 0\n")


def test_reference_basis_level_one():
    rep = verify_reference_basis(levels=(1,), staircase_levels=(1,))
    assert rep.passed, rep.text


def test_mutation_is_detected():
    b = load_basis()
    missing, extra, _ = compare(module_generators(None), mutate(b).generators())
    assert missing or extra


# ---------------------------------------------------------------------------
# command line


def _run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_codim_is_cached(cache_dir, capsys):
    code, first, _ = _run(capsys, "codim", "A2hat", "--json")
    assert code == 0 and json.loads(first)["outcome"] == 18
    code, second, _ = _run(capsys, "codim", "A2hat", "--json")
    assert second == first
    assert len(list((cache_dir / "results").iterdir())) == 1


def test_cli_polynomial_verbs(cache_dir, capsys):
    assert _run(capsys, "gb", "x^2", "x*y+y^2")[1].split() == ["y^3", "x^2", "x*y+y^2"]
    assert _run(capsys, "nf", "y^2", "--ideal", "x^2", "x*y+y^2", "y^3")[1].strip() == "y^2"
    assert _run(capsys, "colength", "x^2", "y^3")[1].strip() == "6"
    assert _run(capsys, "colength", "x", "--vars", "x", "y")[1].strip() == "inf"
    assert _run(capsys, "nf", "x", "--ideal", "x-x^2", "--ordering", "local")[1].strip() == "0"


def test_cli_geometry_verbs(cache_dir, capsys):
    assert _run(capsys, "image", "crosscap")[1].strip() == "Y1^2*Y2-Y3^2"
    code, out, _ = _run(capsys, "discriminant", "F_A2hat", "--restrict", "U1=0", "U3=0")
    assert code == 0 and out.splitlines()[-1] == "U2"


def test_cli_invariant_verbs(cache_dir, capsys):
    code, out, _ = _run(capsys, "aug-codim", "F_A2hat", "--gamma", "(0,w^l,0)", "-l", "2")
    assert (code, out.strip()) == (0, "42")
    assert "finite: True" in _run(capsys, "aug-finite", "F_A2hat", "--gamma", "(0,w,0)")[1]
    out = _run(capsys, "cm-test", "--ideal", "x*y", "y^2", "--param", "x", "--json")[1]
    assert json.loads(out)["outcome"]["is_cm"] is False
    assert "determined: True" in _run(capsys, "d2", "crosscap")[1]
    assert "exists: False" in _run(capsys, "quadline", "y^2*z^2+y*z^3")[1]


def test_cli_usage_errors(cache_dir, capsys):
    assert _run(capsys, "codim", "nosuch")[0] == 2
    assert _run(capsys, "frobnicate")[0] == 2
    assert _run(capsys, "aug-codim", "A2hat", "--gamma", "(w)")[0] == 2
    assert _run(capsys, "reproduce", "table1", "--filter", "nosuch")[0] == 2
    assert _run(capsys, "gb", "x+", "--no-cache")[0] == 2


def test_cli_reproduce_exit_code(cache_dir, capsys):
    code, out, _ = _run(capsys, "reproduce", "table1", "--filter", "A2hat")
    assert code == 0 and out.splitlines()[1].startswith("PASS")
