"""Reproduction runner: compute catalog invariants and compare with expectations.

Each task runs in a child process so that the time budget can be enforced
by termination; over-budget tasks are reported as SKIPPED(time).
"""

from __future__ import annotations

import logging
import multiprocessing as mp
import resource
import time
import traceback
from dataclasses import dataclass, field
from multiprocessing.connection import wait

from ..invariants import INFINITE, ae_codim, ae_codim_augmentation
from .cache import ResultCache, ResultRecord, cache_key
from .catalog import Task, same_germ, select

log = logging.getLogger(__name__)


def compute_task(task: Task) -> dict:
    """Evaluate one task in-process. Returns a plain dict (picklable)."""
    F = task.unfolding()
    if task.entry.op == "codim":
        value = ae_codim(F.base, F)
    elif task.entry.op == "aug-codim":
        value = ae_codim_augmentation(F, task.gamma())
    else:
        raise ValueError(f"task {task.label} has no computable operation ({task.entry.op})")
    check = "n/a"
    germ = task.germ()
    if germ is not None:
        check = "equal" if same_germ(task.computed_germ(), germ, task.entry.rename) else "differs"
    return {"value": "inf" if value == INFINITE else int(value), "germ_check": check}


def _child(task: Task, conn) -> None:
    t0 = time.perf_counter()
    try:
        out = compute_task(task)
        out["status"] = "ok"
    except Exception as exc:  # reported, never raised across the pipe
        out = {"status": "error", "error": f"{type(exc).__name__}: {exc}",
               "trace": traceback.format_exc(limit=3)}
    out["wall_time"] = time.perf_counter() - t0
    out["peak_memory_kb"] = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss
    conn.send(out)
    conn.close()


@dataclass
class TaskResult:
    task: Task
    status: str  # PASS, FAIL, SKIPPED(time), ERROR
    value: object = None
    detail: str = ""
    wall_time: float = 0.0
    cached: bool = False

    def line(self) -> str:
        t = self.task
        exp = t.expected
        if self.status.startswith("SKIPPED"):
            body = f"expected={exp}"
        elif self.status == "ERROR":
            body = self.detail
        else:
            body = f"{t.entry.op}={self.value} expected={exp}"
        extra = ""
        if self.detail and self.status != "ERROR":
            extra = f" ({self.detail})"
        return f"{self.status:<13} {t.label:<10} {body}{extra}  [{t.entry.reference}]"


@dataclass
class ReproductionReport:
    table: str
    budget: float
    results: list = field(default_factory=list)

    @property
    def text(self) -> str:
        head = f"reproduce {self.table} (budget {self.budget:g}s per task)"
        counts = {}
        for r in self.results:
            key = r.status.split("(")[0]
            counts[key] = counts.get(key, 0) + 1
        tail = ", ".join(f"{k} {v}" for k, v in sorted(counts.items()))
        return "\n".join([head] + [r.line() for r in self.results] + [f"summary: {tail}"]) + "\n"

    @property
    def failed(self) -> bool:
        return any(r.status in ("FAIL", "ERROR") for r in self.results)

    def to_json(self) -> list:
        return [{"label": r.task.label, "status": r.status, "value": r.value, "expected": r.task.expected,
                 "reference": r.task.entry.reference, "detail": r.detail, "wall_time": round(r.wall_time, 3),
                 "cached": r.cached} for r in self.results]


def _judge(task: Task, out: dict) -> TaskResult:
    if out.get("status") == "error":
        return TaskResult(task, "ERROR", None, out["error"], out.get("wall_time", 0.0))
    value = out["value"]
    status = "PASS" if value == task.expected else "FAIL"
    detail = ""
    check = out.get("germ_check", "n/a")
    if check == "differs" and task.entry.germ_check != "differs":
        status = "FAIL"
        detail = "augmentation differs from the cataloged germ"
    elif check == "differs":
        detail = "cataloged germ differs as noted"
    return TaskResult(task, status, value, detail, out.get("wall_time", 0.0))


def run_reproduction(table: str, labels=None, budget: float = 600.0, jobs: int = 1,
                     cache: ResultCache | None = None) -> ReproductionReport:
    """Run every selected task with a per-task time budget (seconds)."""
    tasks = select(table, labels)
    tasks = [t for t in tasks if t.entry.op != "data"]
    report = ReproductionReport(table, budget)
    results: dict = {}
    pending = []
    for i, t in enumerate(tasks):
        if cache is not None:
            rec = cache.lookup(cache_key(t.entry.op, t.describe()))
            if rec is not None:
                res = _judge(t, dict(rec.outcome, status="ok"))
                res.cached = True
                res.wall_time = rec.wall_time
                results[i] = res
                continue
        pending.append(i)

    ctx = mp.get_context("fork")
    running: dict = {}
    queue = list(pending)
    while queue or running:
        while queue and len(running) < max(1, jobs):
            i = queue.pop(0)
            recv, send = ctx.Pipe(duplex=False)
            proc = ctx.Process(target=_child, args=(tasks[i], send), daemon=True)
            proc.start()
            send.close()
            running[recv] = (i, proc, time.monotonic() + budget)
        now = time.monotonic()
        timeout = max(0.0, min(d for _, _, d in running.values()) - now)
        ready = wait(list(running), timeout=timeout)
        for conn in ready:
            i, proc, _ = running.pop(conn)
            try:
                out = conn.recv()
            except EOFError:
                out = {"status": "error", "error": f"worker exited with code {proc.exitcode}"}
            proc.join()
            results[i] = _judge(tasks[i], out)
            if cache is not None and out.get("status") == "ok":
                t = tasks[i]
                rec = ResultRecord(task_id=t.label, input_hash=cache_key(t.entry.op, t.describe()),
                                   operation=t.entry.op, parameters=dict(t.values),
                                   outcome={"value": out["value"], "germ_check": out["germ_check"]},
                                   wall_time=out["wall_time"], peak_memory_kb=out["peak_memory_kb"])
                cache.store(rec)
        now = time.monotonic()
        for conn, (i, proc, deadline) in list(running.items()):
            if now >= deadline:
                proc.terminate()
                proc.join()
                running.pop(conn)
                results[i] = TaskResult(tasks[i], "SKIPPED(time)", None, f"budget {budget:g}s", budget)
                log.info("%s exceeded the budget", tasks[i].label)
    report.results = [results[i] for i in range(len(tasks))]
    return report
