"""Task scheduling over a process pool and per-config aggregation."""

from __future__ import annotations

import json
import logging
import math
import multiprocessing as mp
import time
import traceback
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch

from pinnbench.errors import ContractError, UnsupportedCase
from pinnbench.network.checkpoint import save_checkpoint
from pinnbench.pde.cases import RUNTIME_PRIOR, build_case
from pinnbench.pde.reference import load_reference
from pinnbench.training.loop import METHODS, train

log = logging.getLogger(__name__)

METRICS = ("l2re", "l1re", "mse", "max_err", "fmse_low", "fmse_mid", "fmse_high")


def expected_seconds(cfg):
    """Static duration prior for longest-first ordering."""
    case = build_case(cfg.case, **cfg.params)
    base = RUNTIME_PRIOR.get(cfg.case, 300.0 * case.dim)
    return base * cfg.train.iterations / 20000.0


def _reference(cfg, case):
    if cfg.reference in ("auto", "analytic"):
        return "auto"
    return load_reference(cfg.reference, case)


def run_task(cfg, seed):
    """Train one (config, seed) pair and return a plain, picklable result."""
    threads = torch.get_num_threads()
    torch.set_num_threads(1)
    t0 = time.perf_counter()
    out = {"case": cfg.case, "label": cfg.label, "method": cfg.method, "seed": int(seed), "metrics": None,
           "diverged_at": None, "error": None, "notices": []}
    try:
        case = build_case(cfg.case, **cfg.params)
        res = train(case, cfg.loop_config(seed), reference=_reference(cfg, case))
        out["notices"] = list(res.notices)
        if res.diverged:
            out["status"] = "diverged"
            out["diverged_at"] = res.diverged_at
        else:
            out["status"] = "ok"
            final = res.final or {}
            out["metrics"] = {k: final.get(k) for k in METRICS}
        out["trace"] = res.trace
        out["train_seconds"] = res.elapsed
        out["n_interior"] = res.n_interior
        if cfg.save_checkpoints:
            out["checkpoint"] = str(_save(cfg, seed, case, res.model))
    except UnsupportedCase as exc:
        out["status"] = "unsupported"
        out["error"] = str(exc)
    except Exception as exc:  # recorded, the run continues
        out["status"] = "error"
        out["error"] = f"{type(exc).__name__}: {exc}"
        log.debug(traceback.format_exc())
    finally:
        torch.set_num_threads(threads)
    out["runtime"] = time.perf_counter() - t0
    return out


def checkpoint_spec(cfg, case):
    method = METHODS[cfg.method]
    return {
        "case": case.id,
        "params": cfg.params,
        "method": cfg.method,
        "hidden": list(cfg.train.hidden),
        "adaptive": method.adaptive,
        "fbpinn": dict(cfg.train.fbpinn) if method.fbpinn else None,
    }


def _save(cfg, seed, case, model):
    d = Path(cfg.out) / "checkpoints"
    d.mkdir(parents=True, exist_ok=True)
    path = d / f"{cfg.label}_{cfg.method}_s{seed}.ckpt"
    save_checkpoint(path, model, checkpoint_spec(cfg, case))
    return path


@dataclass
class ResultRecord:
    case: str
    method: str
    label: str
    params: dict
    seeds: list  # per-seed task results, ordered by seed
    mean: dict = field(default_factory=dict)
    std: dict = field(default_factory=dict)
    runtime_s: float = 0.0
    diverged: int = 0
    failed: int = 0
    unsupported: bool = False

    @property
    def seed_count(self):
        return len(self.seeds)


def _stats(values):
    vals = [v for v in values if v is not None and math.isfinite(v)]
    if not vals:
        return None, None
    a = np.array(vals, dtype=float)
    return float(a.mean()), float(a.std())


def aggregate(cfg, results):
    """Mean and (population) std of each metric over completed seeds."""
    results = sorted(results, key=lambda r: r["seed"])
    ok = [r for r in results if r["status"] == "ok"]
    rec = ResultRecord(cfg.case, cfg.method, cfg.label, dict(cfg.params), results)
    rec.diverged = sum(r["status"] == "diverged" for r in results)
    rec.failed = sum(r["status"] == "error" for r in results)
    rec.unsupported = any(r["status"] == "unsupported" for r in results)
    for m in METRICS:
        rec.mean[m], rec.std[m] = _stats([r["metrics"][m] for r in ok])
    runtimes = [r["runtime"] for r in results]
    rec.runtime_s = float(np.mean(runtimes)) if runtimes else 0.0
    return rec


def schedule(configs):
    """(config index, seed) tasks, longest expected first; ties keep config order."""
    tasks = [(i, s) for i, c in enumerate(configs) for s in c.seeds]
    prior = {i: expected_seconds(c) for i, c in enumerate(configs)}
    return sorted(tasks, key=lambda t: (-prior[t[0]], t[0], t[1]))


def run_all(configs, workers=1, log_path=None):
    """Execute every (config, seed) task exactly once and aggregate per config.

    Returns (records, completion_log). Each log entry is
    ``{"config": i, "seed": s, "status": ...}`` in completion order.
    """
    if workers < 1:
        raise ContractError("workers must be >= 1")
    tasks = schedule(configs)
    done = {}
    completion = []
    fh = open(log_path, "a", encoding="utf-8") if log_path else None

    def finish(task, result):
        if task in done:
            raise RuntimeError(f"task {task} completed twice")
        done[task] = result
        entry = {"config": task[0], "seed": task[1], "label": configs[task[0]].label,
                 "method": configs[task[0]].method, "status": result["status"]}
        completion.append(entry)
        if fh:
            fh.write(json.dumps(entry, sort_keys=True) + "\n")
            fh.flush()

    try:
        if workers == 1:
            for t in tasks:
                finish(t, run_task(configs[t[0]], t[1]))
        else:
            ctx = mp.get_context("spawn")
            with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as pool:
                futures = {pool.submit(run_task, configs[t[0]], t[1]): t for t in tasks}
                for fut in as_completed(futures):
                    finish(futures[fut], fut.result())
    finally:
        if fh:
            fh.close()
    if len(done) != len(tasks):
        raise RuntimeError("task queue did not drain")
    records = [aggregate(c, [done[(i, s)] for s in c.seeds]) for i, c in enumerate(configs)]
    return records, completion
