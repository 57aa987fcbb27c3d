"""CSV and JSON materialization of result records."""

from __future__ import annotations

import csv
import json
import math
import statistics

from pinnbench.errors import ContractError
from pinnbench.harness.runner import METRICS, ResultRecord

CSV_COLUMNS = (
    "case", "method", "seed_count",
    "l2re_mean", "l2re_std", "l1re_mean", "l1re_std", "mse_mean", "mse_std", "maxerr_mean", "maxerr_std",
    "fmse_low", "fmse_mid", "fmse_high", "runtime_s", "diverged",
)


def _num(x):
    return "" if x is None or (isinstance(x, float) and not math.isfinite(x)) else repr(float(x))


def csv_row(rec: ResultRecord):
    m, s = rec.mean, rec.std
    return {
        "case": rec.label,
        "method": rec.method,
        "seed_count": rec.seed_count,
        "l2re_mean": _num(m["l2re"]), "l2re_std": _num(s["l2re"]),
        "l1re_mean": _num(m["l1re"]), "l1re_std": _num(s["l1re"]),
        "mse_mean": _num(m["mse"]), "mse_std": _num(s["mse"]),
        "maxerr_mean": _num(m["max_err"]), "maxerr_std": _num(s["max_err"]),
        "fmse_low": _num(m["fmse_low"]), "fmse_mid": _num(m["fmse_mid"]), "fmse_high": _num(m["fmse_high"]),
        "runtime_s": _num(rec.runtime_s),
        "diverged": rec.diverged,
    }


def export_csv(records, path):
    if not records:
        raise ContractError("nothing to export")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
        w.writeheader()
        for rec in records:
            w.writerow(csv_row(rec))


def _clean(x):
    """JSON-safe copy: non-finite floats become null."""
    if isinstance(x, float):
        return x if math.isfinite(x) else None
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    return x


def record_to_dict(rec: ResultRecord):
    return _clean({
        "case": rec.case,
        "method": rec.method,
        "label": rec.label,
        "params": rec.params,
        "seed_count": rec.seed_count,
        "mean": rec.mean,
        "std": rec.std,
        "runtime_s": rec.runtime_s,
        "diverged": rec.diverged,
        "failed": rec.failed,
        "unsupported": rec.unsupported,
        "seeds": rec.seeds,
    })


def record_from_dict(d):
    return ResultRecord(
        d["case"], d["method"], d["label"], d["params"], d["seeds"], d["mean"], d["std"],
        d["runtime_s"], d["diverged"], d["failed"], d["unsupported"],
    )


def dumps(records):
    return json.dumps([record_to_dict(r) for r in records], sort_keys=True, indent=2) + "\n"


def export_json(records, path):
    if not records:
        raise ContractError("nothing to export")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(records))


def load_json(path):
    with open(path, encoding="utf-8") as fh:
        return [record_from_dict(d) for d in json.load(fh)]


def export(records, path, fmt):
    if fmt == "csv":
        export_csv(records, path)
    elif fmt == "json":
        export_json(records, path)
    else:
        raise ContractError(f"unknown export format {fmt!r}")


def recompute(rec: ResultRecord):
    """Mean/std per metric recomputed from the per-seed detail by a separate route."""
    out = {}
    ok = [r for r in rec.seeds if r["status"] == "ok"]
    for m in METRICS:
        vals = [r["metrics"][m] for r in ok if r["metrics"][m] is not None]
        out[m] = (statistics.fmean(vals), statistics.pstdev(vals)) if vals else (None, None)
    return out
