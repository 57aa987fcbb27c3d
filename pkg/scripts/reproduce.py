"""Resumable long-budget runs, one JSON file per (config, seed).

Finished tasks are skipped on restart, so the script can be interrupted and
relaunched. The acceptance suite reads the per-seed files from
``results/acceptance``.

    python scripts/reproduce.py configs/burgers_pinn.yaml configs/wave_ntk.yaml
    python scripts/reproduce.py --summary
"""

import argparse
import json
import logging
import time
from pathlib import Path

from pinnbench.harness import parse_config
from pinnbench.harness.runner import run_task

OUT = Path("results/acceptance")


def task_path(out, cfg, seed):
    return Path(out) / f"{cfg.label}_{cfg.method}_s{seed}.json"


def run(config_paths, out=OUT):
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    for path in config_paths:
        for cfg in parse_config(path):
            for seed in cfg.seeds:
                dest = task_path(out, cfg, seed)
                if dest.exists():
                    logging.info("skip %s (done)", dest.name)
                    continue
                logging.info("start %s", dest.name)
                t0 = time.time()
                res = run_task(cfg, seed)
                res["config"] = str(path)
                res["iterations"] = cfg.train.iterations
                tmp = dest.with_suffix(".tmp")
                tmp.write_text(json.dumps(res, indent=1, sort_keys=True, default=float))
                tmp.replace(dest)
                final = (res.get("metrics") or {}).get("l2re")
                logging.info("done %s status=%s l2re=%s in %.0fs", dest.name, res["status"], final, time.time() - t0)


def summary(out=OUT):
    rows = {}
    for f in sorted(Path(out).glob("*.json")):
        r = json.loads(f.read_text())
        rows.setdefault((r["label"], r["method"]), []).append(r)
    for (label, method), rs in rows.items():
        l2 = [r["metrics"]["l2re"] for r in rs if r["status"] == "ok"]
        mean = sum(l2) / len(l2) if l2 else float("nan")
        secs = sum(r["runtime"] for r in rs)
        print(f"{label:24s} {method:10s} seeds={len(rs)} l2re_mean={mean:.3e} cpu_h={secs / 3600:.2f}")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("configs", nargs="*")
    ap.add_argument("--out", default=str(OUT))
    ap.add_argument("--summary", action="store_true")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")
    if args.configs:
        run(args.configs, args.out)
    if args.summary or not args.configs:
        summary(args.out)


if __name__ == "__main__":
    main()
