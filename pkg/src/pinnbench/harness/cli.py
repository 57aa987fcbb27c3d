"""``bench`` command line: run / list / eval."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from pinnbench.errors import BenchError, ConfigError
from pinnbench.eval.metrics import evaluate
from pinnbench.harness.catalog import list_cases, list_methods
from pinnbench.harness.config import parse_config
from pinnbench.harness.export import export_csv, export_json
from pinnbench.harness.runner import run_all
from pinnbench.network.checkpoint import load_checkpoint, read_header
from pinnbench.pde.cases import build_case
from pinnbench.pde.reference import load_reference
from pinnbench.training.model import build_model

EXIT_OK, EXIT_INVALID, EXIT_DIVERGED = 0, 1, 2


def _parse_value(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def cmd_run(args):
    configs = parse_config(args.config)
    if args.out:
        configs = [replace(c, out=args.out) for c in configs]
    out = Path(configs[0].out)
    out.mkdir(parents=True, exist_ok=True)
    log_path = out / "tasks.log"
    log_path.write_text("")
    records, completion = run_all(configs, workers=args.workers, log_path=log_path)
    export_csv(records, out / "results.csv")
    export_json(records, out / "results.json")
    for rec in records:
        l2 = rec.mean["l2re"]
        cell = "--" if rec.unsupported else ("NaN" if l2 is None else f"{l2:.3e}")
        print(f"{rec.label:28s} {rec.method:10s} l2re={cell} diverged={rec.diverged} failed={rec.failed}")
    print(f"{len(completion)} tasks -> {out}")
    if any(rec.failed for rec in records):
        return EXIT_INVALID
    if any(rec.diverged for rec in records) and not args.allow_divergence:
        return EXIT_DIVERGED
    return EXIT_OK


def cmd_list(args):
    if args.what == "cases":
        for c in list_cases():
            tags = ",".join(c["tags"]) or "-"
            print(f"{c['id']:14s} dim={c['dim']} tags={tags:34s} analytic={'yes' if c['analytic'] else 'no':3s} "
                  f"params={','.join(c['params'])} reference={c['reference']} grid={c['grid']}")
    else:
        for m in list_methods():
            skip = ",".join(m["unsupported_cases"]) or "-"
            print(f"{m['id']:10s} optimizer={m['optimizer']:9s} unsupported={skip}")
    return EXIT_OK


def cmd_eval(args):
    params = dict(kv.split("=", 1) for kv in args.param)
    params = {k: _parse_value(v) for k, v in params.items()}
    case = build_case(args.case, **params)
    spec = read_header(args.checkpoint)["spec"]
    model = build_model(case, 0, tuple(spec.get("hidden", (100,) * 5)), spec.get("adaptive", "none"),
                        spec.get("fbpinn"))
    load_checkpoint(args.checkpoint, model)
    ref = load_reference(args.reference, case)
    print(json.dumps(evaluate(case, model, ref).as_dict(), sort_keys=True))
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(prog="bench")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)
    r = sub.add_parser("run")
    r.add_argument("--config", required=True)
    r.add_argument("--workers", type=int, default=1)
    r.add_argument("--out")
    r.add_argument("--allow-divergence", action="store_true")
    r.set_defaults(fn=cmd_run)
    li = sub.add_parser("list")
    li.add_argument("what", choices=["cases", "methods"])
    li.set_defaults(fn=cmd_list)
    e = sub.add_parser("eval")
    e.add_argument("--checkpoint", required=True)
    e.add_argument("--case", required=True)
    e.add_argument("--reference", required=True)
    e.add_argument("--param", action="append", default=[], help="case parameter override k=v")
    e.set_defaults(fn=cmd_eval)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.fn(args)
    except (ConfigError, BenchError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
