import csv
import io
import json
import statistics
from contextlib import redirect_stdout
from types import SimpleNamespace

import pytest
import yaml

from pinnbench.errors import ConfigError, ContractError
from pinnbench.harness import runner
from pinnbench.harness.catalog import list_cases, list_methods
from pinnbench.harness.cli import EXIT_DIVERGED, EXIT_INVALID, EXIT_OK, main
from pinnbench.harness.config import parse_config, parse_config_dict
from pinnbench.harness.export import CSV_COLUMNS, dumps, export, export_csv, export_json, load_json, recompute
from pinnbench.harness.runner import METRICS, aggregate, run_all, schedule
from pinnbench.network.checkpoint import save_checkpoint
from pinnbench.pde import build_case
from pinnbench.pde.reference import reference_for, write_reference
from pinnbench.training import build_model

TINY = {"iterations": 4, "n_interior": 48, "n_boundary": 24, "hidden": [6], "eval_period": 2}


def tiny_runs(methods=("pinn",), seeds=(0, 1, 2), case="Wave1d-C"):
    return parse_config_dict({"case": case, "method": list(methods), "seeds": list(seeds), "train": TINY})


def write_yaml(tmp_path, doc, name="run.yaml"):
    p = tmp_path / name
    p.write_text(yaml.safe_dump(doc))
    return p


def fake_divergent_train(case, cfg, reference=None):
    return SimpleNamespace(model=None, trace=[], diverged=True, diverged_at=5, elapsed=0.0, notices=[], final=None, n_interior=0)


# --- config ------------------------------------------------------------------


def test_minimal_config_gets_defaults(tmp_path):
    (cfg,) = parse_config(write_yaml(tmp_path, {"case": "Burgers1d-C", "method": "pinn"}))
    assert cfg.train.lr == 1e-3 and cfg.train.iterations == 20000
    assert cfg.train.batches(build_case("Burgers1d-C")) == (8192, 2048)
    assert cfg.seeds == (0, 1, 2)
    assert cfg.train.hidden == (100,) * 5


def test_unknown_method_names_field(tmp_path):
    with pytest.raises(ConfigError) as info:
        parse_config(write_yaml(tmp_path, {"case": "Burgers1d-C", "method": "foo"}))
    assert info.value.path == "method" and "foo" in str(info.value)


def test_unknown_key_reports_path(tmp_path):
    doc = {"runs": [{"case": "PNd", "method": "pinn"}, {"case": "PNd", "method": "pinn", "train": {"lrr": 1}}]}
    with pytest.raises(ConfigError) as info:
        parse_config(write_yaml(tmp_path, doc))
    assert info.value.path == "runs[1].train.lrr"


def test_sweep_expands(tmp_path):
    cfgs = parse_config(write_yaml(tmp_path, {"case": "Poisson2d-C", "method": "pinn",
                                              "sweep": {"L": [1, 2, 4, 8, 16]}}))
    assert len(cfgs) == 5
    assert [c.params["L"] for c in cfgs] == [1, 2, 4, 8, 16]
    assert cfgs[0].label == "Poisson2d-C[L=1]"


def test_include_and_defaults(tmp_path):
    write_yaml(tmp_path, {"defaults": {"seeds": [7], "train": {"iterations": 11}}}, "base.yaml")
    p = write_yaml(tmp_path, {"include": "base.yaml", "runs": [{"case": "KS", "method": ["pinn", "lbfgs"],
                                                                "train": {"lr": 0.01}}]})
    cfgs = parse_config(p)
    assert [c.method for c in cfgs] == ["pinn", "lbfgs"]
    assert all(c.seeds == (7,) and c.train.iterations == 11 and c.train.lr == 0.01 for c in cfgs)


def test_include_cycle(tmp_path):
    write_yaml(tmp_path, {"include": "b.yaml"}, "a.yaml")
    write_yaml(tmp_path, {"include": "a.yaml"}, "b.yaml")
    with pytest.raises(ConfigError, match="cycle"):
        parse_config(tmp_path / "a.yaml")


def test_yaml_error_has_line(tmp_path):
    p = tmp_path / "bad.yaml"
    p.write_text("case: PNd\nmethod: [pinn\n")
    with pytest.raises(ConfigError) as info:
        parse_config(p)
    assert ":" in info.value.path


@pytest.mark.parametrize("bad,where", [
    ({"case": "Nope", "method": "pinn"}, "case"),
    ({"case": "PNd", "method": "pinn", "seeds": []}, "seeds"),
    ({"case": "PNd", "method": "pinn", "seeds": [1, 1]}, "seeds"),
    ({"case": "PNd", "method": "pinn", "params": {"q": 1}}, "params.q"),
    ({"case": "PNd", "method": "vpinn"}, "method"),
    ({"method": "pinn"}, "case"),
    ({"case": "PNd", "method": "pinn", "train": {"iterations": -1}}, "train"),
])
def test_validation_errors(bad, where):
    with pytest.raises(ConfigError) as info:
        parse_config_dict(bad)
    assert info.value.path == where


def test_unsupported_pair_allowed_to_skip():
    (cfg,) = parse_config_dict({"case": "PNd", "method": "vpinn", "allow_skip": True})
    res = runner.run_task(cfg, 0)
    assert res["status"] == "unsupported"
    rec = aggregate(cfg, [res])
    assert rec.unsupported and rec.mean["l2re"] is None


def test_shipped_configs_parse():
    from pathlib import Path

    root = Path(__file__).resolve().parents[1] / "configs"
    for p in sorted(root.glob("*.yaml")):
        doc = yaml.safe_load(p.read_text())
        if set(doc) == {"defaults"}:  # include-only fragment
            continue
        assert parse_config(p), p.name


# --- scheduling / run_all ----------------------------------------------------


def test_schedule_longest_first():
    cfgs = parse_config_dict({"runs": [{"case": "Burgers1d-C", "method": "pinn", "seeds": [0]},
                                       {"case": "PNd", "method": "pinn", "seeds": [0, 1]}]})
    order = schedule(cfgs)
    assert len(order) == 3
    pri = [runner.expected_seconds(cfgs[i]) for i, _ in order]
    assert pri == sorted(pri, reverse=True)


def test_two_configs_three_seeds_counts(tmp_path):
    cfgs = tiny_runs(("pinn", "lbfgs"))
    log = tmp_path / "tasks.log"
    records, completion = run_all(cfgs, workers=1, log_path=log)
    assert len(records) == 2 and len(completion) == 6
    keys = [(e["config"], e["seed"]) for e in completion]
    assert sorted(keys) == [(i, s) for i in range(2) for s in range(3)]
    lines = [json.loads(x) for x in log.read_text().splitlines()]
    assert lines == completion
    assert all(r.seed_count == 3 and r.diverged == 0 for r in records)


def test_workers_must_be_positive():
    with pytest.raises(ContractError):
        run_all(tiny_runs(), workers=0)


def _per_seed(records):
    return [[(s["seed"], s["metrics"], s["trace"]) for s in r.seeds] for r in records]


def test_worker_count_independence():
    cfgs = tiny_runs(("pinn", "multiadam"), seeds=(0, 1, 2))
    base, _ = run_all(cfgs, workers=1)
    for w in (2, 4):
        other, completion = run_all(cfgs, workers=w)
        assert len(completion) == 6 and len({(e["config"], e["seed"]) for e in completion}) == 6
        assert _per_seed(other) == _per_seed(base)


def test_all_seeds_diverge(monkeypatch):
    monkeypatch.setattr(runner, "train", fake_divergent_train)
    (rec,), _ = run_all(tiny_runs(), workers=1)
    assert rec.diverged == 3
    assert all(rec.mean[m] is None and rec.std[m] is None for m in METRICS)


def test_task_failure_recorded_and_run_continues(monkeypatch):
    real = runner.train

    def sometimes(case, cfg, reference=None):
        if cfg.seed == 1:
            raise RuntimeError("boom")
        return real(case, cfg, reference=reference)

    monkeypatch.setattr(runner, "train", sometimes)
    (rec,), completion = run_all(tiny_runs(), workers=1)
    assert rec.failed == 1 and len(completion) == 3
    assert "boom" in rec.seeds[1]["error"]
    assert rec.mean["l2re"] == statistics.fmean(s["metrics"]["l2re"] for s in rec.seeds if s["status"] == "ok")


# --- export ------------------------------------------------------------------


@pytest.fixture(scope="module")
def records():
    recs, _ = run_all(tiny_runs(("pinn", "pinn_w")), workers=1)
    return recs


def test_one_record_two_line_csv(tmp_path, records):
    p = tmp_path / "r.csv"
    export_csv(records[:1], p)
    lines = p.read_text().splitlines()
    assert len(lines) == 2 and lines[0].split(",") == list(CSV_COLUMNS)


def test_csv_matches_recomputation(tmp_path, records):
    p = tmp_path / "r.csv"
    export(records, p, "csv")
    rows = list(csv.DictReader(p.open()))
    col = {"l2re": "l2re", "l1re": "l1re", "mse": "mse", "max_err": "maxerr"}
    for row, rec in zip(rows, records):
        ref = recompute(rec)
        for m, c in col.items():
            mean, std = ref[m]
            assert abs(float(row[f"{c}_mean"]) - mean) <= 1e-12 * max(1.0, abs(mean))
            assert abs(float(row[f"{c}_std"]) - std) <= 1e-12 * max(1.0, abs(std))


def test_json_recompute_after_reload(tmp_path, records):
    p = tmp_path / "r.json"
    export(records, p, "json")
    for rec, back in zip(records, load_json(p)):
        ref = recompute(back)
        for m in ("l2re", "l1re", "mse", "max_err"):
            assert abs(rec.mean[m] - ref[m][0]) <= 1e-12 * max(1.0, abs(ref[m][0]))


def test_json_round_trip_byte_identical(tmp_path, records):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    export_json(records, a)
    export_json(load_json(a), b)
    assert a.read_bytes() == b.read_bytes()
    assert dumps(records) == a.read_text()


def test_diverged_only_row(tmp_path, monkeypatch):
    monkeypatch.setattr(runner, "train", fake_divergent_train)
    recs, _ = run_all(tiny_runs(), workers=1)
    p = tmp_path / "d.csv"
    export_csv(recs, p)
    (row,) = list(csv.DictReader(p.open()))
    assert row["diverged"] == "3"
    assert all(row[c] == "" for c in CSV_COLUMNS if c.endswith(("_mean", "_std")) or c.startswith("fmse"))


def test_export_rejects_empty_and_unknown(tmp_path, records):
    with pytest.raises(ContractError):
        export_csv([], tmp_path / "x.csv")
    with pytest.raises(ContractError):
        export(records, tmp_path / "x.txt", "txt")


def test_unwritable_path(tmp_path, records):
    with pytest.raises(OSError):
        export_csv(records, tmp_path / "missing" / "dir" / "x.csv")


# --- catalog -----------------------------------------------------------------


def test_list_cases():
    cases = {c["id"]: c for c in list_cases()}
    assert len(cases) == 22
    assert cases["Burgers1d-C"]["tags"] == ["nonlinearity"]
    assert cases["PNd"]["tags"] == ["high dim"] and cases["PNd"]["analytic"]
    assert cases["Wave1d-C"]["analytic"] and not cases["NS2d-C"]["analytic"]


def test_list_methods():
    methods = {m["id"]: m for m in list_methods()}
    assert set(methods) == {"pinn", "pinn_w", "lra", "ntk", "rar", "multiadam", "gpinn", "vpinn", "laaf", "gaaf",
                            "fbpinn", "lbfgs"}
    assert methods["lbfgs"]["optimizer"] == "lbfgs"
    assert "PNd" in methods["vpinn"]["unsupported_cases"]


# --- CLI ---------------------------------------------------------------------


def _cli(argv):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main(argv)
    return code, buf.getvalue()


def test_cli_list():
    code, out = _cli(["list", "cases"])
    assert code == EXIT_OK and len(out.strip().splitlines()) == 22
    code, out = _cli(["list", "methods"])
    assert code == EXIT_OK and len(out.strip().splitlines()) == 12


def test_cli_run_success(tmp_path):
    cfg = write_yaml(tmp_path, {"case": "Wave1d-C", "method": "pinn", "seeds": [0, 1], "train": TINY})
    code, out = _cli(["run", "--config", str(cfg), "--out", str(tmp_path / "o")])
    assert code == EXIT_OK
    assert (tmp_path / "o" / "results.csv").exists() and (tmp_path / "o" / "results.json").exists()
    assert len((tmp_path / "o" / "tasks.log").read_text().splitlines()) == 2


def test_cli_validation_error(tmp_path):
    cfg = write_yaml(tmp_path, {"case": "Wave1d-C", "method": "foo"})
    assert _cli(["run", "--config", str(cfg)])[0] == EXIT_INVALID
    assert _cli(["run", "--config", str(tmp_path / "absent.yaml")])[0] == EXIT_INVALID


def test_cli_divergence_exit_codes(tmp_path, monkeypatch):
    monkeypatch.setattr(runner, "train", fake_divergent_train)
    cfg = write_yaml(tmp_path, {"case": "Wave1d-C", "method": "pinn", "seeds": [0], "train": TINY})
    out = str(tmp_path / "o")
    assert _cli(["run", "--config", str(cfg), "--out", out])[0] == EXIT_DIVERGED
    assert _cli(["run", "--config", str(cfg), "--out", out, "--allow-divergence"])[0] == EXIT_OK


def test_cli_eval_round_trip(tmp_path):
    case = build_case("Wave1d-C")
    model = build_model(case, 0, (6,))
    ck = tmp_path / "m.ckpt"
    save_checkpoint(ck, model, {"case": case.id, "hidden": [6]})
    ref = reference_for(case)
    rp = tmp_path / "ref.csv"
    write_reference(rp, tuple(case.coords) + ref.columns, ref.points, ref.values)
    code, out = _cli(["eval", "--checkpoint", str(ck), "--case", "Wave1d-C", "--reference", str(rp)])
    assert code == EXIT_OK
    from pinnbench.eval.metrics import evaluate

    direct = evaluate(case, model, ref).as_dict()
    got = json.loads(out)
    assert got["l2re"] == pytest.approx(direct["l2re"], rel=1e-12)
    assert got["n_test"] == ref.n
