"""YAML run configuration.

A config file holds either a single run mapping or ``runs:`` (a list of run
mappings), optionally with ``defaults:`` merged into every run and
``include:`` naming other files (relative paths) whose runs come first and
whose defaults are inherited::

    include: base.yaml
    defaults:
      seeds: [0, 1, 2]
      train: {iterations: 20000}
    runs:
      - case: Burgers1d-C
        method: [pinn, pinn_w]
      - case: Poisson2d-C
        method: pinn
        sweep: {L: [1, 2, 4, 8, 16]}

``method`` may be a list; ``sweep`` maps case parameters to value lists and
expands to their Cartesian product.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import yaml

from pinnbench.errors import ConfigError, ContractError, UnsupportedCase
from pinnbench.pde.cases import CASES, declared_params
from pinnbench.training.loop import METHODS, TrainLoopConfig, check_supported
from pinnbench.training.losses import LossWeights
from pinnbench.training.vpinn import VPINNConfig

RUN_KEYS = {"case", "method", "params", "sweep", "seeds", "train", "reference", "out", "allow_skip", "save_checkpoints"}
TRAIN_KEYS = {f.name for f in fields(TrainLoopConfig)} - {"method", "seed"}
WEIGHT_KEYS = {"w_c", "w_b", "w_d", "w_i"}
VPINN_KEYS = {f.name for f in fields(VPINNConfig)}
FBPINN_KEYS = {"subdomains", "overlap", "subnet_hidden", "activation", "window"}


@dataclass(frozen=True)
class RunConfig:
    case: str
    method: str
    params: dict = field(default_factory=dict)
    train: TrainLoopConfig = TrainLoopConfig()
    seeds: tuple[int, ...] = (0, 1, 2)
    reference: str = "auto"  # "auto" | "analytic" | path to a reference file
    out: str = "results"
    allow_skip: bool = False
    save_checkpoints: bool = False

    @property
    def label(self):
        if not self.params:
            return self.case
        inner = ",".join(f"{k}={self.params[k]}" for k in sorted(self.params))
        return f"{self.case}[{inner}]"

    def loop_config(self, seed):
        return replace(self.train, method=self.method, seed=int(seed))


def _at(path, key):
    return f"{path}.{key}" if path else key


def _check_keys(d, allowed, path):
    if not isinstance(d, dict):
        raise ConfigError("expected a mapping", path)
    for k in d:
        if k not in allowed:
            raise ConfigError(f"unknown key {k!r}", _at(path, str(k)))


def _train_config(d, path):
    _check_keys(d, TRAIN_KEYS, path)
    kw = dict(d)
    if "hidden" in kw:
        kw["hidden"] = tuple(kw["hidden"])
    if "weights" in kw:
        _check_keys(kw["weights"], WEIGHT_KEYS, _at(path, "weights"))
        kw["weights"] = LossWeights(**kw["weights"])
    if "vpinn" in kw:
        _check_keys(kw["vpinn"], VPINN_KEYS, _at(path, "vpinn"))
        kw["vpinn"] = VPINNConfig(**kw["vpinn"])
    if "fbpinn" in kw:
        _check_keys(kw["fbpinn"], FBPINN_KEYS, _at(path, "fbpinn"))
        fb = dict(kw["fbpinn"])
        for key in ("subdomains", "subnet_hidden"):
            if key in fb:
                fb[key] = tuple(fb[key])
        kw["fbpinn"] = fb
    try:
        return TrainLoopConfig(**kw)
    except (TypeError, ContractError) as exc:
        raise ConfigError(str(exc), path) from None


def _merge(base, over):
    out = dict(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def _expand(run, path):
    _check_keys(run, RUN_KEYS, path)
    for key in ("case", "method"):
        if key not in run:
            raise ConfigError("missing required key", _at(path, key))
    case = run["case"]
    if case not in CASES:
        raise ConfigError(f"unknown case {case!r}", _at(path, "case"))
    declared = declared_params(case)
    params = run.get("params") or {}
    _check_keys(params, set(declared), _at(path, "params"))
    sweep = run.get("sweep") or {}
    _check_keys(sweep, set(declared), _at(path, "sweep"))
    for k, v in sweep.items():
        if not isinstance(v, list) or not v:
            raise ConfigError("sweep values must be a nonempty list", _at(path, f"sweep.{k}"))
    methods = run["method"] if isinstance(run["method"], list) else [run["method"]]
    for m in methods:
        if m not in METHODS:
            raise ConfigError(f"unknown method {m!r}", _at(path, "method"))
    seeds = run.get("seeds", [0, 1, 2])
    if not isinstance(seeds, list) or not seeds or not all(isinstance(s, int) for s in seeds):
        raise ConfigError("seeds must be a nonempty list of integers", _at(path, "seeds"))
    if len(set(seeds)) != len(seeds):
        raise ConfigError("seeds must be distinct", _at(path, "seeds"))
    train = _train_config(run.get("train") or {}, _at(path, "train"))
    allow_skip = bool(run.get("allow_skip", False))
    keys = sorted(sweep)
    out = []
    for m in methods:
        try:
            check_supported(case, m)
        except UnsupportedCase as exc:
            if not allow_skip:
                raise ConfigError(f"{exc} (set allow_skip to record it as unsupported)", _at(path, "method")) from None
        for combo in itertools.product(*[sweep[k] for k in keys]):
            p = {**params, **dict(zip(keys, combo))}
            out.append(
                RunConfig(case, m, p, train, tuple(seeds), str(run.get("reference", "auto")),
                          str(run.get("out", "results")), allow_skip, bool(run.get("save_checkpoints", False)))
            )
    return out


def _load(path, seen):
    path = Path(path).resolve()
    if path in seen:
        raise ConfigError("include cycle", str(path))
    seen = seen | {path}
    try:
        with open(path, encoding="utf-8") as fh:
            doc = yaml.safe_load(fh)
    except FileNotFoundError:
        raise ConfigError("config file not found", str(path)) from None
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"{path}:{mark.line + 1}" if mark else str(path)
        raise ConfigError(f"YAML parse error: {getattr(exc, 'problem', exc)}", where) from None
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ConfigError("top level must be a mapping", str(path))
    defaults, runs = {}, []
    includes = doc.get("include", [])
    includes = [includes] if isinstance(includes, str) else includes
    for inc in includes:
        d, r = _load(path.parent / inc, seen)
        defaults = _merge(defaults, d)
        runs.extend(r)
    if "runs" in doc or "defaults" in doc or "include" in doc:
        _check_keys(doc, {"include", "defaults", "runs"}, "")
        defaults = _merge(defaults, doc.get("defaults") or {})
        local = doc.get("runs") or []
        if not isinstance(local, list):
            raise ConfigError("runs must be a list", "runs")
        runs.extend((f"runs[{i}]", r) for i, r in enumerate(local))
    else:
        runs.append(("", doc))
    return defaults, runs


def parse_config(path):
    """Read a YAML config file into a validated list of RunConfig."""
    defaults, runs = _load(path, frozenset())
    out = []
    for where, run in runs:
        if not isinstance(run, dict):
            raise ConfigError("each run must be a mapping", where)
        out.extend(_expand(_merge(defaults, run), where))
    if not out:
        raise ConfigError("no runs defined", str(path))
    return out


def parse_config_dict(doc):
    """Validate an in-memory single-run or ``runs:`` mapping."""
    if "runs" in doc:
        _check_keys(doc, {"defaults", "runs"}, "")
        defaults = doc.get("defaults") or {}
        return [c for i, r in enumerate(doc["runs"]) for c in _expand(_merge(defaults, r), f"runs[{i}]")]
    return _expand(doc, "")
