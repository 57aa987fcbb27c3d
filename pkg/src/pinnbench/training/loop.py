"""Training loop and the method registry."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field, replace

import numpy as np
import torch

from pinnbench.errors import ContractError, Divergence, UnsupportedCase
from pinnbench.eval.metrics import evaluate
from pinnbench.network.mlp import flat_params, set_flat_params
from pinnbench.pde.case import PDECase
from pinnbench.pde.reference import coefficient_reference, observed_data, reference_for
from pinnbench.training.losses import PINN_W, VANILLA, LossWeights, assemble_loss, chunked, sample_points
from pinnbench.training.model import build_model
from pinnbench.training.optim import DEFAULT_GROUPS, LBFGS, AdamState, MultiAdamState, adam_step, multiadam_step
from pinnbench.training.rar import RARPolicy, rar_refine
from pinnbench.training.reweight import ReweightPolicy, lra_update, ntk_update
from pinnbench.training.vpinn import VPINNConfig, cell_quadrature, is_box_case, vpinn_terms

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Method:
    optimizer: str = "adam"  # adam | lbfgs | multiadam
    weights: LossWeights = VANILLA
    reweight: str = "fixed"  # fixed | lra | ntk
    rar: bool = False
    gpinn: float = 0.0
    vpinn: bool = False
    adaptive: str = "none"
    fbpinn: bool = False


METHODS = {
    "pinn": Method(),
    "pinn_w": Method(weights=PINN_W),
    "lbfgs": Method(optimizer="lbfgs"),
    "lra": Method(reweight="lra"),
    "ntk": Method(reweight="ntk"),
    "rar": Method(rar=True),
    "multiadam": Method(optimizer="multiadam"),
    "gpinn": Method(gpinn=0.01),
    "vpinn": Method(vpinn=True),
    "laaf": Method(adaptive="local"),
    "gaaf": Method(adaptive="global"),
    "fbpinn": Method(fbpinn=True),
}

# (case, method) pairs with no entry in the published comparison
UNSUPPORTED = {
    ("Burgers2d-C", "fbpinn"),
    ("Heat2d-CG", "vpinn"),
    ("PNd", "vpinn"),
    ("PNd", "fbpinn"),
    ("HNd", "vpinn"),
    ("HNd", "fbpinn"),
}


def method_ids():
    return list(METHODS)


def check_supported(case_id, method):
    if method not in METHODS:
        raise ContractError(f"unknown method {method!r}")
    if (case_id, method) in UNSUPPORTED:
        raise UnsupportedCase(f"{method} is not run on {case_id}")


@dataclass(frozen=True)
class TrainLoopConfig:
    method: str = "pinn"
    iterations: int = 20000
    n_interior: int | None = None  # None: 8192, or 32768 for inputs of dimension >= 3
    n_boundary: int | None = None  # None: 2048, or 8192
    resample: bool = False
    eval_period: int = 1000
    seed: int = 0
    lr: float = 1e-3
    hidden: tuple[int, ...] = (100,) * 5
    strategy: str = "pseudo"
    gpinn_weight: float | None = None  # None: method default
    reweight_period: int = 1000
    lra_alpha: float = 0.1
    ntk_subsample: int = 32
    rar_period: int = 2000
    vpinn: VPINNConfig | None = None
    fbpinn: dict = field(default_factory=dict)
    lbfgs_history: int = 50
    weights: LossWeights | None = None  # None: method preset
    chunk: int | None = None  # interior points per backward pass; None: 4096, or 2048 for 4+ inputs

    def __post_init__(self):
        if self.iterations < 0:
            raise ContractError("iterations must be >= 0")
        for n in (self.n_interior, self.n_boundary):
            if n is not None and n < 1:
                raise ContractError("batch sizes must be >= 1")
        if self.chunk is not None and self.chunk < 1:
            raise ContractError("chunk must be >= 1")
        if self.eval_period < 1:
            raise ContractError("eval_period must be >= 1")

    def batches(self, case: PDECase):
        big = case.large_batch
        ni = self.n_interior or (32768 if big else 8192)
        nb = self.n_boundary or (8192 if big else 2048)
        return ni, nb

    def chunk_size(self, case: PDECase):
        return self.chunk or (2048 if len(case.coords) >= 4 else 4096)


@dataclass
class TrainResult:
    model: torch.nn.Module
    trace: list
    diverged: bool = False
    diverged_at: int | None = None
    elapsed: float = 0.0
    iterations: int = 0
    n_interior: int = 0
    notices: list = field(default_factory=list)

    @property
    def final(self):
        return self.trace[-1] if self.trace else None


def _params(model):
    return [p for p in model.parameters() if p.requires_grad]


def _flat_grad(total, params):
    gs = torch.autograd.grad(total, params, retain_graph=True, allow_unused=True)
    return torch.cat([(torch.zeros_like(p) if g is None else g).reshape(-1) for g, p in zip(gs, params)])


@dataclass
class Accumulated:
    total: float
    terms: dict  # name -> float
    groups: dict  # name -> term group
    grads: dict  # target name -> flat gradient


def accumulate(case, model, points, weights, targets, gpinn=0.0, iteration=None, quad=None, chunk=None):
    """Loss values and parameter gradients summed over interior chunks.

    ``targets`` maps a name to a function of a LossBreakdown returning the
    scalar to differentiate (or None when the chunk holds none of it). Since
    interior terms are means, chunk terms scaled by their share of the points
    add up to the full-batch values, so only one chunk's graph is alive at a
    time.
    """
    params = _params(model)
    n = sum(p.numel() for p in params)
    if quad is not None or chunk is None:
        parts = [(points, 1.0)]
    else:
        parts = chunked(points, chunk)
    grads = {k: torch.zeros(n, dtype=params[0].dtype) for k in targets}
    terms, groups, total = {}, {}, 0.0
    for sub, frac in parts:
        pde_terms = vpinn_terms(case, model, quad) if quad is not None else None
        b = assemble_loss(case, model, sub, weights, gpinn, iteration=iteration, pde_terms=pde_terms,
                          pde_scale=frac)
        for name, fn in targets.items():
            t = fn(b)
            if torch.is_tensor(t) and t.requires_grad:
                grads[name] += _flat_grad(t, params)
        for k, v in b.terms.items():
            terms[k] = terms.get(k, 0.0) + float(v.detach())
            groups[k] = b.groups[k]
        total += float(b.total.detach())
    return Accumulated(total, terms, groups, grads)


def _total(b):
    return b.total


def _group_sum(members):
    def fn(b):
        names = [k for k in b.terms if b.groups[k] in members]
        return sum(b.terms[k] for k in names) if names else None

    return fn


def _term(name):
    return lambda b: b.terms.get(name)


def reference_set(case: PDECase):
    """Evaluation target: the coefficient field for inverse cases, the state otherwise."""
    if case.inverse is not None:
        return coefficient_reference(case)
    return reference_for(case)


def train(case: PDECase, cfg: TrainLoopConfig, reference="auto"):
    """Run one (case, method) training task; deterministic given ``cfg.seed``."""
    check_supported(case.id, cfg.method)
    method = METHODS[cfg.method]
    torch.manual_seed(cfg.seed)
    if reference == "auto":
        reference = reference_set(case)
    notices = []
    n_int, n_bdry = cfg.batches(case)
    fb = dict(cfg.fbpinn) if method.fbpinn else None
    model = build_model(case, cfg.seed, cfg.hidden, method.adaptive, fb)
    params = _params(model)
    data = observed_data(case, cfg.seed) if case.inverse is not None else None
    points = sample_points(case, n_int, n_bdry, cfg.seed, cfg.strategy, data)
    weights = cfg.weights or method.weights
    if case.inverse is not None and cfg.method == "pinn_w" and cfg.weights is None:
        # boundary weighting only; the data term keeps unit weight
        weights = replace(weights, w_d=1.0)
    gpinn = method.gpinn if cfg.gpinn_weight is None else cfg.gpinn_weight

    quad = None
    if method.vpinn:
        if is_box_case(case):
            lo, hi = case.geometry.bbox()
            quad = cell_quadrature(lo, hi, cfg.vpinn or VPINNConfig.for_dim(case.dim))
        else:
            notices.append(f"{case.id}: non-box domain, variational loss replaced by the strong form")
            log.warning(notices[-1])

    policy = ReweightPolicy(method.reweight, cfg.lra_alpha, cfg.reweight_period)
    rar = RARPolicy.for_batch(n_int, cfg.rar_period) if method.rar else None

    chunk = cfg.chunk_size(case)

    def loss_at(it, targets):
        w = weights.with_terms(policy.weights) if policy.weights else weights
        return accumulate(case, model, points, w, targets, gpinn, it, quad, chunk)

    trace = []

    def record(it, loss_value):
        row = {"iteration": it, "loss": loss_value}
        if reference is not None:
            row.update(evaluate(case, model, reference).as_dict())
        trace.append(row)

    n = flat_params(model).numel()
    if method.optimizer == "adam":
        opt = AdamState(n, lr=cfg.lr)
    elif method.optimizer == "multiadam":
        opt = MultiAdamState(n, groups=tuple(DEFAULT_GROUPS), lr=cfg.lr)
    else:
        opt = LBFGS(history=cfg.lbfgs_history)

    t0 = time.perf_counter()
    diverged_at = None
    it = 0
    last_loss = float("nan")
    try:
        for it in range(cfg.iterations):
            if cfg.resample and it > 0:
                points = sample_points(case, n_int, n_bdry, cfg.seed + 7919 * it, cfg.strategy, data)
                if method.optimizer == "lbfgs":
                    opt.invalidate()
            if rar is not None and it > 0 and it % rar.period == 0:
                points.interior = rar_refine(points.interior, case, model, rar, cfg.seed * 100003 + it)
                if method.optimizer == "lbfgs":
                    opt.invalidate()
            if policy.due(it):
                _reweight(policy, case, model, points, loss_at, cfg, it)
                if method.optimizer == "lbfgs":
                    opt.invalidate()
            if method.optimizer == "lbfgs":
                if it % cfg.eval_period == 0:
                    # points or weights may have changed since the last step
                    record(it, loss_at(it, {}).total)

                def fun(v):
                    set_flat_params(model, v)
                    acc = loss_at(it, {"total": _total})
                    return torch.tensor(acc.total), acc.grads["total"]

                x_new, last_loss = opt.step(fun, flat_params(model))
                set_flat_params(model, x_new)
                continue
            if method.optimizer == "adam":
                acc = loss_at(it, {"total": _total})
            else:
                acc = loss_at(it, {g: _group_sum(m) for g, m in DEFAULT_GROUPS.items()})
            last_loss = acc.total
            if it % cfg.eval_period == 0:
                record(it, last_loss)
            x = flat_params(model)
            if method.optimizer == "adam":
                x = adam_step(opt, acc.grads["total"], x)
            else:
                x = multiadam_step(opt, acc.grads, x)
            set_flat_params(model, x)
        it = cfg.iterations
    except Divergence as exc:
        diverged_at = it if exc.iteration is None else exc.iteration
        log.warning("%s/%s diverged at iteration %s: %s", case.id, cfg.method, diverged_at, exc)
    elapsed = time.perf_counter() - t0
    if diverged_at is None:
        try:
            final = loss_at(cfg.iterations, {}).total
        except Divergence:
            final = float("nan")
        if not trace or trace[-1]["iteration"] != cfg.iterations:
            record(cfg.iterations, final)
    return TrainResult(model, trace, diverged_at is not None, diverged_at, elapsed, it, len(points.interior), notices)


def group_gradients(breakdown, params, groups=DEFAULT_GROUPS):
    """Flat gradient of each MultiAdam group's unweighted term sum."""
    out = {}
    for gname, members in groups.items():
        t = _group_sum(members)(breakdown)
        if t is None:
            out[gname] = torch.zeros(sum(p.numel() for p in params), dtype=params[0].dtype)
        else:
            out[gname] = _flat_grad(t, params)
    return out


def _reweight(policy, case, model, points, loss_at, cfg, it):
    if policy.kind == "lra":
        # term names are fixed by the case; probe them on the boundary/data sets
        names = [s.name for s in case.boundary] + (["data"] if points.data is not None else [])
        targets = {"__pde__": _group_sum(("pde",)), **{k: _term(k) for k in names}}
        acc = loss_at(it, targets)
        pde_grad = acc.grads.pop("__pde__")
        if float(torch.abs(pde_grad).max()) > 0:
            policy.weights = lra_update(pde_grad, acc.grads, policy.weights, policy.alpha)
    else:
        ntk_update(policy, case, model, points, cfg.ntk_subsample, seed=cfg.seed * 7 + it)
    for k, v in policy.weights.items():
        if not np.isfinite(v):
            raise Divergence(f"non-finite loss weight for {k}", iteration=it)
