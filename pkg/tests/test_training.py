import itertools

import numpy as np
import pytest
import scipy.optimize
import sympy as sp
import torch
from hypothesis import given, settings
from hypothesis import strategies as st

from pinnbench.errors import ContractError, Divergence, UnsupportedCase
from pinnbench.network.mlp import flat_params, set_flat_params
from pinnbench.pde import build_case
from pinnbench.pde.case import solution_fn
from pinnbench.training import (
    LBFGS,
    PINN_W,
    VANILLA,
    AdamState,
    LossWeights,
    MultiAdamState,
    PointSets,
    RARPolicy,
    TrainLoopConfig,
    VPINNConfig,
    adam_step,
    assemble_loss,
    build_model,
    multiadam_step,
    rar_refine,
    sample_points,
    train,
)
from pinnbench.training.loop import _total, accumulate, check_supported, group_gradients
from pinnbench.training.losses import BoundarySet
from pinnbench.training.reweight import ReweightPolicy, lra_update, ntk_weights, term_traces
from pinnbench.training.rar import top_k
from pinnbench.training.vpinn import cell_quadrature, gauss_legendre, vpinn_loss, vpinn_terms
from pinnbench.training.vpinn import tested_residuals as project_onto_tests

F64 = torch.float64


class Exact(torch.nn.Module):
    """Wraps a closed-form solution as a parameterless module."""

    def __init__(self, fn):
        super().__init__()
        self.fn = fn

    def forward(self, X):
        return self.fn(X)


def small_problem(case_id="Burgers1d-C", hidden=(8,), n_int=64, n_bdry=32, seed=0):
    case = build_case(case_id)
    model = build_model(case, seed, hidden)
    pts = sample_points(case, n_int, n_bdry, seed)
    return case, model, pts


# --- assemble_loss -----------------------------------------------------------


def test_zero_residuals_zero_total():
    case = build_case("PNd")
    model = Exact(solution_fn(case))
    b = assemble_loss(case, model, sample_points(case, 50, 50, 0))
    assert float(b.total) <= 1e-24


def test_single_point_residual_two():
    # 1-D Poisson: u = sol - x^2 cancels the forcing and leaves residual -u_xx = 2
    case = build_case("PNd", n=1)
    X = torch.tensor([[0.3]], dtype=F64)
    model = Exact(lambda Z: -(Z**2))
    b = assemble_loss(case, model, PointSets(X, {}))
    f = (np.pi / 2) ** 2 * np.sin(np.pi * 0.3 / 2)
    assert float(b.terms["pde[0]"]) == pytest.approx((2.0 - f) ** 2, rel=1e-13)
    sol = solution_fn(case)
    model2 = Exact(lambda Z: sol(Z) - Z**2)
    b2 = assemble_loss(case, model2, PointSets(X, {}))
    assert float(b2.total) == pytest.approx(4.0, rel=1e-12)


def test_total_is_weighted_sum():
    case, model, pts = small_problem("Heat2d-CG", hidden=(6,), n_int=40, n_bdry=80)
    w = LossWeights(2.0, 3.0, 1.0, w_i=7.0)
    b = assemble_loss(case, model, pts, w)
    assert float(b.total) == pytest.approx(sum(b.weights[k] * float(b.terms[k]) for k in b.terms), rel=1e-14)
    assert all(float(v) >= 0 for v in b.terms.values())
    assert b.weights["ic"] == 7.0 and b.weights["rect"] == 3.0 and b.weights["pde[0]"] == 2.0


def test_empty_interior_rejected():
    case, model, pts = small_problem()
    with pytest.raises(ContractError):
        assemble_loss(case, model, PointSets(pts.interior[:0], pts.boundary))


def test_non_finite_residual_signals_divergence():
    case, model, pts = small_problem()
    nan_model = Exact(lambda X: X[:, :1] * float("nan"))
    with pytest.raises(Divergence) as info:
        assemble_loss(case, nan_model, pts, iteration=17)
    assert info.value.iteration == 17


def test_presets():
    assert (VANILLA.w_c, VANILLA.w_b, VANILLA.w_d) == (1, 1, 1)
    assert (PINN_W.w_c, PINN_W.w_b, PINN_W.w_d) == (1, 100, 100)
    with pytest.raises(ContractError):
        LossWeights(w_b=-1.0)
    with pytest.raises(ContractError):
        LossWeights(w_c=float("inf"))


def test_gpinn_zero_weight_is_vanilla():
    case, model, pts = small_problem()
    a = assemble_loss(case, model, pts, gpinn_weight=0.0)
    b = assemble_loss(case, model, pts)
    assert a.values() == b.values()
    assert float(a.total) == float(b.total)


@settings(max_examples=10, deadline=None)
@given(w=st.floats(1e-6, 1.0))
def test_gpinn_total_difference_is_weighted_gradient_terms(w):
    case, model, pts = small_problem()
    base = assemble_loss(case, model, pts)
    g = assemble_loss(case, model, pts, gpinn_weight=w)
    extra = sum(float(g.terms[k]) for k in g.names("gpinn"))
    assert g.names("gpinn") == ["gpinn[x]"]
    assert float(g.total) - float(base.total) == pytest.approx(w * extra, rel=1e-12, abs=1e-15)


def test_gpinn_term_matches_fd_of_residual():
    case, model, pts = small_problem(n_int=16)
    g = assemble_loss(case, model, pts, gpinn_weight=0.01)
    from pinnbench.training.losses import pde_residual

    h = 1e-5
    X = pts.interior
    e = torch.zeros_like(X)
    e[:, 0] = h
    rp, _ = pde_residual(case, model, X + e)
    rm, _ = pde_residual(case, model, X - e)
    dr = ((rp - rm) / (2 * h)).detach()
    assert float(g.terms["gpinn[x]"]) == pytest.approx(float((dr**2).mean()), rel=1e-6)


def test_loss_gradient_matches_fd_2x8x1():
    case, model, pts = small_problem("Burgers1d-C", hidden=(8,), n_int=48, n_bdry=24, seed=3)
    params = list(model.parameters())
    assert flat_params(model).numel() == 2 * 8 + 8 + 8 + 1
    b = assemble_loss(case, model, pts)
    grads = torch.autograd.grad(b.total, params)
    g = torch.cat([x.reshape(-1) for x in grads]).numpy()
    x0 = flat_params(model).clone()

    def loss(v):
        set_flat_params(model, torch.as_tensor(v))
        return float(assemble_loss(case, model, pts).total)

    fd = np.empty_like(g)
    h = 1e-5
    for i in range(len(g)):
        e = np.zeros_like(g)
        e[i] = h
        fd[i] = (loss(x0.numpy() + e) - loss(x0.numpy() - e)) / (2 * h)
    set_flat_params(model, x0)
    assert np.max(np.abs(g - fd)) / np.max(np.abs(fd)) <= 1e-5


def test_chunked_accumulation_matches_full_batch():
    case, model, pts = small_problem("Wave1d-C", hidden=(10, 10), n_int=300, n_bdry=60)
    full = accumulate(case, model, pts, VANILLA, {"total": _total})
    parts = accumulate(case, model, pts, VANILLA, {"total": _total}, chunk=64)
    assert parts.total == pytest.approx(full.total, rel=1e-13)
    torch.testing.assert_close(parts.grads["total"], full.grads["total"], rtol=1e-12, atol=1e-14)
    assert parts.terms.keys() == full.terms.keys()


# --- Adam / MultiAdam --------------------------------------------------------


def test_adam_first_step_hand_value():
    st_ = AdamState(1, lr=0.1)
    x = adam_step(st_, torch.tensor([1.0], dtype=F64), torch.zeros(1, dtype=F64))
    assert float(x[0]) == pytest.approx(-0.1 / (1 + 1e-8), rel=1e-15)
    assert float(x[0]) == pytest.approx(-0.0999999990, abs=1e-10)


def test_adam_zero_gradient_no_move():
    x0 = torch.tensor([0.3, -2.0], dtype=F64)
    assert torch.equal(adam_step(AdamState(2), torch.zeros(2, dtype=F64), x0), x0)


def test_adam_equal_gradients_equal_updates():
    x = adam_step(AdamState(2, lr=0.01), torch.tensor([0.7, 0.7], dtype=F64), torch.zeros(2, dtype=F64))
    assert float(x[0]) == float(x[1])


def test_adam_non_finite_gradient():
    with pytest.raises(Divergence):
        adam_step(AdamState(1), torch.tensor([float("nan")], dtype=F64), torch.zeros(1, dtype=F64))


def test_adam_matches_torch_optim():
    rng = np.random.default_rng(0)
    n = 7
    x = torch.as_tensor(rng.normal(size=n))
    p = torch.nn.Parameter(x.clone())
    opt = torch.optim.Adam([p], lr=3e-3, betas=(0.9, 0.999), eps=1e-8)
    state = AdamState(n, lr=3e-3)
    for _ in range(200):
        g = torch.as_tensor(rng.normal(size=n)) * 10 ** rng.uniform(-3, 1)
        p.grad = g.clone()
        opt.step()
        x = adam_step(state, g, x)
    torch.testing.assert_close(x, p.detach(), rtol=1e-12, atol=1e-14)
    assert (state.v >= 0).all()


def test_multiadam_single_group_is_adam():
    rng = np.random.default_rng(1)
    n = 5
    xa = xm = torch.as_tensor(rng.normal(size=n))
    a, m = AdamState(n), MultiAdamState(n, groups=("all",))
    for _ in range(100):
        g = torch.as_tensor(rng.normal(size=n))
        xa = adam_step(a, g, xa)
        xm = multiadam_step(m, {"all": g}, xm)
        assert float(torch.max(torch.abs(xa - xm))) <= 1e-12


def test_multiadam_identical_groups_equal_adam():
    rng = np.random.default_rng(2)
    n = 4
    xa = xm = torch.zeros(n, dtype=F64)
    a, m = AdamState(n), MultiAdamState(n)
    for _ in range(20):
        g = torch.as_tensor(rng.normal(size=n))
        xa = adam_step(a, g, xa)
        xm = multiadam_step(m, {"pde": g, "bc": g}, xm)
    torch.testing.assert_close(xm, xa, rtol=1e-14, atol=1e-15)


def test_multiadam_zero_group_halves_direction():
    g = torch.tensor([0.4, -1.0, 2.0], dtype=F64)
    m = MultiAdamState(3, lr=0.01)
    x = multiadam_step(m, {"pde": g, "bc": torch.zeros(3, dtype=F64)}, torch.zeros(3, dtype=F64))
    single = adam_step(AdamState(3, lr=0.01), g, torch.zeros(3, dtype=F64))
    torch.testing.assert_close(x, 0.5 * single, rtol=1e-15, atol=0)


def test_multiadam_needs_full_partition():
    with pytest.raises(ContractError):
        multiadam_step(MultiAdamState(2), {"pde": torch.zeros(2, dtype=F64)}, torch.zeros(2, dtype=F64))


def test_group_gradients_partition_terms():
    case, model, pts = small_problem()
    b = assemble_loss(case, model, pts)
    params = list(model.parameters())
    gg = group_gradients(b, params)
    full = torch.cat([x.reshape(-1) for x in torch.autograd.grad(b.total, params, retain_graph=True)])
    torch.testing.assert_close(gg["pde"] + gg["bc"], full, rtol=1e-12, atol=1e-14)


# --- L-BFGS ------------------------------------------------------------------


def _quadratic(x):
    return 0.5 * float(x @ x), x.clone()


def test_lbfgs_quadratic_converges_in_five_steps():
    opt = LBFGS()
    x = torch.tensor([1.0, 1.0], dtype=F64)
    for _ in range(5):
        x, _ = opt.step(_quadratic, x)
    assert float(torch.linalg.norm(x)) <= 1e-10


def test_lbfgs_zero_gradient_no_change():
    opt = LBFGS()
    x = torch.zeros(3, dtype=F64)
    x_new, f = opt.step(_quadratic, x)
    assert torch.equal(x_new, x) and f == 0.0


def test_lbfgs_first_direction_is_steepest_descent():
    g = torch.tensor([0.5, -2.0, 1.0], dtype=F64)
    assert torch.equal(LBFGS().direction(g), -g)


def test_lbfgs_reaches_scipy_minimum_on_rosenbrock():
    def fun(x):
        v = x.numpy()
        return scipy.optimize.rosen(v), torch.as_tensor(scipy.optimize.rosen_der(v))

    x0 = np.array([-1.2, 1.0, -0.5, 0.8])
    ref = scipy.optimize.minimize(scipy.optimize.rosen, x0, jac=scipy.optimize.rosen_der, method="L-BFGS-B",
                                  options={"gtol": 1e-12, "ftol": 0, "maxiter": 5000})
    opt = LBFGS()
    x = torch.as_tensor(x0)
    for _ in range(300):
        x, f = opt.step(fun, x)
    np.testing.assert_allclose(x.numpy(), ref.x, atol=1e-6)


def test_lbfgs_non_finite_loss_diverges():
    def fun(x):
        return float("nan"), torch.zeros_like(x)

    with pytest.raises(Divergence):
        LBFGS().step(fun, torch.ones(2, dtype=F64))


# --- LRA / NTK ---------------------------------------------------------------


def test_lra_fixed_point():
    pde = torch.tensor([0.5, -2.0, 1.0], dtype=F64)
    bc = torch.tensor([2.0, 2.0, 2.0], dtype=F64)
    assert lra_update(pde, {"bc": bc}, {"bc": 1.0}) == {"bc": 1.0}


def test_lra_hand_value():
    pde = torch.tensor([10.0, 0.0], dtype=F64)
    bc = torch.tensor([1.0, -1.0], dtype=F64)
    assert lra_update(pde, {"bc": bc}, {"bc": 1.0}, alpha=0.1)["bc"] == pytest.approx(1.9, rel=1e-15)


def test_lra_alpha_one_has_no_memory():
    pde = torch.tensor([3.0], dtype=F64)
    out = lra_update(pde, {"bc": torch.tensor([0.5], dtype=F64)}, {"bc": 123.0}, alpha=1.0)
    assert out["bc"] == 6.0


def test_lra_zero_term_gradient_skipped():
    out = lra_update(torch.ones(2, dtype=F64), {"bc": torch.zeros(2, dtype=F64)}, {"bc": 4.0})
    assert out["bc"] == 4.0


def test_lra_zero_pde_gradient_rejected():
    with pytest.raises(ContractError):
        lra_update(torch.zeros(2, dtype=F64), {"bc": torch.ones(2, dtype=F64)}, {})


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000), alpha=st.floats(0.01, 1.0))
def test_lra_weights_positive_finite(seed, alpha):
    rng = np.random.default_rng(seed)
    pde = torch.as_tensor(rng.normal(size=6)) + 1e-3
    terms = {f"t{i}": torch.as_tensor(rng.normal(size=6)) for i in range(3)}
    w = {}
    for _ in range(5):
        w = lra_update(pde, terms, w, alpha)
    assert all(np.isfinite(v) and v > 0 for v in w.values())


def test_ntk_equal_traces():
    assert ntk_weights({"a": 2.0, "b": 2.0, "c": 2.0}) == {"a": 3.0, "b": 3.0, "c": 3.0}


def test_ntk_hand_values():
    w = ntk_weights({"pde": 1.0, "bc": 3.0})
    assert w["pde"] == 4.0 and w["bc"] == pytest.approx(4 / 3, rel=1e-15)


def test_ntk_zero_trace_keeps_previous():
    assert ntk_weights({"pde": 0.0, "bc": 2.0}, {"pde": 7.0})["pde"] == 7.0


def test_ntk_joint_scaling_keeps_loss_ratios():
    case, model, pts = small_problem()
    b = assemble_loss(case, model, pts)
    w = ntk_weights({k: 1.0 + i for i, k in enumerate(b.terms)})
    for c in (0.5, 3.0):
        w1 = LossWeights(per_term=w)
        w2 = LossWeights(per_term={k: c * v for k, v in w.items()})
        t1 = assemble_loss(case, model, pts, w1)
        t2 = assemble_loss(case, model, pts, w2)
        assert float(t2.total) / float(t1.total) == pytest.approx(c, rel=1e-13)


def test_ntk_trace_matches_per_point_jacobian():
    case, model, pts = small_problem(hidden=(5,), n_int=10, n_bdry=10)
    traces = term_traces(case, model, pts, n_sub=1000)
    params = list(model.parameters())
    # independent route: full Jacobian of the boundary residual vector
    from pinnbench.training.losses import boundary_residual

    spec = case.boundary[0]
    flat0 = flat_params(model)

    def rvec(v):
        set_flat_params(model, v)
        return boundary_residual(case, model, spec, pts.boundary[spec.name]).reshape(-1).detach()

    J = torch.autograd.functional.jacobian(lambda v: _functional_residual(case, model, spec, pts, v), flat0)
    set_flat_params(model, flat0)
    assert traces[spec.name] == pytest.approx(float((J**2).sum()), rel=1e-12)
    assert rvec(flat0).shape[0] == len(pts.boundary[spec.name].X)
    assert params


def _functional_residual(case, model, spec, pts, v):
    from torch.func import functional_call

    from pinnbench.training.losses import boundary_residual

    shapes = [(n, p.shape) for n, p in model.named_parameters()]
    state, i = {}, 0
    for n, shape in shapes:
        k = int(np.prod(shape))
        state[n] = v[i : i + k].reshape(shape)
        i += k
    wrapped = lambda X: functional_call(model, state, (X,))
    return boundary_residual(case, wrapped, spec, pts.boundary[spec.name]).reshape(-1)


def test_reweight_policy_validation():
    with pytest.raises(ContractError):
        ReweightPolicy("lra", alpha=0.0)
    with pytest.raises(ContractError):
        ReweightPolicy("ntk", period=0)
    assert ReweightPolicy("lra").due(0) and not ReweightPolicy("fixed").due(0)


# --- RAR ---------------------------------------------------------------------


def test_top_k_argmax():
    assert list(top_k([0.1, 5.0, 0.3], 1)) == [1]


def test_top_k_ties_by_index():
    assert list(top_k([1.0, 2.0, 2.0, 0.0], 2)) == [1, 2]


def test_rar_whole_pool():
    case, model, pts = small_problem(n_int=20)
    pol = RARPolicy(period=1, pool=30, add=30)
    out = rar_refine(pts.interior, case, model, pol, seed=1)
    assert len(out) == 50
    torch.testing.assert_close(out[:20], pts.interior)


def test_rar_exact_network_still_grows():
    case = build_case("PNd")
    X = torch.as_tensor(np.random.default_rng(0).uniform(0, 1, (10, 5)))
    pol = RARPolicy(period=1, pool=50, add=7)
    out = rar_refine(X, case, Exact(solution_fn(case)), pol, seed=0)
    assert len(out) == 17


def test_rar_monotone_growth():
    case, model, pts = small_problem(n_int=30)
    pol = RARPolicy(period=1, pool=40, add=3)
    X = pts.interior
    for r in range(1, 5):
        prev = X
        X = rar_refine(X, case, model, pol, seed=r)
        assert len(X) == 30 + 3 * r
        torch.testing.assert_close(X[: len(prev)], prev)


def test_rar_picks_largest_residuals():
    case, model, pts = small_problem(n_int=10)
    pol = RARPolicy(period=1, pool=200, add=5)
    out = rar_refine(pts.interior, case, model, pol, seed=9)
    from pinnbench.pde.geometry import sample_interior
    from pinnbench.training.rar import residual_magnitude

    cand = torch.as_tensor(sample_interior(case.geometry, 200, 9))
    mags = residual_magnitude(case, model, cand)
    added = residual_magnitude(case, model, out[10:])
    assert np.min(added) >= np.sort(mags)[-5] - 1e-15


def test_rar_batch_defaults():
    pol = RARPolicy.for_batch(8192)
    assert (pol.period, pol.pool, pol.add) == (2000, 81920, 81)


# --- hp-VPINN ----------------------------------------------------------------


@pytest.mark.parametrize("Q", [5, 10, 15, 20])
def test_gauss_legendre_exact_to_degree_2q_minus_1(Q):
    rng = np.random.default_rng(Q)
    a, b = -0.3, 1.7
    x, w = gauss_legendre(Q, a, b)
    c = rng.normal(size=2 * Q)  # degree 2Q - 1
    poly = np.polynomial.Polynomial(c)
    exact = poly.integ()(b) - poly.integ()(a)
    assert abs(np.dot(w, poly(x)) - exact) <= 1e-12 * max(1.0, abs(exact))
    mono = lambda t: t ** (2 * Q - 1)
    exact_m = (b ** (2 * Q) - a ** (2 * Q)) / (2 * Q)
    assert abs(np.dot(w, mono(x)) - exact_m) <= 1e-12 * max(1.0, abs(exact_m))


def test_constant_residual_constant_test_function():
    quad = cell_quadrature([0.0, 0.0], [2.0, 3.0], VPINNConfig(Q=3, n_grid=2, degree=0))
    R = torch.full((len(quad.points), 1), 1.5, dtype=F64)
    out = project_onto_tests(R, quad)
    assert out.shape == (4, 1, 1)
    torch.testing.assert_close(out[:, 0, 0], torch.full((4,), 1.5 * 1.5, dtype=F64), rtol=1e-14, atol=0)


def test_vpinn_zero_residual_network():
    case = build_case("Wave1d-C")
    quad = cell_quadrature(*case.geometry.bbox(), VPINNConfig(Q=4, n_grid=2, degree=2))
    terms = vpinn_terms(case, Exact(solution_fn(case)), quad)
    assert float(terms["vpinn[0]"]) <= 1e-20


def test_vpinn_polynomial_network_matches_exact_integrals():
    case = build_case("Wave1d-C")
    cfg = VPINNConfig(Q=4, n_grid=2, degree=2)
    rng = np.random.default_rng(0)
    C = rng.normal(size=(4, 4))  # u = sum c_ij x^i t^j, degree <= Q - 1 per axis

    def u_torch(X):
        x, t = X[:, 0], X[:, 1]
        return sum(C[i, j] * x**i * t**j for i in range(4) for j in range(4))[:, None]

    quad = cell_quadrature([0.0, 0.0], [1.0, 1.0], cfg)
    got = project_onto_tests(_residual_at(case, u_torch, quad.points), quad)

    x, t = sp.symbols("x t")
    u = sum(sp.Float(C[i, j]) * x**i * t**j for i in range(4) for j in range(4))
    r = sp.diff(u, t, 2) - 4 * sp.diff(u, x, 2)
    h = 0.5
    expected = []
    for cx, ct in itertools.product(range(2), repeat=2):
        x0, t0 = cx * h, ct * h
        xi = (2 * (x - x0) / h) - 1
        ti = (2 * (t - t0) / h) - 1
        row = []
        for kx, kt in itertools.product(range(3), repeat=2):
            v = sp.legendre(kx, xi) * sp.legendre(kt, ti)
            row.append(float(sp.integrate(sp.integrate(sp.expand(r * v), (x, x0, x0 + h)), (t, t0, t0 + h))))
        expected.append(row)
    np.testing.assert_allclose(got[:, :, 0].detach().numpy(), np.array(expected), rtol=1e-10, atol=1e-10)


def _residual_at(case, fn, X):
    from pinnbench.training.losses import pde_residual

    R, _ = pde_residual(case, Exact(fn), X)
    return R


def test_vpinn_non_box_unsupported():
    case = build_case("Poisson2d-C")
    with pytest.raises(UnsupportedCase):
        vpinn_loss(case, build_model(case, 0, (4,)), VPINNConfig(Q=2, n_grid=1, degree=1),
                   sample_points(case, 10, 10, 0))


def test_vpinn_config_by_dimension():
    assert VPINNConfig.for_dim(2) == VPINNConfig(10, 8, 5)
    assert VPINNConfig.for_dim(3) == VPINNConfig(5, 4, 3)


# --- train -------------------------------------------------------------------


def _quick(method="pinn", iterations=5, **kw):
    return TrainLoopConfig(method=method, iterations=iterations, n_interior=64, n_boundary=32, hidden=(8, 8),
                           eval_period=2, **kw)


def test_zero_iterations_returns_initial_model():
    case = build_case("Wave1d-C")
    res = train(case, _quick(iterations=0))
    assert len(res.trace) == 1 and res.trace[0]["iteration"] == 0
    init = build_model(case, 0, (8, 8))
    assert torch.equal(flat_params(res.model), flat_params(init))


@pytest.mark.parametrize("method", ["pinn", "lbfgs", "multiadam", "lra", "ntk", "rar", "gpinn", "vpinn", "laaf",
                                    "gaaf", "fbpinn", "pinn_w"])
def test_training_is_deterministic(method):
    case = build_case("Wave1d-C")
    kw = {"reweight_period": 2, "rar_period": 2}
    if method == "vpinn":
        kw["vpinn"] = VPINNConfig(Q=3, n_grid=2, degree=2)
    if method == "fbpinn":
        kw["fbpinn"] = {"subdomains": (2, 1), "subnet_hidden": (6,)}
    a = train(case, _quick(method, **kw))
    b = train(case, _quick(method, **kw))
    assert a.trace == b.trace
    assert torch.equal(flat_params(a.model), flat_params(b.model))
    assert not a.diverged


def test_unsupported_pair_rejected():
    with pytest.raises(UnsupportedCase):
        check_supported("PNd", "vpinn")
    with pytest.raises(UnsupportedCase):
        train(build_case("HNd"), _quick("fbpinn"))


def test_training_reduces_loss():
    case = build_case("Wave1d-C")
    res = train(case, TrainLoopConfig(iterations=60, n_interior=128, n_boundary=64, hidden=(16, 16), eval_period=20,
                                      lr=1e-2))
    assert res.trace[-1]["loss"] < res.trace[0]["loss"]


def test_divergence_is_recorded(monkeypatch):
    case = build_case("Wave1d-C")
    import pinnbench.training.loop as loop

    real = loop.assemble_loss

    def flaky(*args, iteration=None, **kw):
        if iteration == 3:
            raise Divergence("injected", iteration=3)
        return real(*args, iteration=iteration, **kw)

    monkeypatch.setattr(loop, "assemble_loss", flaky)
    res = train(case, _quick(iterations=6))
    assert res.diverged and res.diverged_at == 3
    assert res.trace[-1]["iteration"] == 2


def test_inverse_pinn_w_keeps_unit_data_weight(monkeypatch):
    case = build_case("PInv")
    import pinnbench.training.loop as loop

    seen = []
    real = loop.assemble_loss

    def spy(case_, model, points, weights=VANILLA, *a, **kw):
        seen.append(weights)
        return real(case_, model, points, weights, *a, **kw)

    monkeypatch.setattr(loop, "assemble_loss", spy)
    train(case, _quick("pinn_w", iterations=1))
    assert seen[0].w_b == 100.0 and seen[0].w_d == 1.0


def test_batches_follow_input_dimension():
    cfg = TrainLoopConfig()
    assert cfg.batches(build_case("Burgers1d-C")) == (8192, 2048)
    assert cfg.batches(build_case("Heat2d-MS")) == (32768, 8192)
    assert cfg.batches(build_case("PNd")) == (32768, 8192)


def test_boundary_set_periodic_pairs():
    case = build_case("KS")
    pts = sample_points(case, 10, 200, 0)
    b = pts.boundary["periodic"]
    assert isinstance(b, BoundarySet)
    lo, hi = case.geometry.bbox()
    assert torch.all(b.X[:, 0] == lo[0]) and torch.all(b.partner[:, 0] == hi[0])
    torch.testing.assert_close(b.X[:, 1], b.partner[:, 1])
