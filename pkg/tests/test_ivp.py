import numpy as np
import pytest

from psi_hilfer import (
    FracIntegralOperator,
    FracOrder,
    HilferDerivativeOperator,
    HybridIvpProblem,
    PsiFunction,
    SolverConfig,
    WeightedGridFunction,
    hilfer_derivative,
    make_graded_mesh,
    picard_step_ivp,
    residual_ivp,
    solve_coupled_ivp,
)
from psi_hilfer.errors import DegenerateMultiplier, InvalidArgument
from psi_hilfer.special import gamma

MU = 0.5


def _h(t):
    return 0.5 + t**2


def _Y(t):
    # solves (Y - 0.2 t Y) / (1 + 0.1 Y) = h
    return _h(t) / (1 - 0.2 * t - 0.1 * _h(t))


def _manufactured(psi=PsiFunction.identity(), coupling=0.3):
    """Caputo problem with solution (Y, Y); D^mu h = 2 t^(2-mu) / Gamma(3-mu)."""
    u = lambda t, y: 1 + 0.1 * y
    w = lambda t, y: 0.2 * t * y
    v = lambda t, x, q: 2 * t ** (2 - MU) / gamma(3 - MU) + coupling * np.sin(x - _Y(t))
    return HybridIvpProblem(u, w, v, k=0.0, y0=_Y(0.0), order=FracOrder(MU, 1.0), psi=psi, T=1.0)


def test_constant_coefficient():
    p = _manufactured()
    assert p.origin_u() == pytest.approx(1 + 0.1 * _Y(0.0))
    assert p.origin_w() == 0.0
    assert p.c == pytest.approx(_h(0.0))


@pytest.mark.parametrize("N", [128, 512])
def test_manufactured_solution(N):
    p = _manufactured()
    mesh = make_graded_mesh(1.0, N, 1.0)
    sol = solve_coupled_ivp(p, SolverConfig(mesh))
    assert sol.converged and sol.stop_reason == "converged"
    err = np.max(np.abs(sol.y.values - _Y(mesh.nodes)))
    assert err < 40.0 / N**1.5
    assert np.array_equal(sol.y.values, sol.x.values)
    assert sol.y.values[0] == pytest.approx(p.y0, abs=1e-15)
    assert max(sol.residual_y, sol.residual_x) <= 10 * sol.tolerance


def test_error_decreases_with_refinement():
    p = _manufactured()
    errs = []
    for N in (64, 128, 256):
        mesh = make_graded_mesh(1.0, N, 1.0)
        sol = solve_coupled_ivp(p, SolverConfig(mesh, tol=1e-13))
        errs.append(np.max(np.abs(sol.y.values - _Y(mesh.nodes))))
    assert errs[0] > errs[1] > errs[2]
    assert np.log2(errs[1] / errs[2]) > 1.2


def test_solution_satisfies_differential_form():
    # backward direction: the integral-equation solution solves the FDE
    p = _manufactured()
    mesh = make_graded_mesh(1.0, 512, 1.0)
    sol = solve_coupled_ivp(p, SolverConfig(mesh))
    t = mesh.nodes
    y, x = sol.y.values, sol.x.values
    h = WeightedGridFunction(mesh, p.psi, 1.0, (y - p.w(t, y)) / p.u(t, y))
    lhs = hilfer_derivative(HilferDerivativeOperator(p.psi, p.order, mesh), h).unweighted()
    rhs = p.v(t, x, 0.0)
    assert np.max(np.abs(lhs[2:-2] - rhs[2:-2])) < 2e-2
    assert h.values[0] == pytest.approx((p.y0 - 0.0) / p.origin_u())


def test_nonuniform_psi():
    # the same construction in tau = ln(1 + t) with T = e - 1
    psi = PsiFunction.log_shift()
    T = np.e - 1
    u = lambda t, y: 1 + 0.1 * y
    w = lambda t, y: 0.2 * psi.tau(t) * y
    Y = lambda t: _h(psi.tau(t)) / (1 - 0.2 * psi.tau(t) - 0.1 * _h(psi.tau(t)))
    v = lambda t, x, q: 2 * psi.tau(t) ** (2 - MU) / gamma(3 - MU) + 0.3 * np.sin(x - Y(t))
    p = HybridIvpProblem(u, w, v, k=0.0, y0=Y(0.0), order=FracOrder(MU, 1.0), psi=psi, T=T)
    mesh = make_graded_mesh(T, 256, 1.0)
    sol = solve_coupled_ivp(p, SolverConfig(mesh))
    assert sol.converged
    assert np.max(np.abs(sol.y.values - Y(mesh.nodes))) < 5e-3


def test_coupling_through_q():
    # u = 1, w = 0, v = q with x = c: q = k c tau^mu / Gamma(mu + 1) is exact at
    # the nodes, and one step gives c + k c tau^(2 mu) / Gamma(2 mu + 1)
    mu, k, c = 0.4, 0.7, 1.3
    p = HybridIvpProblem(
        lambda t, y: 1.0 + 0 * t, lambda t, y: 0 * t, lambda t, x, q: q,
        k=k, y0=c, order=FracOrder(mu, 1.0), psi=PsiFunction.identity(), T=1.0,
    )
    mesh = make_graded_mesh(1.0, 256, 2.0)
    tau = mesh.nodes
    ny, nx = picard_step_ivp(p, np.full(257, c), np.full(257, c), mesh)
    op = FracIntegralOperator(p.psi, mu, mesh)
    _, phi = op.apply(0.0, k * c * tau**mu / gamma(mu + 1))
    assert np.allclose(ny.values, c + tau**mu * phi, rtol=1e-13, atol=1e-13)
    assert np.allclose(nx.values, ny.values)
    exact = c + k * c * tau ** (2 * mu) / gamma(2 * mu + 1)
    assert np.max(np.abs(ny.values - exact)) < 1e-3


def test_riemann_liouville_type_solution():
    # nu = 0: u = 1, w = 0, v = 0 gives y = y0 tau^(mu-1), weighted value y0
    p = HybridIvpProblem(
        lambda t, y: 1.0 + 0 * t, lambda t, y: 0 * t, lambda t, x, q: 0 * t,
        k=0.0, y0=0.8, order=FracOrder(0.6, 0.0), psi=PsiFunction.identity(), T=1.0, u_at_origin=1.0,
    )
    sol = solve_coupled_ivp(p, SolverConfig(make_graded_mesh(1.0, 32, 2.0)))
    assert sol.converged
    assert np.allclose(sol.y.values, 0.8)
    assert np.allclose(sol.y.unweighted()[1:], 0.8 * sol.y.t[1:] ** -0.4)


def test_weighted_start_for_xi_below_one():
    p = HybridIvpProblem(
        lambda t, y: 1.5 + 0.1 * np.tanh(y), lambda t, y: 0.1 * t, lambda t, x, q: np.cos(x) + q,
        k=0.5, y0=0.4, order=FracOrder(0.5, 0.5), psi=PsiFunction.identity(), T=1.0, u_at_origin=1.5,
    )
    sol = solve_coupled_ivp(p, SolverConfig(make_graded_mesh(1.0, 256, 2.0)))
    assert sol.converged
    assert sol.y.xi == pytest.approx(0.75)
    assert sol.y.values[0] == pytest.approx(0.4)
    assert np.isnan(sol.y.unweighted()[0])


def test_xi_below_one_needs_origin_multiplier():
    with pytest.raises(InvalidArgument, match="u_at_origin"):
        HybridIvpProblem(
            lambda t, y: 1 + 0 * t, lambda t, y: 0 * t, lambda t, x, q: 0 * t,
            k=0.0, y0=0.0, order=FracOrder(0.5, 0.5), psi=PsiFunction.identity(), T=1.0,
        )


def test_degenerate_multiplier():
    p = HybridIvpProblem(
        lambda t, y: 0.5 - t, lambda t, y: 0 * t, lambda t, x, q: 1 + 0 * t,
        k=0.0, y0=1.0, order=FracOrder(0.5, 1.0), psi=PsiFunction.identity(), T=1.0,
    )
    with pytest.raises(DegenerateMultiplier) as exc:
        solve_coupled_ivp(p, SolverConfig(make_graded_mesh(1.0, 8)))
    assert exc.value.t == 0.5
    with pytest.raises(DegenerateMultiplier):
        HybridIvpProblem(
            lambda t, y: t, lambda t, y: 0 * t, lambda t, x, q: 0 * t,
            k=0.0, y0=1.0, order=FracOrder(0.5, 1.0), psi=PsiFunction.identity(), T=1.0,
        )


def test_non_convergence_is_reported():
    # w = 3 y makes the map expansive
    p = HybridIvpProblem(
        lambda t, y: 1 + 0 * t, lambda t, y: 3 * y, lambda t, x, q: 1 + 0 * t,
        k=0.0, y0=0.0, order=FracOrder(0.5, 1.0), psi=PsiFunction.identity(), T=1.0,
    )
    sol = solve_coupled_ivp(p, SolverConfig(make_graded_mesh(1.0, 16), max_iter=500))
    assert not sol.converged
    assert sol.stop_reason in ("max_iter reached", "non-finite iterate")
    assert np.all(np.isfinite(sol.y.values))


def test_residual_of_exact_pair_is_quadrature_error():
    p = _manufactured(coupling=0.0)
    for N, bound in ((64, 1e-3), (256, 2e-4)):
        mesh = make_graded_mesh(1.0, N, 1.0)
        Y = WeightedGridFunction(mesh, p.psi, 1.0, _Y(mesh.nodes))
        assert max(residual_ivp(p, Y, Y)) < bound


def test_solver_config_validation():
    mesh = make_graded_mesh(1.0, 8)
    for kw in ({"tol": 0.0}, {"relaxation": 0.0}, {"relaxation": 1.5}, {"max_iter": 0}):
        with pytest.raises(InvalidArgument):
            SolverConfig(mesh, **kw)
    assert SolverConfig(mesh).tolerance_for(5.0) == pytest.approx(5e-10)
    assert SolverConfig(mesh, tol=1e-6).tolerance_for(5.0) == 1e-6


def test_mesh_must_match_horizon():
    p = _manufactured()
    with pytest.raises(InvalidArgument):
        picard_step_ivp(p, np.zeros(9), np.zeros(9), make_graded_mesh(2.0, 8))


def test_initial_guess_forms():
    p = _manufactured()
    mesh = make_graded_mesh(1.0, 64, 1.0)
    guess = WeightedGridFunction(mesh, p.psi, 1.0, _Y(mesh.nodes))
    s1 = solve_coupled_ivp(p, SolverConfig(mesh, initial_guess=(guess, guess)))
    s2 = solve_coupled_ivp(p, SolverConfig(mesh, initial_guess="zero"))
    assert s1.iterations < s2.iterations
    assert np.allclose(s1.y.values, s2.y.values, atol=1e-8)
    with pytest.raises(InvalidArgument):
        solve_coupled_ivp(p, SolverConfig(mesh, initial_guess="random"))
