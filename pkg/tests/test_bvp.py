import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from psi_hilfer import (
    FracOrder,
    HybridBvpProblem,
    PsiFunction,
    SolverConfig,
    WeightedGridFunction,
    boundary_defect,
    compute_omega,
    make_graded_mesh,
    picard_step_bvp,
    residual_bvp,
    solve_coupled_bvp,
)
from psi_hilfer.config import load_config
from psi_hilfer.errors import InvalidArgument, SingularBoundaryOperator
from psi_hilfer.special import gamma


def _const(c):
    return lambda t, y, x: c + 0 * t


def _linear(a, b, y0, order, psi=PsiFunction.identity(), T=1.0):
    # u = 1, w = 0, v = 1: z = Omega + tau^(1 - xi + mu) / Gamma(mu + 1)
    return HybridBvpProblem(
        _const(1.0), _const(1.0), _const(0.0), _const(0.0), _const(1.0), _const(1.0),
        a=a, b=b, y0=y0, order=order, psi=psi, T=T,
    )


@pytest.mark.parametrize("nu", [0.0, 0.5, 1.0])
def test_linear_closed_form(nu):
    order = FracOrder(0.4, nu)
    p = _linear(2.0, 1.0, 3.0, order)
    mesh = make_graded_mesh(1.0, 64, 2.0)
    sol = solve_coupled_bvp(p, SolverConfig(mesh))
    tau = mesh.nodes
    lift = tau ** (1 - order.xi + order.mu) / gamma(order.mu + 1)
    omega = (3.0 - lift[-1]) / 3.0
    assert sol.converged
    assert np.allclose(sol.y.values, omega + lift, atol=1e-12)
    assert sol.omega.omega1 == pytest.approx(omega, abs=1e-12)
    assert sol.omega.denominator1 == pytest.approx(3.0)
    assert max(sol.boundary_defect) < 1e-12


def test_registered_problem_has_diagonal_solution():
    cfg = load_config("example2-fde")
    p = cfg.build_problem()
    sol = solve_coupled_bvp(p, cfg.solver_config())
    t = sol.y.t
    assert sol.converged
    assert np.max(np.abs(sol.y.values - t)) < 5e-3
    assert np.max(np.abs(sol.x.values - t)) < 5e-3
    assert max(sol.boundary_defect) < 1e-10
    exact = WeightedGridFunction(sol.y.mesh, p.psi, 1.0, t.copy())
    assert max(residual_bvp(p, exact, exact)) < 5e-3


def test_worked_text_coefficients_solve():
    # the worked-text coefficients define a different problem; it still converges
    cfg = load_config("example2")
    sol = solve_coupled_bvp(cfg.build_problem(), cfg.solver_config())
    assert sol.converged
    assert max(sol.boundary_defect) < 1e-10


def test_omega_formula_at_given_pair():
    # hand evaluation for u1 = 2 + t, w1 = y, v1 = 0, with y = x = 1 + t on [0, 1]
    p = HybridBvpProblem(
        lambda t, y, x: 2 + t, _const(1.0), lambda t, y, x: y, _const(0.0), _const(0.0), _const(0.0),
        a=1.0, b=2.0, y0=5.0, order=FracOrder(0.5, 1.0), psi=PsiFunction.identity(), T=1.0,
    )
    mesh = make_graded_mesh(1.0, 8)
    y = WeightedGridFunction(mesh, p.psi, 1.0, 1 + mesh.nodes)
    om = compute_omega(p, y, y)
    # (y0 - a w(0) - b w(T)) / (a u(0) + b u(T)) = (5 - 1 - 4) / (2 + 6)
    assert om.omega1 == pytest.approx(0.0, abs=1e-15)
    assert om.denominator1 == pytest.approx(8.0)
    assert om.omega2 == pytest.approx(5.0 / 3.0)


@pytest.mark.parametrize("b", [-1.0, 1.0])
def test_periodic_and_antiperiodic(b):
    p = HybridBvpProblem(
        lambda t, y, x: 1 + t, lambda t, y, x: 2 + np.sin(t), _const(0.1),
        lambda t, y, x: 0.1 * x, lambda t, y, x: np.cos(t) - 0.5, lambda t, y, x: 0.2 * y,
        a=1.0, b=b, y0=0.0, order=FracOrder(0.6, 1.0), psi=PsiFunction.identity(), T=1.0,
    )
    mesh = make_graded_mesh(1.0, 128)
    sol = solve_coupled_bvp(p, SolverConfig(mesh))
    assert sol.converged
    z = sol.y.values
    assert abs(z[0] + b * z[-1]) < 1e-10


def test_singular_boundary_operator():
    # constant u with a = -b: the denominator a u(0) + b u(T) vanishes
    p = _linear(1.0, -1.0, 0.0, FracOrder(0.5, 1.0))
    mesh = make_graded_mesh(1.0, 8)
    with pytest.raises(SingularBoundaryOperator) as exc:
        picard_step_bvp(p, np.zeros(9), np.zeros(9), mesh)
    assert exc.value.index == 1
    assert exc.value.denominator == 0.0


def test_constant_guess():
    assert _linear(3.0, 1.0, 2.0, FracOrder(0.5, 1.0)).constant_guess() == 0.5
    assert _linear(1.0, -1.0, 2.0, FracOrder(0.5, 1.0)).constant_guess() == 0.0


def test_validation():
    with pytest.raises(InvalidArgument):
        _linear(0.0, 1.0, 1.0, FracOrder(0.5, 1.0))
    p = _linear(1.0, 1.0, 1.0, FracOrder(0.5, 1.0))
    mesh = make_graded_mesh(1.0, 8)
    with pytest.raises(InvalidArgument):
        picard_step_bvp(p, np.zeros(9), np.zeros(9))
    with pytest.raises(InvalidArgument):
        y = WeightedGridFunction(mesh, p.psi, 0.5, np.zeros(9))
        picard_step_bvp(p, y, y)


@settings(max_examples=25, deadline=None)
@given(
    a=st.floats(0.2, 5.0),
    b=st.floats(-5.0, 5.0),
    y0=st.floats(-3.0, 3.0),
    mu=st.floats(0.1, 0.9),
    nu=st.floats(0.0, 1.0),
    seed=st.integers(0, 2**16),
)
def test_step_satisfies_boundary_condition(a, b, y0, mu, nu, seed):
    rng = np.random.default_rng(seed)
    c = rng.uniform(-0.5, 0.5, 6)
    p = HybridBvpProblem(
        lambda t, y, x: 1.5 + t + c[0] * np.tanh(y), lambda t, y, x: 1.2 + 0.5 * t + c[1] * np.tanh(x),
        lambda t, y, x: c[2] * y / (1 + y**2), lambda t, y, x: c[3] + 0 * t,
        lambda t, y, x: c[4] * np.sin(x), lambda t, y, x: c[5] * t,
        a=a, b=b, y0=y0, order=FracOrder(mu, nu), psi=PsiFunction.exponential(0.5), T=1.0,
    )
    mesh = make_graded_mesh(1.0, 32, 2.0)
    zy, zx = rng.normal(size=(2, 33))
    try:
        ny, nx = picard_step_bvp(p, zy, zx, mesh)
    except SingularBoundaryOperator:
        return
    assert max(boundary_defect(p, ny, nx)) <= 1e-10 * (1 + abs(y0) + np.max(np.abs(ny.values)))
