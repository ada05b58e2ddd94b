"""Coupled hybrid initial value problem.

The system

    D^{mu,nu;Psi} [(y - w(t, y)) / u(t, y)] = v(t, x, k I^{mu;Psi} x)
    D^{mu,nu;Psi} [(x - w(t, x)) / u(t, x)] = v(t, y, k I^{mu;Psi} y)

with weighted initial value ``y0`` for both components is solved through
its integral form

    y = u(t, y) [c tau**(xi-1) + I^mu v(., x, k I^mu x)] + w(t, y),
    c = (y0 - W0) / u(0, y(0+)),

where ``W0`` is the weighted limit of ``w`` at the origin (``w(0, y0)``
for ``xi = 1`` and zero for ``xi < 1`` when ``w`` is bounded).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DegenerateMultiplier, InvalidArgument
from .frac_calculus import FracIntegralOperator
from .psi_core import FracOrder, GradedMesh, PsiFunction, WeightedGridFunction, weighted_norm
from .solver import (
    SolutionPair,
    SolverConfig,
    check_multiplier,
    evaluate,
    initial_pair,
    picard_loop,
    unweight_nodes,
)

__all__ = ["HybridIvpProblem", "IvpOperators", "picard_step_ivp", "solve_coupled_ivp", "residual_ivp"]


@dataclass(frozen=True)
class HybridIvpProblem:
    """Coefficients and data of the coupled hybrid IVP.

    Attributes
    ----------
    u, w : callable ``(t, y) -> array``
        Multiplier and additive perturbation; must accept arrays.
    v : callable ``(t, x, q) -> array``
        Forcing; ``q`` receives ``k * I^{mu;Psi} x``.
    k : float
    y0 : float
        Weighted initial value shared by both components.
    order : FracOrder
    psi : PsiFunction
    T : float
    u_at_origin : float, optional
        ``u(0, y(0+))``. Required when ``xi < 1``; for ``xi = 1`` it
        defaults to ``u(0, y0)``.
    w_at_origin : float, optional
        Weighted limit of ``w`` at the origin. Defaults to ``w(0, y0)``
        for ``xi = 1`` and 0 otherwise. Passing ``0.0`` for ``xi = 1``
        drops the term, which is only exact when ``w(0, y0) = 0``.
    """

    u: Callable
    w: Callable
    v: Callable
    k: float
    y0: float
    order: FracOrder
    psi: PsiFunction
    T: float
    u_at_origin: float | None = None
    w_at_origin: float | None = None
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if not self.T > 0:
            raise InvalidArgument(f"T must be positive, got {self.T}")
        if self.order.xi < 1.0 and self.u_at_origin is None:
            raise InvalidArgument("u_at_origin is required when xi < 1")
        if self.origin_u() == 0.0:
            raise DegenerateMultiplier(0.0)

    def origin_u(self) -> float:
        if self.u_at_origin is not None:
            return float(self.u_at_origin)
        return float(evaluate(self.u, np.zeros(1), np.full(1, self.y0))[0])

    def origin_w(self) -> float:
        if self.w_at_origin is not None:
            return float(self.w_at_origin)
        if self.order.xi < 1.0:
            return 0.0
        return float(evaluate(self.w, np.zeros(1), np.full(1, self.y0))[0])

    @property
    def c(self) -> float:
        """Coefficient of ``tau**(xi-1)`` in the integral form."""
        return (self.y0 - self.origin_w()) / self.origin_u()


@dataclass(frozen=True, eq=False)
class IvpOperators:
    """Mesh-dependent pieces of one IVP discretization, reused every sweep."""

    problem: HybridIvpProblem
    mesh: GradedMesh
    integral: FracIntegralOperator = field(init=False)

    def __post_init__(self):
        p = self.problem
        if abs(self.mesh.T - p.T) > 1e-12 * max(1.0, p.T):
            raise InvalidArgument(f"mesh ends at {self.mesh.T}, problem horizon is {p.T}")
        object.__setattr__(self, "integral", FracIntegralOperator(p.psi, p.order.mu, self.mesh))

    @property
    def tau(self):
        return self.integral.tau

    def half_step(self, z_self: np.ndarray, z_other: np.ndarray) -> np.ndarray:
        """New weighted values for one component given both current ones."""
        p = self.problem
        xi, mu = p.order.xi, p.order.mu
        tau, t = self.tau, self.mesh.nodes
        op = self.integral

        x_plain = unweight_nodes(z_other, tau, xi)
        Pq, phi_q = op.apply(xi - 1.0, z_other)
        q = _plain_from_expo(tau, Pq, phi_q) * p.k
        f = evaluate(p.v, t, x_plain, q)
        _, phi_f = op.apply(0.0, f)
        integral_term = tau ** (1.0 - xi + mu) * phi_f

        y_plain = unweight_nodes(z_self, tau, xi)
        U = evaluate(p.u, t, y_plain)
        U[0] = p.origin_u()
        check_multiplier(U, t)
        Wz = tau ** (1.0 - xi) * evaluate(p.w, t, y_plain)
        Wz[0] = p.origin_w()
        return U * (p.c + integral_term) + Wz


def _plain_from_expo(tau, P, phi):
    """``tau**P * phi`` at the nodes; a singular origin copies the first node."""
    if abs(P) < 1e-12:
        return np.array(phi, dtype=float)
    out = np.empty_like(phi)
    out[1:] = tau[1:] ** P * phi[1:]
    out[0] = 0.0 if P > 0 else out[1]
    return out


def _ops(problem, mesh_or_ops):
    if isinstance(mesh_or_ops, IvpOperators):
        return mesh_or_ops
    return IvpOperators(problem, mesh_or_ops)


def picard_step_ivp(problem: HybridIvpProblem, y, x, mesh=None):
    """One undamped sweep of the integral form.

    ``y`` and ``x`` are weighted grid functions (or arrays together with
    ``mesh``). Returns the pair of new weighted grid functions.

    Raises
    ------
    DegenerateMultiplier
        If ``u`` vanishes at a node.
    """
    zy, zx, mesh = _unpack(problem, y, x, mesh)
    ops = _ops(problem, mesh)
    ny = ops.half_step(zy, zx)
    nx = ops.half_step(zx, zy)
    xi = problem.order.xi
    return (
        WeightedGridFunction(ops.mesh, problem.psi, xi, ny),
        WeightedGridFunction(ops.mesh, problem.psi, xi, nx),
    )


def _unpack(problem, y, x, mesh):
    if isinstance(y, WeightedGridFunction):
        if abs(y.xi - problem.order.xi) > 1e-15 or abs(x.xi - problem.order.xi) > 1e-15:
            raise InvalidArgument("pair weights do not match the problem's xi")
        return y.values, x.values, y.mesh if mesh is None else mesh
    if mesh is None:
        raise InvalidArgument("a mesh is required when passing raw arrays")
    return np.asarray(y, dtype=float), np.asarray(x, dtype=float), mesh


def residual_ivp(problem: HybridIvpProblem, y, x, mesh=None) -> tuple[float, float]:
    """Weighted norms of ``y - RHS(y; x)`` and ``x - RHS(x; y)``."""
    zy, zx, mesh = _unpack(problem, y, x, mesh)
    ops = _ops(problem, mesh)
    ry = float(np.max(np.abs(zy - ops.half_step(zy, zx))))
    rx = float(np.max(np.abs(zx - ops.half_step(zx, zy))))
    return ry, rx


def solve_coupled_ivp(problem: HybridIvpProblem, config: SolverConfig) -> SolutionPair:
    """Solve the coupled IVP by damped Picard iteration.

    Non-convergence is reported through ``SolutionPair.converged``.

    Raises
    ------
    DegenerateMultiplier
        If ``u`` vanishes at a node during any sweep.
    """
    ops = IvpOperators(problem, config.mesh)
    zy, zx = initial_pair(config.initial_guess, config.mesh, problem.y0)

    def step(a, b):
        return ops.half_step(a, b), ops.half_step(b, a)

    zy, zx, it, ok, upd, tol, reason = picard_loop(step, zy, zx, config)
    ry, rx = residual_ivp(problem, zy, zx, ops)
    xi = problem.order.xi
    return SolutionPair(
        y=WeightedGridFunction(config.mesh, problem.psi, xi, zy),
        x=WeightedGridFunction(config.mesh, problem.psi, xi, zx),
        iterations=it,
        converged=ok,
        final_update_norm=upd,
        residual_y=ry,
        residual_x=rx,
        tolerance=tol,
        stop_reason=reason,
    )
