"""Coupled hybrid boundary value problem.

The system

    D^{mu,nu;Psi} [(y - w1(t, y, x)) / u1(t, y, x)] = v1(t, y, x)
    D^{mu,nu;Psi} [(x - w2(t, y, x)) / u2(t, y, x)] = v2(t, y, x)
    a z(0) + b z(T) = y0   for the weighted values z of y and of x

is solved through its integral form

    y = w1 + u1 [Omega_1 tau**(xi-1) + I^mu v1(., y, x)]

with the boundary constants

    Omega_i = (y0 - a W0_i - b tau_T**(1-xi) [w_i(T) + u_i(T) I^mu v_i(T)])
              / (a U0_i + b u_i(T)),

recomputed from the current iterate at every sweep. ``U0_i`` and
``W0_i`` are the weighted limits of ``u_i`` and ``w_i`` at the origin.
Every sweep output satisfies the boundary condition by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InvalidArgument, SingularBoundaryOperator
from .frac_calculus import FracIntegralOperator
from .psi_core import FracOrder, GradedMesh, PsiFunction, WeightedGridFunction
from .solver import (
    SolutionPair,
    SolverConfig,
    check_multiplier,
    evaluate,
    initial_pair,
    picard_loop,
    unweight_nodes,
)

__all__ = [
    "HybridBvpProblem",
    "OmegaPair",
    "BvpOperators",
    "compute_omega",
    "picard_step_bvp",
    "solve_coupled_bvp",
    "boundary_defect",
    "residual_bvp",
]


@dataclass(frozen=True)
class HybridBvpProblem:
    """Coefficients and data of the coupled hybrid BVP.

    All six coefficient functions take ``(t, y, x)`` and must accept
    arrays. The ``*_at_origin`` overrides fix the weighted limits at
    ``t = 0``; left as ``None``, ``u_i`` is evaluated at the iterate's
    origin state and ``w_i`` likewise for ``xi = 1`` (zero for ``xi < 1``).
    """

    u1: Callable
    u2: Callable
    w1: Callable
    w2: Callable
    v1: Callable
    v2: Callable
    a: float
    b: float
    y0: float
    order: FracOrder
    psi: PsiFunction
    T: float
    u1_at_origin: float | None = None
    u2_at_origin: float | None = None
    w1_at_origin: float | None = None
    w2_at_origin: float | None = None
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.a == 0:
            raise InvalidArgument("a must be nonzero")
        if not self.T > 0:
            raise InvalidArgument(f"T must be positive, got {self.T}")

    def coefficients(self, i: int):
        if i == 1:
            return self.u1, self.w1, self.v1, self.u1_at_origin, self.w1_at_origin
        return self.u2, self.w2, self.v2, self.u2_at_origin, self.w2_at_origin

    def constant_guess(self) -> float:
        s = self.a + self.b
        return self.y0 / s if s != 0 else 0.0


@dataclass(frozen=True)
class OmegaPair:
    """Boundary constants and the denominators they were divided by."""

    omega1: float
    omega2: float
    denominator1: float
    denominator2: float


@dataclass(frozen=True, eq=False)
class BvpOperators:
    """Mesh-dependent pieces of one BVP discretization, reused every sweep."""

    problem: HybridBvpProblem
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

    def pieces(self, zy, zx, i):
        """Nodal multiplier, weighted perturbation and integral term of equation i."""
        p = self.problem
        xi, mu = p.order.xi, p.order.mu
        tau, t = self.tau, self.mesh.nodes
        u, w, v, u0, w0 = p.coefficients(i)
        y = unweight_nodes(zy, tau, xi)
        x = unweight_nodes(zx, tau, xi)
        origin = (t[:1], y[:1], x[:1])

        U = evaluate(u, t, y, x)
        U[0] = float(evaluate(u, *origin)[0]) if u0 is None else float(u0)
        Wz = tau ** (1.0 - xi) * evaluate(w, t, y, x)
        if w0 is not None:
            Wz[0] = float(w0)
        elif xi < 1.0:
            Wz[0] = 0.0
        f = evaluate(v, t, y, x)
        _, phi = self.integral.apply(0.0, f)
        # tau**(1-xi) * I^mu v, which vanishes at the origin
        Iz = tau ** (1.0 - xi + mu) * phi
        return U, Wz, Iz

    def omega(self, zy, zx, i, pieces=None):
        p = self.problem
        U, Wz, Iz = self.pieces(zy, zx, i) if pieces is None else pieces
        den = p.a * U[0] + p.b * U[-1]
        scale = abs(p.a * U[0]) + abs(p.b * U[-1]) + 1.0
        if not abs(den) >= 1e-12 * scale:
            raise SingularBoundaryOperator(i, den)
        num = p.y0 - p.a * Wz[0] - p.b * (Wz[-1] + U[-1] * Iz[-1])
        return num / den, den

    def half_step(self, zy, zx, i):
        pcs = self.pieces(zy, zx, i)
        om, _ = self.omega(zy, zx, i, pcs)
        U, Wz, Iz = pcs
        check_multiplier(U, self.mesh.nodes, f"u{i}")
        return U * (om + Iz) + Wz

    def step(self, zy, zx):
        return self.half_step(zy, zx, 1), self.half_step(zy, zx, 2)


def _ops(problem, mesh_or_ops):
    if isinstance(mesh_or_ops, BvpOperators):
        return mesh_or_ops
    return BvpOperators(problem, mesh_or_ops)


def _unpack(problem, y, x, mesh):
    if isinstance(y, WeightedGridFunction):
        if abs(y.xi - problem.order.xi) > 1e-15 or abs(x.xi - problem.order.xi) > 1e-15:
            raise InvalidArgument("pair weights do not match the problem's xi")
        return y.values, x.values, y.mesh if mesh is None else mesh
    if mesh is None:
        raise InvalidArgument("a mesh is required when passing raw arrays")
    return np.asarray(y, dtype=float), np.asarray(x, dtype=float), mesh


def compute_omega(problem: HybridBvpProblem, y, x, mesh=None) -> OmegaPair:
    """Boundary constants for the current pair.

    Raises
    ------
    SingularBoundaryOperator
        If ``|a U0_i + b u_i(T)|`` is below ``1e-12 * (|a U0_i| + |b u_i(T)| + 1)``.
    """
    zy, zx, mesh = _unpack(problem, y, x, mesh)
    ops = _ops(problem, mesh)
    o1, d1 = ops.omega(zy, zx, 1)
    o2, d2 = ops.omega(zy, zx, 2)
    return OmegaPair(float(o1), float(o2), float(d1), float(d2))


def picard_step_bvp(problem: HybridBvpProblem, y, x, mesh=None):
    """One undamped sweep; the output satisfies the boundary condition."""
    zy, zx, mesh = _unpack(problem, y, x, mesh)
    ops = _ops(problem, mesh)
    ny, nx = ops.step(zy, zx)
    xi = problem.order.xi
    return (
        WeightedGridFunction(ops.mesh, problem.psi, xi, ny),
        WeightedGridFunction(ops.mesh, problem.psi, xi, nx),
    )


def boundary_defect(problem: HybridBvpProblem, y, x) -> tuple[float, float]:
    """``|a z(0) + b z(T) - y0|`` for each component."""
    zy = y.values if isinstance(y, WeightedGridFunction) else np.asarray(y, dtype=float)
    zx = x.values if isinstance(x, WeightedGridFunction) else np.asarray(x, dtype=float)
    a, b, y0 = problem.a, problem.b, problem.y0
    return float(abs(a * zy[0] + b * zy[-1] - y0)), float(abs(a * zx[0] + b * zx[-1] - y0))


def residual_bvp(problem: HybridBvpProblem, y, x, mesh=None) -> tuple[float, float]:
    """Weighted norms of the pair minus one undamped sweep."""
    zy, zx, mesh = _unpack(problem, y, x, mesh)
    ny, nx = _ops(problem, mesh).step(zy, zx)
    return float(np.max(np.abs(zy - ny))), float(np.max(np.abs(zx - nx)))


def solve_coupled_bvp(problem: HybridBvpProblem, config: SolverConfig) -> SolutionPair:
    """Solve the coupled BVP by damped Picard iteration.

    The returned pair carries the boundary constants of the final iterate
    and its boundary defects.
    """
    ops = BvpOperators(problem, config.mesh)
    zy, zx = initial_pair(config.initial_guess, config.mesh, problem.constant_guess())
    zy, zx, it, ok, upd, tol, reason = picard_loop(ops.step, zy, zx, config)
    ry, rx = residual_bvp(problem, zy, zx, ops)
    xi = problem.order.xi
    y = WeightedGridFunction(config.mesh, problem.psi, xi, zy)
    x = WeightedGridFunction(config.mesh, problem.psi, xi, zx)
    return SolutionPair(
        y=y,
        x=x,
        iterations=it,
        converged=ok,
        final_update_norm=upd,
        residual_y=ry,
        residual_x=rx,
        tolerance=tol,
        omega=compute_omega(problem, zy, zx, ops),
        boundary_defect=boundary_defect(problem, y, x),
        stop_reason=reason,
    )
