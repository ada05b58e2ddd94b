"""Damped Picard iteration shared by the IVP and BVP solvers."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DegenerateMultiplier, InvalidArgument
from .psi_core import GradedMesh, WeightedGridFunction

log = logging.getLogger("psi_hilfer")

__all__ = ["SolverConfig", "SolutionPair", "picard_loop"]


@dataclass(frozen=True)
class SolverConfig:
    """Settings of the damped fixed-point iteration.

    Attributes
    ----------
    mesh : GradedMesh
    tol : float or None
        Stop when the summed weighted-norm update drops to ``tol``. ``None``
        means ``1e-10 * max(1, ||y|| + ||x||)`` evaluated at each sweep.
    max_iter : int
    relaxation : float
        Damping factor λ in ``(0, 1]``; the update is
        ``(1 - λ) * current + λ * step(current)``.
    initial_guess : str or tuple
        ``"constant"`` (the weighted constant satisfying the initial or
        boundary condition), ``"zero"``, or a pair of arrays of weighted
        values (or grid functions).
    """

    mesh: GradedMesh
    tol: float | None = None
    max_iter: int = 200
    relaxation: float = 0.5
    initial_guess: object = "constant"

    def __post_init__(self):
        if self.tol is not None and not self.tol > 0:
            raise InvalidArgument(f"tol must be positive, got {self.tol}")
        if not 0.0 < self.relaxation <= 1.0:
            raise InvalidArgument(f"relaxation must lie in (0, 1], got {self.relaxation}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise InvalidArgument(f"max_iter must be a positive integer, got {self.max_iter}")

    def tolerance_for(self, scale: float) -> float:
        return float(self.tol) if self.tol is not None else 1e-10 * max(1.0, float(scale))


@dataclass(frozen=True)
class SolutionPair:
    """Result of a coupled solve.

    ``omega`` and ``boundary_defect`` are filled for boundary value
    problems only.
    """

    y: WeightedGridFunction
    x: WeightedGridFunction
    iterations: int
    converged: bool
    final_update_norm: float
    residual_y: float
    residual_x: float
    tolerance: float
    omega: object = None
    boundary_defect: tuple | None = None
    stop_reason: str = ""


def evaluate(f: Callable, *args) -> np.ndarray:
    """Call a coefficient function and broadcast the result to the node shape."""
    shape = np.shape(args[0])
    with np.errstate(all="ignore"):
        out = np.asarray(f(*args), dtype=float)
    return np.broadcast_to(out, shape).astype(float, copy=True)


def unweight_nodes(z: np.ndarray, tau: np.ndarray, xi: float) -> np.ndarray:
    """Plain values ``tau**(xi-1) * z``.

    For ``xi < 1`` the origin has no finite plain value; the first
    positive node stands in for it so coefficient functions always see
    finite arguments.
    """
    if xi == 1.0:
        return np.array(z, dtype=float)
    y = np.empty_like(z, dtype=float)
    y[1:] = tau[1:] ** (xi - 1.0) * z[1:]
    y[0] = y[1]
    return y


def check_multiplier(U: np.ndarray, t: np.ndarray, which: str = "u"):
    bad = np.flatnonzero(U == 0.0)
    if bad.size:
        raise DegenerateMultiplier(t[bad[0]], which)


def initial_pair(guess, mesh: GradedMesh, constant: float):
    n = mesh.N + 1
    if isinstance(guess, str):
        if guess == "constant":
            return np.full(n, float(constant)), np.full(n, float(constant))
        if guess == "zero":
            return np.zeros(n), np.zeros(n)
        raise InvalidArgument(f"unknown initial guess {guess!r}")
    gy, gx = guess
    gy = gy.values if isinstance(gy, WeightedGridFunction) else np.asarray(gy, dtype=float)
    gx = gx.values if isinstance(gx, WeightedGridFunction) else np.asarray(gx, dtype=float)
    if gy.shape != (n,) or gx.shape != (n,):
        raise InvalidArgument(f"initial guess must have {n} values per component")
    return gy.copy(), gx.copy()


def picard_loop(step, zy, zx, config: SolverConfig):
    """Iterate ``(y, x) <- (1-λ)(y, x) + λ step(y, x)``.

    Returns ``(zy, zx, iterations, converged, update, tol, reason)``.
    Non-convergence, including overflow to non-finite values, is
    reported rather than raised; the last finite iterate is returned.
    """
    lam = config.relaxation
    upd = np.inf
    tol = config.tolerance_for(np.max(np.abs(zy)) + np.max(np.abs(zx)))
    for it in range(1, int(config.max_iter) + 1):
        with np.errstate(all="ignore"):
            ny, nx = step(zy, zx)
            ny = (1.0 - lam) * zy + lam * ny
            nx = (1.0 - lam) * zx + lam * nx
        if not (np.all(np.isfinite(ny)) and np.all(np.isfinite(nx))):
            log.info("iteration %d produced non-finite values; stopping", it)
            return zy, zx, it, False, float(upd), tol, "non-finite iterate"
        upd = float(np.max(np.abs(ny - zy)) + np.max(np.abs(nx - zx)))
        zy, zx = ny, nx
        tol = config.tolerance_for(np.max(np.abs(zy)) + np.max(np.abs(zx)))
        log.debug("sweep %d update %.3e", it, upd)
        if upd <= tol:
            log.info("converged after %d sweeps (update %.3e)", it, upd)
            return zy, zx, it, True, upd, tol, "converged"
    log.info("no convergence after %d sweeps (update %.3e)", config.max_iter, upd)
    return zy, zx, int(config.max_iter), False, upd, tol, "max_iter reached"
