"""Smallness conditions that guarantee existence of a coupled solution.

The conditions take pre-digested scalars: Lipschitz constants of the
multipliers (sigma) and perturbations (delta), norms of the forcing
bounds (g), and the initial or boundary constants. A condition that
fails is *inconclusive*, since it is sufficient but not necessary.

Sampling estimators for Lipschitz constants and forcing bounds are
provided for exploration. They return lower bounds of the true
quantities, so reports built from them are flagged as heuristic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.stats import qmc

from .errors import EvaluationError, InvalidArgument
from .psi_core import FracOrder, PsiFunction, WeightedGridFunction, weighted_norm
from .special import gamma

__all__ = [
    "IvpHypothesisData",
    "BvpHypothesisData",
    "ExistenceReport",
    "check_ivp_condition",
    "check_bvp_condition",
    "estimate_lipschitz",
    "estimate_bound_g",
    "compute_radius",
    "g_norm_of",
]


def g_norm_of(g) -> float:
    """Norm of a forcing bound given as a constant or a weighted grid function."""
    if isinstance(g, WeightedGridFunction):
        return weighted_norm(g)
    return abs(float(g))


def _nonneg(**kw):
    for k, v in kw.items():
        if v is None:
            continue
        if not (v >= 0 and math.isfinite(v)):
            raise InvalidArgument(f"{k} must be a finite nonnegative number, got {v}")


def _growth(order: FracOrder, psi: PsiFunction, T: float) -> float:
    """(Psi(T) - Psi(0))**(mu + 1 - xi) / Gamma(mu + 1)."""
    return psi.tau(T) ** (order.mu + 1.0 - order.xi) / gamma(order.mu + 1.0)


@dataclass(frozen=True)
class IvpHypothesisData:
    """Scalars entering the IVP condition.

    ``K1``/``K2`` are the optional bounds on ``u`` and ``w`` used only by
    :func:`compute_radius`.
    """

    sigma: float
    delta: float
    g_norm: float
    y0_over_u0: float
    order: FracOrder
    psi: PsiFunction
    T: float
    K1: float | None = None
    K2: float | None = None
    heuristic: bool = False

    def __post_init__(self):
        _nonneg(sigma=self.sigma, delta=self.delta, g_norm=self.g_norm, K1=self.K1, K2=self.K2)
        if not self.T > 0:
            raise InvalidArgument(f"T must be positive, got {self.T}")


@dataclass(frozen=True)
class BvpHypothesisData:
    """Scalars entering the BVP condition.

    ``M1``, ``M2`` (bounds on ``u_i``) and ``N1``, ``N2`` (bounds on
    ``w_i``) are optional and only used by :func:`compute_radius`.
    """

    sigma1: float
    sigma2: float
    delta1: float
    delta2: float
    g1_norm: float
    g2_norm: float
    omega1_abs: float
    omega2_abs: float
    order: FracOrder
    psi: PsiFunction
    T: float
    M1: float | None = None
    M2: float | None = None
    N1: float | None = None
    N2: float | None = None
    heuristic: bool = False

    def __post_init__(self):
        _nonneg(
            sigma1=self.sigma1, sigma2=self.sigma2, delta1=self.delta1, delta2=self.delta2,
            g1_norm=self.g1_norm, g2_norm=self.g2_norm,
            omega1_abs=self.omega1_abs, omega2_abs=self.omega2_abs,
            M1=self.M1, M2=self.M2, N1=self.N1, N2=self.N2,
        )
        if not self.T > 0:
            raise InvalidArgument(f"T must be positive, got {self.T}")


@dataclass(frozen=True)
class ExistenceReport:
    """Left-hand side of a smallness condition and its margin against 1.

    ``heuristic`` is set when any input came from a sampling estimator;
    such a report must not be read as a certificate.
    """

    lhs: float
    breakdown: dict = field(default_factory=dict)
    heuristic: bool = False

    @property
    def margin(self) -> float:
        return 1.0 - self.lhs

    @property
    def satisfied(self) -> bool:
        return self.margin > 0

    @property
    def verdict(self) -> str:
        if self.heuristic:
            return "heuristic"
        return "satisfied" if self.satisfied else "inconclusive"


def check_ivp_condition(data: IvpHypothesisData) -> ExistenceReport:
    """``4 sigma [|y0/u0| + growth * ||g||] + delta`` against 1.

    Examples
    --------
    >>> d = IvpHypothesisData(0.1, 7/97, 2.0, 0.0, FracOrder(0.5, 1.0), PsiFunction.identity(), 1.0)
    >>> round(check_ivp_condition(d).lhs, 4)
    0.9749
    """
    growth = _growth(data.order, data.psi, data.T)
    y_term = abs(data.y0_over_u0)
    g_term = growth * data.g_norm
    mult = 4.0 * data.sigma * (y_term + g_term)
    lhs = mult + data.delta
    return ExistenceReport(
        lhs,
        {
            "4*sigma*|y0/u0|": 4.0 * data.sigma * y_term,
            "4*sigma*growth*g": 4.0 * data.sigma * g_term,
            "delta": data.delta,
            "growth": growth,
        },
        data.heuristic,
    )


def check_bvp_condition(data: BvpHypothesisData) -> ExistenceReport:
    """``(s1+s2) [|O1|+|O2| + growth (g1+g2)] + d1 + d2`` against 1."""
    growth = _growth(data.order, data.psi, data.T)
    s = data.sigma1 + data.sigma2
    om = data.omega1_abs + data.omega2_abs
    g = growth * (data.g1_norm + data.g2_norm)
    lhs = s * (om + g) + data.delta1 + data.delta2
    return ExistenceReport(
        lhs,
        {
            "sigma_sum*omega_sum": s * om,
            "sigma_sum*growth*g_sum": s * g,
            "delta_sum": data.delta1 + data.delta2,
            "growth": growth,
        },
        data.heuristic,
    )


def compute_radius(data) -> float:
    """Radius of the ball on which the existence argument runs.

    IVP (needs ``K1 > |u|`` and ``K2 > |w|``)::

        R = K1 (|y0/u0| + growth ||g||) + K2 tau_T**(1-xi)

    BVP (needs ``M_i > |u_i|`` and ``N_i > |w_i|``)::

        R* = M1 |O1| + M2 |O2| + tau_T**(1-xi) (N1 + N2)
             + growth (M1 ||g1|| + M2 ||g2||)

    The radius is a diagnostic only and does not influence the solvers.
    """
    if isinstance(data, IvpHypothesisData):
        if data.K1 is None or data.K2 is None:
            raise InvalidArgument("compute_radius needs K1 and K2")
        growth = _growth(data.order, data.psi, data.T)
        wt = data.psi.tau(data.T) ** (1.0 - data.order.xi)
        return data.K1 * (abs(data.y0_over_u0) + growth * data.g_norm) + data.K2 * wt
    if isinstance(data, BvpHypothesisData):
        if None in (data.M1, data.M2, data.N1, data.N2):
            raise InvalidArgument("compute_radius needs M1, M2, N1 and N2")
        growth = _growth(data.order, data.psi, data.T)
        wt = data.psi.tau(data.T) ** (1.0 - data.order.xi)
        return (
            data.M1 * data.omega1_abs
            + data.M2 * data.omega2_abs
            + wt * (data.N1 + data.N2)
            + growth * (data.M1 * data.g1_norm + data.M2 * data.g2_norm)
        )
    raise InvalidArgument("expected IvpHypothesisData or BvpHypothesisData")


def _sample_box(box: Sequence[tuple[float, float]], n: int, seed):
    lo = np.array([b[0] for b in box], dtype=float)
    hi = np.array([b[1] for b in box], dtype=float)
    if np.any(hi <= lo):
        raise InvalidArgument("every box interval must have positive length")
    pts = qmc.LatinHypercube(d=len(box), seed=seed).random(n)
    return qmc.scale(pts, lo, hi)


def _call(f, pts):
    with np.errstate(all="ignore"):
        vals = np.broadcast_to(np.asarray(f(*pts.T), dtype=float), (pts.shape[0],))
    bad = np.flatnonzero(~np.isfinite(vals))
    if bad.size:
        raise EvaluationError("function is not finite", tuple(float(c) for c in pts[bad[0]]))
    return vals


def estimate_lipschitz(
    f: Callable, box: Sequence[tuple[float, float]], samples: int = 2000, seed=0
) -> float:
    """Sampled Lipschitz constant of ``f(t, p...)`` in its non-time arguments.

    ``box`` lists ranges for ``t`` first and then each argument. Pairs of
    Latin-hypercube points share the same ``t``; the result is the
    largest ``|f(t, p) - f(t, q)| / sum |p - q|``. It never exceeds the
    true constant, so it is a heuristic, not a certificate.
    """
    if samples < 2:
        raise InvalidArgument("need at least 2 samples")
    if len(box) < 2:
        raise InvalidArgument("box needs a time range and at least one argument range")
    a = _sample_box(box, samples, seed)
    b = _sample_box(box, samples, None if seed is None else seed + 1)
    b[:, 0] = a[:, 0]
    fa, fb = _call(f, a), _call(f, b)
    dist = np.sum(np.abs(a[:, 1:] - b[:, 1:]), axis=1)
    ok = dist > 0
    if not np.any(ok):
        return 0.0
    return float(np.max(np.abs(fa[ok] - fb[ok]) / dist[ok]))


def estimate_bound_g(
    v: Callable,
    order: FracOrder,
    psi: PsiFunction,
    T: float,
    box: Sequence[tuple[float, float]],
    samples: int = 2000,
    seed=0,
) -> float:
    """Sampled ``max |v(t, p, q)| / (Psi(t) - Psi(0))**(1 - xi)``.

    ``box`` gives ranges for ``(p, q)``; time is sampled on ``[0, T]``
    (``(0, T]`` when ``xi < 1``). The estimate is a lower bound of the
    constant ``g`` in the growth hypothesis.
    """
    if samples < 2:
        raise InvalidArgument("need at least 2 samples")
    lo_t = 0.0 if order.xi == 1.0 else 1e-9 * T
    pts = _sample_box([(lo_t, T)] + list(box), samples, seed)
    vals = np.abs(_call(v, pts))
    weight = psi.tau(pts[:, 0]) ** (1.0 - order.xi)
    return float(np.max(vals / weight))
