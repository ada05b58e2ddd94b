"""Foundational types: Ψ functions, fractional orders, graded meshes and
weighted grid functions.

Every operator in the package works in the shifted variable
``tau = Psi(t) - Psi(0)``. A function that may be singular like
``tau**(xi - 1)`` at the origin is stored through its weighted values
``z = tau**(1 - xi) * y``, which stay finite at ``t = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .errors import InvalidArgument, Singularity

__all__ = [
    "PsiFunction",
    "FracOrder",
    "GradedMesh",
    "WeightedGridFunction",
    "make_graded_mesh",
    "default_grading",
    "weighted_norm",
    "reweight",
]

PSI_KINDS = ("identity", "log-shift", "power", "exponential", "custom")


def _as_array(t):
    return np.asarray(t, dtype=float)


@dataclass(frozen=True)
class PsiFunction:
    """An increasing C¹ function Ψ with positive derivative, and its inverse.

    Use the named constructors (:meth:`identity`, :meth:`log_shift`,
    :meth:`power`, :meth:`exponential`, :meth:`custom`) rather than the
    raw initializer.

    Attributes
    ----------
    kind : str
        One of ``identity``, ``log-shift``, ``power``, ``exponential``,
        ``custom``.
    params : tuple of (str, float)
        The parameters of the library kinds, for echoing in reports.
    """

    kind: str
    params: tuple
    _eval: Callable = field(repr=False, compare=False)
    _deriv: Callable = field(repr=False, compare=False)
    _inverse: Callable = field(repr=False, compare=False)

    def eval(self, t):
        return self._eval(_as_array(t)) if np.ndim(t) else float(self._eval(float(t)))

    def deriv(self, t):
        return self._deriv(_as_array(t)) if np.ndim(t) else float(self._deriv(float(t)))

    def inverse(self, v):
        if np.ndim(v):
            return np.array([self._inverse(float(x)) for x in np.ravel(v)]).reshape(np.shape(v))
        return float(self._inverse(float(v)))

    def tau(self, t):
        """Shifted value Ψ(t) − Ψ(0)."""
        return self.eval(t) - self.eval(0.0)

    def describe(self) -> str:
        if not self.params:
            return self.kind
        inner = ", ".join(f"{k}={v:g}" for k, v in self.params)
        return f"{self.kind}({inner})"

    # library kinds

    @classmethod
    def identity(cls) -> "PsiFunction":
        """Ψ(t) = t, giving the classical Riemann–Liouville/Caputo calculus."""
        return cls("identity", (), lambda t: t * 1.0, lambda t: np.ones_like(t) * 1.0, lambda v: v)

    @classmethod
    def log_shift(cls, c: float = 1.0) -> "PsiFunction":
        """Ψ(t) = ln(t + c), c > 0 (c = 1 gives the Hadamard-type kernel shifted to 0)."""
        if not c > 0:
            raise InvalidArgument(f"log-shift needs c > 0, got {c}")
        return cls(
            "log-shift",
            (("c", float(c)),),
            lambda t: np.log(t + c),
            lambda t: 1.0 / (t + c),
            lambda v: math.exp(v) - c,
        )

    @classmethod
    def power(cls, p: float = 2.0, c: float = 0.0) -> "PsiFunction":
        """Ψ(t) = (t + c)^p with p > 0, c ≥ 0.

        With c = 0 and p > 1 the derivative vanishes at t = 0 only; the
        operators never evaluate Ψ′ there, so this case is admitted.
        """
        if not p > 0 or c < 0:
            raise InvalidArgument(f"power needs p > 0 and c >= 0, got p={p}, c={c}")
        return cls(
            "power",
            (("p", float(p)), ("c", float(c))),
            lambda t: (t + c) ** p,
            lambda t: p * (t + c) ** (p - 1.0),
            lambda v: max(v, 0.0) ** (1.0 / p) - c,
        )

    @classmethod
    def exponential(cls, lam: float = 1.0) -> "PsiFunction":
        """Ψ(t) = exp(λt) with λ > 0."""
        if not lam > 0:
            raise InvalidArgument(f"exponential needs lam > 0, got {lam}")
        return cls(
            "exponential",
            (("lam", float(lam)),),
            lambda t: np.exp(lam * t),
            lambda t: lam * np.exp(lam * t),
            lambda v: math.log(v) / lam,
        )

    @classmethod
    def custom(
        cls,
        eval: Callable,
        deriv: Callable,
        T: float,
        inverse: Callable | None = None,
        samples: int = 101,
    ) -> "PsiFunction":
        """Wrap user callables, validating the invariants on ``[0, T]``.

        When no inverse is given it is computed by bracketed root finding
        on ``[0, T]`` to an absolute tolerance of 1e-14.

        Raises
        ------
        InvalidArgument
            If Ψ is not strictly increasing, Ψ′ is not positive on
            ``(0, T]``, the inverse does not round-trip, or Ψ′ disagrees
            with a finite difference of Ψ.
        """
        if not T > 0:
            raise InvalidArgument(f"custom psi needs T > 0, got {T}")
        if inverse is None:
            lo, hi = float(eval(0.0)), float(eval(T))

            def inverse(v, _lo=lo, _hi=hi):
                if v <= _lo:
                    return 0.0
                if v >= _hi:
                    return float(T)
                return brentq(lambda s: float(eval(s)) - v, 0.0, T, xtol=1e-14, rtol=4 * np.finfo(float).eps)

        psi = cls("custom", (("T", float(T)),), eval, deriv, inverse)
        problems = check_psi(psi, T, np.linspace(0.0, T, samples))
        if problems:
            raise InvalidArgument("custom psi rejected: " + "; ".join(problems))
        return psi


def check_psi(psi: PsiFunction, T: float, points) -> list[str]:
    """Return the list of violated Ψ invariants at the sample ``points``.

    An empty list means every check passed.
    """
    pts = np.sort(np.asarray(points, dtype=float))
    out = []
    vals = np.array([psi.eval(float(s)) for s in pts])
    if np.any(np.diff(vals) <= 0):
        out.append("not strictly increasing")
    pos = pts[pts > 0]
    if np.any(np.array([psi.deriv(float(s)) for s in pos]) <= 0):
        out.append("derivative not positive")
    for s in pts:
        back = psi.inverse(psi.eval(float(s)))
        if abs(back - s) > 1e-12 * max(1.0, abs(s)):
            out.append(f"inverse round-trip fails at t={s:g}")
            break
    h = 1e-5 * max(1.0, T)
    for s in pts[(pts > h) & (pts < T - h)]:
        fd = (psi.eval(float(s) + h) - psi.eval(float(s) - h)) / (2 * h)
        d = psi.deriv(float(s))
        if abs(fd - d) > 1e-6 * max(abs(d), 1e-300):
            out.append(f"derivative inconsistent at t={s:g}")
            break
    return out


@dataclass(frozen=True)
class FracOrder:
    """Order μ ∈ (0, 1) and type ν ∈ [0, 1] of a Ψ-Hilfer derivative."""

    mu: float
    nu: float

    def __post_init__(self):
        if not 0.0 < self.mu < 1.0:
            raise InvalidArgument(f"mu must lie in (0, 1), got {self.mu}")
        if not 0.0 <= self.nu <= 1.0:
            raise InvalidArgument(f"nu must lie in [0, 1], got {self.nu}")

    @property
    def xi(self) -> float:
        """ξ = μ + ν(1 − μ), recomputed on every access."""
        return self.mu + self.nu * (1.0 - self.mu)

    @property
    def inner(self) -> float:
        """Order (1 − ν)(1 − μ) of the integral applied before differentiating."""
        return (1.0 - self.nu) * (1.0 - self.mu)

    @property
    def outer(self) -> float:
        """Order ν(1 − μ) of the integral applied after differentiating."""
        return self.nu * (1.0 - self.mu)


@dataclass(frozen=True, eq=False)
class GradedMesh:
    """Nodes ``t_j = T (j/N)**r`` for ``j = 0..N``."""

    nodes: np.ndarray
    r: float

    @property
    def N(self) -> int:
        return len(self.nodes) - 1

    @property
    def T(self) -> float:
        return float(self.nodes[-1])

    def __eq__(self, other):
        return (
            isinstance(other, GradedMesh)
            and self.r == other.r
            and np.array_equal(self.nodes, other.nodes)
        )

    def __hash__(self):
        return hash((self.N, self.T, self.r))


def default_grading(xi: float) -> float:
    """Grading exponent max(1, 2/ξ) used when the caller gives none."""
    return max(1.0, 2.0 / xi)


def make_graded_mesh(T: float, N: int, r: float = 1.0) -> GradedMesh:
    """Build the graded mesh ``t_j = T (j/N)**r``.

    Examples
    --------
    >>> make_graded_mesh(1.0, 2, 2.0).nodes.tolist()
    [0.0, 0.25, 1.0]
    """
    if not T > 0:
        raise InvalidArgument(f"T must be positive, got {T}")
    if int(N) != N or N < 2:
        raise InvalidArgument(f"N must be an integer >= 2, got {N}")
    if not r >= 1:
        raise InvalidArgument(f"grading exponent must be >= 1, got {r}")
    N = int(N)
    nodes = T * (np.arange(N + 1) / N) ** r
    nodes[-1] = T
    nodes.setflags(write=False)
    return GradedMesh(nodes, float(r))


@dataclass(frozen=True, eq=False)
class WeightedGridFunction:
    """Samples of ``z(t) = (Ψ(t) − Ψ(0))**(1 − xi) * y(t)`` on a mesh.

    Attributes
    ----------
    mesh : GradedMesh
    psi : PsiFunction
    xi : float
        Weight parameter in (0, 1]; ``xi = 1`` means plain values.
    values : ndarray
        The weighted samples ``z_j``; read-only.
    """

    mesh: GradedMesh
    psi: PsiFunction
    xi: float
    values: np.ndarray

    def __post_init__(self):
        if not 0.0 < self.xi <= 1.0:
            raise InvalidArgument(f"xi must lie in (0, 1], got {self.xi}")
        vals = np.array(self.values, dtype=float)
        if vals.shape != (self.mesh.N + 1,):
            raise InvalidArgument(
                f"expected {self.mesh.N + 1} values, got shape {vals.shape}"
            )
        if not np.all(np.isfinite(vals)):
            raise InvalidArgument("weighted values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def tau(self) -> np.ndarray:
        return self.psi.tau(self.mesh.nodes)

    @property
    def t(self) -> np.ndarray:
        return self.mesh.nodes

    @classmethod
    def from_weighted(cls, mesh, psi, xi, func):
        """Sample ``z = func(t, tau)`` directly."""
        tau = psi.tau(mesh.nodes)
        return cls(mesh, psi, xi, np.broadcast_to(func(mesh.nodes, tau), tau.shape))

    @classmethod
    def from_plain(cls, mesh, psi, xi, func, origin=None):
        """Sample ``y = func(t, tau)`` and weight it.

        For ``xi < 1`` the origin cannot be sampled; ``origin`` supplies the
        weighted limit there (default 0).
        """
        t = mesh.nodes
        tau = psi.tau(t)
        z = np.empty_like(tau)
        z[1:] = tau[1:] ** (1.0 - xi) * func(t[1:], tau[1:])
        if xi == 1.0:
            z[0] = func(t[:1], tau[:1])[0] if origin is None else origin
        else:
            z[0] = 0.0 if origin is None else origin
        return cls(mesh, psi, xi, z)

    def unweighted(self) -> np.ndarray:
        """Return y at the nodes; the origin entry is NaN when xi < 1."""
        tau = self.tau
        y = np.empty_like(self.values)
        if self.xi == 1.0:
            y[:] = self.values
        else:
            y[0] = np.nan
            y[1:] = tau[1:] ** (self.xi - 1.0) * self.values[1:]
        return y

    def with_values(self, values) -> "WeightedGridFunction":
        return WeightedGridFunction(self.mesh, self.psi, self.xi, values)

    def _check_compatible(self, other):
        if not isinstance(other, WeightedGridFunction):
            return NotImplemented
        if other.mesh != self.mesh or other.xi != self.xi or other.psi != self.psi:
            raise InvalidArgument("grid functions live on different meshes or weights")

    def __add__(self, other):
        self._check_compatible(other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other):
        self._check_compatible(other)
        return self.with_values(self.values - other.values)

    def __mul__(self, c):
        return self.with_values(float(c) * self.values)

    __rmul__ = __mul__

    def __neg__(self):
        return self.with_values(-self.values)


def weighted_norm(h: WeightedGridFunction) -> float:
    """Discrete C_{1−ξ;Ψ} norm ``max_j |z_j|``."""
    vals = np.asarray(h.values if isinstance(h, WeightedGridFunction) else h, dtype=float)
    if vals.size == 0:
        raise InvalidArgument("cannot take the norm of an empty grid function")
    return float(np.max(np.abs(vals)))


def reweight(h: WeightedGridFunction, xi_new: float) -> WeightedGridFunction:
    """Express the same function with weight exponent ``1 − xi_new``.

    Raises
    ------
    Singularity
        If ``xi_new > h.xi`` and the origin value is nonzero, since the
        new weighted value would blow up there.
    """
    if not 0.0 < xi_new <= 1.0:
        raise InvalidArgument(f"xi_new must lie in (0, 1], got {xi_new}")
    if xi_new == h.xi:
        return h
    if xi_new > h.xi and h.values[0] != 0.0:
        raise Singularity(
            f"cannot move from xi={h.xi} to xi={xi_new}: value {h.values[0]} at t=0 "
            "would become unbounded"
        )
    tau = h.tau
    z = np.empty_like(h.values)
    z[0] = 0.0
    z[1:] = h.values[1:] * tau[1:] ** (h.xi - xi_new)
    return WeightedGridFunction(h.mesh, h.psi, xi_new, z)
