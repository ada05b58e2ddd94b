"""Problem configuration files.

A configuration is an INI-style text read with :mod:`configparser`:
sections in brackets, ``key = value`` lines, ``#`` comments (whole-line
or inline). Numeric values may be constant expressions such as ``1/3``
or ``3*sqrt(pi)/4``. Function values are expressions in the grammar of
:mod:`psi_hilfer.expr`, optionally wrapped in double quotes.

See the README for the full key reference.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, PsiHilferError
from .existence import BvpHypothesisData, IvpHypothesisData, estimate_bound_g, estimate_lipschitz
from .expr import Expr, ExprError, parse
from .hybrid_bvp import HybridBvpProblem
from .hybrid_ivp import HybridIvpProblem
from .psi_core import FracOrder, PsiFunction, default_grading, make_graded_mesh
from .solver import SolverConfig

__all__ = ["ProblemConfig", "load_config", "parse_config", "FUNCTION_ARGS"]

FUNCTION_ARGS = {
    "ivp": {"u": ("t", "y"), "w": ("t", "y"), "v": ("t", "x", "q")},
    "bvp": {name: ("t", "y", "x") for name in ("u1", "u2", "w1", "w2", "v1", "v2")},
}
ORIGIN_KEYS = {
    "ivp": ("u_at_origin", "w_at_origin"),
    "bvp": ("u1_at_origin", "u2_at_origin", "w1_at_origin", "w2_at_origin"),
}
CONSTANT_KEYS = {"ivp": ("y0", "k"), "bvp": ("a", "b", "y0")}
HYPOTHESIS_KEYS = {
    "ivp": ("sigma", "delta", "g"),
    "bvp": ("sigma1", "sigma2", "delta1", "delta2", "g1", "g2", "omega1", "omega2"),
}
OPTIONAL_HYPOTHESIS = {
    "ivp": ("y0_over_u0", "K1", "K2"),
    "bvp": ("M1", "M2", "N1", "N2"),
}


def _strip(value: str) -> str:
    value = value.strip()
    if len(value) >= 2 and value[0] == value[-1] == '"':
        value = value[1:-1]
    return value


def _number(section: str, key: str, value: str) -> float:
    try:
        out = parse(_strip(value), variables=()).eval()
    except ExprError as exc:
        raise ConfigError(f"{section}.{key}", f"not a constant expression: {exc}") from None
    out = float(out)
    if not np.isfinite(out):
        raise ConfigError(f"{section}.{key}", "value is not finite")
    return out


@dataclass(frozen=True)
class ProblemConfig:
    """A validated problem description.

    Attributes mirror the file sections. ``functions`` maps names to
    parsed :class:`Expr` trees; ``hypothesis`` holds the raw strings of
    the optional hypothesis block.
    """

    name: str
    kind: str
    psi: PsiFunction
    order: FracOrder
    T: float
    constants: dict
    functions: dict
    origin: dict
    solver: dict
    hypothesis: dict | None
    zero_over_zero: str = "error"
    description: str = ""
    guesses: dict = field(default_factory=dict)

    def function(self, name):
        args = FUNCTION_ARGS[self.kind][name]
        return self.functions[name].as_function(args, self.zero_over_zero)

    def build_problem(self):
        c, o = self.constants, self.origin
        if self.kind == "ivp":
            return HybridIvpProblem(
                u=self.function("u"),
                w=self.function("w"),
                v=self.function("v"),
                k=c["k"],
                y0=c["y0"],
                order=self.order,
                psi=self.psi,
                T=self.T,
                u_at_origin=o.get("u_at_origin"),
                w_at_origin=o.get("w_at_origin"),
                name=self.name,
            )
        return HybridBvpProblem(
            **{n: self.function(n) for n in FUNCTION_ARGS["bvp"]},
            a=c["a"],
            b=c["b"],
            y0=c["y0"],
            order=self.order,
            psi=self.psi,
            T=self.T,
            **{k: o.get(k) for k in ORIGIN_KEYS["bvp"]},
            name=self.name,
        )

    def mesh(self, N=None):
        s = self.solver
        r = s.get("r") or default_grading(self.order.xi)
        return make_graded_mesh(self.T, int(N or s.get("N", 512)), r)

    def solver_config(self, N=None, tol=None, max_iter=None, relaxation=None) -> SolverConfig:
        s = self.solver
        mesh = self.mesh(N)
        guess = s.get("initial_guess", "constant")
        if guess == "expr":
            t = mesh.nodes
            tau = self.psi.tau(t)
            gy = np.broadcast_to(self.guesses["y"].eval(t=t, tau=tau), t.shape)
            gx = np.broadcast_to(self.guesses["x"].eval(t=t, tau=tau), t.shape)
            guess = (np.array(gy, dtype=float), np.array(gx, dtype=float))
        return SolverConfig(
            mesh=mesh,
            tol=tol if tol is not None else s.get("tol"),
            max_iter=int(max_iter if max_iter is not None else s.get("max_iter", 200)),
            relaxation=relaxation if relaxation is not None else s.get("relaxation", 0.5),
            initial_guess=guess,
        )

    def hypothesis_data(self, problem=None):
        """Build the hypothesis data, running estimators where requested."""
        if self.hypothesis is None:
            raise ConfigError("hypothesis", "section is missing")
        h = self.hypothesis
        problem = problem or self.build_problem()
        heuristic = False
        box = [(-1.0, 1.0)]
        samples = 2000
        if "estimate_box" in h:
            lo, _, hi = _strip(h["estimate_box"]).partition(",")
            box = [(_number("hypothesis", "estimate_box", lo), _number("hypothesis", "estimate_box", hi))]
        if "estimate_samples" in h:
            samples = int(_number("hypothesis", "estimate_samples", h["estimate_samples"]))
        t_box = [(0.0, self.T)]

        def value(key, estimator, signed=False):
            nonlocal heuristic
            if key not in h:
                raise ConfigError(f"hypothesis.{key}", "required key is missing")
            raw = _strip(h[key])
            if raw == "estimate":
                heuristic = True
                return estimator()
            out = _number("hypothesis", key, raw)
            if out < 0 and not signed:
                raise ConfigError(f"hypothesis.{key}", "must be nonnegative")
            return out

        def opt(key):
            return _number("hypothesis", key, h[key]) if key in h else None

        if self.kind == "ivp":
            p = problem
            sigma = value("sigma", lambda: estimate_lipschitz(p.u, t_box + box, samples))
            delta = value("delta", lambda: estimate_lipschitz(p.w, t_box + box, samples))
            g = value(
                "g",
                lambda: estimate_bound_g(p.v, self.order, self.psi, self.T, box * 2, samples),
            )
            y0u = opt("y0_over_u0")
            if y0u is None:
                y0u = abs(p.y0 / p.origin_u())
            return IvpHypothesisData(
                sigma, delta, g, y0u, self.order, self.psi, self.T,
                K1=opt("K1"), K2=opt("K2"), heuristic=heuristic,
            )
        p = problem

        def lip(f):
            return lambda: estimate_lipschitz(f, t_box + box * 2, samples)

        def gb(f):
            return lambda: estimate_bound_g(f, self.order, self.psi, self.T, box * 2, samples)

        def no_estimate(key):
            def fail():
                raise ConfigError(f"hypothesis.{key}", "cannot be estimated; give a number")
            return fail

        vals = dict(
            sigma1=value("sigma1", lip(p.u1)),
            sigma2=value("sigma2", lip(p.u2)),
            delta1=value("delta1", lip(p.w1)),
            delta2=value("delta2", lip(p.w2)),
            g1_norm=value("g1", gb(p.v1)),
            g2_norm=value("g2", gb(p.v2)),
            omega1_abs=abs(value("omega1", no_estimate("omega1"), signed=True)),
            omega2_abs=abs(value("omega2", no_estimate("omega2"), signed=True)),
        )
        return BvpHypothesisData(
            **vals, order=self.order, psi=self.psi, T=self.T,
            M1=opt("M1"), M2=opt("M2"), N1=opt("N1"), N2=opt("N2"), heuristic=heuristic,
        )


def _make_psi(sec) -> PsiFunction:
    kind = _strip(sec.get("psi", "identity"))

    def num(key, default):
        return _number("problem", key, sec[key]) if key in sec else default

    try:
        if kind == "identity":
            return PsiFunction.identity()
        if kind == "log-shift":
            return PsiFunction.log_shift(num("psi_c", 1.0))
        if kind == "power":
            return PsiFunction.power(num("psi_p", 2.0), num("psi_c", 0.0))
        if kind == "exponential":
            return PsiFunction.exponential(num("psi_lam", 1.0))
    except PsiHilferError as exc:
        raise ConfigError("problem.psi", str(exc)) from None
    raise ConfigError("problem.psi", f"unknown kind {kind!r} (custom kinds need the Python API)")


def parse_config(text: str, name: str = "<config>", overrides=None) -> ProblemConfig:
    """Parse configuration text.

    ``overrides`` maps ``"section.key"`` to replacement strings, applied
    before validation.

    Raises
    ------
    ConfigError
        With the dotted key path of the first problem found.
    """
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text, source=name)
    except configparser.Error as exc:
        raise ConfigError(name, f"unreadable configuration: {exc}") from None
    for dotted, value in (overrides or {}).items():
        section, _, key = dotted.partition(".")
        if not key:
            raise ConfigError(dotted, "override must look like section.key=value")
        if not cp.has_section(section):
            cp.add_section(section)
        cp.set(section, key, str(value))

    if not cp.has_section("problem"):
        raise ConfigError("problem", "section is missing")
    prob = cp["problem"]
    kind = _strip(prob.get("kind", ""))
    if kind not in ("ivp", "bvp"):
        raise ConfigError("problem.kind", f"must be ivp or bvp, got {kind!r}")
    for key in ("mu", "nu", "T"):
        if key not in prob:
            raise ConfigError(f"problem.{key}", "required key is missing")
    try:
        order = FracOrder(_number("problem", "mu", prob["mu"]), _number("problem", "nu", prob["nu"]))
    except PsiHilferError as exc:
        raise ConfigError("problem.mu", str(exc)) from None
    T = _number("problem", "T", prob["T"])
    if not T > 0:
        raise ConfigError("problem.T", "must be positive")
    psi = _make_psi(prob)

    consts = cp["constants"] if cp.has_section("constants") else {}
    constants = {}
    for key in CONSTANT_KEYS[kind]:
        if key not in consts:
            raise ConfigError(f"constants.{key}", "required key is missing")
        constants[key] = _number("constants", key, consts[key])

    if not cp.has_section("functions"):
        raise ConfigError("functions", "section is missing")
    fsec = cp["functions"]
    functions = {}
    for fname, args in FUNCTION_ARGS[kind].items():
        if fname not in fsec:
            raise ConfigError(f"functions.{fname}", "required key is missing")
        try:
            functions[fname] = parse(_strip(fsec[fname]), variables=args)
        except ExprError as exc:
            raise ConfigError(f"functions.{fname}", str(exc)) from None
    zoz = _strip(fsec.get("zero_over_zero", "error"))
    if zoz not in ("error", "zero"):
        raise ConfigError("functions.zero_over_zero", "must be error or zero")
    extra = set(fsec) - set(FUNCTION_ARGS[kind]) - {"zero_over_zero"}
    if extra:
        raise ConfigError(f"functions.{sorted(extra)[0]}", "unknown function name")

    origin = {}
    if cp.has_section("origin"):
        for key, raw in cp["origin"].items():
            if key not in ORIGIN_KEYS[kind]:
                raise ConfigError(f"origin.{key}", "unknown key")
            origin[key] = _number("origin", key, raw)

    solver = {}
    guesses = {}
    if cp.has_section("solver"):
        s = cp["solver"]
        for key in ("N", "max_iter"):
            if key in s:
                solver[key] = int(_number("solver", key, s[key]))
        for key in ("r", "tol", "relaxation"):
            if key in s:
                solver[key] = _number("solver", key, s[key])
        if "initial_guess" in s:
            g = _strip(s["initial_guess"])
            if g not in ("constant", "zero", "expr"):
                raise ConfigError("solver.initial_guess", "must be constant, zero or expr")
            solver["initial_guess"] = g
            if g == "expr":
                for comp in ("y", "x"):
                    key = f"guess_{comp}"
                    if key not in s:
                        raise ConfigError(f"solver.{key}", "required when initial_guess = expr")
                    try:
                        guesses[comp] = parse(_strip(s[key]), variables=("t", "tau"))
                    except ExprError as exc:
                        raise ConfigError(f"solver.{key}", str(exc)) from None

    hyp = dict(cp["hypothesis"]) if cp.has_section("hypothesis") else None
    return ProblemConfig(
        name=name,
        kind=kind,
        psi=psi,
        order=order,
        T=T,
        constants=constants,
        functions=functions,
        origin=origin,
        solver=solver,
        hypothesis=hyp,
        zero_over_zero=zoz,
        description=_strip(prob.get("description", "")),
        guesses=guesses,
    )


def load_config(path, overrides=None) -> ProblemConfig:
    """Read a configuration file, or a built-in example by name."""
    from .registry import BUILTINS

    key = str(path)
    if key in BUILTINS and not Path(key).exists():
        return parse_config(BUILTINS[key], key, overrides)
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(str(path), f"cannot read file: {exc.strerror}") from None
    return parse_config(text, str(path), overrides)
