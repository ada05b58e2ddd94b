import math

import numpy as np
import pytest

from psi_hilfer import (
    BvpHypothesisData,
    FracOrder,
    IvpHypothesisData,
    PsiFunction,
    WeightedGridFunction,
    check_bvp_condition,
    check_ivp_condition,
    compute_radius,
    estimate_bound_g,
    estimate_lipschitz,
    make_graded_mesh,
)
from psi_hilfer.errors import EvaluationError, InvalidArgument
from psi_hilfer.existence import g_norm_of

ID = PsiFunction.identity()


def _ivp(**kw):
    base = dict(
        sigma=0.1, delta=7 / 97, g_norm=2.0, y0_over_u0=0.0,
        order=FracOrder(0.5, 1.0), psi=ID, T=1.0,
    )
    base.update(kw)
    return IvpHypothesisData(**base)


def _bvp(**kw):
    base = dict(
        sigma1=1 / 99, sigma2=1 / 98, delta1=2 / 7, delta2=1 / 10, g1_norm=2 / 97, g2_norm=1 / 87,
        omega1_abs=38016 / 2975, omega2_abs=539 / 123, order=FracOrder(1 / 3, 1.0), psi=ID, T=1.0,
    )
    base.update(kw)
    return BvpHypothesisData(**base)


def test_ivp_condition_by_hand():
    # 4 (1/10) (2 / Gamma(3/2)) + 7/97 with Gamma(3/2) = sqrt(pi)/2
    expected = 0.4 * 4 / math.sqrt(math.pi) + 7 / 97
    rep = check_ivp_condition(_ivp())
    assert rep.lhs == pytest.approx(expected, rel=1e-14)
    assert rep.lhs == pytest.approx(0.9748, abs=5e-4)
    assert rep.satisfied and rep.verdict == "satisfied"
    assert rep.breakdown["growth"] == pytest.approx(2 / math.sqrt(math.pi))
    assert sum(v for k, v in rep.breakdown.items() if k != "growth") == pytest.approx(rep.lhs)


def test_bvp_condition_by_hand():
    s = 1 / 99 + 1 / 98
    growth = 1 / math.gamma(4 / 3)
    expected = s * (38016 / 2975 + 539 / 123 + growth * (2 / 97 + 1 / 87)) + 2 / 7 + 1 / 10
    rep = check_bvp_condition(_bvp())
    assert rep.lhs == pytest.approx(expected, rel=1e-13)
    assert rep.lhs == pytest.approx(0.7348, abs=5e-4)
    assert rep.verdict == "satisfied"


def test_growth_uses_weight_and_psi():
    # T and Psi enter through (Psi(T) - Psi(0))^(mu + 1 - xi)
    psi = PsiFunction.log_shift()
    order = FracOrder(0.5, 0.5)
    rep = check_ivp_condition(_ivp(order=order, psi=psi, T=2.0))
    expected = math.log(3) ** (0.5 + 1 - 0.75) / math.gamma(1.5)
    assert rep.breakdown["growth"] == pytest.approx(expected)


def test_inconclusive_and_heuristic_verdicts():
    rep = check_ivp_condition(_ivp(g_norm=2.3))
    assert not rep.satisfied and rep.verdict == "inconclusive"
    assert rep.margin < 0
    assert check_ivp_condition(_ivp(heuristic=True)).verdict == "heuristic"


def test_nonnegative_inputs():
    with pytest.raises(InvalidArgument):
        _ivp(sigma=-0.1)
    with pytest.raises(InvalidArgument):
        _bvp(omega1_abs=math.inf)
    with pytest.raises(InvalidArgument):
        _ivp(T=0.0)


def test_radius_formulas():
    d = _ivp(y0_over_u0=0.5, K1=3.0, K2=2.0)
    growth = 2 / math.sqrt(math.pi)
    assert compute_radius(d) == pytest.approx(3.0 * (0.5 + growth * 2.0) + 2.0)
    b = _bvp(M1=1.0, M2=2.0, N1=0.5, N2=0.25)
    gb = 1 / math.gamma(4 / 3)
    expected = 38016 / 2975 + 2 * 539 / 123 + 0.75 + gb * (2 / 97 + 2 / 87)
    assert compute_radius(b) == pytest.approx(expected)
    with pytest.raises(InvalidArgument):
        compute_radius(_ivp())
    with pytest.raises(InvalidArgument):
        compute_radius(object())


def test_lipschitz_estimate_is_lower_bound():
    f = lambda t, y, x: 3 * np.sin(y) + t * x
    est = estimate_lipschitz(f, [(0, 1), (-1, 1), (-1, 1)], samples=4000)
    assert 2.0 < est <= 3.0 + 1e-12
    # exact for a linear map in one variable
    assert estimate_lipschitz(lambda t, y: 0.25 * y + t, [(0, 1), (-2, 2)]) == pytest.approx(0.25)


def test_lipschitz_estimate_is_reproducible():
    f = lambda t, y: np.tanh(5 * y)
    a = estimate_lipschitz(f, [(0, 1), (-1, 1)], seed=3)
    assert a == estimate_lipschitz(f, [(0, 1), (-1, 1)], seed=3)


def test_bound_g_estimate():
    v = lambda t, x, q: (1 + t) * np.cos(x) + 0 * q
    g = estimate_bound_g(v, FracOrder(0.5, 1.0), ID, 1.0, [(-1, 1), (-1, 1)])
    assert 1.9 < g <= 2.0
    # weight 1 - xi = 0.5 divides by sqrt(t) near the origin
    g = estimate_bound_g(lambda t, x, q: np.sqrt(t) + 0 * x, FracOrder(0.5, 0.0), ID, 1.0, [(-1, 1), (-1, 1)])
    assert g == pytest.approx(1.0)


def test_estimators_report_bad_points():
    with pytest.raises(EvaluationError) as exc:
        estimate_lipschitz(lambda t, y: 1 / (y - y), [(0, 1), (-1, 1)], samples=10)
    assert exc.value.point is not None
    with pytest.raises(InvalidArgument):
        estimate_lipschitz(lambda t, y: y, [(0, 1), (1, 1)])
    with pytest.raises(InvalidArgument):
        estimate_lipschitz(lambda t, y: y, [(0, 1)])


def test_g_norm_of_grid_function():
    mesh = make_graded_mesh(1.0, 4)
    g = WeightedGridFunction(mesh, ID, 1.0, np.array([0, -3, 1, 2, 0.5]))
    assert g_norm_of(g) == 3.0
    assert g_norm_of(-2) == 2.0
