"""Built-in example problems, stored as configuration text.

``example1`` and ``example2`` use the coefficient functions exactly as
listed in the reference worked examples, with the stated
hypothesis constants. Their integral forms omit the origin value of the
perturbation ``w`` (``w*_at_origin = 0``), which is what reproduces the
printed boundary constants.

``example1-fde`` and ``example2-fde`` are the same two systems rewritten
from the displayed differential equations into the hybrid form
``(y - w)/u``. They keep the exact origin terms, and ``(t, t)`` solves
them; the solver checks run on these.
"""

from __future__ import annotations

BUILTINS: dict[str, str] = {}
DESCRIPTIONS: dict[str, str] = {}

_V_IVP = '"x^2/(1 + x^2) - (3*sqrt(pi)/4)*t^(1/2)*q/((3*sqrt(pi)/4)*t^(1/2)*q + 1)"'
_V1_BVP = '"exp(-t^2)/97*(y/(2 + y) - x/(2 + x))"'
_V2_BVP = '"2^(-t)/87*((t^2 - x*y)/(1 - x*y))"'

BUILTINS["example1"] = f"""\
# Caputo-type coupled hybrid IVP, order 1/2, worked-text coefficients.
[problem]
kind = ivp
description = coupled hybrid IVP (mu=1/2, Caputo), worked-text coefficients
psi = identity
mu = 1/2
nu = 1
T = 1

[constants]
y0 = 0
k = 1

[functions]
u = "(1/10)*(t*y - 2)"
w = "(7/97)*(t*y + t - 2)"
v = {_V_IVP}

[origin]
w_at_origin = 0

[solver]
N = 512
r = 1
initial_guess = zero
relaxation = 0.5

[hypothesis]
sigma = 1/10
delta = 7/97
g = 2
"""
DESCRIPTIONS["example1"] = "coupled hybrid IVP, mu=1/2, worked-text coefficients and constants"

BUILTINS["example1-fde"] = f"""\
# The displayed equation of the same IVP written as (y - w)/u:
# (7/97)(y - t(y + 1 - 2/t)) / ((ty - 2)/10) = (y - w)/u
# with w = t*y + t - 2 and u = (97/70)(t*y - 2). (t, t) is a solution.
[problem]
kind = ivp
description = coupled hybrid IVP (mu=1/2, Caputo), displayed equation; solution (t, t)
psi = identity
mu = 1/2
nu = 1
T = 1

[constants]
y0 = 0
k = 1

[functions]
u = "(97/70)*(t*y - 2)"
w = "t*y + t - 2"
v = {_V_IVP}

[solver]
N = 512
r = 1
initial_guess = zero
relaxation = 0.5

[hypothesis]
# Lipschitz constants of these u and w on [0, 1]; the condition is not met
sigma = 97/70
delta = 1
g = 2
"""
DESCRIPTIONS["example1-fde"] = "same IVP from its displayed equation; exact solution (t, t)"

BUILTINS["example2"] = f"""\
# Caputo-type coupled hybrid BVP, order 1/3, 3 z(0) + z(1) = 1,
# worked-text coefficients.
[problem]
kind = bvp
description = coupled hybrid BVP (mu=1/3, Caputo), worked-text coefficients
psi = identity
mu = 1/3
nu = 1
T = 1

[constants]
a = 3
b = 1
y0 = 1

[functions]
u1 = "(1/99)*(t*y/3 + t*x/2 + 5/6)"
u2 = "(1/98)*(t*y/5 + t*x + 12)"
v1 = {_V1_BVP}
v2 = {_V2_BVP}
w1 = "(1/7)*(t*y + (21/17)*x + 1)"
w2 = "(t/10)*(y + x + 10) + 2"
zero_over_zero = zero

[origin]
w1_at_origin = 0
w2_at_origin = 0

[solver]
N = 512
r = 1
initial_guess = expr
guess_y = "t + 0.01"
guess_x = "t + 0.01"
relaxation = 0.5

[hypothesis]
sigma1 = 1/99
sigma2 = 1/98
delta1 = 2/7
delta2 = 1/10
g1 = 2/97
g2 = 1/87
omega1 = 38016/2975
omega2 = -539/123
"""
DESCRIPTIONS["example2"] = "coupled hybrid BVP, mu=1/3, worked-text coefficients and constants"

BUILTINS["example2-fde"] = f"""\
# The displayed equations of the same BVP written as (y - w)/u. The first
# equation's prefactor 3/17 and inner factor 17/21 move into u1 and w1;
# the second is already in hybrid form. (t, t) is a solution.
[problem]
kind = bvp
description = coupled hybrid BVP (mu=1/3, Caputo), displayed equations; solution (t, t)
psi = identity
mu = 1/3
nu = 1
T = 1

[constants]
a = 3
b = 1
y0 = 1

[functions]
u1 = "(17/297)*(t*y/3 + t*x/2 + 5/6)"
u2 = "(1/98)*(t*y/5 + t*x + 12)"
v1 = {_V1_BVP}
v2 = {_V2_BVP}
w1 = "(17/21)*(t*y + (21/17)*x + 1)"
w2 = "(t/10)*(y + x + 10) + 2"
zero_over_zero = zero

[solver]
N = 512
r = 1
initial_guess = expr
guess_y = "t + 0.01"
guess_x = "t + 0.01"
relaxation = 0.5
"""
DESCRIPTIONS["example2-fde"] = "same BVP from its displayed equations; exact solution (t, t)"
