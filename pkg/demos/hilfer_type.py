"""How the type parameter nu moves a solution between the two classical cases.

For the linear hybrid problem with u = 1, w = 0 and v = -y/2 the
solution in weighted form starts at y0 for every nu, but the plain
values behave like tau**(xi - 1) near the origin: bounded in the
Caputo case (nu = 1) and singular in the Riemann-Liouville case
(nu = 0). The same run is repeated under Psi(t) = ln(1 + t), which
stretches the early part of the interval.

Run:  python demos/hilfer_type.py
"""

import numpy as np

from psi_hilfer import FracOrder, HybridIvpProblem, PsiFunction, SolverConfig, make_graded_mesh
from psi_hilfer import solve_coupled_ivp
from psi_hilfer.psi_core import default_grading

mu = 0.6
probe = np.array([0.01, 0.1, 0.5, 1.0])

for psi in (PsiFunction.identity(), PsiFunction.log_shift()):
    print(f"\nPsi = {psi.describe()}, mu = {mu}")
    print(f"  {'nu':>4} {'xi':>5}  " + "  ".join(f"y({s:g})".rjust(9) for s in probe))
    for nu in (0.0, 0.5, 1.0):
        order = FracOrder(mu, nu)
        p = HybridIvpProblem(
            u=lambda t, y: 1.0 + 0 * t,
            w=lambda t, y: 0 * t,
            v=lambda t, x, q: -0.5 * x,
            k=0.0, y0=1.0, order=order, psi=psi, T=1.0, u_at_origin=1.0,
        )
        mesh = make_graded_mesh(1.0, 1024, default_grading(order.xi))
        sol = solve_coupled_ivp(p, SolverConfig(mesh))
        y = sol.y.unweighted()
        vals = np.interp(probe, mesh.nodes[1:], y[1:])
        print(f"  {nu:4.1f} {order.xi:5.2f}  " + "  ".join(f"{v:9.4f}" for v in vals))
