"""The two built-in examples, from the existence check to the solution.

Each example is registered twice:

* ``example1`` / ``example2`` carry the coefficient functions and
  hypothesis constants from the reference coefficient lists. The existence check and the
  boundary constants reproduce the printed numbers.
* ``example1-fde`` / ``example2-fde`` are the same systems rewritten from
  their differential equations. The pair (t, t) solves them,
  which gives an exact reference for the solver.

The reference coefficient lists and the differential equations do not
describe the same problem: with the listed coefficients (t, t) is not a
solution. The solver is therefore checked against the equation forms.

Run:  python demos/worked_examples.py
"""

import numpy as np

from psi_hilfer import WeightedGridFunction, check_bvp_condition, check_ivp_condition, compute_omega
from psi_hilfer import solve_coupled_bvp, solve_coupled_ivp
from psi_hilfer.config import load_config

print("existence conditions")
for name, check in (("example1", check_ivp_condition), ("example2", check_bvp_condition)):
    rep = check(load_config(name).hypothesis_data())
    print(f"  {name}: lhs = {rep.lhs:.4f}  ({rep.verdict})")

cfg = load_config("example2")
p = cfg.build_problem()
mesh = cfg.mesh()
diag = WeightedGridFunction(mesh, p.psi, 1.0, mesh.nodes.copy())
om = compute_omega(p, diag, diag)
print("\nboundary constants of example2 along y = x = t")
print(f"  Omega1 = {om.omega1:.12f}   38016/2975 = {38016 / 2975:.12f}")
print(f"  Omega2 = {om.omega2:.12f}   -539/123   = {-539 / 123:.12f}")

print("\nsolves (N = 512)")
for name, solve in (("example1-fde", solve_coupled_ivp), ("example2-fde", solve_coupled_bvp)):
    c = load_config(name)
    sol = solve(c.build_problem(), c.solver_config())
    t = sol.y.t
    err = max(np.max(np.abs(sol.y.values - t)), np.max(np.abs(sol.x.values - t)))
    extra = ""
    if sol.boundary_defect is not None:
        extra = f", boundary defect {max(sol.boundary_defect):.1e}"
    print(f"  {name}: {sol.iterations} sweeps, max |z - t| = {err:.2e}{extra}")

c = load_config("example1")
sol = solve_coupled_ivp(c.build_problem(), c.solver_config())
t = sol.y.t
print(
    f"  example1 (reference coefficients): {sol.iterations} sweeps, "
    f"y(1) = {sol.y.values[-1]:.6f}, max |y - t| = {np.max(np.abs(sol.y.values - t)):.3f}"
)
