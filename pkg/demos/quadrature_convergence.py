"""Accuracy of the product-trapezoid Ψ-integral.

The integral of tau**(delta-1) has a closed form, so the quadrature error
can be measured directly. Two things show up below:

* For delta = 1.5 the integrand has a square-root kink at the origin.
  A uniform mesh loses accuracy there, while the graded mesh
  t_j = T (j/N)**2 restores close to second order.
* delta = 1 and delta = 2 are reproduced to rounding, since the smooth
  factor is then piecewise linear in tau.

Run:  python demos/quadrature_convergence.py
"""

from psi_hilfer import PsiFunction, convergence_study

Ns = (64, 128, 256, 512, 1024)

for psi in (PsiFunction.identity(), PsiFunction.log_shift()):
    print(f"\nPsi = {psi.describe()}")
    for r, label in ((1.0, "uniform"), (2.0, "graded r=2")):
        rows = convergence_study(psi, (0.3, 0.7), Ns, delta=1.5, r=r)
        print(f"  {label:<11} {'mu':>4} {'N':>6} {'rel err':>10} {'order':>6}")
        for mu, N, err, order in rows:
            o = "" if order != order else f"{order:6.2f}"
            print(f"  {'':<11} {mu:4.1f} {N:6d} {err:10.2e} {o:>6}")
    for delta in (1.0, 2.0):
        err = convergence_study(psi, (0.5,), (256,), delta=delta)[0][2]
        print(f"  delta={delta:g}: relative error {err:.1e} at N=256")
