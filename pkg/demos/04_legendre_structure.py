"""Legendre structure of the extreme Fisher information.

Sweeps the single-constraint family A = x^2 over multipliers and checks
the thermodynamic-style relations along it: the Fisher-Euler theorem
dI/dlambda = lambda d<A>/dlambda, dLambda/dlambda = -<A>, dI/d<A> =
lambda, and the two second-derivative reciprocity relations.  For this
family everything is known in closed form: I = sqrt(-lambda),
<A> = 1/sqrt(-lambda), Lambda = 2 sqrt(-lambda).
"""

import numpy as np

from fisherqp import Grid, sweep, verify_euler, verify_legendre

grid = Grid(-8.0, 8.0, 4097)
a_field = grid.from_function(lambda x: x * x)

lambdas = list(-np.exp(np.linspace(0.0, np.log(8.0), 13)))
table = sweep(a_field, lambdas, grid)

print("lambda        I        <A>     Lambda   alpha_norm   (I*<A> = 1 exactly)")
for rec in table.records:
    print(f"{rec.lam:+8.4f}  {rec.I:7.4f}  {rec.meanA:7.4f}  "
          f"{rec.Lambda_pot:7.4f}  {rec.alpha_norm:9.4f}")

print(f"\nFisher-Euler residual          {verify_euler(table):.2e}")
report = verify_legendre(table)
print(f"dLambda/dlambda = -<A>         {report.dLambda_dlam_vs_negmeanA:.2e}")
print(f"dI/d<A> = lambda               {report.dI_dmeanA_vs_lambda:.2e}")
print(f"dlambda/d<A> = d2I/d<A>2       {report.reciprocity_d2I:.2e}")
print(f"d<A>/dlambda = -d2Lambda/dl2   {report.reciprocity_d2Lambda:.2e}")
print("\n(closed-form cross-check: Lambda = alpha_norm along this family)")
