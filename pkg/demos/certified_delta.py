"""Evaluate the discriminant function with a certified truncation error."""

import math

from siegelcert import HalfSpacePoint, coeff_bound_from_sup, delta_table, eval_certified, eval_partial
from siegelcert.verify import delta_fd_sup

sup = delta_fd_sup(200)
sup_beta = coeff_bound_from_sup(sup, 1)
print(f"sampled sup of y^6 |Delta| on the fundamental domain: {sup:.6f}")
print(f"implied bound on normalized coefficients:           {sup_beta:.4f}\n")

truth_table = delta_table(240)
for R in (5, 10, 20):
    table = delta_table(R)
    for x, y in ((0.0, 1.0), (0.5, math.sqrt(3) / 2), (0.23, 1.4)):
        Z = HalfSpacePoint([[x]], [[y]])
        value, err = eval_certified(table, Z, sup_beta, R, math.sqrt(3) / 2)
        actual = abs(eval_partial(truth_table, Z) - value)
        print(f"R={R:2d} z={x:+.2f}+{y:.3f}i  err bound {err:.3e}  actual {actual:.3e}")
