"""
Two-sided bounds for the Fuchs product
======================================

``H(z) = Π (a_k - z)/(a_k + z) exp(2z/a_k)`` satisfies
``|H(z)| <= (C Ψ(|z|))^{Re z}`` on the right half-plane and the reverse
inequality, with a smaller constant, away from discs around the ``a_k``.
"""

# %%
import math

from muntz.exponents import Arithmetic
from muntz.fuchs import FuchsProduct, check_lower_bound, check_upper_bound, eval_H, lower_bound_grid, quarter_disc_grid

fp = FuchsProduct(Arithmetic(1, 1))

# %%
# For the integers ``H(z) = Γ(1+z)/Γ(1-z) e^{2γz}``; on the imaginary axis
# every factor has modulus one.
for y in (0.1, 1, 10, 100):
    print(f"log|H({y}i)| = {eval_H(fp, 1j * y).log_abs:+.2e}")
print("H(3) is zero:", eval_H(fp, 3.0).is_zero)

# %%
# Fitted constants on nested polar grids of the quarter disc ``|z| <= 50``.
for nr, na in ((24, 9), (47, 17), (93, 33)):
    up = check_upper_bound(fp, quarter_disc_grid(50, nr, na))
    lo = check_lower_bound(fp, lower_bound_grid(fp, 50, nr, na))
    print(f"{nr:3} x {na:2} grid: C = {up.constant:.4f}  C2 = {lo.constant:.4f}")

# %%
# Real axis between consecutive integers: log|H| against the upper bound.
C = check_upper_bound(fp, quarter_disc_grid(50)).constant
for r in (1.5, 5.5, 20.5, 45.5):
    h = eval_H(fp, r).log_abs
    print(f"r = {r:5}: log|H| = {h:8.3f}   r (log C + 2 m) = {r * (math.log(C) + 2 * sum(1 / k for k in range(1, int(r) + 1))):8.3f}")
