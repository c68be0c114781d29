"""
Distances to Müntz spans
========================

The distance from ``t^b`` to ``span{t^{a_1}, ..., t^{a_n}}`` in ``L²_w`` is
read off a Cholesky factor of the Gram matrix ``G_ij = K((a_i + a_j)/2)``.
A complete system drives it to zero; an incomplete one leaves a plateau.
"""

# %%
from muntz.exponents import Arithmetic, Power
from muntz.gram import build_gram, distance_to_span, error_sweep
from muntz.weight import GammaExp

w = GammaExp(0.0, 1.0, 1.0)

# %%
# The smallest case is done by hand: ``K(1) = 1/4``, ``K(3/2) = 3/8``,
# ``K(2) = 3/4``, so ``dist² = 3/4 - (3/8)²/(1/4) = 3/16``.
print(distance_to_span(build_gram(w, [1]), 2), (3 / 16) ** 0.5)

# %%
# Integers approximate ``t^{1/2}`` ever better, slowly.
dec = error_sweep(w, Arithmetic(1, 1), 0.5, range(1, 31))
for n, d in dec.pairs()[::3]:
    print(f"n = {n:2}  dist = {d:.6e}")

# %%
# Squares cannot reach ``t²``: the distance settles.
flat = error_sweep(w, Power(1, 2), 2.0, range(1, 13))
for n, d in flat.pairs():
    print(f"n = {n:2}  dist = {d:.6e}")

# %%
# Precision accounting: the equilibrated Gram matrix loses positive
# definiteness in double precision well before it does in double-double.
for prec in ("double", "compensated"):
    res = error_sweep(w, Arithmetic(1, 1), 0.5, range(1, 41), precision=prec)
    print(prec, "reached n =", res.attained_n, res.notes)
