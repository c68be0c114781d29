"""
An oscillating weight
=====================

``w(t) = t (4 + sin t) e^{-t}`` is not of the form ``exp(-D t^α)``, so no
closed-form rule applies.  The sufficiency engine still decides the
integers: it works from ``x/φ(x)`` alone.
"""

# %%
from muntz.criteria import B_alpha_profile, decide, default_log_C
from muntz.exponents import Arithmetic, Power
from muntz.weight import ProductOsc, TrigPolynomial, admissibility_certificate, moment_K, normality_probe

w = ProductOsc(beta=1.0, osc=TrigPolynomial(4.0, ((1.0, 1.0),)), terms=((1.0, 1.0),))

# %%
# Moments have a closed form: ``(4 + sin t)²`` is a short Fourier sum and each
# harmonic contributes ``Γ(2x+3) Re (2 - iν)^{-(2x+3)}``.
for x in (0.5, 5.0, 50.0):
    print(f"log K({x}) = {moment_K(w, x).log_mag:.10f}")

# %%
cert = admissibility_certificate(w)
print("admissible:", cert.admissible, [c.status for c in cert.checks])
print("normality:", normality_probe(w).verdict)

# %%
# ``B_α(r) = inf_{0<x<r} C^{1/x} x/φ(x)`` settles to a positive constant.
rs = [2.0 ** j for j in range(0, 41, 5)]
for r, lb in B_alpha_profile(w, 1.0, rs, default_log_C(w, 1.0)):
    print(f"r = {r:.3g}: log B = {lb:.6f}")

# %%
for seq in (Arithmetic(1, 1), Power(1, 2)):
    rep = decide(w, seq)
    print(f"{seq!r}: {rep.verdict.value}; closed form applicable: {rep.closed_form.applicable}")
