"""
Completeness verdicts for the weight exp(-t)
============================================

For ``w(t) = exp(-t)`` the system ``{t^{a_k}}`` is complete in ``L²_w(0, ∞)``
exactly when ``∫_1^∞ Ψ(r)/r² dr`` diverges, ``Ψ = exp(2 m(r))`` with
``m(r) = Σ_{a_k < r} 1/a_k``.  Here the two engines (necessity and
sufficiency) are run next to that closed-form rule.
"""

# %%
# The battery: arithmetic progressions with gaps 0.5 to 4, squares, powers of 2.
from muntz.criteria import decide, envelope_f
from muntz.exponents import Arithmetic, Geometric, Power, m_of_r
from muntz.weight import GammaExp

w = GammaExp(beta=0.0, D=1.0, alpha=1.0)
battery = [Arithmetic(1, 0.5), Arithmetic(1, 1), Arithmetic(1, 2), Arithmetic(1, 4),
           Power(1, 2), Geometric(1, 2)]

for seq in battery:
    rep = decide(w, seq)
    print(f"{seq!r:34} engines: {rep.verdict.value:11} closed form: {rep.closed_form.verdict.value}")

# %%
# ``Arithmetic(1, d)`` has ``m(r) ≈ log(r)/d``, so ``Ψ(r) ≈ r^{2/d}``; the
# integral diverges iff ``d <= 2``.  At ``d = 2`` the integrand is ``~1/r``.
for d in (1, 2, 4):
    seq = Arithmetic(1, d)
    r1, r2 = 2.0 ** 20, 2.0 ** 30
    slope = 2 * (m_of_r(seq, r2) - m_of_r(seq, r1)) / (10 * 0.6931471805599453)
    print(f"d = {d}: fitted exponent of Ψ = {slope:.4f} (exact {2 / d})")

# %%
# The necessity engine classifies the sharp envelope
# ``f(r) = sup_{0<x<=r} (2x m(r) - log K(x)/2)``.  For the squares ``m`` stays
# bounded and the supremum is attained inside ``(0, r)``, near ``x = Ψ``.
seq = Power(1, 2)
for j in (2, 10, 20, 30, 40):
    s = envelope_f(w, seq, 2.0 ** j)
    x_star = "" if s.x_star is None else f"x* = {s.x_star:.4f}"
    print(f"r = 2^{j:<2}  {s.branch.value}  f_sharp = {s.f_sharp:9.4f}  bound = {s.f_thm4:.4e}  {x_star}")
