"""
Gauss sums and their decay in the denominator
=============================================

Complete exponential sums over residues mod q, the fitted decay exponent,
and a log-log plot against the q^(-1/2) reference line.
"""

from discrete_radon import canonical_gamma_set, gauss_decay_fit, gauss_sum
from discrete_radon.report import emit_plot

quad = canonical_gamma_set(1, 2).gamma

# For odd prime q the quadratic sum has modulus exactly q^(-1/2).
for q in (3, 5, 7, 11):
    print(q, abs(gauss_sum(quad, (0, 1), q)), q**-0.5)

# The worst case over reduced numerators, fitted as C q^(-delta).
fit = gauss_decay_fit(quad, 100)
print(f"delta = {fit.delta:.4f}, C = {fit.constant:.3f}")

# Linear phases cancel completely for every q > 1.
print("linear:", gauss_decay_fit([(1,)], 20).exact_cancellation)

emit_plot({"max |G|": (fit.q[1:], fit.max_modulus[1:])}, "gauss.svg", xlabel="q", ylabel="max modulus",
          references=[("q^-1/2", lambda x: x**-0.5)])
print("wrote gauss.svg")
