"""
Searching for large operator ratios
===================================

Lower estimates for the ratio ||S(M_t f)||_p / ||f||_p by probing simple
test functions and then greedy coordinate ascent. The estimate barely moves
as the time horizon grows or as the polynomial coefficient changes.
"""

from discrete_radon import ExperimentConfig, estimate_constant, stabilization_report, uniformity_sweep
from discrete_radon.harness import dirac_ratio

cfg = ExperimentConfig(map="n", kind="sup", p=2.0, budget=200, box=16, seed=0)
est = estimate_constant(cfg)
print(f"estimate {est.value:.4f} (Dirac probe {dirac_ratio(cfg):.4f}), recomputed {est.recompute():.4f}")

tab = stabilization_report("sup", 2.0, [4, 8, 16, 32, 64], cfg)
for N, e in zip(tab.N, tab.estimates):
    print(f"N = {N:3d}: {e:.4f}")

sweep = uniformity_sweep(range(1, 11), "c*n^2", ExperimentConfig(budget=100, box=8))
print("c*n^2, c = 1..10: max/min =", round(sweep.max_min_ratio, 4))
