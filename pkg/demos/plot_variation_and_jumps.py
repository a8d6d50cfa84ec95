"""
Variation, jumps and oscillation of a sequence
==============================================

The seminorms used to measure how much a family of averages moves as the
radius changes, evaluated on a single scalar sequence.
"""

import numpy as np

from discrete_radon import jump_bruteforce, jump_count, oscillation, sup_seminorm, variation

a = np.array([0.0, 0.6, -0.5, 0.5, 0.45, 1.3])

# r-variation is non-increasing in r, and r = inf is the largest increment.
for r in (1, 2, 3, np.inf):
    print(f"V^{r} = {variation(a, r):.6f}")

# The jump count is the longest chain of increments of size >= lambda.
# It is computed by dynamic programming and checked here against brute force.
for lam in (0.5, 1.0, 1.5):
    print(f"N_{lam} = {jump_count(a, lam)} (brute force {jump_bruteforce(a, lam)})")

# Oscillation over the windows [0, 2), [2, 4), [4, 6) of the sample times 0..5.
print("oscillation:", oscillation(a, anchors=[0, 2, 4, 6]))
print("sup of |a_t - a_0|:", sup_seminorm(a))
