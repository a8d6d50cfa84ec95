"""
Averages along polynomial orbits
================================

Build the averaging kernel for a polynomial map, apply it to a grid function
two ways, and watch a Dirac mass spread out as the radius grows.
"""

import numpy as np

from discrete_radon import BALL, GridFunction, TimeGrid, apply_direct, apply_fast, average_family, build_kernel

# The kernel of M_t for P(n) = n^2 on the ball: each lattice point y with
# |y| < t contributes weight 1/#points at position y^2.
K = build_kernel("n^2", BALL, 3)
print("kernel points", K.points.ravel(), "weights", K.weights)

# Direct shifted summation and the zero-padded FFT agree to rounding error.
rng = np.random.default_rng(0)
f = GridFunction((-10,), rng.normal(size=21))
diff = np.max(np.abs(apply_direct(f, K).values - apply_fast(f, K).values))
print("direct vs fft:", diff)

# A two-dimensional orbit (n1 + n2, n1 n2) on dyadic radii 1, 2, 4, 8.
delta = GridFunction.delta((0, 0))
fam = average_family(delta, "(n1 + n2, n1*n2)", BALL, TimeGrid.parse("dyadic:0..3"))
for t, g in zip(fam.times, fam):
    print(f"t = {t}: support {np.count_nonzero(g.values)} points, mass {g.total().real:.15f}")
