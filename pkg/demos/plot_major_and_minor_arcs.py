"""
Major arcs, minor arcs and the smooth projections
=================================================

The smooth cutoffs around fractions with small denominators, the
telescoping that splits them into shells, and the two regimes of the
exponential sum m_N: close to a fraction it is the Gauss sum times an
oscillatory integral, away from all fractions it is small.
"""

import numpy as np

from discrete_radon import ProjectionParams, Projections, approximation_error, canonical_gamma_set
from discrete_radon.harness import minor_arc_decay

quad = canonical_gamma_set(1, 2)
params = ProjectionParams(quad.exponents, chi=0.05, u=1)
proj = Projections(params)

# The cutoff equals one on every fraction it is built around.
n = 5
pts = proj.sigma_points(n)
print(len(pts), "fractions, cutoff values", np.unique(proj.xi(n, pts)))

# Shells add back up to the full cutoff.
xi = np.random.default_rng(0).uniform(-0.5, 0.5, size=(1000, 2))
shells = sum(proj.xi_s(n, s, xi) for s in range(n))
print("shell reconstruction error:", np.max(np.abs(shells - proj.xi(n, xi))))

# Near 0 the sum is well approximated by the integral, better as n grows.
ax = np.linspace(-1 / 16, 1 / 16, 9)
w = np.stack(np.meshgrid(ax, ax, indexing="ij"), axis=-1).reshape(-1, 2)
for n in range(4, 9):
    print(n, approximation_error(n, (0, 0), 1, w, quad).max_error)

# Away from the fractions the damped sum shrinks with n.
tab = minor_arc_decay(range(4, 9))
print("minor-arc sup:", np.round(tab.sup, 5))
