"""Smooth bump and the arithmetic frequency projections built from it.

Each projection is a finite sum over reduced fractions a/q of products of
bumps evaluated at anisotropically dilated torus offsets ``xi - a/q``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .arith import IWFamily, build_p_leq, build_sigma

log = logging.getLogger(__name__)

CHUNK = 4096


@dataclass(frozen=True)
class BumpProfile:
    """Radial bump: 1 up to ``1/(16 dim)``, 0 from ``1/(8 dim)``, C^2 in between."""

    dim: int
    smoothness: int = 2

    @property
    def inner(self) -> float:
        return 1.0 / (16 * self.dim)

    @property
    def outer(self) -> float:
        return 1.0 / (8 * self.dim)

    def radial(self, r) -> np.ndarray:
        s = np.clip((np.asarray(r, dtype=float) - self.inner) / (self.outer - self.inner), 0.0, 1.0)
        # quintic smoothstep: value, first and second derivative match at both ends
        return 1.0 - s**3 * (10.0 - 15.0 * s + 6.0 * s * s)


def bump_eta(profile: BumpProfile, x) -> np.ndarray:
    """Evaluate the bump at points ``x`` with last axis of length ``profile.dim``."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != profile.dim:
        raise ValueError(f"expected points of dimension {profile.dim}")
    return profile.radial(np.sqrt(np.sum(x * x, axis=-1)))


def bump_eta_wide(profile: BumpProfile, x) -> np.ndarray:
    """The dilated bump ``eta(x/2)``."""
    return bump_eta(profile, np.asarray(x, dtype=float) / 2.0)


def torus_offset(xi, centres) -> np.ndarray:
    """``xi - a/q`` reduced per coordinate to the nearest representative; shape (m, n, dim)."""
    d = np.asarray(xi, dtype=float)[:, None, :] - np.asarray(centres, dtype=float)[None, :, :]
    return d - np.round(d)


@dataclass(frozen=True)
class ProjectionParams:
    exponents: tuple  # |gamma| for each coordinate
    chi: float = 0.05
    u: int = 1

    def __post_init__(self):
        if not 0 < self.chi < 0.1:
            raise ValueError("chi must lie in (0, 1/10)")
        if self.u < 1:
            raise ValueError("u must be >= 1")
        object.__setattr__(self, "exponents", tuple(int(e) for e in self.exponents))

    @property
    def dim(self) -> int:
        return len(self.exponents)

    def kappa(self, s: int) -> int:
        return 20 * self.dim * math.ceil((s + 1) ** 0.1)

    def scale(self, n, shift) -> np.ndarray:
        """Diagonal of ``2^{n A + shift I}``."""
        return 2.0 ** (n * np.asarray(self.exponents, dtype=float) + shift)


VARIANTS = ("xi", "xi_s", "xi_sj", "delta1", "delta2", "short_xi", "short_delta")


@dataclass
class Projections:
    """Evaluators for the projection family, with the fraction sets cached per ``N``."""

    params: ProjectionParams
    variant_fn: object = None
    _sets: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.profile = BumpProfile(self.params.dim)

    def sigma_points(self, N: int) -> np.ndarray:
        """Points of the fraction set for denominators ``<= N`` (N >= 1)."""
        N = max(int(N), 1)
        if N not in self._sets:
            fam = IWFamily.build(N, self.params.dim, self.params.u, self.variant_fn)
            self._sets[N] = fam.points
        return self._sets[N]

    def shell_points(self, s: int) -> np.ndarray:
        """Fractions with denominators in ``(s^u, (s+1)^u]``; ``s = 0`` gives ``{0}``."""
        u = self.params.u
        if s == 0:
            return self.sigma_points(1)
        inner = build_p_leq(s**u, self.variant_fn, u)
        outer = build_p_leq((s + 1) ** u, self.variant_fn, u)
        qs = sorted(set(outer.members) - set(inner.members))
        pts = build_sigma(qs, self.params.dim)
        if not pts:
            log.info("empty fraction shell at s=%d", s)
            return np.zeros((0, self.params.dim))
        return np.stack([r.point() for r in pts])

    def _sum(self, xi, centres, factors) -> np.ndarray:
        """``sum_{a/q} prod_i g_i(D_i (xi - a/q))`` for ``factors = [(diag D_i, g_i)]``."""
        xi = np.atleast_2d(np.asarray(xi, dtype=float))
        out = np.zeros(len(xi))
        if len(centres) == 0:
            return out
        step = max(1, CHUNK // max(1, len(centres)))
        for i in range(0, len(xi), step):
            off = torus_offset(xi[i : i + step], centres)
            val = np.ones(off.shape[:2])
            for diag, g in factors:
                val = val * g(off * diag)
            out[i : i + step] = val.sum(axis=1)
        return out

    def _eta(self, x):
        return bump_eta(self.profile, x)

    def _eta2(self, x):
        return bump_eta(self.profile, x) ** 2

    def _wide(self, x):
        return bump_eta_wide(self.profile, x)

    def _wide2(self, x):
        return bump_eta_wide(self.profile, x) ** 2

    def xi(self, n: int, xi) -> np.ndarray:
        p = self.params
        return self._sum(xi, self.sigma_points(n**p.u), [(p.scale(n, -p.chi * n), self._eta2)])

    def xi_s(self, n: int, s: int, xi) -> np.ndarray:
        p = self.params
        return self._sum(
            xi,
            self.shell_points(s),
            [(p.scale(n, -p.chi * n), self._eta2), (p.scale(s, -p.chi * s), self._wide2)],
        )

    def xi_sj(self, n: int, s: int, j: float, xi) -> np.ndarray:
        p = self.params
        return self._sum(
            xi,
            self.shell_points(s),
            [(p.scale(n, j), self._eta2), (p.scale(s, -p.chi * s), self._wide2)],
        )

    def _delta(self, n, s, j, xi, sign) -> np.ndarray:
        p = self.params
        lo, hi = p.scale(n, j), p.scale(n, j + 1)
        wide = p.scale(s, -p.chi * s)

        def g(off):
            return (self._eta(off * lo) + sign * self._eta(off * hi)) * self._wide(off * wide)

        return self._sum(xi, self.shell_points(s), [(np.ones(p.dim), g)])

    def delta1(self, n: int, s: int, j: float, xi) -> np.ndarray:
        return self._delta(n, s, j, xi, -1.0)

    def delta2(self, n: int, s: int, j: float, xi) -> np.ndarray:
        return self._delta(n, s, j, xi, +1.0)

    def short_xi(self, l: int, j: float, xi) -> np.ndarray:
        p = self.params
        return self._sum(xi, self.sigma_points(l**p.u), [(p.scale(l, j), self._eta)])

    def short_delta(self, l: int, s: int, j: float, xi) -> np.ndarray:
        p = self.params
        lo, hi = p.scale(l, j), p.scale(l, j + 1)
        wide = p.scale(s, -p.chi * s)

        def g(off):
            return (self._eta(off * lo) - self._eta(off * hi)) * self._wide(off * wide)

        return self._sum(xi, self.shell_points(s), [(np.ones(p.dim), g)])


def projection_xi(params: ProjectionParams, variant: str, xi, *, n=None, s=None, j=None, l=None, cache=None):
    """Dispatch to one projection multiplier by name (see ``VARIANTS``)."""
    proj = cache if cache is not None else Projections(params)
    if variant == "xi":
        return proj.xi(n, xi)
    if variant == "xi_s":
        return proj.xi_s(n, s, xi)
    if variant == "xi_sj":
        return proj.xi_sj(n, s, j, xi)
    if variant == "delta1":
        return proj.delta1(n, s, j, xi)
    if variant == "delta2":
        return proj.delta2(n, s, j, xi)
    if variant == "short_xi":
        return proj.short_xi(l, j, xi)
    if variant == "short_delta":
        return proj.short_delta(l, s, j, xi)
    raise ValueError(f"unknown projection variant {variant!r}; choose from {VARIANTS}")


def near_fraction_samples(points, scale, count, rng, radius=1.0) -> np.ndarray:
    """Random frequencies ``a/q + w / scale`` with ``|w|_inf <= radius`` around given fractions."""
    points = np.asarray(points, dtype=float)
    idx = rng.integers(0, len(points), size=count)
    w = rng.uniform(-radius, radius, size=(count, points.shape[1]))
    x = points[idx] + w / np.asarray(scale, dtype=float)
    return x - np.round(x)
