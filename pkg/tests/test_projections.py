import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from discrete_radon.projections import (
    BumpProfile,
    ProjectionParams,
    Projections,
    bump_eta,
    near_fraction_samples,
    projection_xi,
)

PARAMS = ProjectionParams((1, 2), chi=0.05, u=1)


def samples(proj, n, seed=0, count=300):
    rng = np.random.default_rng(seed)
    uni = rng.uniform(-0.5, 0.5, size=(count, 2))
    near = near_fraction_samples(proj.sigma_points(n), proj.params.scale(n, -proj.params.chi * n), count, rng, 0.15)
    return np.concatenate([uni, near])


def test_bump_plateau_and_support():
    prof = BumpProfile(2)
    assert bump_eta(prof, np.zeros(2)) == 1
    assert bump_eta(prof, np.array([prof.outer, 0])) == 0
    assert bump_eta(prof, np.array([prof.inner * 0.99, 0])) == 1
    mid = bump_eta(prof, np.array([(prof.inner + prof.outer) / 2, 0]))
    assert 0 < mid < 1


@given(st.integers(1, 5), st.floats(0, 2 * math.pi), st.floats(0, 0.2))
def test_bump_monotone_on_rays(dim, angle, rmax):
    prof = BumpProfile(dim)
    direction = np.zeros(dim)
    direction[0] = math.cos(angle)
    if dim > 1:
        direction[1] = math.sin(angle)
    r = np.linspace(0, rmax, 50)
    vals = bump_eta(prof, r[:, None] * direction)
    assert np.all(np.diff(vals) <= 1e-15)
    assert np.all((vals >= 0) & (vals <= 1))


def test_bump_is_c2_at_the_junctions():
    prof = BumpProfile(1)
    h = 1e-4
    for r0 in (prof.inner, prof.outer):
        r = np.array([r0 - h, r0, r0 + h])
        v = prof.radial(r)
        second = (v[0] - 2 * v[1] + v[2]) / h**2
        assert abs(second) < 1e3 * h / (prof.outer - prof.inner) ** 3


def test_params_validation_and_kappa():
    with pytest.raises(ValueError):
        ProjectionParams((1, 2), chi=0.2)
    with pytest.raises(ValueError):
        ProjectionParams((1, 2), chi=0.05, u=0)
    assert PARAMS.kappa(0) == 40 and PARAMS.kappa(1023) == 40 * 2


def test_plateau_on_fractions():
    proj = Projections(PARAMS)
    pts = proj.sigma_points(6)
    assert np.allclose(proj.xi(6, pts), 1, rtol=0, atol=1e-15)


def test_range_zero_one():
    proj = Projections(PARAMS)
    for n in (2, 5, 8):
        X = proj.xi(n, samples(proj, n, n))
        assert np.all(X >= 0) and np.all(X <= 1 + 1e-12)


@pytest.mark.parametrize("n", [1, 3, 6])
def test_shell_telescoping(n):
    proj = Projections(PARAMS)
    xi = samples(proj, n, seed=n)
    total = sum(proj.xi_s(n, s, xi) for s in range(n))
    assert np.max(np.abs(total - proj.xi(n, xi))) <= 1e-12


@pytest.mark.parametrize("n", [2, 5])
def test_j_telescoping_and_product(n):
    proj = Projections(PARAMS)
    chi = PARAMS.chi
    xi = samples(proj, n, seed=10 + n)
    fl = math.floor(chi * n)
    for s in range(n):
        X = lambda j: proj.xi_sj(n, s, j, xi)  # noqa: E731
        rec = sum(X(j) - X(j + 1) for j in range(-fl, n)) + (X(-chi * n) - X(-fl)) + X(n)
        assert np.max(np.abs(rec - proj.xi_s(n, s, xi))) <= 1e-12
        for j in range(-fl, n):
            prod = proj.delta1(n, s, j, xi) * proj.delta2(n, s, j, xi)
            assert np.max(np.abs(X(j) - X(j + 1) - prod)) <= 1e-12


def test_short_variant_telescoping():
    proj = Projections(PARAMS)
    l = 5
    xi = samples(proj, l, seed=3)
    for j in range(-math.floor(PARAMS.chi * l), l):
        lhs = proj.short_xi(l, j, xi) - proj.short_xi(l, j + 1, xi)
        rhs = sum(proj.short_delta(l, s, j, xi) for s in range(l))
        assert np.max(np.abs(lhs - rhs)) <= 1e-12


def test_dispatch():
    xi = np.array([[0.1, 0.2]])
    assert projection_xi(PARAMS, "xi", xi, n=3) == Projections(PARAMS).xi(3, xi)
    with pytest.raises(ValueError):
        projection_xi(PARAMS, "nope", xi, n=3)


def test_shells_partition_fraction_set():
    proj = Projections(ProjectionParams((1,), chi=0.05, u=2))
    n = 3
    shells = np.concatenate([proj.shell_points(s) for s in range(n)])
    full = proj.sigma_points(n**2)
    assert sorted(map(tuple, shells)) == sorted(map(tuple, full))
