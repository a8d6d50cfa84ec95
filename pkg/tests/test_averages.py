from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from discrete_radon.averages import (
    PaddingError,
    TimeGrid,
    apply,
    apply_direct,
    apply_fast,
    average_family,
    build_kernel,
    convolve_fast,
    is_in_U,
)
from discrete_radon.grid import GridFunction
from discrete_radon.lattice import BALL, CUBE, PolynomialMap

MAPS = ["n", "n^2", "(n, n^2)", "n1 + 2*n2", "(n1*n2, n1^2 - n2)", "3*n^3 - n"]


def random_grid(rng, d, width=8, complex_values=False):
    lo = tuple(int(v) for v in rng.integers(-5, 5, size=d))
    shape = tuple(int(v) for v in rng.integers(1, width + 1, size=d))
    vals = rng.normal(size=shape)
    if complex_values:
        vals = vals + 1j * rng.normal(size=shape)
    return GridFunction(lo, vals)


def test_kernel_identity_map():
    K = build_kernel("n", BALL, 2)
    assert K.as_dict() == {(-1,): 1, (0,): 1, (1,): 1} and K.normalization == 3


def test_kernel_square_map():
    K = build_kernel("n^2", BALL, 3)
    assert K.as_dict() == {(0,): 1, (1,): 2, (4,): 2} and K.normalization == 5


@pytest.mark.parametrize("P", MAPS)
def test_small_time_kernel_is_dirac(P):
    K = build_kernel(P, BALL, Fraction(1, 2))
    assert K.normalization == 1 and list(K.as_dict().values()) == [1]
    assert set(K.as_dict()) == {(0,) * PolynomialMap.parse(P).d}


@pytest.mark.parametrize("P", MAPS)
@pytest.mark.parametrize("body", [BALL, CUBE])
def test_counts_sum_to_normalization(P, body):
    K = build_kernel(P, body, 4.5)
    assert K.counts.sum() == K.normalization and np.all(K.counts > 0)


def test_apply_direct_dirac():
    out = apply_direct(GridFunction.delta((0,)), build_kernel("n", BALL, 2))
    assert out.lo == (-1,) and np.allclose(out.values, [1 / 3] * 3, rtol=0, atol=1e-15)


def test_time_below_one_is_identity():
    rng = np.random.default_rng(1)
    f = random_grid(rng, 2)
    out = apply_direct(f, build_kernel("(n1, n2)", BALL, 0.9))
    assert out.allclose(f, atol=0)


def test_constants_preserved_deep_inside():
    f = GridFunction((-200,), np.ones(401))
    out = apply_direct(f, build_kernel("n^2", BALL, 7))
    assert out((0,)) == pytest.approx(1, abs=1e-14)


def test_fast_matches_direct_random():
    rng = np.random.default_rng(2)
    for i in range(40):
        P = MAPS[i % len(MAPS)]
        d = PolynomialMap.parse(P).d
        K = build_kernel(P, [BALL, CUBE][i % 2], float(rng.uniform(0.5, 6)))
        f = random_grid(rng, d, complex_values=i % 3 == 0)
        a, b = apply_direct(f, K), apply_fast(f, K)
        assert a.lo == b.lo and a.shape == b.shape
        assert np.max(np.abs(a.values - b.values)) <= 1e-10


def test_fast_dirac_reproduces_kernel():
    K = build_kernel("(n, n^2)", BALL, 3.5)
    out = apply_fast(GridFunction.delta((0, 0)), K)
    assert out.allclose(K.dense(), atol=1e-12)


def test_fast_is_linear():
    rng = np.random.default_rng(4)
    K = build_kernel("n^2", CUBE, 5)
    f = GridFunction((0,), rng.normal(size=9))
    g = GridFunction((0,), rng.normal(size=9))
    assert apply_fast(f + g, K).allclose(apply_fast(f, K) + apply_fast(g, K), atol=1e-10)


def test_padding_budget():
    f = GridFunction((0, 0), np.ones((64, 64)))
    with pytest.raises(PaddingError):
        convolve_fast(f, f, budget=1000)


@given(st.integers(0, 10**6), st.sampled_from(MAPS[:3]), st.floats(0.5, 8))
def test_mass_positivity_contraction(seed, P, t):
    rng = np.random.default_rng(seed)
    f = GridFunction((-3,) * PolynomialMap.parse(P).d, rng.random((7,) * PolynomialMap.parse(P).d))
    out = apply(f, build_kernel(P, BALL, t))
    assert abs(out.total() - f.total()) <= 1e-12 * abs(f.total())
    assert np.all(out.values >= 0)
    g = GridFunction(f.lo, f.values - 0.5)
    mg = apply(g, build_kernel(P, BALL, t))
    for p in (1, 1.5, 2, 3, np.inf):
        assert mg.norm(p) <= g.norm(p) * (1 + 1e-12)


def test_dyadic_family_masses():
    fam = average_family(GridFunction.delta((0,)), "n", BALL, TimeGrid.dyadic(0, 4))
    assert len(fam) == 5
    assert np.allclose(fam.flat().sum(axis=1), 1, rtol=0, atol=1e-12)


def test_dyadic_kernels_nest():
    for P in MAPS[:3]:
        for n in range(0, 5):
            small = set(build_kernel(P, BALL, 2**n).as_dict())
            big = set(build_kernel(P, BALL, 2 ** (n + 1)).as_dict())
            assert small <= big


def test_singleton_family_is_apply_direct():
    rng = np.random.default_rng(5)
    f = random_grid(rng, 1)
    fam = average_family(f, "n^2", BALL, TimeGrid.explicit([3]))
    direct = apply_direct(f, build_kernel("n^2", BALL, 3))
    assert fam[0].allclose(direct, atol=1e-12)


def test_family_memory_budget_names_time():
    with pytest.raises(MemoryError, match=r"at t=8 "):
        average_family(GridFunction.delta((0,)), "n^3", BALL, TimeGrid.dyadic(0, 4), memory_budget=20000)


def test_family_parallel_matches_serial(monkeypatch):
    rng = np.random.default_rng(6)
    f = random_grid(rng, 1)
    serial = average_family(f, "n^2", BALL, TimeGrid.dyadic(0, 5))
    monkeypatch.setenv("RSL_THREADS", "4")
    par = average_family(f, "n^2", BALL, TimeGrid.dyadic(0, 5))
    assert np.array_equal(serial.values, par.values)


def test_time_grids():
    assert [int(t) for t in TimeGrid.dyadic(0, 3).times] == [1, 2, 4, 8]
    assert TimeGrid.block(2, 2).times == tuple(Fraction(v) for v in (4, 5, 6, 7, 8))
    assert TimeGrid.parse("u:1..2/1").times == (1, Fraction(3, 2), 2)
    assert TimeGrid.parse("list:1,5/2,3").times == (1, Fraction(5, 2), 3)
    assert is_in_U(Fraction(3, 4)) and not is_in_U(Fraction(1, 3))
    with pytest.raises(ValueError):
        TimeGrid.explicit([2, 1])
    with pytest.raises(ValueError):
        TimeGrid("u", (Fraction(1, 3),))
    with pytest.raises(ValueError):
        TimeGrid.parse("weird:1..2")
