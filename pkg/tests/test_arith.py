import cmath
import math
from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from discrete_radon.arith import (
    IWFamily,
    PropertyViolation,
    RationalFraction,
    build_p_leq,
    build_sigma,
    gauss_decay_fit,
    gauss_sum,
    jordan_totient,
    max_gauss_modulus,
)
from discrete_radon.lattice import canonical_gamma_set

QUAD = canonical_gamma_set(1, 2).gamma


def naive_gauss(gamma, a, q):
    k = len(gamma[0])
    tot = 0j
    for r in product(range(1, q + 1), repeat=k):
        ph = sum(ai * math.prod(ri**gi for ri, gi in zip(r, g)) for ai, g in zip(a, gamma))
        tot += cmath.exp(2j * math.pi * ph / q)
    return tot / q**k


def test_trivial_sum():
    assert gauss_sum(QUAD, (0, 0), 1) == 1


def test_quadratic_q2_cancels():
    assert abs(gauss_sum(QUAD, (0, 1), 2)) < 1e-15


def test_quadratic_q3_modulus():
    assert abs(gauss_sum(QUAD, (0, 1), 3)) == pytest.approx(3**-0.5, abs=1e-15)


@given(st.integers(1, 12), st.lists(st.integers(-30, 30), min_size=5, max_size=5))
def test_matches_naive_sum_k2(q, a):
    gamma = canonical_gamma_set(2, 2).gamma
    assert abs(gauss_sum(gamma, a, q) - naive_gauss(gamma, a, q)) < 1e-12


@given(st.integers(1, 60), st.integers(-100, 100), st.integers(-100, 100))
def test_bounded_by_one(q, a1, a2):
    assert abs(gauss_sum(QUAD, (a1, a2), q)) <= 1 + 1e-12


def test_large_q_phases_stay_exact():
    # for prime q the modulus is exactly q^{-1/2} whatever the numerator size
    q = 997
    assert abs(gauss_sum(QUAD, (10**9 + 7, 5), q)) == pytest.approx(q**-0.5, abs=1e-12)


def test_linear_cancellation_report():
    fit = gauss_decay_fit([(1,)], 20)
    assert fit.exact_cancellation and fit.delta is None
    assert fit.max_modulus[0] == 1 and np.all(fit.max_modulus[1:] < 1e-12)


def test_quadratic_fit_near_half():
    fit = gauss_decay_fit(QUAD, 60)
    assert 0.45 <= fit.delta <= 0.55


def test_fit_requires_range():
    with pytest.raises(ValueError):
        gauss_decay_fit(QUAD, 5)


def test_max_modulus_even_q():
    m, a = max_gauss_modulus(QUAD, 4)
    assert m == pytest.approx(math.sqrt(2) / 2)
    assert math.gcd(math.gcd(*a), 4) == 1


def test_p_leq_examples():
    assert build_p_leq(1).members == (1,)
    P = build_p_leq(10)
    assert P.lcm == 2520 and 2520 <= 3**10


def test_p_leq_rejects_bad_variant():
    with pytest.raises(PropertyViolation):
        build_p_leq(6, variant=lambda N: [q for q in range(1, N + 1) if q != 4])
    with pytest.raises(PropertyViolation):
        build_p_leq(6, variant=lambda N: list(range(1, N + 1)) + [12])
    with pytest.raises(ValueError):
        build_p_leq(0)


def test_custom_variant_accepted():
    # all divisors of 2^j up to N added on top of 1..N stays admissible
    P = build_p_leq(9, variant=lambda N: list(range(1, N + 1)))
    assert len(P) == 9


def test_sigma_examples():
    assert [r.to_text() for r in build_sigma(build_p_leq(1), 3)] == ["(0, 0, 0)"]
    pts = sorted(float(r.point()[0]) for r in build_sigma(build_p_leq(2), 1))
    assert pts == [-0.5, 0.0]
    S = build_sigma(build_p_leq(3), 1)
    assert len(S) == 4
    assert {r.as_fractions()[0] for r in S} == {Fraction(0), Fraction(-1, 2), Fraction(-1, 3), Fraction(1, 3)}


@given(st.integers(1, 12), st.integers(1, 2))
def test_sigma_distinct_reduced_and_counted(N, dim):
    S = build_sigma(build_p_leq(N), dim)
    pts = {r.as_fractions() for r in S}
    assert len(pts) == len(S)
    assert len(S) == sum(jordan_totient(q, dim) for q in range(1, N + 1))
    assert all(-0.5 <= v < 0.5 for r in S for v in r.point())


def test_sigma_order_is_deterministic():
    a = build_sigma(build_p_leq(6), 2)
    b = build_sigma(build_p_leq(6), 2)
    assert a == b and [r.q for r in a] == sorted(r.q for r in a)


def test_sigma_cap():
    with pytest.raises(ValueError, match="cap"):
        build_sigma(build_p_leq(40), 3, cap=1000)


def test_rational_fraction_validation():
    with pytest.raises(ValueError):
        RationalFraction((2, 4), 6)
    r = RationalFraction((5, 3), 4)
    assert r.numerators == (1, -1)
    assert RationalFraction.from_json(r.to_json()) == r


def test_family_report_and_separation():
    fam = IWFamily.build(5, 1)
    rep = fam.cardinality_report()
    assert rep["size"] == len(fam.sigma) and rep["ratio"] > 0
    # Farey neighbours with denominators <= 5 are at least 1/20 apart
    assert fam.min_separation() == pytest.approx(1 / 20)
