import math

import numpy as np
import pytest

from discrete_radon.grid import GridFunction
from discrete_radon.lattice import BALL
from discrete_radon.harness import (
    ExperimentConfig,
    bootstrap_interpolation_check,
    dirac_ratio,
    estimate_constant,
    mass_error,
    minor_arc_decay,
    ratio_of,
    seminorm_inequality_suite,
    stabilization_report,
    uniformity_sweep,
)

SMALL = dict(budget=40, box=6)


def hand_dirac_sup_ratio(times, p=2.0):
    # P(n) = n on the ball: M_t delta = 1/(2t-1) on |x| < t, and M_1 = identity
    xs = range(-max(times), max(times) + 1)
    vals = []
    for x in xs:
        a = [(1.0 / (2 * t - 1) if abs(x) < t else 0.0) for t in times]
        vals.append(max(abs(v - a[0]) for v in a))
    return sum(v**p for v in vals) ** (1 / p)


def test_dirac_closed_form():
    cfg = ExperimentConfig(grid="dyadic:0..3")
    assert dirac_ratio(cfg) == pytest.approx(hand_dirac_sup_ratio([1, 2, 4, 8]), rel=1e-13)


def test_subunit_times_give_zero():
    # for t <= 1 only y = 0 is in the ball, every operator is the identity
    cfg = ExperimentConfig(grid="list:1/4,1/2,1", **SMALL)
    assert estimate_constant(cfg).value == 0


def test_estimate_reproducible_and_monotone():
    cfg = ExperimentConfig(seed=3, **SMALL)
    est = estimate_constant(cfg)
    assert est.recompute() == pytest.approx(est.value, rel=1e-10)
    assert all(b >= a for a, b in zip(est.trace, est.trace[1:]))
    assert est.value >= dirac_ratio(cfg) - 1e-12
    again = estimate_constant(cfg)
    assert again.value == est.value and np.array_equal(again.witness.values, est.witness.values)


def test_larger_budget_never_worse():
    a = estimate_constant(ExperimentConfig(budget=20, box=6))
    b = estimate_constant(ExperimentConfig(budget=80, box=6))
    assert b.value >= a.value


def test_jump_below_variation_on_same_witness():
    est = estimate_constant(ExperimentConfig(kind="var:2", **SMALL))
    cfg_j = ExperimentConfig(kind="jump", **SMALL)
    assert ratio_of(est.witness, cfg_j) <= est.value * (1 + 1e-12)


def test_linear_coefficients_uniform():
    # f spread onto cZ sees c*n exactly as f sees n, so the ratio cannot depend on c
    rng = np.random.default_rng(0)
    f = rng.normal(size=9)
    base = ratio_of(GridFunction((-4,), f), ExperimentConfig(grid="dyadic:0..3"))
    for c in (2, 3, 7):
        spread = np.zeros(8 * c + 1)
        spread[::c] = f
        got = ratio_of(GridFunction((-4 * c,), spread), ExperimentConfig(map=f"{c}*n", grid="dyadic:0..3"))
        assert got == pytest.approx(base, rel=1e-10)


def test_sweep_rows():
    tab = uniformity_sweep([1, 2], "c*n", ExperimentConfig(budget=10, box=3, grid="dyadic:0..2"))
    assert [r["coefficient"] for r in tab.rows] == [1, 2] and tab.max_min_ratio >= 1
    with pytest.raises(ValueError):
        uniformity_sweep([], "c*n", ExperimentConfig())


def test_mass_is_conserved_for_large_coefficients():
    cfg = ExperimentConfig(map="50*n^2", box=3, grid="dyadic:0..3")
    assert mass_error(cfg) <= 1e-12


def test_stabilization_single_row():
    tab = stabilization_report("sup", 2.0, [4], ExperimentConfig(**SMALL))
    assert len(tab.estimates) == 1 and tab.growth == []


def test_stabilization_jump_aggregate():
    tab = stabilization_report("jump", 2.0, [4, 8], ExperimentConfig(**SMALL))
    assert len(tab.growth) == 1 and tab.estimates[0] > 0


def test_config_parsing():
    cfg = ExperimentConfig.from_text("map = n^2  # comment\nbudget=7\n\nkind=var:2\n", seed=5)
    assert (cfg.map, cfg.budget, cfg.kind, cfg.seed) == ("n^2", 7, "var:2", 5)
    assert ExperimentConfig.from_text(cfg.to_text()) == cfg
    for bad in ("nonsense", "colour=red", "p=1", "map=n+1", "body=disc", "budget=0"):
        with pytest.raises(ValueError):
            ExperimentConfig.from_text(bad)


def test_suite_small_run_clean():
    rep = seminorm_inequality_suite(500, seed=1, family_trials=20)
    assert rep.total_violations == 0
    assert set(rep.ratios) == {"domsup2", "domweak", "split1", "split2"}
    assert all(math.isfinite(v) for v in rep.ratios.values())


def test_minor_arc_small_range():
    tab = minor_arc_decay(range(4, 7), uniform=500)
    assert tab.strictly_decreasing and all(k > 0 for k in tab.points)
    with pytest.raises(ValueError):
        minor_arc_decay([13])


def test_bootstrap_single_operator():
    rep = bootstrap_interpolation_check("n", ks=(1,), q0=1.0, q1=1.0, samples=20, box=5)
    assert rep.theta == 0.5 and rep.max_ratio <= 1 + 1e-12


def test_bootstrap_homogeneous():
    a = bootstrap_interpolation_check("n", ks=(0, 1), samples=5, seed=2, box=4)
    b = bootstrap_interpolation_check("n", ks=(0, 1), samples=5, seed=2, box=4)
    assert a.ratios == b.ratios
    assert a.q_theta == pytest.approx(4 / 3)


def test_bootstrap_scale_invariance():
    from discrete_radon.averages import convolve_direct
    from discrete_radon.harness import difference_kernels
    from discrete_radon.seminorms import lp_norm

    K = difference_kernels("n", BALL, [1])[0]
    rng = np.random.default_rng(0)
    g = GridFunction((-4,), rng.normal(size=9))
    out = convolve_direct(g, K.points(), K.values.ravel())
    r1 = lp_norm(out.values, 4 / 3) / lp_norm(g.values, 4 / 3)
    out7 = convolve_direct(GridFunction(g.lo, 7.5 * g.values), K.points(), K.values.ravel())
    r2 = lp_norm(out7.values, 4 / 3) / lp_norm(7.5 * g.values, 4 / 3)
    assert abs(r1 - r2) <= 1e-12 * r1


def test_bootstrap_argument_checks():
    with pytest.raises(ValueError):
        bootstrap_interpolation_check(q0=1.5, q1=1.2)
    with pytest.raises(ValueError):
        bootstrap_interpolation_check(q0=2.0, q1=3.0)
