"""Experiment drivers: witness search for operator constants, coefficient sweeps,
randomised inequality suites, minor-arc decay and the interpolation check."""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .averages import TimeGrid, _as_map, average_family, build_kernel, convolve_direct
from .fourier import exponential_sum_m
from .grid import GridFunction
from .lattice import BALL, CUBE, canonical_gamma_set
from .projections import ProjectionParams, Projections
from .seminorms import (
    SeminormKind,
    jump_field,
    long_short_split,
    lp_norm,
    oscillation_field,
    rademacher_menshov_check,
    seminorm_values,
    square_function,
    sup_field,
    variation_field,
    weak_lp_norm,
)

log = logging.getLogger(__name__)

RTOL = 1e-12


def body_of(name: str):
    if name == "ball":
        return BALL
    if name == "cube":
        return CUBE
    raise ValueError(f"unknown body {name!r} (ball or cube)")


@dataclass
class ExperimentConfig:
    map: str = "n"
    body: str = "ball"
    kind: str = "sup"
    p: float = 2.0
    grid: str = "dyadic:0..3"
    budget: int = 200
    restarts: int = 1
    seed: int = 0
    box: int = 16
    id: str = "run"

    def __post_init__(self):
        self.p = float(self.p)
        self.budget, self.restarts, self.seed, self.box = map(
            int, (self.budget, self.restarts, self.seed, self.box)
        )
        if not 1 < self.p < math.inf:
            raise ValueError("p must lie in (1, inf)")
        if self.budget < 1 or self.restarts < 1:
            raise ValueError("budgets must be positive")
        if self.box < 0:
            raise ValueError("box radius must be >= 0")
        body_of(self.body)
        SeminormKind.parse(self.kind)
        TimeGrid.parse(self.grid)
        _as_map(self.map)

    @classmethod
    def from_text(cls, text: str, **overrides) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        vals = {}
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"expected key=value, got {raw!r}")
            key = key.strip()
            if key not in known:
                raise ValueError(f"unknown config key {key!r}")
            vals[key] = value.strip()
        vals.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**vals)

    def to_text(self) -> str:
        return "".join(f"{k}={v}\n" for k, v in asdict(self).items())


@dataclass
class ConstantEstimate:
    value: float
    witness: GridFunction
    trace: list
    config: ExperimentConfig
    probe_value: float = 0.0
    stalled: bool = False

    def recompute(self) -> float:
        return ratio_of(self.witness, self.config)


def _setup(config: ExperimentConfig):
    P = _as_map(config.map)
    body = body_of(config.body)
    grid = TimeGrid.parse(config.grid)
    kind = SeminormKind.parse(config.kind)
    return P, body, grid, kind


def ratio_of(f: GridFunction, config: ExperimentConfig) -> float:
    """``S_p(M_t f : t in grid) / ||f||_p`` evaluated from scratch."""
    P, body, grid, kind = _setup(config)
    nf = f.norm(config.p)
    if nf == 0:
        return 0.0
    fam = average_family(f, P, body, grid, method="direct")
    S = seminorm_values(fam.flat(), grid.as_floats(), kind, config.p).aggregate
    return S / nf


class _Objective:
    """Incrementally maintained family ``(M_t f)_t`` for f on a fixed box."""

    def __init__(self, config: ExperimentConfig):
        P, body, grid, kind = _setup(config)
        self.kind, self.p = kind, config.p
        self.times = grid.as_floats()
        d = P.d
        R = config.box
        self.flo = (-R,) * d
        self.fshape = (2 * R + 1,) * d
        self.kernels = [build_kernel(P, body, t) for t in grid.times]
        self.dense = [K.dense() for K in self.kernels]
        lo = np.array(self.flo) + np.min([g.lo for g in self.dense], axis=0)
        hi = np.array(self.flo) + np.array(self.fshape) - 1 + np.max([g.hi for g in self.dense], axis=0)
        self.olo = lo
        self.oshape = tuple(int(h - l + 1) for l, h in zip(lo, hi))

    def family(self, fvals) -> np.ndarray:
        f = GridFunction(self.flo, fvals)
        out = np.zeros((len(self.dense),) + self.oshape)
        for i, K in enumerate(self.kernels):
            g = convolve_direct(f, K.points, K.weights)
            sl = tuple(slice(int(a - b), int(a - b) + s) for a, b, s in zip(g.lo, self.olo, g.shape))
            out[i][sl] = g.values
        return out

    def add_point(self, F, idx, delta):
        """In place: family of ``f + delta * indicator(idx)``."""
        for i, D in enumerate(self.dense):
            start = np.array(self.flo) + np.array(idx) + np.array(D.lo) - self.olo
            sl = tuple(slice(int(a), int(a) + s) for a, s in zip(start, D.shape))
            F[i][sl] += delta * D.values

    def score(self, F, fvals) -> float:
        nf = lp_norm(fvals, self.p)
        if nf == 0:
            return 0.0
        S = seminorm_values(F.reshape(len(F), -1), self.times, self.kind, self.p).aggregate
        return S / nf


def _probes(shape, rng):
    d = len(shape)
    R = shape[0] // 2
    out = []
    delta = np.zeros(shape)
    delta[(R,) * d] = 1.0
    out.append(("dirac", delta))
    w = 1
    while w <= R:
        ind = np.zeros(shape)
        ind[tuple(slice(R - w, R + w + 1) for _ in range(d))] = 1.0
        out.append((f"box{w}", ind))
        sgn = np.zeros(shape)
        sgn[tuple(slice(R - w, R + w + 1) for _ in range(d))] = rng.choice([-1.0, 1.0], size=(2 * w + 1,) * d)
        out.append((f"signs{w}", sgn))
        w *= 2
    return out


def estimate_constant(config: ExperimentConfig) -> ConstantEstimate:
    """Lower estimate of the operator constant by probes then greedy coordinate ascent."""
    rng = np.random.default_rng(config.seed)
    obj = _Objective(config)
    scored = []
    for name, fv in _probes(obj.fshape, rng):
        F = obj.family(fv)
        scored.append((obj.score(F, fv), name, fv))
    scored.sort(key=lambda r: -r[0])
    best_val, _, best_f = scored[0]
    probe_value = best_val
    trace = [best_val]
    stalled = False
    npts = int(np.prod(obj.fshape))
    for r in range(min(config.restarts, len(scored))):
        val, _, fv = scored[r]
        fv = fv.copy()
        F = obj.family(fv)
        since = 0
        for _ in range(config.budget):
            flat = int(rng.integers(npts))
            idx = np.unravel_index(flat, obj.fshape)
            cur = fv[idx]
            m = float(np.abs(fv).max()) or 1.0
            cands = {-cur, 2 * cur, 0.5 * cur, 0.0, m, -m} if cur else {m, -m, 0.5 * m, -0.5 * m}
            step_best, step_val = None, val
            for c in sorted(cands):
                if c == cur:
                    continue
                obj.add_point(F, idx, c - cur)
                fv[idx] = c
                s = obj.score(F, fv)
                if s > step_val * (1 + 1e-14):
                    step_best, step_val = c, s
                obj.add_point(F, idx, cur - c)
                fv[idx] = cur
            if step_best is not None:
                obj.add_point(F, idx, step_best - cur)
                fv[idx] = step_best
                val = step_val
                since = 0
            else:
                since += 1
            if val > best_val:
                best_val, best_f = val, fv.copy()
            trace.append(best_val)
        stalled = stalled or since == config.budget
    witness = GridFunction(obj.flo, best_f)
    return ConstantEstimate(best_val, witness, trace, config, probe_value, stalled)


def dirac_ratio(config: ExperimentConfig) -> float:
    return ratio_of(GridFunction.delta((0,) * _as_map(config.map).d), config)


# sweeps ---------------------------------------------------------------------------------


@dataclass
class SweepTable:
    rows: list  # dicts: coefficient, estimate, mass_error
    max_min_ratio: float


def uniformity_sweep(coefficients, template: str, config: ExperimentConfig, scale_box=True) -> SweepTable:
    """Estimate the constant for the maps obtained by substituting each
    coefficient for ``c`` in ``template``. With ``scale_box`` the test-function
    box grows with the coefficient so every residue class sees the same extent."""
    coefficients = list(coefficients)
    if not coefficients:
        raise ValueError("empty coefficient range")
    rows = []
    for c in coefficients:
        cfg = ExperimentConfig(
            **{**asdict(config), "map": template.replace("c", str(c)), "box": config.box * (c if scale_box else 1), "id": f"{config.id}-c{c}"}
        )
        est = estimate_constant(cfg)
        rows.append({"coefficient": c, "estimate": est.value, "mass_error": mass_error(cfg)})
    vals = [r["estimate"] for r in rows]
    ratio = max(vals) / min(vals) if min(vals) > 0 else math.inf
    return SweepTable(rows, ratio)


def mass_error(config: ExperimentConfig, seed=0) -> float:
    """Largest relative change of total mass under any ``M_t`` on a random test function."""
    P, body, grid, _ = _setup(config)
    rng = np.random.default_rng(seed)
    R = config.box
    f = GridFunction((-R,) * P.d, rng.random((2 * R + 1,) * P.d))
    fam = average_family(f, P, body, grid)
    tot = f.total()
    return float(np.max(np.abs(fam.flat().sum(axis=1) - tot)) / abs(tot))


@dataclass
class StabilizationTable:
    N: list
    estimates: list
    growth: list


def stabilization_report(kind: str, p: float, schedule, config: ExperimentConfig | None = None):
    config = config or ExperimentConfig()
    Ns, ests = [], []
    for N in schedule:
        g = TimeGrid.dyadic_horizon(N)
        spec = f"dyadic:0..{len(g) - 1}"
        cfg = ExperimentConfig(**{**asdict(config), "kind": kind, "p": p, "grid": spec, "id": f"{config.id}-N{N}"})
        Ns.append(N)
        ests.append(estimate_constant(cfg).value)
    growth = [b / a if a > 0 else math.inf for a, b in zip(ests, ests[1:])]
    return StabilizationTable(Ns, ests, growth)


# inequality suite --------------------------------------------------------------------------


@dataclass
class SuiteReport:
    trials: int
    seed: int
    checks: dict  # name -> number of instances evaluated
    violations: dict  # name -> count
    witnesses: list = field(default_factory=list)
    ratios: dict = field(default_factory=dict)  # name -> max observed ratio

    @property
    def total_violations(self) -> int:
        return int(sum(self.violations.values()))

    def as_dict(self) -> dict:
        return {
            "trials": self.trials,
            "seed": self.seed,
            "checks": dict(sorted(self.checks.items())),
            "violations": dict(sorted(self.violations.items())),
            "ratios": dict(sorted(self.ratios.items())),
            "witnesses": self.witnesses,
        }


def _random_batch(rng, L, m):
    """``m`` random sequences of length ``L`` as columns, mixing several shapes."""
    style = rng.integers(0, 5)
    if style == 0:
        A = rng.normal(size=(L, m))
    elif style == 1:
        A = rng.choice([-1.0, 1.0], size=(L, m))
    elif style == 2:
        A = np.cumsum(rng.normal(size=(L, m)), axis=0)
    elif style == 3:
        A = rng.normal(size=(L, m)) + 1j * rng.normal(size=(L, m))
    else:
        A = rng.integers(-3, 4, size=(L, m)).astype(float)
    if rng.random() < 0.05:
        A[:] = A[0]
    return A


class _Tally:
    def __init__(self):
        self.checks, self.violations, self.witnesses, self.ratios = {}, {}, [], {}

    def check(self, name, lhs, rhs, A=None, extra=None):
        lhs, rhs = np.broadcast_arrays(np.asarray(lhs, dtype=float), np.asarray(rhs, dtype=float))
        bad = lhs > rhs * (1 + RTOL) + 1e-12
        self.checks[name] = self.checks.get(name, 0) + int(lhs.size)
        self.violations[name] = self.violations.get(name, 0) + int(bad.sum())
        if bad.any() and len(self.witnesses) < 20:
            col = int(np.argmax(bad.ravel()))
            w = {"check": name, "lhs": float(lhs.ravel()[col]), "rhs": float(rhs.ravel()[col])}
            if A is not None and A.ndim == 2 and col < A.shape[1]:
                w["sequence"] = [[float(z.real), float(z.imag)] for z in np.asarray(A[:, col], dtype=complex)]
            if extra:
                w.update(extra)
            self.witnesses.append(w)

    def ratio(self, name, num, den):
        num, den = np.asarray(num, dtype=float), np.asarray(den, dtype=float)
        ok = den > 0
        r = float(np.max(num[ok] / den[ok])) if ok.any() else 0.0
        self.ratios[name] = max(self.ratios.get(name, 0.0), r)


def seminorm_inequality_suite(trials=10_000, seed=0, rm_trials=None, family_trials=200, batch=250):
    """Random instances of every seminorm inequality with an explicit constant;
    the ones without an explicit constant are reported as maximal ratios."""
    rng = np.random.default_rng(seed)
    tally = _Tally()
    rs = [1.0, 1.5, 2.0, 3.0, math.inf]
    done = 0
    while done < trials:
        m = min(batch, trials - done)
        L = int(rng.integers(2, 13))
        A = _random_batch(rng, L, m)
        V = {r: variation_field(A, r) for r in rs}
        sup = sup_field(A)
        # monotonicity in r
        for r1, r2 in zip(rs, rs[1:]):
            tally.check("d_monotone_r", V[r2], V[r1], A)
        # jump bridge
        inc = np.abs(A[:, None, :] - A[None, :, :])
        for lam in np.unique(np.concatenate([rng.choice(inc.ravel(), 3), rng.exponential(1.0, 2)])):
            if lam <= 0:
                continue
            N = jump_field(A, lam)
            for r in (1.0, 2.0, 3.0):
                tally.check("a_jump_bridge", lam * N ** (1 / r), V[r], A, {"lambda": float(lam), "r": r})
        # oscillation bridge with random anchors drawn from the sampled times
        for _ in range(2):
            J = int(rng.integers(1, L))
            idx = np.sort(rng.choice(L, size=J + 1, replace=False))
            O = oscillation_field(A, np.arange(L, dtype=float), idx.astype(float))
            for r in (2.0, 3.0):
                tally.check("b_osc_bridge", O, J ** (0.5 - 1 / r) * V[r], A, {"anchors": idx.tolist(), "r": r})
        # anchored maximal domination
        for r in (1.0, 2.0, 3.0, math.inf):
            tally.check("c_sup_by_var", sup, V[r], A)
        tally.check("domsup1", np.abs(A).max(axis=0), np.abs(A[0]) + sup, A)
        # square-function domination, pointwise (scalar instances)
        sq = square_function(A)
        tally.check("e_square_sup", sup, 2 * sq, A)
        for r in (2.0, 3.0):
            tally.check("e_square_var", V[r], 2 * sq, A)
        J = int(rng.integers(1, L))
        idx = np.sort(rng.choice(L, size=J + 1, replace=False)).astype(float)
        tally.check("e_square_osc", oscillation_field(A, np.arange(L, dtype=float), idx), 2 * sq, A)
        lam = float(rng.choice(inc.ravel())) or 1.0
        tally.check("e_square_jump", lam * np.sqrt(jump_field(A, lam)), 2 * sq, A)
        # subadditivity of the true seminorms
        B = _random_batch(rng, L, m)
        for r in (1.0, 2.0, math.inf):
            tally.check("subadditive_var", variation_field(A + B, r), V[r] + variation_field(B, r), A)
        tally.check("subadditive_sup", sup_field(A + B), sup + sup_field(B), A)
        tally.check(
            "subadditive_osc",
            oscillation_field(A + B, np.arange(L, dtype=float), idx),
            oscillation_field(A, np.arange(L, dtype=float), idx) + oscillation_field(B, np.arange(L, dtype=float), idx),
            A,
        )
        done += m
    # l^p families: square-function bound and the finite-ratio reports
    for _ in range(family_trials):
        L = int(rng.integers(2, 9))
        A = _random_batch(rng, L, int(rng.integers(1, 17)))
        times = np.arange(L, dtype=float)
        p = float(rng.choice([1.5, 2.0, 3.0]))
        sqn = lp_norm(square_function(A), p)
        for spec in ("sup", "var:2", "var:3", "osc", "jump:exact"):
            S = seminorm_values(A, times, SeminormKind.parse(spec), p).aggregate
            tally.check("e_square_family", S, 2 * sqn, A, {"kind": spec, "p": p})
        maxf = lp_norm(np.abs(A).max(axis=0), p)
        jump = seminorm_values(A, times, SeminormKind("jump", lambdas="exact"), p).aggregate
        tally.ratio("domsup2", maxf, lp_norm(A[0], p) + jump)
        tally.ratio("domweak", weak_lp_norm(variation_field(A, 3.0), p), max(jump, 1e-300))
    _rm_checks(tally, rng, rm_trials if rm_trials is not None else max(1, trials // 10))
    _split_checks(tally, rng, family_trials)
    return SuiteReport(trials, seed, tally.checks, tally.violations, tally.witnesses, tally.ratios)


def _rm_checks(tally, rng, count):
    for _ in range(count):
        s = int(rng.integers(1, 7))
        b = int(rng.integers(1, 2**s + 1))
        n = 2**s - b + 1
        vals = rng.choice([-1.0, 1.0], size=n) if rng.random() < 0.5 else rng.normal(size=n)
        rep = rademacher_menshov_check(vals, b, s)
        tally.check("f_rademacher_menshov", rep.lhs, math.sqrt(2) * rep.rhs, vals[:, None], {"b": b, "s": s})


def _split_checks(tally, rng, count):
    from fractions import Fraction

    for _ in range(count):
        res = int(rng.integers(0, 3))
        pool = [Fraction(j, 2**res) for j in range(2**res, 64 * 2**res + 1)]
        size = int(rng.integers(2, 12))
        pick = sorted(rng.choice(len(pool), size=size, replace=False))
        times = [pool[i] for i in pick]
        A = _random_batch(rng, size, 4)
        sp = long_short_split(A, times)
        tally.check("g_long_short", sp.full_sup, sp.long_sup + sp.short, A)
        # split1/split2: r-variation over all times against long variation plus short part
        Vall = variation_field(A, 2.0)
        Vlong = variation_field(sp.long_values, 2.0)
        tally.ratio("split1", Vall, Vlong + sp.short)
        tally.ratio("split2", sp.short, Vall)


# minor arcs --------------------------------------------------------------------------------


@dataclass
class MinorArcTable:
    n: list
    sup: list
    points: list
    profile: list  # (n+1)^{-2}

    @property
    def strictly_decreasing(self) -> bool:
        return all(b < a for a, b in zip(self.sup, self.sup[1:]))


ARC_CENTRES = ((0.0, 0.0), (0.5, 0.5), (0.0, 0.5), (1 / 3, 1 / 3))


def minor_arc_samples(n, params: ProjectionParams, rng, uniform=5000, radii=40, angles=32):
    """Uniform torus samples plus polar rings around a few fractions, in the
    coordinates scaled by ``2^{-n(A - chi I)}``."""
    dim = params.dim
    X = [rng.uniform(-0.5, 0.5, size=(uniform, dim))]
    if dim == 2:
        rr = np.linspace(1 / 64, 1 / 4, radii)
        th = np.linspace(0, 2 * np.pi, angles, endpoint=False)
        ring = np.stack([np.outer(rr, np.cos(th)).ravel(), np.outer(rr, np.sin(th)).ravel()], axis=1)
        inv = 1.0 / params.scale(n, -params.chi * n)
        for c in ARC_CENTRES:
            X.append(np.asarray(c) + ring * inv)
    X = np.concatenate(X)
    return X - np.round(X)


def minor_arc_decay(ns=range(4, 11), chi=0.05, u=1, seed=0, body=BALL, uniform=5000) -> MinorArcTable:
    gamma = canonical_gamma_set(1, 2)
    params = ProjectionParams(gamma.exponents, chi=chi, u=u)
    proj = Projections(params)
    tab = MinorArcTable([], [], [], [])
    for n in ns:
        if n > 12:
            raise ValueError("direct summation limited to n <= 12")
        rng = np.random.default_rng([seed, n])
        X = minor_arc_samples(n, params, rng, uniform=uniform)
        w = 1.0 - proj.xi(n, X)
        keep = w >= 0.5
        if not keep.any():
            raise ValueError(f"no minor-arc points sampled at n={n}")
        m = exponential_sum_m(gamma, body, 2**n, X[keep])
        tab.n.append(n)
        tab.sup.append(float(np.max(np.abs(w[keep] * m))))
        tab.points.append(int(keep.sum()))
        tab.profile.append((n + 1) ** -2.0)
    return tab


# interpolation check ---------------------------------------------------------------------------


@dataclass
class InterpolationReport:
    theta: float
    q_theta: float
    norm_q0: float
    norm_star_q1: float
    ratios: list

    @property
    def max_ratio(self) -> float:
        return max(self.ratios)


def difference_kernels(P, body, ks):
    """Dense kernels of ``M_{2^{k+1}} - M_{2^k}`` on a common box."""
    outs = []
    for k in ks:
        a = build_kernel(P, body, 2 ** (k + 1)).dense()
        b = build_kernel(P, body, 2**k).dense()
        outs.append(a + b * -1.0)
    return outs


def _op_norm_lower(apply, shape, q, rng, trials=8):
    R = shape[0] // 2
    best = 0.0
    probes = [name_f for name_f in _probes(shape, rng)]
    for _ in range(trials):
        probes.append(("rand", rng.normal(size=shape)))
    for _, fv in probes:
        g = GridFunction((-R,) * len(shape), fv)
        nf = g.norm(q)
        if nf > 0:
            best = max(best, lp_norm(apply(g), q) / nf)
    return best


def bootstrap_interpolation_check(P="n", ks=(0, 1, 2, 3), q0=1.0, q1=2.0, samples=100, seed=0, body=BALL, box=8):
    """Both sides of the square-function interpolation bound for the dyadic
    differences, with operator norms replaced by lower estimates (exact for
    ``q0 = 1``: the l^1 operator norm of a convolution is the l^1 norm of its kernel)."""
    if not q0 <= q1:
        raise ValueError("need q0 <= q1")
    if not 1 <= q0 < 2:
        raise ValueError("need 1 <= q0 < 2")
    P = _as_map(P)
    theta = 1 - q0 / 2
    q_theta = 1.0 / (0.5 + theta / q1)
    rng = np.random.default_rng(seed)
    kernels = difference_kernels(P, body, ks)
    shape = (2 * box + 1,) * P.d
    if q0 == 1:
        n0 = max(lp_norm(K.values, 1) for K in kernels)
    else:
        n0 = max(
            _op_norm_lower(lambda g, K=K: convolve_direct(g, K.points(), K.values.ravel()).values, shape, q0, rng)
            for K in kernels
        )
    abs_k = [(K.points(), np.abs(K.values.ravel())) for K in kernels]

    def bstar(g):
        ag = GridFunction(g.lo, np.abs(g.values))
        outs = [convolve_direct(ag, pts, w) for pts, w in abs_k]
        lo = tuple(min(o.lo[i] for o in outs) for i in range(g.d))
        hi = tuple(max(o.hi[i] for o in outs) for i in range(g.d))
        return np.max([o.embed(lo, hi).values for o in outs], axis=0)

    if len(kernels) == 1 and q1 == 1:
        nstar = lp_norm(abs_k[0][1], 1)
    else:
        nstar = _op_norm_lower(bstar, shape, q1, rng)
    const = n0 ** (1 - theta) * nstar**theta
    ratios = []
    for _ in range(samples):
        gs = [GridFunction((-box,) * P.d, rng.normal(size=shape)) for _ in kernels]
        outs = [convolve_direct(g, K.points(), K.values.ravel()) for g, K in zip(gs, kernels)]
        lo = tuple(min(o.lo[i] for o in outs) for i in range(P.d))
        hi = tuple(max(o.hi[i] for o in outs) for i in range(P.d))
        lhs = lp_norm(np.sqrt(sum(np.abs(o.embed(lo, hi).values) ** 2 for o in outs)), q_theta)
        rhs = const * lp_norm(np.sqrt(sum(np.abs(g.values) ** 2 for g in gs)), q_theta)
        ratios.append(lhs / rhs)
    return InterpolationReport(theta, q_theta, n0, nstar, ratios)

