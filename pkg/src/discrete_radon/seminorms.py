"""Supremum, oscillation, r-variation and lambda-jump seminorms of sampled families.

Every scalar seminorm has a field version working on a ``(T, m)`` array (T
times, m lattice points) so that the pointwise evaluation over a grid
function is a single vectorised dynamic programme.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .averages import SampledFamily, as_fraction, is_in_U
from .grid import GridFunction

VARIATION_BRUTE_CAP = 14
JUMP_BRUTE_CAP = 18
OSC_ENUM_CAP = 12


@dataclass
class ScalarSequence:
    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.values = np.atleast_1d(np.asarray(self.values))
        if self.times is None:
            self.times = np.arange(len(self.values), dtype=float)
        self.times = np.atleast_1d(np.asarray(self.times, dtype=float))
        if len(self.times) != len(self.values):
            raise ValueError("times and values differ in length")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")

    def __len__(self):
        return len(self.values)


def _seq(seq) -> ScalarSequence:
    if isinstance(seq, ScalarSequence):
        return seq
    return ScalarSequence(None, seq)


def _cols(values) -> np.ndarray:
    a = np.asarray(values)
    return a.reshape(len(a), -1)


# field kernels ---------------------------------------------------------------


def variation_field(A, r) -> np.ndarray:
    """Pointwise V^r of each column of ``A`` (shape (T, m))."""
    A = _cols(A)
    r = float(r)
    if r < 1:
        raise ValueError(f"variation exponent must be >= 1, got {r}")
    T, m = A.shape
    if T < 2:
        return np.zeros(m)
    if math.isinf(r):
        out = np.zeros(m)
        for j in range(1, T):
            out = np.maximum(out, np.abs(A[j] - A[:j]).max(axis=0))
        return out
    best = np.zeros((T, m))
    for j in range(1, T):
        best[j] = (best[:j] + np.abs(A[j] - A[:j]) ** r).max(axis=0)
    return best.max(axis=0) ** (1.0 / r)


def jump_field(A, lam) -> np.ndarray:
    """Pointwise N_lambda: longest chain ``t_0 < ... < t_J`` with every
    consecutive increment ``>= lam``."""
    A = _cols(A)
    if not lam > 0:
        raise ValueError("lambda must be positive")
    T, m = A.shape
    J = np.zeros((T, m), dtype=np.int64)
    for j in range(1, T):
        ok = np.abs(A[j] - A[:j]) >= lam
        J[j] = np.where(ok, J[:j] + 1, 0).max(axis=0)
    return J.max(axis=0)


def sup_field(A) -> np.ndarray:
    A = _cols(A)
    return np.abs(A - A[0]).max(axis=0)


def _anchor_rows(times, anchors):
    """Row index of each anchor value (last sample at or before it) and the
    sample rows falling in each window ``[I_j, I_{j+1})``."""
    times = np.asarray(times, dtype=float)
    anchors = np.asarray([float(a) for a in anchors])
    if len(anchors) < 2:
        raise ValueError("need at least two anchors (one window)")
    if np.any(np.diff(anchors) <= 0):
        raise ValueError("anchors must be strictly increasing")
    if anchors[0] < times[0] or anchors[0] > times[-1]:
        raise ValueError("anchors must lie within the sampled time range")
    rows = np.searchsorted(times, anchors, side="right") - 1
    windows = [
        np.nonzero((times >= a) & (times < b))[0] for a, b in zip(anchors[:-1], anchors[1:])
    ]
    return rows, windows


def oscillation_field(A, times, anchors) -> np.ndarray:
    A = _cols(A)
    rows, windows = _anchor_rows(times, anchors)
    tot = np.zeros(A.shape[1])
    for r, w in zip(rows[:-1], windows):
        if len(w):
            tot += (np.abs(A[w] - A[r]) ** 2).max(axis=0)
    return np.sqrt(tot)


def oscillation_sup_field(A) -> np.ndarray:
    """Pointwise supremum of O^2_{I,N} over all N and all anchor sequences
    drawn from the sampled times."""
    A = _cols(A)
    T, m = A.shape
    F = np.zeros((T, m))
    W = np.zeros((T, m))
    for j in range(1, T):
        # W[i] = max_{i <= t < j} |a_t - a_i|^2
        W[:j] = np.maximum(W[:j], np.abs(A[j - 1] - A[:j]) ** 2)
        F[j] = np.maximum(0.0, (F[:j] + W[:j]).max(axis=0))
    return np.sqrt(F[-1])


# scalar seminorms --------------------------------------------------------------


def variation(seq, r=2) -> float:
    s = _seq(seq)
    return float(variation_field(s.values, r)[0])


def variation_bruteforce(seq, r=2) -> float:
    """Exhaustive maximum over all increasing subsequences."""
    a = list(_seq(seq).values)
    n = len(a)
    if n > VARIATION_BRUTE_CAP:
        raise ValueError(f"brute force limited to length {VARIATION_BRUTE_CAP}")
    r = float(r)
    if r < 1:
        raise ValueError("r must be >= 1")
    if math.isinf(r):
        return max((abs(a[j] - a[i]) for i, j in combinations(range(n), 2)), default=0.0)
    best = 0.0
    for size in range(2, n + 1):
        for idx in combinations(range(n), size):
            s = 0.0
            for i, j in zip(idx, idx[1:]):
                s += abs(a[j] - a[i]) ** r
            best = max(best, s)
    return best ** (1.0 / r)


def jump_count(seq, lam) -> int:
    return int(jump_field(_seq(seq).values, lam)[0])


def jump_bruteforce(seq, lam) -> int:
    """Largest J over all subsequences whose consecutive increments are all >= lam."""
    if not lam > 0:
        raise ValueError("lambda must be positive")
    a = list(_seq(seq).values)
    n = len(a)
    if n > JUMP_BRUTE_CAP:
        raise ValueError(f"brute force limited to length {JUMP_BRUTE_CAP}")
    for size in range(n, 1, -1):
        for idx in combinations(range(n), size):
            if all(abs(a[j] - a[i]) >= lam for i, j in zip(idx, idx[1:])):
                return size - 1
    return 0


def oscillation(seq, anchors) -> float:
    s = _seq(seq)
    return float(oscillation_field(s.values, s.times, anchors)[0])


def oscillation_sup(seq) -> float:
    return float(oscillation_sup_field(_seq(seq).values)[0])


def sup_seminorm(seq) -> float:
    return float(sup_field(_seq(seq).values)[0])


# seminorm kinds and fields ---------------------------------------------------------


@dataclass(frozen=True)
class SeminormKind:
    """``variant`` is one of ``sup``, ``osc``, ``var``, ``jump``.

    ``anchors`` (osc) fixes the anchor sequence; ``None`` means the supremum
    over all anchor sequences in the sampled times. ``lambdas`` (jump) is the
    lambda grid, ``None`` for the default 32-point logarithmic grid and
    ``"exact"`` for every observed increment.
    """

    variant: str
    r: float = 2.0
    anchors: tuple | None = None
    lambdas: object = None

    def __post_init__(self):
        if self.variant not in ("sup", "osc", "var", "jump"):
            raise ValueError(f"unknown seminorm {self.variant!r}")
        if self.variant == "var" and not float(self.r) >= 1:
            raise ValueError("r must be >= 1")
        if self.variant == "jump" and isinstance(self.lambdas, tuple):
            if any(not l > 0 for l in self.lambdas):
                raise ValueError("lambda values must be positive")
        if self.anchors is not None:
            a = [float(x) for x in self.anchors]
            if any(y <= x for x, y in zip(a, a[1:])):
                raise ValueError("anchors must be strictly increasing")

    @classmethod
    def parse(cls, spec: str) -> "SeminormKind":
        """``sup``, ``osc``, ``osc:1,2,4``, ``var:r`` (``var:inf``), ``jump``,
        ``jump:0.1,0.5``, ``jump:exact``."""
        name, _, arg = spec.partition(":")
        if name == "sup":
            return cls("sup")
        if name == "osc":
            return cls("osc", anchors=tuple(float(x) for x in arg.split(",")) if arg else None)
        if name == "var":
            return cls("var", r=float(arg or 2))
        if name == "jump":
            if arg == "exact":
                return cls("jump", lambdas="exact")
            return cls("jump", lambdas=tuple(float(x) for x in arg.split(",")) if arg else None)
        raise ValueError(f"unknown seminorm spec {spec!r}")

    def label(self) -> str:
        if self.variant == "var":
            return f"var:{self.r:g}"
        return self.variant


@dataclass
class SeminormFieldResult:
    pointwise: np.ndarray
    aggregate: float
    p: float
    lam: float | None = None
    anchors: tuple | None = None
    lo: tuple | None = None

    def as_grid(self, shape) -> GridFunction:
        return GridFunction(self.lo, self.pointwise.reshape(shape))


def lp_norm(x, p) -> float:
    x = np.abs(np.asarray(x)).astype(float).ravel()
    if math.isinf(p):
        return float(x.max(initial=0.0))
    return float(np.sum(x**p) ** (1.0 / p))


def weak_lp_norm(x, p) -> float:
    """``sup_a a * #{x > a}^{1/p}`` for a finite vector."""
    x = np.sort(np.abs(np.asarray(x)).astype(float).ravel())[::-1]
    if len(x) == 0:
        return 0.0
    k = np.arange(1, len(x) + 1)
    return float(np.max(x * k ** (1.0 / p)))


def default_lambda_grid(A, npts=32) -> np.ndarray:
    A = _cols(A)
    inc = np.abs(A[:, None, :] - A[None, :, :])
    pos = inc[inc > 0]
    if pos.size == 0:
        return np.zeros(0)
    lo, hi = pos.min(), pos.max()
    lo = max(lo, hi * 1e-6)
    return np.geomspace(lo, hi, npts) if hi > lo else np.array([hi])


def exact_lambda_grid(A, cap=4096) -> np.ndarray:
    A = _cols(A)
    inc = np.abs(A[:, None, :] - A[None, :, :])
    vals = np.unique(inc[inc > 0])
    if len(vals) > cap:
        # keep the range covered while bounding the work
        vals = vals[np.linspace(0, len(vals) - 1, cap).astype(int)]
    return vals


def seminorm_values(A, times, kind: SeminormKind, p=2) -> SeminormFieldResult:
    """Pointwise seminorm of the columns of ``A`` and its l^p aggregate."""
    A = _cols(A)
    times = np.asarray(times, dtype=float)
    v = kind.variant
    if v == "sup":
        pw = sup_field(A)
        return SeminormFieldResult(pw, lp_norm(pw, p), p)
    if v == "var":
        pw = variation_field(A, kind.r)
        return SeminormFieldResult(pw, lp_norm(pw, p), p)
    if v == "osc":
        if kind.anchors is not None:
            pw = oscillation_field(A, times, kind.anchors)
            return SeminormFieldResult(pw, lp_norm(pw, p), p, anchors=kind.anchors)
        return _osc_sup_outside(A, times, p)
    # jump
    if kind.lambdas is None:
        lams = default_lambda_grid(A)
    elif kind.lambdas == "exact":
        lams = exact_lambda_grid(A)
    else:
        lams = np.asarray(kind.lambdas, dtype=float)
    best = SeminormFieldResult(np.zeros(A.shape[1]), 0.0, p, lam=None)
    for lam in lams:
        pw = lam * np.sqrt(jump_field(A, lam))
        val = lp_norm(pw, p)
        if val > best.aggregate:
            best = SeminormFieldResult(pw, val, p, lam=float(lam))
    return best


def _osc_sup_outside(A, times, p) -> SeminormFieldResult:
    """Exact ``sup_I ||O_I||_p`` by enumerating every anchor subset."""
    T = A.shape[0]
    if T > OSC_ENUM_CAP:
        raise ValueError(
            f"exact oscillation supremum enumerates anchor sets; limited to {OSC_ENUM_CAP} times"
        )
    best = SeminormFieldResult(np.zeros(A.shape[1]), 0.0, p, anchors=None)
    D = np.abs(A[:, None, :] - A[None, :, :]) ** 2  # D[i, t] = |a_t - a_i|^2
    for size in range(2, T + 1):
        for idx in combinations(range(T), size):
            tot = np.zeros(A.shape[1])
            for i, j in zip(idx, idx[1:]):
                tot += D[i, i:j].max(axis=0)
            pw = np.sqrt(tot)
            val = lp_norm(pw, p)
            if val > best.aggregate:
                best = SeminormFieldResult(pw, val, p, anchors=tuple(float(times[i]) for i in idx))
    return best


def seminorm_field(family: SampledFamily, kind: SeminormKind, p=2) -> SeminormFieldResult:
    if not isinstance(family, SampledFamily):
        family = SampledFamily.from_functions(family[0], family[1])
    times = np.array([float(t) for t in family.times])
    res = seminorm_values(family.flat(), times, kind, p)
    res.lo = family.lo
    return res


def seminorm_of_functions(times, fns, kind, p=2) -> SeminormFieldResult:
    """Convenience wrapper: grid functions must share one box."""
    boxes = {(g.lo, g.hi) for g in fns}
    if len(boxes) != 1:
        raise ValueError("grid functions are not on a common box")
    fam = SampledFamily(tuple(times), fns[0].lo, np.stack([g.values for g in fns]))
    return seminorm_field(fam, kind, p)


def square_function(A) -> np.ndarray:
    A = _cols(A)
    return np.sqrt((np.abs(A) ** 2).sum(axis=0))


# dyadic structure --------------------------------------------------------------------


@dataclass
class RademacherMenshovReport:
    lhs: float
    rhs: float
    ratio: float
    ok: bool
    levels: list = field(default_factory=list)


def dyadic_intervals(b: int, s: int):
    """Pairs ``(j 2^i, (j+1) 2^i)`` with ``0 <= i <= s`` inside ``[b, 2^s]``."""
    out = []
    for i in range(s + 1):
        step = 2**i
        out.append(
            [(j * step, (j + 1) * step) for j in range(2 ** (s - i)) if j * step >= b and (j + 1) * step <= 2**s]
        )
    return out


def rademacher_menshov_check(values, b: int, s: int, rtol=1e-12) -> RademacherMenshovReport:
    """Both sides of the dyadic square-function bound for ``a_b, ..., a_{2^s}``
    with the seminorm taken as V^2."""
    values = np.asarray(values)
    if not 1 <= b <= 2**s:
        raise ValueError("need 1 <= b <= 2^s")
    if len(values) != 2**s - b + 1:
        raise ValueError(f"expected {2**s - b + 1} values for indices {b}..{2**s}")
    a = lambda n: values[n - b]  # noqa: E731
    lhs = variation(values, 2)
    levels = []
    rhs = 0.0
    for ivs in dyadic_intervals(b, s):
        lvl = math.sqrt(sum(abs(a(y) - a(x)) ** 2 for x, y in ivs))
        levels.append(lvl)
        rhs += lvl
    ratio = lhs / rhs if rhs > 0 else (0.0 if lhs == 0 else math.inf)
    ok = lhs <= math.sqrt(2) * rhs * (1 + rtol) + 1e-300
    return RademacherMenshovReport(lhs, rhs, ratio, ok, levels)


@dataclass
class LongShortSplit:
    long_times: tuple
    long_values: np.ndarray  # (n_blocks, m)
    block_times: list
    block_variations: np.ndarray  # (n_blocks, m) V^2 within each block
    short: np.ndarray  # (m,) l^2 sum over blocks
    long_sup: np.ndarray  # (m,) sup_n |a_{2^n} - a_{t0}|
    full_sup: np.ndarray  # (m,) sup_t |a_t - a_{t0}|
    violations: int


def long_short_split(values, times, rtol=1e-12) -> LongShortSplit:
    """Split a family on a U-grid into values at the dyadic block starts and
    the within-block 2-variations, and check the pointwise bound
    ``sup_t |a_t - a_t0| <= sup_n |a_{2^n} - a_t0| + (sum_n V^2(block_n)^2)^{1/2}``.

    The long time of block ``[2^n, 2^{n+1})`` is ``2^n``; if the grid starts
    inside a block, the first sampled time plays that role.
    """
    A = _cols(values)
    ts = [as_fraction(t) for t in times]
    if len(ts) != A.shape[0]:
        raise ValueError("times and values differ in length")
    if not all(map(is_in_U, ts)):
        raise ValueError("grid is not contained in U")
    blocks: dict = {}
    for i, t in enumerate(ts):
        n = t.numerator.bit_length() - t.denominator.bit_length()
        if 2**n > t if n >= 0 else as_fraction(2) ** n > t:
            n -= 1
        blocks.setdefault(n, []).append(i)
    order = sorted(blocks)
    long_idx = [blocks[n][0] for n in order]
    long_vals = A[long_idx]
    bv = np.stack([variation_field(A[blocks[n]], 2) for n in order])
    short = np.sqrt((bv**2).sum(axis=0))
    long_sup = np.abs(long_vals - A[0]).max(axis=0)
    full_sup = np.abs(A - A[0]).max(axis=0)
    viol = int(np.sum(full_sup > (long_sup + short) * (1 + rtol) + 1e-300))
    return LongShortSplit(
        tuple(ts[i] for i in long_idx),
        long_vals,
        [tuple(ts[i] for i in blocks[n]) for n in order],
        bv,
        short,
        long_sup,
        full_sup,
        viol,
    )
