"""Discrete averaging Radon operators M_t f(x) = mean of f(x - P(y)) over y in body_t.

Kernels are exact integer fibre counts; application is either by direct
shifted summation (the reference) or by zero-padded FFT convolution.
"""

from __future__ import annotations

import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._threads import worker_count
from .grid import GridFunction, hull_box
from .lattice import (
    BALL,
    CanonicalMapping,
    ConvexBody,
    PolynomialMap,
    _positive_time,
    as_fraction,
    enumerate_lattice_points,
)

DEFAULT_FFT_BUDGET = 2**26
DEFAULT_MEMORY_BUDGET = 2**31


class PaddingError(ValueError):
    pass


def _as_map(P) -> PolynomialMap:
    if isinstance(P, CanonicalMapping):
        return P.as_polynomial_map()
    if isinstance(P, str):
        return PolynomialMap.parse(P)
    return P


@dataclass(frozen=True)
class RadonKernel:
    """Fibre counts ``#{y in body_t : P(y) = z}`` for the distinct images ``z``."""

    t: Fraction
    points: np.ndarray  # (m, d) int64, sorted lexicographically
    counts: np.ndarray  # (m,) int64, all positive
    normalization: int

    @property
    def d(self) -> int:
        return self.points.shape[1]

    @property
    def weights(self) -> np.ndarray:
        return self.counts / self.normalization

    def as_dict(self) -> dict:
        return {tuple(int(v) for v in z): int(c) for z, c in zip(self.points, self.counts)}

    def support_box(self) -> tuple:
        return tuple(self.points.min(axis=0)), tuple(self.points.max(axis=0))

    def dense(self) -> GridFunction:
        """Normalised kernel as a grid function on its support box."""
        lo, hi = self.support_box()
        g = GridFunction.zeros(lo, hi)
        idx = tuple((self.points - np.asarray(lo)).T)
        g.values[idx] = self.weights
        return g


_cache: dict = {}
_cache_lock = threading.Lock()


def build_kernel(P, body: ConvexBody = BALL, t=1) -> RadonKernel:
    P = _as_map(P)
    t = _positive_time(t)
    key = (P, body, t)
    hit = _cache.get(key)
    if hit is not None:
        return hit
    Y = enumerate_lattice_points(body, P.k, t)
    Z = P.evaluate_many(Y)
    pts, counts = np.unique(Z, axis=0, return_counts=True)
    kern = RadonKernel(t, pts, counts.astype(np.int64), len(Y))
    with _cache_lock:
        _cache.setdefault(key, kern)
    return _cache[key]


def clear_kernel_cache():
    with _cache_lock:
        _cache.clear()


def convolve_direct(f: GridFunction, points, weights) -> GridFunction:
    """``sum_z w_z f(x - z)`` by explicit shifted accumulation."""
    points = np.asarray(points, dtype=np.int64).reshape(len(weights), -1)
    if points.shape[1] != f.d:
        raise ValueError(f"kernel dimension {points.shape[1]} != grid dimension {f.d}")
    zlo, zhi = points.min(axis=0), points.max(axis=0)
    lo = tuple(int(a) for a in np.asarray(f.lo) + zlo)
    hi = tuple(int(a) for a in np.asarray(f.hi) + zhi)
    dtype = np.result_type(f.values.dtype, np.asarray(weights).dtype, float)
    out = GridFunction.zeros(lo, hi, dtype=dtype)
    for z, w in zip(points - zlo, weights):
        sl = tuple(slice(int(a), int(a) + s) for a, s in zip(z, f.shape))
        out.values[sl] += w * f.values
    return out


def apply_direct(f: GridFunction, kernel: RadonKernel) -> GridFunction:
    return convolve_direct(f, kernel.points, kernel.weights)


def _next_pow2(n: int) -> int:
    return 1 << max(0, int(n - 1).bit_length())


def padded_shape(a_shape, b_shape) -> tuple:
    return tuple(_next_pow2(m + n) for m, n in zip(a_shape, b_shape))


def convolve_fast(f: GridFunction, g: GridFunction, budget=DEFAULT_FFT_BUDGET) -> GridFunction:
    """Linear convolution ``f * g`` through an FFT on a power-of-two padded box
    wide enough that the cyclic wrap cannot reach the true support."""
    if f.d != g.d:
        raise ValueError("dimension mismatch")
    L = padded_shape(f.shape, g.shape)
    if int(np.prod(L)) > budget:
        raise PaddingError(f"padded FFT size {L} exceeds budget of {budget} points")
    out_shape = tuple(m + n - 1 for m, n in zip(f.shape, g.shape))
    axes = tuple(range(f.d))
    if np.isrealobj(f.values) and np.isrealobj(g.values):
        F = np.fft.rfftn(f.values, L, axes=axes) * np.fft.rfftn(g.values, L, axes=axes)
        full = np.fft.irfftn(F, L, axes=axes)
    else:
        F = np.fft.fftn(f.values, L, axes=axes) * np.fft.fftn(g.values, L, axes=axes)
        full = np.fft.ifftn(F, axes=axes)
    vals = full[tuple(slice(0, s) for s in out_shape)]
    lo = tuple(a + b for a, b in zip(f.lo, g.lo))
    return GridFunction(lo, np.ascontiguousarray(vals))


def apply_fast(f: GridFunction, kernel: RadonKernel, budget=DEFAULT_FFT_BUDGET) -> GridFunction:
    return convolve_fast(f, kernel.dense(), budget=budget)


def apply(f: GridFunction, kernel: RadonKernel, method="auto") -> GridFunction:
    if method == "direct":
        return apply_direct(f, kernel)
    if method == "fast":
        return apply_fast(f, kernel)
    lo, hi = kernel.support_box()
    box = int(np.prod([h - l + 1 for l, h in zip(lo, hi)]))
    # sparse images (e.g. high-degree maps) stay on the direct path
    if len(kernel.counts) < 64 or box > 8 * len(kernel.counts):
        return apply_direct(f, kernel)
    try:
        return apply_fast(f, kernel)
    except PaddingError:
        return apply_direct(f, kernel)


def is_in_U(t) -> bool:
    """``t`` lies in the union of the lattices 2^n N, i.e. is a positive dyadic rational."""
    t = as_fraction(t)
    den = t.denominator
    return t > 0 and den & (den - 1) == 0


@dataclass(frozen=True)
class TimeGrid:
    kind: str
    times: tuple

    def __post_init__(self):
        ts = tuple(as_fraction(t) for t in self.times)
        if not ts:
            raise ValueError("time grid must be nonempty")
        if any(t <= 0 for t in ts):
            raise ValueError("times must be positive")
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("times must be strictly increasing")
        if self.kind in ("dyadic", "block", "u") and not all(map(is_in_U, ts)):
            raise ValueError(f"{self.kind} grid contains a time outside U")
        object.__setattr__(self, "times", ts)

    def __len__(self):
        return len(self.times)

    def as_floats(self) -> np.ndarray:
        return np.array([float(t) for t in self.times])

    @classmethod
    def dyadic(cls, a: int, b: int) -> "TimeGrid":
        return cls("dyadic", tuple(Fraction(2) ** n for n in range(a, b + 1)))

    @classmethod
    def dyadic_horizon(cls, N) -> "TimeGrid":
        """Dyadic times ``2^n <= N`` starting at 1."""
        n = 0
        while 2 ** (n + 1) <= N:
            n += 1
        return cls.dyadic(0, n)

    @classmethod
    def block(cls, l: int, resolution: int = 0) -> "TimeGrid":
        """``[2^l, 2^{l+1}]`` sampled on the lattice ``2^{l - resolution} N``."""
        step = Fraction(2) ** (l - resolution)
        base = Fraction(2) ** l
        return cls("block", tuple(base + j * step for j in range(2**resolution + 1)))

    @classmethod
    def u_range(cls, a, b, resolution: int = 0) -> "TimeGrid":
        """All points of ``2^{-resolution} N`` in ``[a, b]``."""
        step = Fraction(1, 2**resolution)
        a, b = as_fraction(a), as_fraction(b)
        j0 = -(-a // step)
        ts = []
        j = j0
        while j * step <= b:
            if j > 0:
                ts.append(j * step)
            j += 1
        return cls("u", tuple(ts))

    @classmethod
    def explicit(cls, times) -> "TimeGrid":
        return cls("explicit", tuple(times))

    @classmethod
    def parse(cls, spec: str) -> "TimeGrid":
        """``dyadic:a..b``, ``u:a..b`` (optionally ``u:a..b/r``), ``list:t1,t2,...``."""
        kind, _, rest = spec.partition(":")
        if kind == "dyadic":
            a, b = rest.split("..")
            return cls.dyadic(int(a), int(b))
        if kind == "u":
            rng, _, res = rest.partition("/")
            a, b = rng.split("..")
            return cls.u_range(Fraction(a), Fraction(b), int(res or 0))
        if kind == "list":
            return cls.explicit(tuple(Fraction(x) for x in rest.split(",")))
        raise ValueError(f"unknown grid spec {spec!r}")


@dataclass
class SampledFamily:
    """One grid function per time, all stored on a common box."""

    times: tuple
    lo: tuple
    values: np.ndarray  # (T, *box_shape)

    def __len__(self):
        return len(self.times)

    def __getitem__(self, i) -> GridFunction:
        return GridFunction(self.lo, self.values[i])

    @property
    def hi(self):
        return tuple(l + s - 1 for l, s in zip(self.lo, self.values.shape[1:]))

    def flat(self) -> np.ndarray:
        """(T, npoints) view used by the pointwise seminorms."""
        return self.values.reshape(len(self.times), -1)

    @classmethod
    def from_functions(cls, times, fns) -> "SampledFamily":
        lo, hi = hull_box(fns)
        vals = np.stack([g.embed(lo, hi).values for g in fns])
        return cls(tuple(times), lo, vals)


def average_family(
    f: GridFunction,
    P,
    body: ConvexBody = BALL,
    grid: TimeGrid | None = None,
    method="auto",
    memory_budget=DEFAULT_MEMORY_BUDGET,
) -> SampledFamily:
    """``(M_t f : t in grid)`` on the hull of all output boxes."""
    if grid is None or len(grid) == 0:
        raise ValueError("time grid must be nonempty")
    P = _as_map(P)
    if P.d != f.d:
        raise ValueError(f"map has target dimension {P.d}, grid function has {f.d}")
    kernels = [build_kernel(P, body, t) for t in grid.times]
    lo = list(f.lo)
    hi = list(f.hi)
    itemsize = np.result_type(f.values.dtype, float).itemsize
    for t, K in zip(grid.times, kernels):
        klo, khi = K.support_box()
        lo = [min(a, b + c) for a, b, c in zip(lo, f.lo, klo)]
        hi = [max(a, b + c) for a, b, c in zip(hi, f.hi, khi)]
        size = len(grid) * int(np.prod([h - l + 1 for l, h in zip(lo, hi)])) * itemsize
        if size > memory_budget:
            raise MemoryError(f"family exceeds memory budget at t={t} ({size} bytes)")

    def one(K):
        return apply(f, K, method).embed(lo, hi).values

    workers = worker_count()
    if workers > 1 and len(kernels) > 1:
        with ThreadPoolExecutor(workers) as ex:
            outs = list(ex.map(one, kernels))
    else:
        outs = [one(K) for K in kernels]
    return SampledFamily(grid.times, tuple(lo), np.stack(outs))
