"""Arithmetic side of the circle method: complete exponential sums over residues,
admissible denominator sets and the reduced fraction sets built from them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from itertools import product

import numpy as np

from .lattice import CanonicalMapping, canonical_gamma_set

SIGMA_CAP = 200_000
FULL_SCAN_Q = 50
SAMPLES_PER_Q = 512


def _gamma_of(gamma) -> tuple:
    if isinstance(gamma, CanonicalMapping):
        return gamma.gamma
    gamma = tuple(tuple(int(v) for v in g) for g in gamma)
    if not gamma:
        raise ValueError("empty multi-index set")
    return gamma


def residue_monomials(gamma, q: int) -> np.ndarray:
    """``(r^g mod q)`` for every ``r`` in ``{1..q}^k``; shape ``(q^k, |gamma|)``."""
    gamma = _gamma_of(gamma)
    k = len(gamma[0])
    r = np.arange(1, q + 1, dtype=np.int64) % q
    R = np.stack(np.meshgrid(*([r] * k), indexing="ij"), axis=-1).reshape(-1, k)
    cols = []
    for g in gamma:
        col = np.ones(len(R), dtype=np.int64)
        for i, e in enumerate(g):
            for _ in range(e):
                col = (col * R[:, i]) % q
        cols.append(col)
    return np.stack(cols, axis=1)


def _sums_from_phases(phases: np.ndarray, q: int) -> np.ndarray:
    """Mean of ``e(phase/q)`` down axis 0, using a table of the q roots of unity."""
    roots = np.exp(2j * np.pi * np.arange(q) / q)
    return roots[phases].mean(axis=0)


def gauss_sum(gamma, a, q: int) -> complex:
    """Normalised complete sum ``q^{-k} sum_{r in {1..q}^k} e((a . r^gamma)/q)``.

    Phases are reduced modulo ``q`` in exact integer arithmetic before the
    exponential is taken.
    """
    q = int(q)
    if q < 1:
        raise ValueError("q must be >= 1")
    gamma = _gamma_of(gamma)
    a = np.asarray([int(v) for v in np.atleast_1d(a)], dtype=np.int64) % q
    if len(a) != len(gamma):
        raise ValueError(f"need {len(gamma)} numerators, got {len(a)}")
    R = residue_monomials(gamma, q)
    phases = (R * a).sum(axis=1) % q
    counts = np.bincount(phases, minlength=q)
    roots = np.exp(2j * np.pi * np.arange(q) / q)
    return complex(np.dot(counts, roots) / len(R))


def coprime_numerators(q: int, dim: int) -> np.ndarray:
    """All ``a`` in ``{0..q-1}^dim`` with ``gcd(a_1, ..., a_dim, q) = 1``."""
    axis = np.arange(q, dtype=np.int64)
    A = np.stack(np.meshgrid(*([axis] * dim), indexing="ij"), axis=-1).reshape(-1, dim)
    g = np.full(len(A), q, dtype=np.int64)
    for i in range(dim):
        g = np.gcd(g, A[:, i])
    return A[g == 1]


def max_gauss_modulus(gamma, q: int, rng=None, samples=SAMPLES_PER_Q, full_scan_q=FULL_SCAN_Q):
    """``max |G(a/q)|`` over reduced ``a``; exhaustive for small q, sampled above."""
    gamma = _gamma_of(gamma)
    dim = len(gamma)
    if q == 1:
        return 1.0, (0,) * dim
    R = residue_monomials(gamma, q)
    if q <= full_scan_q or q**dim <= samples:
        A = coprime_numerators(q, dim)
    else:
        if rng is None:
            rng = np.random.default_rng(0)
        A = rng.integers(0, q, size=(4 * samples, dim))
        g = np.full(len(A), q, dtype=np.int64)
        for i in range(dim):
            g = np.gcd(g, A[:, i])
        A = A[g == 1][:samples]
    best, arg = -1.0, None
    for start in range(0, len(A), 256):
        blk = A[start : start + 256]
        phases = (R @ blk.T) % q
        mods = np.abs(_sums_from_phases(phases, q))
        i = int(np.argmax(mods))
        if mods[i] > best:
            best, arg = float(mods[i]), tuple(int(v) for v in blk[i])
    return best, arg


@dataclass
class GaussDecayFit:
    q: np.ndarray
    max_modulus: np.ndarray
    witnesses: list
    delta: float | None
    constant: float | None
    exact_cancellation: bool
    target_delta: float | None = 0.5

    def rows(self):
        for q, m, w in zip(self.q, self.max_modulus, self.witnesses):
            yield {"q": int(q), "max_modulus": float(m), "numerators": w}


def gauss_decay_fit(gamma, q_max: int, seed=0, samples=SAMPLES_PER_Q, q_min=2, target_delta=0.5):
    """Fit ``max_a |G(a/q)| ~ C q^{-delta}`` by least squares in log-log over
    ``q_min <= q <= q_max``."""
    if q_max < 10:
        raise ValueError("q_max must be >= 10")
    gamma = _gamma_of(gamma)
    rng = np.random.default_rng(seed)
    qs, mods, wit = [], [], []
    for q in range(1, q_max + 1):
        m, a = max_gauss_modulus(gamma, q, rng=rng, samples=samples)
        qs.append(q)
        mods.append(m)
        wit.append(a)
    qs, mods = np.array(qs), np.array(mods)
    sel = (qs >= q_min) & (mods > 1e-12)
    if not np.any(sel):
        return GaussDecayFit(qs, mods, wit, None, None, True, target_delta)
    slope, icpt = np.polyfit(np.log(qs[sel]), np.log(mods[sel]), 1)
    return GaussDecayFit(qs, mods, wit, float(-slope), float(np.exp(icpt)), False, target_delta)


# denominator sets ------------------------------------------------------------------


class PropertyViolation(ValueError):
    pass


def lcm_of(values) -> int:
    return reduce(math.lcm, values, 1)


def default_denominators(N: int) -> frozenset:
    return frozenset(range(1, N + 1))


@dataclass(frozen=True)
class DenominatorSet:
    N: int
    u: int
    members: tuple
    lcm: int

    def __contains__(self, q):
        return q in set(self.members)

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)

    @property
    def rho(self) -> float:
        return 1.0 / (10 * self.u)


def check_denominator_properties(N: int, members, previous=None, u: int = 1) -> int:
    """Raise :class:`PropertyViolation` unless the set contains ``1..N``, contains
    ``previous``, is closed under divisors and has ``lcm <= 3^N``. Returns the lcm."""
    S = set(members)
    missing = [q for q in range(1, N + 1) if q not in S]
    if missing:
        raise PropertyViolation(f"N={N}: missing {missing[:5]} from 1..N")
    if previous is not None and not set(previous) <= S:
        raise PropertyViolation(f"N={N}: not nested over the set for N-1")
    for q in S:
        for dv in range(1, math.isqrt(q) + 1):
            if q % dv == 0 and (dv not in S or q // dv not in S):
                raise PropertyViolation(f"N={N}: divisor of {q} missing")
    L = lcm_of(S)
    if L > 3**N:
        raise PropertyViolation(f"N={N}: lcm {L} exceeds 3^N")
    cap = max(N, math.exp(N ** (1.0 / (10 * u))))
    if max(S) > cap:
        raise PropertyViolation(f"N={N}: member {max(S)} above max(N, e^(N^rho))")
    return L


def build_p_leq(N: int, variant=None, u: int = 1) -> DenominatorSet:
    """Admissible denominator set; the default variant is ``{1, ..., N}``.

    ``variant`` may be any callable ``N -> iterable of ints``; the structural
    properties are verified for it (including nesting over ``N - 1``).
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    gen = variant or default_denominators
    members = tuple(sorted(set(int(q) for q in gen(N))))
    previous = tuple(gen(N - 1)) if N > 1 else None
    L = check_denominator_properties(N, members, previous, u)
    return DenominatorSet(N, u, members, L)


# fractions ---------------------------------------------------------------------------


def _center(a: int, q: int) -> int:
    """Representative of ``a mod q`` with ``a/q`` in ``[-1/2, 1/2)``."""
    a %= q
    return a - q if 2 * a >= q else a


@dataclass(frozen=True)
class RationalFraction:
    numerators: tuple
    q: int

    def __post_init__(self):
        q = int(self.q)
        if q < 1:
            raise ValueError("denominator must be positive")
        a = tuple(_center(int(v), q) for v in self.numerators)
        if reduce(math.gcd, a, q) != 1:
            raise ValueError(f"{a}/{q} is not reduced")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "numerators", a)

    @property
    def dim(self) -> int:
        return len(self.numerators)

    def point(self) -> np.ndarray:
        return np.array(self.numerators, dtype=float) / self.q

    def as_fractions(self) -> tuple:
        return tuple(Fraction(a, self.q) for a in self.numerators)

    def to_text(self) -> str:
        return "(" + ", ".join(str(f) for f in self.as_fractions()) + ")"

    def to_json(self) -> dict:
        return {"numerators": list(self.numerators), "q": self.q}

    @classmethod
    def from_json(cls, obj) -> "RationalFraction":
        return cls(tuple(obj["numerators"]), obj["q"])


def jordan_totient(q: int, dim: int) -> int:
    """Number of ``a mod q`` in dimension ``dim`` with ``gcd(a, q) = 1``."""
    out = q**dim
    n, p = q, 2
    primes = []
    while p * p <= n:
        if n % p == 0:
            primes.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        primes.append(n)
    for p in primes:
        out = out // p**dim * (p**dim - 1)
    return out


def build_sigma(denominators, dim: int, cap: int = SIGMA_CAP) -> list:
    """Reduced fractions ``a/q`` on the torus with ``q`` in the denominator set,
    ordered by ``q`` and then lexicographically by the centred numerators."""
    if dim < 1:
        raise ValueError("dimension must be >= 1")
    qs = sorted(set(int(q) for q in denominators))
    total = sum(jordan_totient(q, dim) for q in qs)
    if total > cap:
        raise ValueError(f"fraction set would have {total} elements (cap {cap})")
    out = []
    for q in qs:
        reps = range(-(q // 2), q - q // 2)
        for a in product(reps, repeat=dim):
            if reduce(math.gcd, a, q) == 1:
                out.append(RationalFraction(a, q))
    return out


@dataclass
class IWFamily:
    """Denominator set and reduced fractions for a given ``N`` and ``u``."""

    u: int
    N: int
    dim: int
    denominators: DenominatorSet
    sigma: list
    points: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        if self.points is None:
            self.points = (
                np.stack([r.point() for r in self.sigma]) if self.sigma else np.zeros((0, self.dim))
            )

    @property
    def rho(self) -> float:
        return 1.0 / (10 * self.u)

    @classmethod
    def build(cls, N: int, dim: int, u: int = 1, variant=None, cap=SIGMA_CAP) -> "IWFamily":
        P = build_p_leq(N, variant, u)
        return cls(u, N, dim, P, build_sigma(P, dim, cap))

    def cardinality_report(self) -> dict:
        bound = math.exp((self.dim + 1) * self.N**self.rho)
        return {
            "N": self.N,
            "dim": self.dim,
            "size": len(self.sigma),
            "bound": bound,
            "ratio": len(self.sigma) / bound,
        }

    def min_separation(self) -> float:
        """Smallest max-norm torus distance between two distinct fractions."""
        X = self.points
        if len(X) < 2:
            return math.inf
        best = math.inf
        for i in range(len(X) - 1):
            d = X[i + 1 :] - X[i]
            d -= np.round(d)
            best = min(best, float(np.abs(d).max(axis=1).min()))
        return best


def quadratic_gamma() -> CanonicalMapping:
    return canonical_gamma_set(1, 2)
