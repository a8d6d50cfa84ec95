"""Lattice geometry: convex bodies, integer polynomial maps, canonical lifting."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np

INT64_MAX = np.iinfo(np.int64).max

MAX_ARITY = 3
MAX_GAMMA = 10


def as_fraction(t) -> Fraction:
    """Exact rational value of a time parameter (floats are taken bit-exactly)."""
    if isinstance(t, Fraction):
        return t
    if isinstance(t, (int, np.integer)):
        return Fraction(int(t))
    if isinstance(t, str):
        return Fraction(t)
    return Fraction(float(t))


def _positive_time(t) -> Fraction:
    t = as_fraction(t)
    if t <= 0:
        raise ValueError(f"time parameter must be positive, got {t}")
    return t


@dataclass(frozen=True)
class ConvexBody:
    """Either the open Euclidean unit ball or the open max-norm cube of
    half-width ``1/sqrt(k)`` (so that ``B(0, c) <= body <= B(0, 1)``)."""

    kind: str = "ball"

    def __post_init__(self):
        if self.kind not in ("ball", "cube"):
            raise ValueError(f"unknown body kind {self.kind!r}")

    def inner_radius(self, k: int) -> float:
        return 1.0 if self.kind == "ball" else 1.0 / math.sqrt(k)

    def contains(self, x, t=1) -> np.ndarray:
        """Membership of real points ``x`` (shape (m, k)) in the dilate body_t."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        k = x.shape[1]
        t = float(t)
        if self.kind == "ball":
            return np.einsum("ij,ij->i", x, x) < t * t
        return k * np.max(x * x, axis=1) < t * t

    def volume(self, k: int, t=1) -> float:
        t = float(t)
        if self.kind == "ball":
            return math.pi ** (k / 2) / math.gamma(k / 2 + 1) * t**k
        return (2 * t / math.sqrt(k)) ** k


BALL = ConvexBody("ball")
CUBE = ConvexBody("cube")


def enumerate_lattice_points(body: ConvexBody, k: int, t) -> np.ndarray:
    """All ``y`` in Z^k with ``y/t`` in the body, as an (m, k) int64 array in
    ascending lexicographic order. The origin is always included."""
    t = _positive_time(t)
    if k < 1:
        raise ValueError("arity must be >= 1")
    # largest integer strictly below t^2; all membership tests are integer
    t_sq = t * t
    below = math.ceil(t_sq) - 1
    R = math.ceil(t)
    axis = np.arange(-R, R + 1, dtype=np.int64)
    grid = np.stack(np.meshgrid(*([axis] * k), indexing="ij"), axis=-1).reshape(-1, k)
    if body.kind == "ball":
        keep = np.einsum("ij,ij->i", grid, grid) <= below
    else:
        keep = k * np.max(grid * grid, axis=1) <= below
    return grid[keep]


def lattice_count(body: ConvexBody, k: int, t) -> int:
    return len(enumerate_lattice_points(body, k, t))


_MONO_RE = re.compile(r"^(n(\d*))(?:\^(\d+))?$")


@dataclass(frozen=True)
class PolynomialMap:
    """Integer polynomial map Z^k -> Z^d without constant terms.

    ``terms[j]`` is a sorted tuple of ``(multiindex, coefficient)`` pairs for
    component ``j``; zero coefficients are dropped.
    """

    k: int
    terms: tuple

    def __post_init__(self):
        cleaned = []
        for comp in self.terms:
            acc: dict = {}
            for alpha, c in (comp.items() if isinstance(comp, dict) else comp):
                alpha = tuple(int(a) for a in alpha)
                if len(alpha) != self.k or any(a < 0 for a in alpha):
                    raise ValueError(f"bad multi-index {alpha} for arity {self.k}")
                if int(c) != c:
                    raise ValueError("coefficients must be integers")
                acc[alpha] = acc.get(alpha, 0) + int(c)
            if acc.get((0,) * self.k, 0) != 0:
                raise ValueError("polynomial components must vanish at 0")
            cleaned.append(tuple(sorted((a, c) for a, c in acc.items() if c != 0)))
        if not cleaned:
            raise ValueError("need at least one component")
        object.__setattr__(self, "terms", tuple(cleaned))

    @property
    def d(self) -> int:
        return len(self.terms)

    @property
    def degree(self) -> int:
        return max((sum(a) for comp in self.terms for a, _ in comp), default=0)

    def evaluate(self, y) -> tuple:
        """Exact evaluation at one lattice point; raises OverflowError if a
        component does not fit in a signed 64-bit integer."""
        y = tuple(int(v) for v in np.atleast_1d(y))
        if len(y) != self.k:
            raise ValueError(f"point {y} does not have arity {self.k}")
        out = []
        for comp in self.terms:
            val = sum(c * math.prod(yi**ai for yi, ai in zip(y, alpha)) for alpha, c in comp)
            if abs(val) > INT64_MAX:
                raise OverflowError(f"P({y}) component {val} exceeds int64")
            out.append(val)
        return tuple(out)

    def evaluate_many(self, Y) -> np.ndarray:
        """Vectorised evaluation on an (m, k) integer array, checked for overflow."""
        Y = np.asarray(Y, dtype=np.int64).reshape(-1, self.k)
        if len(Y) == 0:
            return np.zeros((0, self.d), dtype=np.int64)
        ymax = int(np.abs(Y).max()) if Y.size else 0
        bound = max(
            sum(abs(c) * ymax ** sum(a) for a, c in comp) for comp in self.terms
        )
        if bound < 2**62:
            out = np.zeros((len(Y), self.d), dtype=np.int64)
            for j, comp in enumerate(self.terms):
                for alpha, c in comp:
                    mono = np.ones(len(Y), dtype=np.int64)
                    for i, a in enumerate(alpha):
                        if a:
                            mono = mono * Y[:, i] ** a
                    out[:, j] += c * mono
            return out
        return np.array([self.evaluate(y) for y in Y], dtype=np.int64)

    def to_text(self) -> str:
        """``d k deg`` header, then ``component multiindex coefficient`` lines."""
        lines = [f"{self.d} {self.k} {self.degree}"]
        for j, comp in enumerate(self.terms):
            for alpha, c in comp:
                lines.append(f"{j} {','.join(map(str, alpha))} {c}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "PolynomialMap":
        rows = [ln.split() for ln in text.strip().splitlines() if ln.strip()]
        d, k, deg = map(int, rows[0])
        comps = [dict() for _ in range(d)]
        for j, alpha, c in rows[1:]:
            comps[int(j)][tuple(int(a) for a in alpha.split(","))] = int(c)
        P = cls(k, tuple(comps))
        if P.degree != deg and any(comps):
            raise ValueError(f"header degree {deg} disagrees with terms ({P.degree})")
        return P

    @classmethod
    def parse(cls, expr: str) -> "PolynomialMap":
        """Parse the command-line grammar, e.g. ``"n^2"``, ``"(n, n^2)"``,
        ``"3*n1*n2^2 - n2"``. ``n`` is an alias for ``n1``."""
        s = expr.replace(" ", "")
        if s.startswith("(") and s.endswith(")"):
            s = s[1:-1]
        parts = [p for p in s.split(",")]
        if not all(parts):
            raise ValueError(f"empty component in {expr!r}")
        parsed = [_parse_component(p) for p in parts]
        k = max((max((v for v, _ in m), default=1) for comp in parsed for m, _ in comp), default=1)
        comps = []
        for comp in parsed:
            acc: dict = {}
            for mono, c in comp:
                alpha = [0] * k
                for v, e in mono:
                    alpha[v - 1] += e
                if not any(alpha):
                    raise ValueError(f"constant term in {expr!r}: P(0) must be 0")
                acc[tuple(alpha)] = acc.get(tuple(alpha), 0) + c
            comps.append(acc)
        return cls(k, tuple(comps))

    @classmethod
    def monomial(cls, k: int, alpha, coef: int = 1) -> "PolynomialMap":
        return cls(k, ({tuple(alpha): coef},))


def _parse_component(s: str):
    if s[0] not in "+-":
        s = "+" + s
    terms = re.findall(r"[+-][^+-]+", s)
    if "".join(terms) != s:
        raise ValueError(f"cannot parse {s!r}")
    out = []
    for term in terms:
        sign = -1 if term[0] == "-" else 1
        coef = sign
        mono = []
        for factor in term[1:].split("*"):
            if re.fullmatch(r"\d+", factor):
                coef *= int(factor)
                continue
            m = re.fullmatch(r"(\d*)(n\d*(?:\^\d+)?)", factor)
            if not m:
                raise ValueError(f"bad factor {factor!r}")
            if m.group(1):
                coef *= int(m.group(1))
            mm = _MONO_RE.match(m.group(2))
            var = int(mm.group(2) or 1)
            if var < 1:
                raise ValueError(f"variables are n1, n2, ...; got {factor!r}")
            mono.append((var, int(mm.group(3) or 1)))
        if not mono:
            raise ValueError(f"constant term {term!r}: P(0) must be 0")
        out.append((mono, coef))
    return out


@dataclass(frozen=True)
class CanonicalMapping:
    """Monomials ``y -> (y^gamma : 0 < |gamma| <= degree)`` in lexicographic order."""

    k: int
    degree: int
    gamma: tuple
    exponents: tuple

    @property
    def size(self) -> int:
        return len(self.gamma)

    def lift(self, y) -> tuple:
        return canonical_lift(y, self.gamma)

    def as_polynomial_map(self) -> PolynomialMap:
        return PolynomialMap(self.k, tuple({g: 1} for g in self.gamma))

    def to_text(self) -> str:
        return f"{self.k} {self.degree}\n"

    @classmethod
    def from_text(cls, text: str) -> "CanonicalMapping":
        k, degree = map(int, text.split())
        return canonical_gamma_set(k, degree, allow_large=True)


def canonical_gamma_set(k: int, degree: int, *, allow_large=False) -> CanonicalMapping:
    if k < 1 or degree < 1:
        raise ValueError("need k >= 1 and degree >= 1")
    gamma = tuple(
        g for g in product(range(degree + 1), repeat=k) if 0 < sum(g) <= degree
    )
    if not allow_large and (k > MAX_ARITY or len(gamma) > MAX_GAMMA):
        raise ValueError(
            f"k={k}, degree={degree} gives |Gamma|={len(gamma)}; "
            f"limits are k <= {MAX_ARITY}, |Gamma| <= {MAX_GAMMA}"
        )
    return CanonicalMapping(k, degree, gamma, tuple(sum(g) for g in gamma))


def canonical_lift(y, gamma) -> tuple:
    """Exact monomial vector ``(y^g : g in gamma)`` as Python integers."""
    y = tuple(int(v) for v in np.atleast_1d(y))
    if gamma and len(gamma[0]) != len(y):
        raise ValueError("arity mismatch between point and multi-indices")
    return tuple(math.prod(yi**gi for yi, gi in zip(y, g)) for g in gamma)


def dilate(t, exponents, x) -> np.ndarray:
    """Anisotropic dilation ``t^A x``: coordinate gamma is scaled by ``t^|gamma|``."""
    t = float(t)
    if t <= 0:
        raise ValueError("dilation parameter must be positive")
    x = np.asarray(x, dtype=float)
    return x * t ** np.asarray(exponents, dtype=float)


def evaluate_map(P: PolynomialMap, y) -> tuple:
    return P.evaluate(y)
