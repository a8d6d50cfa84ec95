"""Exponential sums, oscillatory integrals and Fourier multipliers on Z^d.

Conventions: ``e(x) = exp(2 pi i x)``, the Fourier transform of a grid
function is ``Ff(xi) = sum_x f(x) e(x . xi)`` and the multiplier operator is
``T[m]f(x) = int e(-xi . x) m(xi) Ff(xi) dxi``, so that the averaging
operator at scale N is ``T[m_N]`` with ``m_N(xi) = mean_y e(P(y) . xi)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .arith import gauss_sum
from .averages import PaddingError, RadonKernel, _as_map, build_kernel
from .grid import GridFunction
from .lattice import BALL, CanonicalMapping, ConvexBody, PolynomialMap, canonical_gamma_set

CHUNK_ELEMS = 2**22
QUAD_TOL = 1e-10


class QuadratureError(RuntimeError):
    def __init__(self, message, achieved):
        super().__init__(f"{message} (achieved tolerance {achieved:.3g})")
        self.achieved = achieved


def _points(xi, d) -> np.ndarray:
    xi = np.asarray(xi, dtype=float)
    if xi.ndim == 0:
        xi = xi.reshape(1, 1)
    elif xi.ndim == 1:
        xi = xi.reshape(-1, d)
    if xi.shape[-1] != d:
        raise ValueError(f"frequency points must have {d} coordinates")
    return xi


def reduce_torus(xi) -> np.ndarray:
    """Representatives in ``[-1/2, 1/2)`` per coordinate."""
    x = np.asarray(xi, dtype=float)
    return x - np.floor(x + 0.5)


def kernel_symbol(kernel: RadonKernel, xi) -> np.ndarray:
    """``sum_z w_z e(z . xi)`` for frequency points of shape (m, d)."""
    xi = _points(xi, kernel.d)
    z = kernel.points.astype(float)
    w = kernel.weights
    out = np.empty(len(xi), dtype=complex)
    step = max(1, CHUNK_ELEMS // max(1, len(z)))
    for i in range(0, len(xi), step):
        ph = xi[i : i + step] @ z.T
        out[i : i + step] = np.exp(2j * np.pi * ph) @ w
    return out


def exponential_sum_m(P, body: ConvexBody = BALL, N=1, xi=0.0) -> np.ndarray:
    """``m_N(xi)`` by direct summation over the distinct images of the lattice points."""
    if float(N) <= 0:
        raise ValueError("N must be positive")
    return kernel_symbol(build_kernel(P, body, N), xi)


# oscillatory integrals ------------------------------------------------------------


def _phase_terms(P: PolynomialMap, N: float):
    """Phase of ``xi . P(N s)`` as (multi-index, coefficient vector over components)."""
    terms: dict = {}
    for j, comp in enumerate(P.terms):
        for alpha, c in comp:
            v = terms.setdefault(alpha, np.zeros(P.d))
            v[j] += c * float(N) ** sum(alpha)
    return [(a, v) for a, v in sorted(terms.items())]


def _osc_count(terms, xi) -> float:
    return float(sum(abs(float(np.dot(v, xi))) for _, v in terms))


def _quad_complex(fn, a, b, pieces, tol):
    total, err = 0.0 + 0.0j, 0.0
    edges = np.linspace(a, b, pieces + 1)
    for lo, hi in zip(edges[:-1], edges[1:]):
        re, e1 = integrate.quad(lambda s: fn(s).real, lo, hi, epsabs=tol / pieces / 4, epsrel=0, limit=200)
        im, e2 = integrate.quad(lambda s: fn(s).imag, lo, hi, epsabs=tol / pieces / 4, epsrel=0, limit=200)
        total += re + 1j * im
        err += e1 + e2
    return total, err


def _phi_one(P: PolynomialMap, body: ConvexBody, N: float, xi, tol) -> complex:
    terms = _phase_terms(P, N)
    # closed form for a single linear term in one variable
    if P.k == 1 and len(terms) == 1 and terms[0][0] == (1,):
        u = 2 * math.pi * float(np.dot(terms[0][1], xi))
        return 1.0 + 0j if u == 0 else complex(math.sin(u) / u)
    coefs = [(a, float(np.dot(v, xi))) for a, v in terms]
    pieces = max(1, math.ceil(2 * _osc_count(terms, xi)))
    if P.k == 1:
        def f(s):
            return np.exp(2j * np.pi * sum(c * s ** a[0] for a, c in coefs))

        val, err = _quad_complex(f, -1.0, 1.0, pieces, tol)
        vol = 2.0
    elif P.k == 2:
        r = body.inner_radius(2) if body.kind == "cube" else 1.0

        def inner(x):
            def g(y):
                return np.exp(2j * np.pi * sum(c * x ** a[0] * y ** a[1] for a, c in coefs))

            h = r if body.kind == "cube" else math.sqrt(max(0.0, 1.0 - x * x))
            v, _ = _quad_complex(g, -h, h, pieces, tol / 4)
            return v

        re, e1 = integrate.quad(lambda x: inner(x).real, -r, r, epsabs=tol / 2, epsrel=0, limit=200)
        im, e2 = integrate.quad(lambda x: inner(x).imag, -r, r, epsabs=tol / 2, epsrel=0, limit=200)
        val, err = re + 1j * im, e1 + e2
        vol = body.volume(2)
    else:
        raise NotImplementedError("oscillatory integrals implemented for k <= 2")
    if err > 10 * tol:
        raise QuadratureError("quadrature did not converge", err)
    return complex(val / vol)


def oscillatory_integral_phi(P, body: ConvexBody = BALL, N=1, xi=0.0, tol=QUAD_TOL) -> np.ndarray:
    """``Phi_N(xi)``: normalised integral of ``e(xi . P(t))`` over the dilated body."""
    if float(N) <= 0:
        raise ValueError("N must be positive")
    P = _as_map(P)
    xi = _points(xi, P.d)
    return np.array([_phi_one(P, body, float(N), x, tol) for x in xi])


@dataclass
class PhiDecayReport:
    N: list
    decay_constant: list  # sup |Phi| * |N^A xi|_inf^{1/dim}
    smallness_constant: list  # sup |Phi - 1| / |N^A xi|_inf

    @property
    def spread(self) -> float:
        a = np.array(self.decay_constant)
        b = np.array(self.smallness_constant)
        return float(max(a.max() / a.min(), b.max() / b.min()) - 1)


def decay_check_phi(gamma, body: ConvexBody = BALL, zeta=None, Ns=(4, 8, 16)) -> PhiDecayReport:
    """Sup over a grid of ``|Phi_N(xi)| |N^A xi|^{1/|Gamma|}`` and of
    ``|Phi_N(xi) - 1| / |N^A xi|``, with the grid given in the scaled variable
    ``zeta = N^A xi`` and mapped back to frequencies for each N."""
    cm = gamma if isinstance(gamma, CanonicalMapping) else None
    if cm is None:
        k = len(gamma[0])
        cm = CanonicalMapping(k, max(map(sum, gamma)), tuple(map(tuple, gamma)), tuple(map(sum, gamma)))
    zeta = np.atleast_2d(np.asarray(zeta, dtype=float))
    if len(zeta) == 0:
        raise ValueError("empty sample grid")
    nz = np.abs(zeta).max(axis=1)
    if np.any(nz == 0):
        raise ValueError("sample grid must avoid the origin")
    A = np.asarray(cm.exponents, dtype=float)
    rep = PhiDecayReport([], [], [])
    for N in Ns:
        xi = zeta / float(N) ** A
        phi = oscillatory_integral_phi(cm, body, N, xi)
        scaled = np.abs(xi * float(N) ** A).max(axis=1)
        rep.N.append(N)
        rep.decay_constant.append(float(np.max(np.abs(phi) * scaled ** (1.0 / cm.size))))
        rep.smallness_constant.append(float(np.max(np.abs(phi - 1) / scaled)))
    return rep


# multiplier operators ---------------------------------------------------------------


class Multiplier:
    """A 1-periodic frequency function with a declared coefficient support box."""

    def __init__(self, fn, support, d):
        self.fn = fn
        self.support = (tuple(support[0]), tuple(support[1]))
        self.d = d

    def __call__(self, xi):
        return self.fn(xi)

    @classmethod
    def constant(cls, c, d=1) -> "Multiplier":
        return cls(lambda xi: np.full(len(xi), complex(c)), ((0,) * d, (0,) * d), d)

    @classmethod
    def averaging(cls, P, body: ConvexBody = BALL, N=1) -> "Multiplier":
        K = build_kernel(P, body, N)
        return cls(lambda xi: kernel_symbol(K, xi), K.support_box(), K.d)


def multiplier_apply(m, f: GridFunction, support=None, shape=None) -> GridFunction:
    """``T[m] f`` on the box ``box(f) + support``, sampling ``m`` at the DFT nodes
    ``k / L`` of a zero-padded box. Exact for trigonometric polynomials whose
    coefficients lie in ``support``."""
    if support is None:
        support = getattr(m, "support", None)
    if support is None:
        support = ((0,) * f.d, (0,) * f.d)
    slo, shi = (np.asarray(support[0], dtype=np.int64), np.asarray(support[1], dtype=np.int64))
    wk = shi - slo + 1
    need = np.asarray(f.shape) + wk - 1
    if shape is None:
        shape = tuple(1 << int(n).bit_length() for n in need)
    shape = tuple(int(v) for v in shape)
    if any(L < n for L, n in zip(shape, need)):
        raise PaddingError(f"padding {shape} too small for output width {tuple(need)}")
    axes = [np.arange(L) for L in shape]
    K = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, f.d)
    nodes = K / np.asarray(shape, dtype=float)
    # exact integer phase for the shift of the coefficient box
    ph = (K * slo) % np.asarray(shape)
    shift = np.exp(-2j * np.pi * (ph / np.asarray(shape)).sum(axis=1))
    sym = (np.asarray(m(nodes), dtype=complex) * shift).reshape(shape)
    g = np.fft.ifftn(f.values, shape, axes=tuple(range(len(shape))))
    out = np.fft.fftn(sym * g)
    vals = out[tuple(slice(0, int(n)) for n in need)]
    lo = tuple(int(a) + int(b) for a, b in zip(f.lo, slo))
    return GridFunction(lo, vals)


# approximation by Gauss sums times integrals -----------------------------------------


@dataclass
class ApproximationReport:
    n: int
    numerators: tuple
    q: int
    offsets: np.ndarray
    errors: np.ndarray
    gauss: complex

    @property
    def max_error(self) -> float:
        return float(self.errors.max())

    @property
    def target(self) -> float:
        return 2.0 ** (-self.n / 2)


def approximation_error(n: int, numerators, q: int, offsets, gamma=None, body=BALL, chi=0.05):
    """``|m_{2^n}(a/q + o) - G(a/q) Phi_{2^n}(o)|`` over offsets ``o = 2^{-n(A - chi I)} w``
    for the scaled offsets ``w`` supplied."""
    cm = gamma if gamma is not None else canonical_gamma_set(1, 2)
    A = np.asarray(cm.exponents, dtype=float)
    w = np.atleast_2d(np.asarray(offsets, dtype=float))
    o = w * 2.0 ** (-n * (A - chi))
    a = np.asarray(numerators, dtype=float) / q
    N = 2**n
    m = exponential_sum_m(cm, body, N, o + a)
    G = gauss_sum(cm.gamma, numerators, q)
    phi = oscillatory_integral_phi(cm, body, N, o)
    return ApproximationReport(n, tuple(numerators), q, w, np.abs(m - G * phi), G)


# frequency grid specifications ---------------------------------------------------------


def parse_frequency_grid(spec: str, dim: int) -> np.ndarray:
    """``uniform:n`` (n per axis), ``list:x1,y1;x2,y2``, or
    ``arc:a1,a2/q:radius:points`` (points per axis on a cube around a/q)."""
    kind, _, rest = spec.partition(":")
    if kind == "uniform":
        n = int(rest)
        ax = -0.5 + np.arange(n) / n
        return np.stack(np.meshgrid(*([ax] * dim), indexing="ij"), axis=-1).reshape(-1, dim)
    if kind == "list":
        pts = np.array([[float(v) for v in p.split(",")] for p in rest.split(";")])
        if pts.shape[1] != dim:
            raise ValueError(f"list points must have {dim} coordinates")
        return pts
    if kind == "arc":
        frac, radius, npts = rest.split(":")
        num, q = frac.split("/")
        centre = np.array([float(v) for v in num.split(",")]) / float(q)
        if len(centre) != dim:
            raise ValueError(f"fraction must have {dim} numerators")
        ax = np.linspace(-float(radius), float(radius), int(npts))
        off = np.stack(np.meshgrid(*([ax] * dim), indexing="ij"), axis=-1).reshape(-1, dim)
        return reduce_torus(centre + off)
    raise ValueError(f"unknown frequency grid {spec!r}")
