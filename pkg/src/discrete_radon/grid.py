"""Finitely supported functions on Z^d stored on an explicit integer box."""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

_MAGIC = b"GRDF"


@dataclass
class GridFunction:
    """Values on the box ``lo <= x <= hi`` (inclusive per axis); zero elsewhere.

    ``values[i_1, ..., i_d]`` is the value at ``lo + i``.
    """

    lo: tuple
    values: np.ndarray

    def __post_init__(self):
        self.lo = tuple(int(v) for v in self.lo)
        self.values = np.asarray(self.values)
        if self.values.ndim != len(self.lo):
            raise ValueError(
                f"values have {self.values.ndim} axes but box has dimension {len(self.lo)}"
            )

    @property
    def d(self) -> int:
        return len(self.lo)

    @property
    def hi(self) -> tuple:
        return tuple(l + s - 1 for l, s in zip(self.lo, self.values.shape))

    @property
    def shape(self) -> tuple:
        return self.values.shape

    @classmethod
    def zeros(cls, lo, hi, dtype=float) -> "GridFunction":
        shape = tuple(h - l + 1 for l, h in zip(lo, hi))
        return cls(tuple(lo), np.zeros(shape, dtype=dtype))

    @classmethod
    def delta(cls, point=(0,), dtype=float) -> "GridFunction":
        point = tuple(point)
        return cls(point, np.ones((1,) * len(point), dtype=dtype))

    def __call__(self, x) -> complex:
        idx = tuple(int(a) - l for a, l in zip(x, self.lo))
        if any(i < 0 or i >= s for i, s in zip(idx, self.shape)):
            return 0.0
        return self.values[idx]

    def points(self) -> np.ndarray:
        axes = [np.arange(l, h + 1) for l, h in zip(self.lo, self.hi)]
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, self.d)

    def embed(self, lo, hi) -> "GridFunction":
        """Same function stored on a larger box (which must contain this one)."""
        lo, hi = tuple(lo), tuple(hi)
        if any(a > b for a, b in zip(lo, self.lo)) or any(a < b for a, b in zip(hi, self.hi)):
            raise ValueError("target box must contain the current box")
        out = GridFunction.zeros(lo, hi, dtype=self.values.dtype)
        sl = tuple(slice(a - b, a - b + s) for a, b, s in zip(self.lo, lo, self.shape))
        out.values[sl] = self.values
        return out

    def norm(self, p=2) -> float:
        a = np.abs(self.values).ravel()
        if p == np.inf:
            return float(a.max(initial=0.0))
        return float(np.sum(a**p) ** (1.0 / p))

    def total(self) -> complex:
        return self.values.sum()

    def __add__(self, other: "GridFunction") -> "GridFunction":
        lo, hi = hull_box([self, other])
        return GridFunction(lo, self.embed(lo, hi).values + other.embed(lo, hi).values)

    def __mul__(self, c) -> "GridFunction":
        return GridFunction(self.lo, self.values * c)

    __rmul__ = __mul__

    def allclose(self, other: "GridFunction", atol=1e-12) -> bool:
        lo, hi = hull_box([self, other])
        return bool(
            np.allclose(self.embed(lo, hi).values, other.embed(lo, hi).values, rtol=0, atol=atol)
        )

    # I/O -----------------------------------------------------------------

    def to_text(self) -> str:
        head = " ".join(map(str, (self.d, *self.lo, *self.hi)))
        v = np.asarray(self.values, dtype=complex).ravel()
        body = "\n".join(f"{z.real:.17g} {z.imag:.17g}" for z in v)
        return head + "\n" + body + "\n"

    @classmethod
    def from_text(cls, text: str) -> "GridFunction":
        lines = text.strip().splitlines()
        head = list(map(int, lines[0].split()))
        d = head[0]
        lo, hi = tuple(head[1 : 1 + d]), tuple(head[1 + d : 1 + 2 * d])
        shape = tuple(h - l + 1 for l, h in zip(lo, hi))
        pairs = np.array([list(map(float, ln.split())) for ln in lines[1:]], dtype=float)
        if pairs.shape != (int(np.prod(shape)), 2):
            raise ValueError(f"expected {int(np.prod(shape))} complex pairs, got {len(pairs)}")
        vals = (pairs[:, 0] + 1j * pairs[:, 1]).reshape(shape)
        if not np.any(pairs[:, 1]):
            vals = vals.real.copy()
        return cls(lo, vals)

    def to_bytes(self) -> bytes:
        head = _MAGIC + struct.pack(f"<q{2 * self.d}q", self.d, *self.lo, *self.hi)
        v = np.asarray(self.values, dtype="<c16").ravel()
        return head + v.view("<f8").tobytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "GridFunction":
        if data[:4] != _MAGIC:
            raise ValueError("not a binary grid file")
        (d,) = struct.unpack_from("<q", data, 4)
        box = struct.unpack_from(f"<{2 * d}q", data, 12)
        lo, hi = box[:d], box[d:]
        shape = tuple(h - l + 1 for l, h in zip(lo, hi))
        vals = np.frombuffer(data, dtype="<f8", offset=12 + 16 * d).view("<c16")
        return cls(lo, vals.reshape(shape).astype(complex))

    def save(self, path, binary=None):
        path = str(path)
        if binary is None:
            binary = path.endswith(".bin")
        if binary:
            with open(path, "wb") as fh:
                fh.write(self.to_bytes())
        else:
            with open(path, "w") as fh:
                fh.write(self.to_text())

    @classmethod
    def load(cls, path) -> "GridFunction":
        with open(path, "rb") as fh:
            data = fh.read()
        if data[:4] == _MAGIC:
            return cls.from_bytes(data)
        return cls.from_text(data.decode())


def hull_box(fns) -> tuple:
    lo = tuple(min(c) for c in zip(*(f.lo for f in fns)))
    hi = tuple(max(c) for c in zip(*(f.hi for f in fns)))
    return lo, hi
