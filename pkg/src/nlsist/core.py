"""Domain types shared by every module, plus their file formats.

ScatteringData JSON::

    {"reflection": {"kind": "zero" | "samples" | "rational", ...},
     "discrete": [{"re": .., "im": .., "c_re": .., "c_im": ..}, ...]}

ComplexField CSV: header ``x,re,im`` with one row per grid point.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DuplicatePoleError

DUPLICATE_TOL = 1e-10


@dataclass(frozen=True)
class SpectralPoint:
    """Discrete eigenvalue ``z`` (Im z > 0) with its norming constant ``c``."""

    z: complex
    c: complex

    def __post_init__(self):
        object.__setattr__(self, "z", complex(self.z))
        object.__setattr__(self, "c", complex(self.c))
        if not self.z.imag > 0:
            raise ValueError(f"eigenvalue must lie in the upper half plane, got {self.z}")
        if self.c == 0:
            raise ValueError("norming constant must be nonzero")

    @property
    def xi(self) -> float:
        return self.z.real

    @property
    def eta(self) -> float:
        return self.z.imag


def _inf_dist(a: complex, b: complex) -> float:
    return max(abs(a.real - b.real), abs(a.imag - b.imag))


@dataclass(frozen=True)
class DiscreteSpectrum:
    """Finite set of distinct spectral points."""

    points: tuple[SpectralPoint, ...] = ()

    def __post_init__(self):
        pts = tuple(self.points)
        object.__setattr__(self, "points", pts)
        for i in range(len(pts)):
            for j in range(i):
                if _inf_dist(pts[i].z, pts[j].z) <= DUPLICATE_TOL:
                    raise DuplicatePoleError(f"duplicate eigenvalue {pts[i].z}")

    @classmethod
    def from_pairs(cls, zs: Sequence[complex], cs: Sequence[complex]) -> "DiscreteSpectrum":
        return cls(tuple(SpectralPoint(z, c) for z, c in zip(zs, cs)))

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __getitem__(self, k):
        return self.points[k]

    @property
    def zs(self) -> np.ndarray:
        return np.array([p.z for p in self.points], dtype=complex)

    @property
    def cs(self) -> np.ndarray:
        return np.array([p.c for p in self.points], dtype=complex)

    @property
    def mu(self) -> float:
        """Distance from the spectrum to the real axis."""
        if not self.points:
            return float("inf")
        return min(p.eta for p in self.points)

    @property
    def rho(self) -> float:
        """min(mu, minimal pairwise infinity-norm distance)."""
        d = self.mu
        pts = self.points
        for i in range(len(pts)):
            for j in range(i):
                d = min(d, _inf_dist(pts[i].z, pts[j].z))
        return d


class ReflectionData:
    """Reflection coefficient r on the real line.

    ``kind`` is one of ``"zero"``, ``"samples"`` (uniform grid, cubic
    interpolation), ``"function"`` (closed-form callable) or ``"rational"``
    (ratio of polynomials, the serializable closed form).  Values outside
    ``support`` are exactly zero.
    """

    def __init__(self, kind="zero", support=(0.0, 0.0), *, s0=None, ds=None,
                 values=None, func: Callable | None = None, num=None, den=None):
        if kind not in ("zero", "samples", "function", "rational"):
            raise ValueError(f"unknown reflection kind {kind!r}")
        self.kind = kind
        self.support = (float(support[0]), float(support[1]))
        self.func = func
        self._spline = None
        if kind == "samples":
            values = np.asarray(values, dtype=complex)
            if values.size < 4:
                raise ValueError("need at least 4 samples for cubic interpolation")
            self.s0 = float(s0)
            self.ds = float(ds)
            self.values = values
            grid = self.s0 + self.ds * np.arange(values.size)
            self.support = (grid[0], grid[-1])
            self._spline = CubicSpline(grid, values)
        elif kind == "function":
            if func is None:
                raise ValueError("function kind needs an evaluator")
        elif kind == "rational":
            self.num = np.asarray(num, dtype=complex)
            self.den = np.asarray(den, dtype=complex)
            self.func = lambda s: np.polyval(self.num, s) / np.polyval(self.den, s)

    @classmethod
    def zero(cls):
        return cls("zero")

    @classmethod
    def from_function(cls, func, support):
        return cls("function", support, func=func)

    @classmethod
    def from_samples(cls, s0, ds, values):
        return cls("samples", s0=s0, ds=ds, values=values)

    @property
    def is_zero(self) -> bool:
        return self.kind == "zero"

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        if self.kind == "zero":
            return np.zeros(s.shape, dtype=complex)
        lo, hi = self.support
        inside = (s >= lo) & (s <= hi)
        out = np.zeros(s.shape, dtype=complex)
        if np.any(inside):
            if self.kind == "samples":
                out[inside] = self._spline(s[inside])
            else:
                out[inside] = np.broadcast_to(np.asarray(self.func(s[inside]), dtype=complex),
                                              s[inside].shape)
        return out

    def log1p_abs2(self, s):
        """log(1 + |r(s)|^2)."""
        return np.log1p(np.abs(self(s)) ** 2)

    def to_dict(self) -> dict:
        if self.kind == "zero":
            return {"kind": "zero"}
        if self.kind == "samples":
            return {"kind": "samples", "s0": self.s0, "ds": self.ds,
                    "re": [float(v) for v in self.values.real],
                    "im": [float(v) for v in self.values.imag]}
        if self.kind == "rational":
            return {"kind": "rational", "support": list(self.support),
                    "num_re": self.num.real.tolist(), "num_im": self.num.imag.tolist(),
                    "den_re": self.den.real.tolist(), "den_im": self.den.imag.tolist()}
        raise ValueError("closed-form function reflection data is not serializable; "
                         "sample it first")

    @classmethod
    def from_dict(cls, d: dict) -> "ReflectionData":
        kind = d.get("kind", "zero")
        if kind == "zero":
            return cls.zero()
        if kind == "samples":
            vals = np.asarray(d["re"]) + 1j * np.asarray(d["im"])
            return cls.from_samples(d["s0"], d["ds"], vals)
        if kind == "rational":
            num = np.asarray(d["num_re"]) + 1j * np.asarray(d["num_im"])
            den = np.asarray(d["den_re"]) + 1j * np.asarray(d["den_im"])
            return cls("rational", d["support"], num=num, den=den)
        raise ValueError(f"unknown reflection kind {kind!r}")


@dataclass
class ScatteringData:
    r: ReflectionData = field(default_factory=ReflectionData.zero)
    discrete: DiscreteSpectrum = field(default_factory=DiscreteSpectrum)
    extra: dict = field(default_factory=dict)

    def to_json(self) -> str:
        doc = {"reflection": self.r.to_dict(),
               "discrete": [{"re": p.z.real, "im": p.z.imag, "c_re": p.c.real, "c_im": p.c.imag}
                            for p in self.discrete]}
        doc.update(self.extra)
        return json.dumps(doc, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ScatteringData":
        doc = json.loads(text)
        r = ReflectionData.from_dict(doc.get("reflection", {"kind": "zero"}))
        pts = tuple(SpectralPoint(complex(p["re"], p["im"]), complex(p["c_re"], p["c_im"]))
                    for p in doc.get("discrete", []))
        extra = {k: v for k, v in doc.items() if k not in ("reflection", "discrete")}
        return cls(r, DiscreteSpectrum(pts), extra)


@dataclass(frozen=True)
class SpaceTimeCone:
    """Region x1 + v1 t <= x <= x2 + v2 t, with spectral interval [-v2/2, -v1/2]."""

    x1: float
    x2: float
    v1: float
    v2: float

    def __post_init__(self):
        if self.v1 > self.v2 or self.x1 > self.x2:
            raise ValueError("cone requires v1 <= v2 and x1 <= x2")

    @classmethod
    def frame(cls, v: float, x0: float = 0.0, width: float = 0.0) -> "SpaceTimeCone":
        """Degenerate cone around the characteristic x = x0 + v t."""
        return cls(x0 - width, x0 + width, v, v)

    @property
    def interval(self) -> tuple[float, float]:
        return (-self.v2 / 2.0, -self.v1 / 2.0)

    def contains(self, x: float, t: float) -> bool:
        return self.x1 + self.v1 * t <= x <= self.x2 + self.v2 * t

    def in_interval(self, s: float) -> bool:
        a, b = self.interval
        return a <= s <= b


@dataclass
class ComplexField:
    """Samples of psi(., t) on the uniform grid x_min + j dx."""

    x_min: float
    dx: float
    t: float
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if not self.dx > 0:
            raise ValueError("grid spacing must be positive")
        if self.values.size < 2:
            raise ValueError("field needs at least two samples")

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.values.size)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("x,re,im\n")
        for xv, v in zip(self.x, self.values):
            buf.write(f"{float(xv)!r},{float(v.real)!r},{float(v.imag)!r}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, t: float = 0.0) -> "ComplexField":
        rows = list(csv.DictReader(io.StringIO(text)))
        x = np.array([float(r["x"]) for r in rows])
        v = np.array([complex(float(r["re"]), float(r["im"])) for r in rows])
        dx = (x[-1] - x[0]) / (x.size - 1)
        return cls(float(x[0]), float(dx), t, v)
