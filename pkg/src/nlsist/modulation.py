"""Partial transmission coefficient T(z, xi) and the soliton data modulation.

    T(z, xi) = prod_{Re z_k < xi} (z - conj z_k)/(z - z_k)
               * exp(i int_{-inf}^{xi} kappa(s)/(s - z) ds),
    kappa(s) = -log(1 + |r(s)|^2) / (2 pi).

Cauchy integrals are evaluated with scipy's adaptive Gauss-Kronrod (quad)
after subtracting kappa at the nearest point of the cut, whose contribution
is then added back in closed form, so evaluation stays accurate up to the
cut.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .core import DiscreteSpectrum, ReflectionData, SpaceTimeCone, SpectralPoint
from .errors import ContourEvaluationError, IntegrationError
from .solitons import blaschke_sq

QUAD_OPTS = dict(limit=2000, epsabs=1e-13, epsrel=1e-12)
QUAD_FAIL = 1e-6


def kappa(r_at_s) -> np.ndarray | float:
    """kappa = -log(1 + |r|^2)/(2 pi) (elementwise)."""
    out = -np.log1p(np.abs(r_at_s) ** 2) / (2 * np.pi)
    return float(out) if np.ndim(out) == 0 else out


def partition(spec: DiscreteSpectrum, xi: float):
    """(Delta^-, Delta^+) index tuples: Re z_k < xi versus Re z_k >= xi."""
    minus = tuple(k for k, p in enumerate(spec) if p.z.real < xi)
    plus = tuple(k for k, p in enumerate(spec) if p.z.real >= xi)
    return minus, plus


def _quad_c(f, a, b, points=None):
    pts = [p for p in (points or []) if a < p < b]
    # QUADPACK flags roundoff at these tight tolerances; judge by its error estimate
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        val, err = quad(f, a, b, points=pts or None, complex_func=True, **QUAD_OPTS)
    err = abs(err)  # complex_func returns the real and imaginary estimates as a complex
    if not np.isfinite(val) or err > QUAD_FAIL * (1 + abs(val)):
        raise IntegrationError(f"Cauchy integral did not converge (error estimate {err:.1e})")
    return val


def cauchy_log_integral(r: ReflectionData, z: complex, upper: float) -> complex:
    """int_{-inf}^{upper} log(1 + |r(s)|^2)/(s - z) ds for z off the ray.

    kappa-type integrands are supported on r's support; the value at the
    nearest point s0 is subtracted and its integral added analytically.
    """
    if r.is_zero:
        return 0j
    lo, hi = r.support
    b = min(hi, upper)
    if b <= lo:
        return 0j
    z = complex(z)
    s0 = min(max(z.real, lo), b)
    f0 = float(r.log1p_abs2(s0))
    if abs(z - s0) == 0:
        raise ContourEvaluationError(f"z = {z} lies on the integration contour")

    def g(s):
        return (float(r.log1p_abs2(s)) - f0) / (s - z)

    val = _quad_c(g, lo, b, points=[s0])
    # exact piece: f0 * int_lo^b ds/(s - z)
    val += f0 * (np.log(b - z) - np.log(lo - z))
    return complex(val)


@dataclass
class PartialTransmission:
    xi: float
    r: ReflectionData
    spec: DiscreteSpectrum = field(default_factory=DiscreteSpectrum)

    @property
    def poles_left(self) -> np.ndarray:
        zs = self.spec.zs
        return zs[zs.real < self.xi] if zs.size else zs

    def kappa_xi(self) -> float:
        return kappa(self.r(self.xi))

    def log_T(self, z: complex) -> complex:
        """log T(z) on the branch continuous off (-inf, xi]."""
        z = complex(z)
        if z.imag == 0 and z.real <= self.xi and not self.r.is_zero \
                and self.r.support[0] <= z.real:
            raise ContourEvaluationError(f"z = {z} lies on the cut (-inf, xi]")
        zl = self.poles_left
        if zl.size and np.min(np.abs(z - zl)) < 1e-14:
            raise ContourEvaluationError(f"z = {z} is a pole of T")
        val = np.sum(np.log((z - np.conj(zl)) / (z - zl))) if zl.size else 0j
        # i int kappa/(s - z) = -(i/2pi) int log(1+|r|^2)/(s - z)
        val += -1j / (2 * np.pi) * cauchy_log_integral(self.r, z, self.xi)
        return complex(val)

    def __call__(self, z: complex) -> complex:
        return complex(np.exp(self.log_T(z)))

    def beta(self, z: complex) -> complex:
        """beta(z, xi) = -kappa(xi) log(z - xi + 1) + int (kappa - chi kappa(xi))/(s - z) ds."""
        return _beta(self.r, self.xi, complex(z))

    def T0(self) -> complex:
        return T0(self)

    def large_z_coefficient(self) -> complex:
        """lim z (T(z) - 1) = i [2 sum Im z_k + (1/2 pi) int log(1 + |r|^2)]."""
        zl = self.poles_left
        mass = 0.0
        if not self.r.is_zero:
            lo, hi = self.r.support
            b = min(hi, self.xi)
            if b > lo:
                mass = quad(lambda s: float(self.r.log1p_abs2(s)), lo, b, **QUAD_OPTS)[0]
        return 1j * (2 * float(np.sum(zl.imag)) + mass / (2 * np.pi))


def evaluate_T(pt: PartialTransmission, z: complex) -> complex:
    return pt(z)


def _beta(r: ReflectionData, xi: float, z: complex) -> complex:
    kxi = kappa(r(xi))
    lo, hi = r.support
    val = 0j
    if z != xi:
        val += -kxi * np.log(z - xi + 1)
    if r.is_zero:
        return val
    k = lambda s: kappa(r(s))
    # outer part: int_{-inf}^{xi-1} kappa/(s - z)
    b1 = min(hi, xi - 1.0)
    if b1 > lo:
        val += _quad_c(lambda s: k(s) / (s - z), lo, b1)
    # inner part over (xi - 1, xi): kappa(s) - kappa(xi), regular at s = xi
    a2 = xi - 1.0
    if z == xi:
        g = lambda s: (k(s) - kxi) / (s - xi) if s != xi else 0.0
        val += _quad_c(g, a2, xi)
    else:
        val += _quad_c(lambda s: (k(s) - kxi) / (s - z), a2, xi, points=[z.real])
    return complex(val)


def beta(pt: PartialTransmission, z=None) -> complex:
    """beta(z, xi); z defaults to xi (the regularized saddle-point value)."""
    return _beta(pt.r, pt.xi, complex(pt.xi if z is None else z))


def T0(pt: PartialTransmission) -> complex:
    """T0(xi) = exp(i (beta(xi, xi) - 2 sum_{Re z_k < xi} arg(xi - z_k)))."""
    zl = pt.poles_left
    ph = _beta(pt.r, pt.xi, complex(pt.xi)).real - 2 * float(np.sum(np.angle(pt.xi - zl)))
    return complex(np.exp(1j * ph))


def holder_gap(pt: PartialTransmission, z: complex) -> float:
    """|T(z) - T0 (z - xi)^{i kappa(xi)}| with the principal power."""
    kx = pt.kappa_xi()
    return abs(pt(z) - T0(pt) * np.exp(1j * kx * np.log(complex(z) - pt.xi)))


def radiation_factor(r: ReflectionData, z: complex, xi: float) -> complex:
    """exp((i/pi) int_{-inf}^{xi} log(1 + |r(s)|^2)/(s - z) ds)."""
    return complex(np.exp(1j / np.pi * cauchy_log_integral(r, z, xi)))


def modify_constants_outer(spec: DiscreteSpectrum, r: ReflectionData, xi: float):
    """c~_k = c_k exp((i/pi) int_{-inf}^{xi} log(1 + |r|^2)/(s - z_k) ds)."""
    return [SpectralPoint(p.z, p.c * radiation_factor(r, p.z, xi)) for p in spec]


def modify_constants_cone(spec: DiscreteSpectrum, r: ReflectionData, cone: SpaceTimeCone,
                          xi: float):
    """c^_k(I) for the poles with Re z_k in I = [a, b].

    Blaschke-squared factors from every pole left of a, times the radiation
    factor integrated up to the saddle xi.
    """
    a, b = cone.interval
    left = [p for p in spec if p.z.real < a]
    out = []
    for p in spec:
        if not (a <= p.z.real <= b):
            continue
        c = p.c
        for q in left:
            c *= blaschke_sq(p.z, q.z)
        c *= radiation_factor(r, p.z, xi)
        out.append(SpectralPoint(p.z, c))
    return out
