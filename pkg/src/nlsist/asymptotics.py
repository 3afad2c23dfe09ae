"""Long-time asymptotics inside a space-time cone.

    psi(x, t) = psi_sol(x, t; sigma_d(I)) + t^{-1/2} f(x, t) + O(t^{-3/4}),
    f = m11^2 alpha1 e^{i x^2/(2t) - i kappa log 4t} + m12^2 alpha2 e^{-i x^2/(2t) + i kappa log 4t},

with xi = -x/(2t), kappa = kappa(xi), (m11, m12) the first row of the cone
soliton matrix at z = xi, and |alpha1| = |alpha2| = |kappa|^{1/2}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DiscreteSpectrum, ScatteringData, SpaceTimeCone
from .errors import NonDistinctSpeedError, OutsideConeError
from .gamma import complex_log_gamma
from .modulation import _beta, kappa, modify_constants_cone
from .solitons import evaluate_matrix, one_soliton, reconstruct_psi, solve_soliton

T_MIN = 1.0

# alpha2 = ALPHA2_SIGN * conj(alpha1); the sign comes from beta21 = -conj(beta12)
# in the local model.  +1 is the rule arg alpha2 = -arg alpha1.
ALPHA2_SIGN = -1.0


@dataclass
class AsymptoticEvaluation:
    psi_total: complex
    psi_soliton: complex
    radiation: complex
    xi: float
    kappa: float
    alpha1: complex
    alpha2: complex
    m11: complex
    m12: complex
    x: float
    t: float

    @property
    def f(self) -> complex:
        """f(x, t) itself, i.e. radiation * sqrt(t)."""
        return self.radiation * math.sqrt(self.t)


def _xi(x: float, t: float) -> float:
    return -x / (2.0 * t)


def cone_data(data: ScatteringData, cone: SpaceTimeCone, xi: float):
    """Cone-modified spectrum and its Delta = {a <= Re z_k < xi}."""
    pts = modify_constants_cone(data.discrete, data.r, cone, xi)
    spec = DiscreteSpectrum(tuple(pts))
    a, _ = cone.interval
    delta = tuple(k for k, p in enumerate(spec) if a <= p.z.real < xi)
    return spec, delta


def soliton_background(data: ScatteringData, cone: SpaceTimeCone, x: float, t: float):
    """(psi_sol, m11(xi), m12(xi)) for the cone-modified soliton data."""
    if not t > 0:
        raise ValueError("soliton background needs t > 0")
    xi = _xi(x, t)
    spec, delta = cone_data(data, cone, xi)
    sol = solve_soliton(spec, x, t, delta)
    m = evaluate_matrix(sol, xi)
    return reconstruct_psi(sol), complex(m[0, 0]), complex(m[0, 1])


def soliton_matrix(data: ScatteringData, cone: SpaceTimeCone, x: float, t: float) -> np.ndarray:
    """Full 2x2 cone soliton matrix at z = xi (for determinant checks)."""
    xi = _xi(x, t)
    spec, delta = cone_data(data, cone, xi)
    return evaluate_matrix(solve_soliton(spec, x, t, delta), xi)


def _arg_gamma_ik(k: float) -> float:
    """arg Gamma(i kappa); near the pole Gamma(w) = 1/w - euler_gamma + O(w)."""
    if abs(k) < 1e-8:
        w = 1j * k
        return float(np.angle(1 / w - np.euler_gamma))
    return complex_log_gamma(1j * k).imag


def alpha_coefficients(data: ScatteringData, xi: float, alpha2_sign: float = ALPHA2_SIGN):
    """(kappa(xi), alpha1, alpha2).

    arg alpha1 = 2 beta(xi, xi) - 4 sum_{Re z_k < xi} arg(xi - z_k) + pi/4
                 + arg Gamma(i kappa) - arg r(xi),
    i.e. alpha1 = beta12(r(xi)) T0(xi)^2.  alpha2 = -conj(alpha1).
    """
    rx = complex(data.r(xi))
    k = kappa(rx)
    if rx == 0 or k == 0:
        return 0.0, 0j, 0j
    zs = data.discrete.zs
    left = zs[zs.real < xi] if zs.size else zs
    ph = (2 * _beta(data.r, xi, complex(xi)).real
          - 4 * float(np.sum(np.angle(xi - left)))
          + math.pi / 4 + _arg_gamma_ik(k) - np.angle(rx))
    a1 = math.sqrt(-k) * complex(np.exp(1j * ph))
    return k, a1, alpha2_sign * np.conj(a1)


def radiation_term(data: ScatteringData, cone: SpaceTimeCone | None, x: float, t: float,
                   m11: complex = 1.0, m12: complex = 0.0, t_min: float = T_MIN,
                   alpha2_sign: float = ALPHA2_SIGN) -> complex:
    """t^{-1/2} f(x, t)."""
    if t < t_min:
        raise ValueError(f"asymptotic regime needs t >= {t_min}")
    xi = _xi(x, t)
    k, a1, a2 = alpha_coefficients(data, xi, alpha2_sign)
    if a1 == 0:
        return 0j
    th = x * x / (2 * t) - k * math.log(4 * t)
    f = m11 ** 2 * a1 * np.exp(1j * th) + m12 ** 2 * a2 * np.exp(-1j * th)
    return complex(f / math.sqrt(t))


def evaluate_theorem(data: ScatteringData, cone: SpaceTimeCone, x: float, t: float,
                     t_min: float = T_MIN,
                     alpha2_sign: float = ALPHA2_SIGN) -> AsymptoticEvaluation:
    """psi_sol + t^{-1/2} f with every intermediate exposed."""
    if t < t_min:
        raise ValueError(f"asymptotic regime needs t >= {t_min}")
    if not cone.contains(x, t):
        raise OutsideConeError(f"(x, t) = ({x}, {t}) is outside the cone")
    xi = _xi(x, t)
    psi_s, m11, m12 = soliton_background(data, cone, x, t)
    k, a1, a2 = alpha_coefficients(data, xi, alpha2_sign)
    rad = radiation_term(data, cone, x, t, m11, m12, t_min, alpha2_sign)
    return AsymptoticEvaluation(psi_s + rad, psi_s, rad, xi, k, a1, a2, m11, m12, x, t)


def shifted_constant(data: ScatteringData, k: int) -> complex:
    """c_k times the Blaschke and radiation factors of everything left of Re z_k."""
    pts = list(data.discrete)
    p = pts[k]
    for j, q in enumerate(pts):
        if j != k and abs(q.z.real - p.z.real) < 1e-12:
            raise NonDistinctSpeedError(f"poles {k} and {j} share the speed {-2 * p.z.real}")
    cone = SpaceTimeCone.frame(-2 * p.z.real)
    return modify_constants_cone(DiscreteSpectrum((p,) + tuple(q for j, q in enumerate(pts)
                                                                if q.z.real < p.z.real)),
                                 data.r, cone, p.z.real)[0].c


def phase_shift(data: ScatteringData, k: int):
    """(x0, phi0) of the asymptotic soliton k.

    x0 = log|c^_k/(2 eta_k)|/(2 eta_k) and phi0 = pi/2 + arg c^_k, the centre
    and phase of the sech profile in the frame x + 2 Re(z_k) t = O(1).
    """
    p = data.discrete[k]
    c = shifted_constant(data, k)
    return math.log(abs(c) / (2 * p.eta)) / (2 * p.eta), math.pi / 2 + float(np.angle(c))


def single_soliton_frame(data: ScatteringData, k: int, x, t):
    """Shifted one-soliton for pole k."""
    p = data.discrete[k]
    return one_soliton(p.z, shifted_constant(data, k), x, t)


def distinct_speed_sum(data: ScatteringData, x, t):
    """Sum of the single-soliton frame profiles over all poles."""
    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape, dtype=complex)
    for k in range(len(data.discrete)):
        out = out + single_soliton_frame(data, k, x, t)
    return out if out.ndim else complex(out)
