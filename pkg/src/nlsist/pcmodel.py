"""Parabolic cylinder model problem at the stationary point.

Jump contour: four rays Sigma_1..Sigma_4 at angles pi/4, 3pi/4, -3pi/4, -pi/4,
oriented left to right.  Sectors Omega_1..Omega_6 are taken counterclockwise
starting from the positive real axis (Omega_1 is 0 < arg < pi/4).  The
explicit solution is

    M(zeta) = Phi(zeta) P(zeta) exp(i zeta^2/4 sigma3) zeta^{-i kappa sigma3}

with Phi built from Weber functions D_a and P piecewise constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.special import rgamma

from .errors import ContourEvaluationError, DegenerateReflectionError
from .gamma import complex_log_gamma
from .modulation import kappa as _kappa

EPS = np.finfo(float).eps
SQRT_2PI = math.sqrt(2 * math.pi)
PCF_ZMAX = 30.0
PCF_AMAX = 5.0
ODE_OUTER = 12.0
ODE_SWITCH = 1e-10


# ------------------------------------------------------------------ D_a(z)

def _kummer(a, b, x, nmax=400):
    """1F1(a; b; x) and the sum of term moduli (for a cancellation estimate)."""
    term = 1.0 + 0j
    s = term
    mag = 1.0
    for n in range(nmax):
        term = term * (a + n) / (b + n) * x / (n + 1)
        s += term
        mag += abs(term)
        if abs(term) < EPS * abs(s) * 1e-2 and n > abs(x):
            break
    return s, mag


def _pcf_origin(a):
    """D_a(0) and D_a'(0)."""
    d0 = 2 ** (a / 2) * math.sqrt(math.pi) * rgamma((1 - a) / 2)
    d1 = -2 ** ((a + 1) / 2) * math.sqrt(math.pi) * rgamma(-a / 2)
    return complex(d0), complex(d1)


def _pcf_series(a, z):
    """Even/odd Kummer representation with an estimate of its rounding error."""
    x = z * z / 2
    pref = np.exp(-z * z / 4)
    d0, d1 = _pcf_origin(a)
    m1, g1 = _kummer(-a / 2, 0.5, x)
    m2, g2 = _kummer((1 - a) / 2, 1.5, x)
    val = pref * (d0 * m1 + d1 * z * m2)
    err = 8 * EPS * abs(pref) * (abs(d0) * g1 + abs(d1 * z) * g2) + EPS * abs(val)
    return complex(val), float(err)


def _pcf_asym(a, z):
    """Poincare series e^{-z^2/4} z^a sum (-1)^s (-a)_{2s}/(s! (2 z^2)^s), optimally truncated."""
    w = 1.0 / (2 * z * z)
    term = 1.0 + 0j
    s = term
    last = abs(term)
    err = 0.0
    for k in range(200):
        term = -term * (-a + 2 * k) * (-a + 2 * k + 1) / (k + 1) * w
        at = abs(term)
        if at > last and k > 1:
            err = last
            break
        s += term
        if at < EPS * abs(s) * 1e-2:
            err = at
            break
        last = at
    pref = np.exp(-z * z / 4 + a * np.log(z))
    return complex(pref * s), float(abs(pref) * (err + EPS * abs(s)))


def _pcf_large(a, z):
    """Large |z|: direct series for |arg z| <= pi/2, connection formula beyond."""
    if abs(np.angle(z)) <= math.pi / 2:
        return _pcf_asym(a, z)
    # D_a(z) = e^{+-i pi a} D_a(-z) + sqrt(2 pi)/Gamma(-a) e^{+-i pi (a+1)/2} D_{-a-1}(-+ i z)
    sgn = 1 if z.imag >= 0 else -1
    v1, e1 = _pcf_asym(a, -z)
    v2, e2 = _pcf_asym(-a - 1, -sgn * 1j * z)
    c1 = np.exp(sgn * 1j * math.pi * a)
    c2 = SQRT_2PI * rgamma(-a) * np.exp(sgn * 1j * math.pi * (a + 1) / 2)
    return complex(c1 * v1 + c2 * v2), float(abs(c1) * e1 + abs(c2) * e2)


def pcf_D(a: complex, z: complex, return_error: bool = False):
    """Weber parabolic cylinder function D_a(z).

    Solves D'' + (1/2 - z^2/4 + a) D = 0 with D_a(z) ~ z^a e^{-z^2/4} for
    |arg z| < 3pi/4.  Supported region |z| <= 30, |a| <= 5.  The Kummer
    series and the asymptotic representation each carry an error estimate
    and the more accurate one is returned; in the band where both lose
    accuracy the ODE is integrated radially instead.
    """
    a = complex(a)
    z = complex(z)
    if abs(z) > PCF_ZMAX or abs(a) > PCF_AMAX:
        raise ValueError(f"pcf_D supports |z| <= {PCF_ZMAX}, |a| <= {PCF_AMAX}")
    best = _pcf_best(a, z)
    if best[1] > ODE_SWITCH * abs(best[0]):
        cand = _pcf_ode(a, z)
        if cand[1] < best[1]:
            best = cand
    return best if return_error else best[0]


def _pcf_best(a, z):
    best = None
    if abs(z) <= 9.0:
        best = _pcf_series(a, z)
    if abs(z) >= 4.0:
        cand = _pcf_large(a, z)
        if best is None or cand[1] < best[1]:
            best = cand
    return best


def _pcf_ode(a, z):
    """Radial ODE continuation for the band where neither series is accurate.

    D_a is recessive for |arg z| < pi/4 and dominant beyond, so it is
    integrated inward from the asymptotic regime in the first case and
    outward from the exact values at z = 0 in the second; both directions
    are stable.
    """
    u = z / abs(z)
    if abs(np.angle(z)) < math.pi / 4:
        rho0 = ODE_OUTER
        z0 = rho0 * u
        d0, e0 = _pcf_asym(a, z0)
        d1, e1 = _pcf_asym(a + 1, z0)
        dp0 = z0 / 2 * d0 - d1          # D_a' = (z/2) D_a - D_{a+1}
        rel0 = (e0 + e1) / max(abs(d0), 1e-300)
    else:
        rho0 = 0.0
        d0, dp0 = _pcf_origin(a)
        rel0 = 4 * EPS
    c = 0.5 + a

    def rhs(rho, y):
        w = rho * u
        return [u * y[1], u * (w * w / 4 - c) * y[0]]

    sol = solve_ivp(rhs, (rho0, abs(z)), [d0, dp0], method="DOP853",
                    rtol=1e-13, atol=1e-300)
    val = complex(sol.y[0, -1])
    return val, (1e-11 + rel0) * abs(val)


# ------------------------------------------------------------ model problem

@dataclass(frozen=True)
class PCConstants:
    r0: complex
    kappa: float
    beta12: complex
    beta21: complex


def pc_constants(r0: complex) -> PCConstants:
    """beta12 = sqrt(2pi) e^{i pi/4} e^{-pi kappa/2}/(r Gamma(-i kappa)), beta21 = kappa/beta12."""
    r0 = complex(r0)
    if r0 == 0:
        raise DegenerateReflectionError("parabolic cylinder model needs r0 != 0")
    k = _kappa(r0)
    lg = complex_log_gamma(-1j * k)
    b12 = complex(SQRT_2PI * np.exp(1j * math.pi / 4 - math.pi * k / 2 - lg) / r0)
    return PCConstants(r0, k, b12, k / b12)


RAY_ANGLES = {1: math.pi / 4, 2: 3 * math.pi / 4, 3: -3 * math.pi / 4, 4: -math.pi / 4}


def sector(zeta: complex, tol: float = 1e-14) -> int:
    """Index 1..6 of the open sector holding zeta."""
    zeta = complex(zeta)
    if abs(zeta) == 0:
        raise ContourEvaluationError("zeta = 0 is the self-intersection point")
    ph = math.atan2(zeta.imag, zeta.real)
    for ang in RAY_ANGLES.values():
        if abs(ph - ang) < tol:
            raise ContourEvaluationError(f"zeta = {zeta} lies on a jump ray")
    q = math.pi / 4
    if 0 <= ph < q:
        return 1
    if q < ph < 3 * q:
        return 2
    if ph > 3 * q:
        return 3
    if ph < -3 * q:
        return 4
    if ph < -q:
        return 5
    return 6


def _Phi(zeta, c: PCConstants):
    k = c.kappa
    ik = 1j * k
    e = np.exp
    pi = math.pi
    D = pcf_D
    if zeta.imag > 0:
        return np.array([
            [e(-3 * pi * k / 4) * D(ik, e(-3j * pi / 4) * zeta),
             -1j * c.beta12 * e(pi / 4 * (k - 1j)) * D(-ik - 1, e(-1j * pi / 4) * zeta)],
            [1j * c.beta21 * e(-3 * pi / 4 * (k + 1j)) * D(ik - 1, e(-3j * pi / 4) * zeta),
             e(pi * k / 4) * D(-ik, e(-1j * pi / 4) * zeta)]])
    return np.array([
        [e(pi * k / 4) * D(ik, e(1j * pi / 4) * zeta),
         -1j * c.beta12 * e(-3 * pi / 4 * (k - 1j)) * D(-ik - 1, e(3j * pi / 4) * zeta)],
        [1j * c.beta21 * e(pi / 4 * (k + 1j)) * D(ik - 1, e(1j * pi / 4) * zeta),
         e(-3 * pi * k / 4) * D(-ik, e(3j * pi / 4) * zeta)]])


def _P(j, c: PCConstants):
    r = c.r0
    rs = np.conj(r)
    q = 1 + abs(r) ** 2
    I = np.eye(2, dtype=complex)
    if j == 1:
        return np.array([[1, 0], [-r, 1]], dtype=complex)
    if j == 3:
        return np.array([[1, -rs / q], [0, 1]], dtype=complex)
    if j == 4:
        return np.array([[1, 0], [r / q, 1]], dtype=complex)
    if j == 6:
        return np.array([[1, rs], [0, 1]], dtype=complex)
    return I


def evaluate_M_PC(zeta: complex, r0, *, constants: PCConstants | None = None,
                  _sector: int | None = None) -> np.ndarray:
    """Explicit model solution M^PC(zeta) for zeta off the four rays."""
    c = constants or pc_constants(r0)
    zeta = complex(zeta)
    j = sector(zeta) if _sector is None else _sector
    if abs(zeta) > 20.0 + 1e-9:
        raise ValueError("evaluate_M_PC supports |zeta| <= 20")
    ik = 1j * c.kappa
    lz = np.log(zeta)
    E = np.diag([np.exp(1j * zeta ** 2 / 4 - ik * lz), np.exp(-1j * zeta ** 2 / 4 + ik * lz)])
    return _Phi(zeta, c) @ _P(j, c) @ E


def jump_matrix(zeta: complex, r0, j: int) -> np.ndarray:
    """V^PC on ray Sigma_j."""
    r = complex(r0)
    k = _kappa(r)
    ik = 1j * k
    rs = np.conj(r)
    q = 1 + abs(r) ** 2
    zeta = complex(zeta)
    lz = np.log(zeta)
    ep = np.exp(1j * zeta ** 2 / 2 - 2 * ik * lz)   # zeta^{-2 i kappa} e^{i zeta^2/2}
    em = np.exp(-1j * zeta ** 2 / 2 + 2 * ik * lz)
    if j == 1:
        return np.array([[1, 0], [r * ep, 1]])
    if j == 2:
        return np.array([[1, rs / q * em], [0, 1]])
    if j == 3:
        return np.array([[1, 0], [r / q * ep, 1]])
    if j == 4:
        return np.array([[1, rs * em], [0, 1]])
    raise ValueError("ray index must be 1..4")


def check_jump(zeta: complex, r0, j: int | None = None, eps: float = 1e-9) -> float:
    """‖M_-^{-1} M_+ - V‖ at a point of ray Sigma_j (+ side is left of the orientation)."""
    zeta = complex(zeta)
    c = pc_constants(r0)
    if j is None:
        ph = math.atan2(zeta.imag, zeta.real)
        j = min(RAY_ANGLES, key=lambda k: abs(RAY_ANGLES[k] - ph))
    ang = RAY_ANGLES[j]
    u = complex(math.cos(ang), math.sin(ang))
    rad = abs(zeta)
    z0 = rad * u
    # orientation is left to right: direction u for rays 1, 4 and -u for 2, 3
    d = u if math.cos(ang) > 0 else -u
    n = 1j * d
    # sector on each side, fixed combinatorially to avoid rounding at the ray
    plus_sector = {1: 2, 2: 2, 3: 4, 4: 6}[j]
    minus_sector = {1: 1, 2: 3, 3: 5, 4: 5}[j]
    Mp = evaluate_M_PC(z0 + eps * n * rad, r0, constants=c, _sector=plus_sector)
    Mm = evaluate_M_PC(z0 - eps * n * rad, r0, constants=c, _sector=minus_sector)
    V = jump_matrix(z0, r0, j)
    return float(np.max(np.abs(np.linalg.solve(Mm, Mp) - V)))


def asymptotic_coefficient(c: PCConstants) -> np.ndarray:
    """lim zeta (M^PC - I) = [[0, -i beta12], [i beta21, 0]]."""
    return np.array([[0, -1j * c.beta12], [1j * c.beta21, 0]])


def residual_table(r0, radii=(0.1, 0.25, 0.5, 1, 2, 3, 4, 5, 6, 8)):
    """Rows (ray, radius, residual) over all four rays."""
    return [(j, float(rad), check_jump(rad * np.exp(1j * RAY_ANGLES[j]), r0, j))
            for j in RAY_ANGLES for rad in radii]
