"""Reflectionless (N-soliton) solutions from the meromorphic residue problem.

The solution matrix has simple poles at z_k and conj(z_k).  With a subset
Delta of the poles renormalized (m^Delta = m a_Delta^{sigma3}) the columns are

    col1 = e1 + sum_{nabla} (alpha_k, beta_k)/(z - z_k)
              + sum_{Delta} (conj alpha_k, -conj beta_k)/(z - conj z_k)
    col2 = e2 + sum_{nabla} (-conj beta_k, conj alpha_k)/(z - conj z_k)
              + sum_{Delta} (beta_k, alpha_k)/(z - z_k)

and the residue conditions read (alpha_j, beta_j) = g_j col2(z_j) for j in
nabla and (beta_j, alpha_j) = h_j col1(z_j) for j in Delta, with
g_j = gamma_j a_Delta(z_j)^2 and h_j = 1/(gamma_j a_Delta'(z_j)^2).
Delta = {} is the standard normalization, psi = -2i sum conj(beta_k).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .core import DiscreteSpectrum, SpaceTimeCone, SpectralPoint
from .errors import ConditioningWarning, ContourEvaluationError, DuplicatePoleError

COND_LIMIT = 1e12
LOG_OVERFLOW = 700.0


def log_gamma_factor(p: SpectralPoint, x: float, t: float) -> complex:
    """log gamma_k(x, t) = log c_k + 2i (t z_k^2 + x z_k)."""
    return np.log(p.c) + 2j * (t * p.z ** 2 + x * p.z)


def gamma_factor(p: SpectralPoint, x: float, t: float) -> complex:
    """gamma_k(x, t) = c_k exp(2i (t z_k^2 + x z_k))."""
    lg = log_gamma_factor(p, x, t)
    if lg.real > LOG_OVERFLOW:
        raise OverflowError(f"gamma factor overflows (log modulus {lg.real:.1f}); "
                            "use log_gamma_factor")
    return complex(np.exp(lg))


def one_soliton(z: complex, c: complex, x, t):
    """Closed-form single soliton for the data {(z, c)}."""
    xi, eta = z.real, z.imag
    x = np.asarray(x, dtype=float)
    x0 = np.log(abs(c) / (2 * eta)) / (2 * eta)
    phi0 = np.pi / 2 + np.angle(c)
    return (2 * eta / np.cosh(2 * eta * (x + 2 * xi * t - x0))
            * np.exp(-2j * (xi * x + (xi ** 2 - eta ** 2) * t)) * np.exp(-1j * phi0))


@dataclass
class SolitonSystem:
    """Standard-normalization system in the symmetric sqrt(gamma) scaling.

    ``matrix`` is [[I, -i conj(A)], [-i A, I]] acting on
    (alpha_hat, conj(beta_hat)); A is Hermitian positive definite.
    """

    N: int
    gamma_sqrt: np.ndarray
    A: np.ndarray
    matrix: np.ndarray
    rhs: np.ndarray
    delta: tuple = ()

    def solve(self):
        if self.N == 0:
            return np.zeros(0, complex), np.zeros(0, complex)
        u = np.linalg.solve(self.matrix, self.rhs)
        return u[:self.N], u[self.N:]


def _check_distinct(zs):
    for i in range(len(zs)):
        for j in range(i):
            if max(abs(zs[i].real - zs[j].real), abs(zs[i].imag - zs[j].imag)) <= 1e-10:
                raise DuplicatePoleError(f"duplicate pole {zs[i]}")


def assemble_standard(spec: DiscreteSpectrum, x: float, t: float) -> SolitonSystem:
    pts = list(spec)
    N = len(pts)
    zs = np.array([p.z for p in pts], dtype=complex)
    _check_distinct(zs)
    if N == 0:
        e = np.zeros((0, 0), complex)
        return SolitonSystem(0, np.zeros(0, complex), e, e, np.zeros(0, complex))
    lg = np.array([log_gamma_factor(p, x, t) for p in pts])
    gs = np.exp(lg / 2)  # principal square root, reused everywhere
    A = -1j * np.conj(gs)[:, None] * gs[None, :] / (np.conj(zs)[:, None] - zs[None, :])
    I = np.eye(N)
    M = np.block([[I, -1j * np.conj(A)], [-1j * A, I]])
    rhs = np.concatenate([np.zeros(N, complex), np.conj(gs)])
    return SolitonSystem(N, gs, A, M, rhs)


@dataclass
class MeromorphicSolution:
    """Coefficients alpha_k, beta_k of the partial-fraction representation."""

    zs: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    delta: tuple
    x: float
    t: float
    cond: float = 1.0
    residual: float = 0.0

    @property
    def in_delta(self) -> np.ndarray:
        m = np.zeros(self.zs.size, dtype=bool)
        m[list(self.delta)] = True
        return m


def default_delta(spec: DiscreteSpectrum, x: float, t: float) -> tuple:
    """Poles whose exponentials grow at (x, t): Re z_k < -x/(2t).

    At t ~ 0 the sign of x decides: every gamma_k is large for x << 0.
    """
    zs = spec.zs
    if t > 1e-9:
        xi = -x / (2 * t)
        return tuple(int(k) for k in np.flatnonzero(zs.real < xi))
    return tuple(range(len(zs))) if x < 0 else ()


def _log_a_delta(z, zs, delta):
    return sum(np.log((z - zs[k]) / (z - np.conj(zs[k]))) for k in delta) if delta else 0.0


def _log_a_delta_prime(k, zs, delta):
    """log a_Delta'(z_k) for k in Delta."""
    zk = zs[k]
    val = -np.log(zk - np.conj(zk))
    for j in delta:
        if j != k:
            val += np.log((zk - zs[j]) / (zk - np.conj(zs[j])))
    return val


def _weights(spec, x, t, delta):
    """log g_k (k not in Delta) or log h_k (k in Delta)."""
    zs = spec.zs
    out = np.empty(zs.size, dtype=complex)
    dset = set(delta)
    for k, p in enumerate(spec):
        lg = log_gamma_factor(p, x, t)
        if k in dset:
            out[k] = -lg - 2 * _log_a_delta_prime(k, zs, delta)
        else:
            out[k] = lg + 2 * _log_a_delta(zs[k], zs, delta)
    return out


def _assemble_delta(spec, x, t, delta):
    """Dense 2N system in the unknowns u = (alpha or conj alpha, conj beta or beta).

    Row j (first block) and N + j (second block).  Unknown index k holds
    alpha_k (nabla) / conj(alpha_k) (Delta); index N + k holds conj(beta_k)
    (nabla) / beta_k (Delta).  Every row has the form
    u_j - w_j (sum c_k u_k + const) = 0 and is rescaled by exp(-log w_j) when
    |w_j| > 1 so huge exponentials never enter the matrix.
    """
    zs = spec.zs
    N = zs.size
    zc = np.conj(zs)
    ind = np.zeros(N, dtype=bool)
    ind[list(delta)] = True
    lw = _weights(spec, x, t, delta)
    M = np.zeros((2 * N, 2 * N), dtype=complex)
    rhs = np.zeros(2 * N, dtype=complex)
    nab = ~ind

    def put(row, diag_col, logw, coeffs, const):
        # u_diag - w * (coeffs . u + const) = 0
        if logw.real > 0:
            s = np.exp(-logw)
            M[row, diag_col] += s
            M[row] -= coeffs
            rhs[row] = const
        else:
            w = np.exp(logw)
            M[row, diag_col] += 1.0
            M[row] -= w * coeffs
            rhs[row] = w * const

    for j in range(N):
        if nab[j]:
            # alpha_j = g_j [ -sum_nab cb_k/(z_j - zc_k) + sum_D b_k/(z_j - z_k) ]
            c = np.zeros(2 * N, dtype=complex)
            c[N:][nab] = -1.0 / (zs[j] - zc[nab])
            dk = ind.copy()
            c[N:][dk] = 1.0 / (zs[j] - zs[dk])
            put(j, j, lw[j], c, 0.0)
            # conj beta_j = conj g_j [1 + sum_nab a_k/(zc_j - z_k) + sum_D ca_k/(zc_j - zc_k)]
            c = np.zeros(2 * N, dtype=complex)
            c[:N][nab] = 1.0 / (zc[j] - zs[nab])
            c[:N][dk] = 1.0 / (zc[j] - zc[dk])
            put(N + j, N + j, np.conj(lw[j]), c, 1.0)
        else:
            dk = ind
            # beta_j = h_j [1 + sum_nab a_k/(z_j - z_k) + sum_D ca_k/(z_j - zc_k)]
            c = np.zeros(2 * N, dtype=complex)
            c[:N][nab] = 1.0 / (zs[j] - zs[nab])
            c[:N][dk] = 1.0 / (zs[j] - zc[dk])
            put(N + j, N + j, lw[j], c, 1.0)
            # conj alpha_j = conj h_j [sum_nab cb_k/(zc_j - zc_k) - sum_D b_k/(zc_j - z_k)]
            c = np.zeros(2 * N, dtype=complex)
            c[N:][nab] = 1.0 / (zc[j] - zc[nab])
            c[N:][dk] = -1.0 / (zc[j] - zs[dk])
            put(j, j, np.conj(lw[j]), c, 0.0)
    return M, rhs, ind


def solve_soliton(spec: DiscreteSpectrum, x: float, t: float, delta=None) -> MeromorphicSolution:
    """Solve the (Delta-renormalized) residue system at (x, t).

    ``delta`` defaults to :func:`default_delta`.  A ConditioningWarning is
    emitted when the estimated condition number exceeds 1e12.
    """
    zs = spec.zs
    N = zs.size
    _check_distinct(zs)
    if delta is None:
        delta = default_delta(spec, x, t)
    delta = tuple(sorted(int(k) for k in delta))
    if any(k < 0 or k >= N for k in delta):
        raise ValueError("delta indices out of range")
    if N == 0:
        return MeromorphicSolution(zs, np.zeros(0, complex), np.zeros(0, complex), delta, x, t)
    M, rhs, ind = _assemble_delta(spec, x, t, delta)
    u = np.linalg.solve(M, rhs)
    cond = float(np.linalg.cond(M))
    if not np.isfinite(cond) or cond > COND_LIMIT:
        warnings.warn(f"soliton system condition number {cond:.2e} at (x, t) = ({x}, {t})",
                      ConditioningWarning)
    resid = float(np.max(np.abs(M @ u - rhs)) / (1.0 + np.max(np.abs(u))))
    alpha = np.where(ind, np.conj(u[:N]), u[:N])
    beta = np.where(ind, u[N:], np.conj(u[N:]))
    return MeromorphicSolution(zs, alpha, beta, delta, x, t, cond, resid)


def reconstruct_psi(sol: MeromorphicSolution) -> complex:
    """psi = lim 2iz m12 = 2i (sum_Delta beta_k - sum_nabla conj beta_k)."""
    if sol.zs.size == 0:
        return 0j
    ind = sol.in_delta
    return complex(2j * (np.sum(sol.beta[ind]) - np.sum(np.conj(sol.beta[~ind]))))


def evaluate_matrix(sol: MeromorphicSolution, z: complex) -> np.ndarray:
    """m^Delta(z) from the partial-fraction coefficients."""
    z = complex(z)
    m = np.eye(2, dtype=complex)
    zs = sol.zs
    if zs.size == 0:
        return m
    ind = sol.in_delta
    al, be = sol.alpha, sol.beta
    col1_poles = np.where(ind, np.conj(zs), zs)
    col2_poles = np.where(ind, zs, np.conj(zs))
    scale = 1.0 + np.max(np.abs(zs))
    if np.min(np.abs(z - np.concatenate([col1_poles, col2_poles]))) < 1e-12 * scale:
        raise ContourEvaluationError(f"z = {z} coincides with a pole")
    d1 = 1.0 / (z - col1_poles)
    d2 = 1.0 / (z - col2_poles)
    m[0, 0] += np.sum(np.where(ind, np.conj(al), al) * d1)
    m[1, 0] += np.sum(np.where(ind, -np.conj(be), be) * d1)
    m[0, 1] += np.sum(np.where(ind, be, -np.conj(be)) * d2)
    m[1, 1] += np.sum(np.where(ind, al, np.conj(al)) * d2)
    return m


def residue_residual(sol: MeromorphicSolution, spec: DiscreteSpectrum) -> float:
    """Re-substitution error of the residue conditions, relative to 1 + |coeffs|."""
    zs = sol.zs
    if zs.size == 0:
        return 0.0
    lw = _weights(spec, sol.x, sol.t, sol.delta)
    ind = sol.in_delta
    err = 0.0
    for j in range(zs.size):
        # evaluate the column without the singular j-th term
        m = _evaluate_regular(sol, zs[j], j)
        w = np.exp(lw[j])
        if ind[j]:
            lhs = np.array([sol.beta[j], sol.alpha[j]])
            rhsv = w * m[:, 0]
        else:
            lhs = np.array([sol.alpha[j], sol.beta[j]])
            rhsv = w * m[:, 1]
        err = max(err, float(np.max(np.abs(lhs - rhsv)) / (1.0 + abs(w))))
    scale = 1.0 + max(np.max(np.abs(sol.alpha)), np.max(np.abs(sol.beta)))
    return err / scale


def _evaluate_regular(sol, z, skip):
    # the skipped pole does not enter the column that carries its residue condition
    al, be = sol.alpha, sol.beta
    ind = sol.in_delta
    zs = sol.zs
    m = np.eye(2, dtype=complex)
    for k in range(zs.size):
        if ind[k]:
            if k != skip:
                m[0, 1] += be[k] / (z - zs[k])
                m[1, 1] += al[k] / (z - zs[k])
            m[0, 0] += np.conj(al[k]) / (z - np.conj(zs[k]))
            m[1, 0] += -np.conj(be[k]) / (z - np.conj(zs[k]))
        else:
            if k != skip:
                m[0, 0] += al[k] / (z - zs[k])
                m[1, 0] += be[k] / (z - zs[k])
            m[0, 1] += -np.conj(be[k]) / (z - np.conj(zs[k]))
            m[1, 1] += np.conj(al[k]) / (z - np.conj(zs[k]))
    return m


def soliton_psi(spec: DiscreteSpectrum, x, t: float, delta=None) -> np.ndarray:
    """psi_sol on an array of x (Delta chosen per point unless given)."""
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty(xs.size, dtype=complex)
    for i, xv in enumerate(xs):
        out[i] = reconstruct_psi(solve_soliton(spec, float(xv), t, delta))
    return out if np.ndim(x) else out[0]


def blaschke_sq(zk: complex, zj: complex) -> complex:
    return ((zk - zj) / (zk - np.conj(zj))) ** 2


def reduce_to_cone(spec: DiscreteSpectrum, cone: SpaceTimeCone) -> DiscreteSpectrum:
    """Keep poles with Re z_k in the cone's interval; fold the left ones into c_k."""
    lo, hi = cone.interval
    kept, left = [], []
    for p in spec:
        if lo <= p.z.real <= hi:
            kept.append(p)
        elif p.z.real < lo:
            left.append(p)
    out = []
    for p in kept:
        c = p.c
        for q in left:
            c *= blaschke_sq(p.z, q.z)
        out.append(SpectralPoint(p.z, c))
    return DiscreteSpectrum(tuple(out))
