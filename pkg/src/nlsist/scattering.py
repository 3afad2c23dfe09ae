"""Forward scattering for the Zakharov-Shabat (ZS-AKNS) problem.

The Jost functions are integrated in the oscillation-removed form

    dm/dx = -iz [sigma3, m] + Psi m,    Psi = [[0, psi], [-conj(psi), 0]],

with m -> I at the left (m^-) or right (m^+) end of the support.  All
routines accept arrays of spectral points; the points are integrated
together as one flattened ODE system.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import IntegrationWarning, quad, solve_ivp
from scipy.interpolate import CubicSpline

from .core import DiscreteSpectrum, ReflectionData, ScatteringData, SpectralPoint
from .errors import (ConvergenceWarning, EigenvalueCountError, IntegrationError,
                     MultiplicityError, ProportionalityError, SpectralSingularityError)

RTOL = 1e-12
ATOL = 1e-14
SINGULARITY_TOL = 1e-6
# arg a only has to be resolved to a fraction of a radian on contours
WINDING_RTOL = 1e-7


@dataclass(frozen=True)
class Potential:
    """Initial datum psi0 with effective support [xl, xr].

    ``func`` must accept a scalar or an array of x.  ``breakpoints`` lists
    interior discontinuities so the integrator never steps across them.
    ``tag`` is a JSON-friendly description for closed-form families.
    """

    func: Callable
    support: tuple[float, float]
    breakpoints: tuple[float, ...] = ()
    tag: dict = field(default_factory=dict)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.asarray(self.func(x), dtype=complex)
        xl, xr = self.support
        return np.where((x >= xl) & (x <= xr), np.broadcast_to(out, x.shape), 0.0)

    def at(self, x: float) -> complex:
        """Scalar evaluation, zero outside the support."""
        xl, xr = self.support
        if x < xl or x > xr:
            return 0j
        return complex(self.func(x))

    @property
    def L(self) -> float:
        return max(abs(self.support[0]), abs(self.support[1]))

    def max_abs(self, n: int = 4001) -> float:
        xs = np.linspace(*self.support, n)
        if self.breakpoints:
            xs = np.concatenate([xs, np.asarray(self.breakpoints)])
        return float(np.max(np.abs(self(xs))))

    @classmethod
    def zero(cls) -> "Potential":
        return cls(lambda x: np.zeros_like(x, dtype=complex), (-1.0, 1.0), tag={"kind": "zero"})

    @classmethod
    def sech(cls, amplitude: float = 1.0, x0: float = 0.0, velocity: float = 0.0,
             tol: float = 1e-17) -> "Potential":
        """amplitude * sech(x - x0) * exp(i velocity x)."""
        A = float(amplitude)
        half = math.log(2.0 * max(abs(A), tol) / tol) if A != 0 else 1.0

        def f(x, A=A, x0=x0, v=velocity):
            u = np.abs(np.asarray(x, dtype=float) - x0)
            # sech u = 2 e^{-u}/(1 + e^{-2u}), overflow free
            return A * 2 * np.exp(-u) / (1 + np.exp(-2 * u)) * np.exp(1j * v * x)

        return cls(f, (x0 - half, x0 + half),
                   tag={"kind": "sech", "amplitude": A, "x0": x0, "velocity": velocity})

    @classmethod
    def box(cls, q0: float, L: float) -> "Potential":
        """q0 on [0, L], zero elsewhere."""
        q0 = complex(q0)

        def f(x, q0=q0):
            return np.full(np.shape(x), q0, dtype=complex)

        return cls(f, (0.0, float(L)), tag={"kind": "box", "q0": q0.real, "L": float(L)})

    @classmethod
    def from_samples(cls, x, values, tag: dict | None = None) -> "Potential":
        """Cubic-spline interpolant of grid samples, supported on the grid."""
        x = np.asarray(x, dtype=float)
        spline = CubicSpline(x, np.asarray(values, dtype=complex))
        return cls(lambda s: spline(s), (float(x[0]), float(x[-1])), tag=tag or {})

    @classmethod
    def from_tag(cls, tag: dict) -> "Potential":
        kind = tag.get("kind")
        if kind == "zero":
            return cls.zero()
        if kind == "sech":
            return cls.sech(tag.get("amplitude", 1.0), tag.get("x0", 0.0), tag.get("velocity", 0.0))
        if kind == "box":
            return cls.box(tag["q0"], tag["L"])
        raise ValueError(f"unknown potential kind {kind!r}")


@dataclass
class ScatteringCoefficients:
    z: np.ndarray | complex
    a: np.ndarray | complex
    b: np.ndarray | complex

    @property
    def r(self):
        return self.b / self.a

    @property
    def unitarity_defect(self):
        return np.abs(np.abs(self.a) ** 2 + np.abs(self.b) ** 2 - 1.0)


def _segments(x0, x1, cuts):
    """Split [x0, x1] (either orientation) at cut points strictly inside."""
    lo, hi = min(x0, x1), max(x0, x1)
    inner = sorted({c for c in cuts if lo < c < hi})
    pts = [x0] + (inner if x1 > x0 else inner[::-1]) + [x1]
    return list(zip(pts[:-1], pts[1:]))


def _integrate(rhs, x0, x1, y0, cuts=(), stops=(), rtol=RTOL, atol=ATOL):
    """Integrate y' = rhs(x, y) from x0 to x1, returning y at x1 and at ``stops``."""
    y = np.asarray(y0, dtype=complex)
    saved = {}
    all_cuts = tuple(cuts) + tuple(stops)
    for s in stops:
        if s == x0:
            saved[s] = y.copy()
    for a, b in _segments(x0, x1, all_cuts):
        if a == b:
            continue
        sol = solve_ivp(rhs, (a, b), y, method="DOP853", rtol=rtol, atol=atol)
        if sol.status != 0:
            raise IntegrationError(f"Jost integration failed: {sol.message}", float(sol.t[-1]))
        y = sol.y[:, -1]
        if b in stops:
            saved[b] = y.copy()
    return y, saved


def _rhs_left(pot, z, derivative):
    n = z.size
    tz = 2j * z

    def rhs(x, y):
        q = pot.at(x)
        qc = q.conjugate()
        m11, m21 = y[:n], y[n:2 * n]
        d = [q * m21, tz * m21 - qc * m11]
        if derivative:
            p11, p21 = y[2 * n:3 * n], y[3 * n:]
            d += [q * p21, 2j * m21 + tz * p21 - qc * p11]
        return np.concatenate(d)

    return rhs


def _rhs_right(pot, z):
    n = z.size
    tz = 2j * z

    def rhs(x, y):
        q = pot.at(x)
        qc = q.conjugate()
        m12, m22 = y[:n], y[n:]
        return np.concatenate([-tz * m12 + q * m22, -qc * m12])

    return rhs


def _rhs_full(pot, z):
    n = z.size
    tz = 2j * z

    def rhs(x, y):
        q = pot.at(x)
        qc = q.conjugate()
        m11, m12, m21, m22 = (y[k * n:(k + 1) * n] for k in range(4))
        return np.concatenate([q * m21, -tz * m12 + q * m22,
                               tz * m21 - qc * m11, -qc * m12])

    return rhs


def _grouped(fn, z, nout):
    """Apply ``fn`` to groups of z with similar modulus.

    Step sizes are set by the largest |z| in a batch, so integrating small
    and large spectral parameters together wastes work.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if z.size <= 8:
        return fn(z)
    key = np.floor(np.log2(1.0 + np.abs(z))).astype(int)
    outs = [np.empty(z.size, dtype=complex) for _ in range(nout)]
    for k in np.unique(key):
        sel = key == k
        res = fn(z[sel])
        for o, r in zip(outs, res):
            o[sel] = r
    return tuple(outs)


def _left_column(pot, z, derivative=False, stops=(), rtol=RTOL):
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    n = z.size
    xl, xr = pot.support
    x_end = max([xr] + list(stops))
    x_start = min([xl] + list(stops))
    y0 = np.zeros((4 if derivative else 2) * n, dtype=complex)
    y0[:n] = 1.0
    # psi vanishes left of xl, so m1^- = e1 there
    y, saved = _integrate(_rhs_left(pot, z, derivative), x_start, x_end, y0,
                          pot.breakpoints + (xl, xr), stops, rtol=rtol, atol=rtol * 1e-2)
    return z, y, saved, x_end


def _right_column(pot, z, stops=()):
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    n = z.size
    xl, xr = pot.support
    x_start = max([xr] + list(stops))
    x_end = min([xl] + list(stops))
    y0 = np.zeros(2 * n, dtype=complex)
    y0[n:] = 1.0
    y, saved = _integrate(_rhs_right(pot, z), x_start, x_end, y0,
                          pot.breakpoints + (xl, xr), stops)
    return z, y, saved, x_end


def integrate_jost(pot: Potential, z, side: str = "left"):
    """Full Jost matrix m^- at x = xr (``side="left"``) or m^+ at x = xl.

    Returns shape (2, 2) for scalar z and (n, 2, 2) for an array of n points.
    """
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    n = z.size
    xl, xr = pot.support
    y0 = np.zeros(4 * n, dtype=complex)
    y0[:n] = 1.0
    y0[3 * n:] = 1.0
    if side == "left":
        x0, x1 = xl, xr
    elif side == "right":
        x0, x1 = xr, xl
    else:
        raise ValueError("side must be 'left' or 'right'")
    y, _ = _integrate(_rhs_full(pot, z), x0, x1, y0, pot.breakpoints)
    m = y.reshape(2, 2, n).transpose(2, 0, 1)
    return m[0] if scalar else m


def a_and_derivative(pot: Potential, z, rtol: float = RTOL):
    """a(z) and da/dz for Im z >= 0 via the variational equations."""
    scalar = np.ndim(z) == 0

    def fn(zz):
        _, y, _, _ = _left_column(pot, zz, derivative=True, rtol=rtol)
        n = zz.size
        return y[:n], y[2 * n:3 * n]

    a, da = _grouped(fn, z, 2)
    return (a[0], da[0]) if scalar else (a, da)


def scattering_coeffs(pot: Potential, z, check: bool = True,
                      rtol: float = RTOL) -> ScatteringCoefficients:
    """a(z) = m11^-(xr) and b(z) = exp(-2 i z xr) m21^-(xr).

    b is meaningful only for real z.  With ``check`` set, real points where
    |a| < 1e-6 raise SpectralSingularityError.
    """
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=complex))

    def fn(zz):
        _, y, _, x_end = _left_column(pot, zz, rtol=rtol)
        n = zz.size
        with np.errstate(over="ignore", invalid="ignore"):
            b = np.exp(-2j * zz * x_end) * y[n:]
        return y[:n], b

    a, b = _grouped(fn, z, 2)
    if check:
        real = np.abs(z.imag) < 1e-14
        small = real & (np.abs(a) < SINGULARITY_TOL)
        if np.any(small):
            k = int(np.argmax(small))
            raise SpectralSingularityError(float(z[k].real), float(abs(a[k])))
    if scalar:
        return ScatteringCoefficients(z[0], a[0], b[0])
    return ScatteringCoefficients(z, a, b)


# ---------------------------------------------------------------- eigenvalues

@dataclass(frozen=True)
class Box:
    re_lo: float
    re_hi: float
    im_lo: float
    im_hi: float

    @property
    def size(self) -> float:
        return max(self.re_hi - self.re_lo, self.im_hi - self.im_lo)

    def corners(self):
        return [complex(self.re_lo, self.im_lo), complex(self.re_hi, self.im_lo),
                complex(self.re_hi, self.im_hi), complex(self.re_lo, self.im_hi)]

    def contains(self, z, pad=0.0) -> bool:
        return (self.re_lo - pad <= z.real <= self.re_hi + pad
                and self.im_lo - pad <= z.imag <= self.im_hi + pad)

    def split(self, f: float):
        xm = self.re_lo + f * (self.re_hi - self.re_lo)
        ym = self.im_lo + f * (self.im_hi - self.im_lo)
        return [Box(self.re_lo, xm, self.im_lo, ym), Box(xm, self.re_hi, self.im_lo, ym),
                Box(xm, self.re_hi, ym, self.im_hi), Box(self.re_lo, xm, ym, self.im_hi)]


def default_box(pot: Potential) -> Box:
    """Search rectangle from the a-priori bounds on the discrete spectrum.

    |Im z| <= max|psi0| is a bound for any L^2 eigenvalue; the real extent
    uses z_max = 1 + max|psi0| * L.
    """
    qmax = pot.max_abs()
    zmax = 1.0 + qmax * pot.L
    return Box(-zmax, zmax, 1e-3, max(2e-3, min(zmax, 1.05 * qmax + 0.05)))


def _box_contour(box: Box):
    c = box.corners() + [box.corners()[0]]
    pts = []
    for k in range(4):
        length = abs(c[k + 1] - c[k])
        n = 16 + int(2 * length)
        pts.append(np.linspace(c[k], c[k + 1], n + 1)[:-1])
    return list(np.concatenate(pts + [np.array([c[0]])]))


def _windings(pot, boxes, max_rounds=14):
    """Argument-principle counts for several boxes, sharing ODE batches.

    Returns a list with an int per box, or None where a zero of a sits
    (numerically) on that box's boundary.
    """
    pts = [_box_contour(b) for b in boxes]
    flat = np.concatenate([np.asarray(p) for p in pts])
    vals_flat = scattering_coeffs(pot, flat, check=False, rtol=WINDING_RTOL).a
    vals, k = [], 0
    for p in pts:
        vals.append(list(vals_flat[k:k + len(p)]))
        k += len(p)
    out = [None] * len(boxes)
    pending = set(range(len(boxes)))
    for _ in range(max_rounds):
        requests = []
        for i in sorted(pending):
            v = np.asarray(vals[i])
            if np.any(np.abs(v) < 1e-9):
                pending.discard(i)
                continue
            d = np.angle(v[1:] / v[:-1])
            bad = np.flatnonzero(np.abs(d) > 0.4)
            if bad.size == 0:
                w = float(np.sum(d)) / (2 * np.pi)
                n = int(round(w))
                if abs(w - n) > 0.05:
                    raise IntegrationError(f"non-integer winding number {w:.4f}")
                out[i] = n
                pending.discard(i)
                continue
            p = np.asarray(pts[i])
            for j in bad:
                m = int(min(8, np.ceil(abs(d[j]) / 0.3)))
                new = p[j] + (p[j + 1] - p[j]) * np.arange(1, m) / m
                requests.append((i, j, new))
        if not pending:
            return out
        allnew = np.concatenate([r[2] for r in requests])
        newvals = scattering_coeffs(pot, allnew, check=False, rtol=WINDING_RTOL).a
        k = 0
        by_box = {}
        for i, j, new in requests:
            by_box.setdefault(i, []).append((j, new, newvals[k:k + new.size]))
            k += new.size
        for i, items in by_box.items():
            for j, new, nv in sorted(items, key=lambda t: -t[0]):
                pts[i][j + 1:j + 1] = list(new)
                vals[i][j + 1:j + 1] = list(nv)
    raise IntegrationError("phase of a(z) could not be resolved on the contour")


def winding_number(pot: Potential, box: Box) -> int:
    """Number of zeros of a inside ``box`` by the argument principle."""
    w = _windings(pot, [box])[0]
    if w is None:
        raise EigenvalueCountError("a zero of a lies on the box boundary")
    return w


def _gl_contour(box: Box, order=16):
    xg, wg = np.polynomial.legendre.leggauss(order)
    c = box.corners() + [box.corners()[0]]
    short = min(box.re_hi - box.re_lo, box.im_hi - box.im_lo)
    nodes, weights = [], []
    for k in range(4):
        za, zb = c[k], c[k + 1]
        panels = int(min(64, max(2, np.ceil(2 * abs(zb - za) / short))))
        for p in range(panels):
            pa = za + (zb - za) * p / panels
            pb = za + (zb - za) * (p + 1) / panels
            nodes.append(0.5 * (pa + pb) + 0.5 * (pb - pa) * xg)
            weights.append(0.5 * (pb - pa) * wg)
    return np.concatenate(nodes), np.concatenate(weights)


def _newton(pot, z0, tol=1e-10, maxit=30):
    """Vectorized Newton on a; one extra step is taken after |a| <= tol."""
    z = np.atleast_1d(np.asarray(z0, dtype=complex)).copy()
    active = np.ones(z.size, dtype=bool)
    polished = np.zeros(z.size, dtype=bool)
    for _ in range(maxit):
        if not np.any(active):
            break
        idx = np.flatnonzero(active)
        a, da = a_and_derivative(pot, z[idx])
        z[idx] -= a / da
        done = np.abs(a) <= tol
        active[idx[done & polished[idx]]] = False
        polished[idx[done]] = True
    a, _ = a_and_derivative(pot, z)
    return z, np.abs(a)


SPLIT_FRACTIONS = (0.5713, 0.4387, 0.6231, 0.3519)


def _locate(pot, box, count, tol=1e-10, max_depth=40):
    """Breadth-first subdivision until each box holds one zero, then Newton."""
    roots = []
    level = [(box, count)]
    for _ in range(max_depth):
        level = [(b, n) for b, n in level if n > 0]
        if not level:
            return roots
        singles = [b for b, n in level if n == 1]
        retry = []
        if singles:
            quad_nodes = [_gl_contour(b) for b in singles]
            allnodes = np.concatenate([q[0] for q in quad_nodes])
            a, da = a_and_derivative(pot, allnodes, rtol=WINDING_RTOL)
            f = da / a
            guesses, owners = [], []
            k = 0
            for b, (nodes, w) in zip(singles, quad_nodes):
                fk = f[k:k + nodes.size]
                k += nodes.size
                s0 = np.sum(w * fk) / (2j * np.pi)
                s1 = np.sum(w * nodes * fk) / (2j * np.pi)
                g = s1 / s0 if abs(s0 - 1) < 0.1 else None
                if g is not None and b.contains(g, pad=0.25 * b.size):
                    guesses.append(g)
                    owners.append(b)
                else:
                    retry.append(b)
            if guesses:
                zs, res = _newton(pot, np.array(guesses), tol)
                for b, z, rv in zip(owners, zs, res):
                    if rv <= tol and b.contains(z, pad=1e-9):
                        roots.append(complex(z))
                    else:
                        retry.append(b)
        to_split = [(b, 1) for b in retry] + [(b, n) for b, n in level if n > 1]
        nxt = []
        for b, n in to_split:
            if b.size < 1e-6:
                if n >= 2:
                    raise MultiplicityError(f"{n} zeros of a within a box of size {b.size:.1e} "
                                            f"near {b.corners()[0]}")
                raise EigenvalueCountError("Newton refinement failed inside a tiny box")
        pending = list(to_split)
        for frac in SPLIT_FRACTIONS:
            if not pending:
                break
            subs = [b.split(frac) for b, _ in pending]
            counts = _windings(pot, [s for group in subs for s in group])
            still = []
            for g, ((b, n), group) in enumerate(zip(pending, subs)):
                c = counts[4 * g:4 * g + 4]
                if any(v is None for v in c) or sum(c) != n:
                    still.append((b, n))
                    continue
                nxt += list(zip(group, c))
            pending = still
        if pending:
            raise EigenvalueCountError("could not split a box holding zeros consistently")
        level = nxt
    raise EigenvalueCountError("eigenvalue subdivision depth exceeded")


def find_discrete_spectrum(pot: Potential, box: Box | None = None, tol: float = 1e-10,
                           return_count: bool = False):
    """Zeros of a(z) inside ``box`` (default: a-priori bound box).

    Returns the eigenvalues sorted by (Re, Im).  Raises EigenvalueCountError
    when the refined roots disagree with the argument-principle count and
    MultiplicityError for a non-simple zero.
    """
    box = default_box(pot) if box is None else box
    if box.im_lo < 1e-3:
        raise ValueError("search box must satisfy Im >= 1e-3")
    count = winding_number(pot, box)
    roots = _locate(pot, box, count, tol=tol)
    uniq = []
    for z in roots:
        if all(abs(z - u) > 1e-8 for u in uniq):
            uniq.append(z)
    if len(uniq) != count:
        raise EigenvalueCountError(f"winding count {count} but {len(uniq)} distinct roots")
    out = np.array(sorted(uniq, key=lambda z: (round(z.real, 10), z.imag)), dtype=complex)
    return (out, count) if return_count else out


# ------------------------------------------------------------ norming constants

def proportionality_constants(pot: Potential, zs, rel_tol=1e-6, fail_tol=1e-4):
    """gamma_k with m1^-(x) = gamma_k exp(2 i z_k x) m2^+(x), measured at x = 0.

    The ratio is also formed at two points placed symmetrically about the
    support centre where the eigenfunction is still O(1e-3) of its peak;
    disagreement beyond ``fail_tol`` raises ProportionalityError.
    """
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    gammas = np.empty(zs.size, dtype=complex)
    xl, xr = pot.support
    centre = 0.5 * (xl + xr)
    for k, z in enumerate(zs):
        xc = min(math.log(1e3) / (2 * z.imag), 0.5 * (xr - xl) / 2 + 1e-12)
        stops = tuple(sorted({0.0, centre - xc, centre + xc}))
        _, _, left, _ = _left_column(pot, z, stops=stops)
        _, _, right, _ = _right_column(pot, z, stops=stops)
        vals = {}
        for s in stops:
            m1 = left[s]
            m2 = right[s]
            vals[s] = np.vdot(m2, m1) / np.vdot(m2, m2) * np.exp(-2j * z * s)
        g0 = vals[0.0]
        spread = max(abs(v - g0) for v in vals.values()) / abs(g0)
        if spread > fail_tol:
            raise ProportionalityError(f"Jost columns not proportional at z = {z} "
                                       f"(relative spread {spread:.2e})")
        if spread > rel_tol:
            warnings.warn(f"proportionality spread {spread:.2e} at z = {z}", ConvergenceWarning)
        gammas[k] = g0
    return gammas


def norming_constants(pot: Potential, zs, return_gamma: bool = False):
    """RHP residue weights c_k = gamma_k / a'(z_k)."""
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    if zs.size == 0:
        return ([], np.zeros(0, complex)) if return_gamma else []
    a, da = a_and_derivative(pot, zs)
    if np.any(np.abs(a) > 1e-8):
        raise ValueError(f"not an eigenvalue: |a| = {np.max(np.abs(a)):.2e}")
    gam = proportionality_constants(pot, zs)
    pts = [SpectralPoint(z, g / d) for z, g, d in zip(zs, gam, da)]
    return (pts, gam) if return_gamma else pts


# ------------------------------------------------------------------ reflection

def sample_reflection(pot: Potential, s_max: float | None = None, ds: float | None = None,
                      check: bool = True) -> ReflectionData:
    """Uniform samples of r = b/a on [-s_max, s_max] with cubic interpolation.

    Defaults: ds resolves the exp(2isL) oscillation of r for support width
    L, and s_max doubles from 8 (up to 256) until |r| < 1e-10 at both ends.
    """
    width = pot.support[1] - pot.support[0]
    if ds is None:
        ds = min(0.05, np.pi / (12.0 * max(width, 1e-9)))
    auto = s_max is None
    s_max = 8.0 if auto else float(s_max)
    while True:
        n = int(round(2 * s_max / ds)) + 1
        s = np.linspace(-s_max, s_max, n)
        sc = scattering_coeffs(pot, s, check=check)
        r = sc.b / sc.a
        tail = max(abs(r[0]), abs(r[-1]))
        if not auto or tail < 1e-10 or s_max >= 200.0:
            break
        s_max *= 2.0
    if np.max(np.abs(r)) == 0:
        return ReflectionData.zero()
    return ReflectionData.from_samples(s[0], s[1] - s[0], r)


def scan_spectral_singularities(pot: Potential, s_max: float = 20.0, n: int = 4001):
    """Raise SpectralSingularityError if |a| < 1e-6 anywhere on a real grid."""
    s = np.linspace(-s_max, s_max, n)
    a = scattering_coeffs(pot, s, check=False).a
    k = int(np.argmin(np.abs(a)))
    if abs(a[k]) < SINGULARITY_TOL:
        raise SpectralSingularityError(float(s[k]), float(abs(a[k])))
    return float(abs(a[k]))


def scatter(pot: Potential, box: Box | None = None, s_max=None, ds=None) -> ScatteringData:
    """Full forward map psi0 -> (r, {(z_k, c_k)})."""
    r = sample_reflection(pot, s_max, ds)
    zs = find_discrete_spectrum(pot, box)
    pts = norming_constants(pot, zs)
    extra = {"potential": _json_tag(pot.tag)} if pot.tag else {}
    return ScatteringData(r, DiscreteSpectrum(tuple(pts)), extra)


def _json_tag(tag):
    return {k: (float(v) if isinstance(v, (int, float, np.floating)) else v) for k, v in tag.items()}


# ------------------------------------------------------------ trace formula

def log_transmission_integral(r: ReflectionData, z: complex, lo=None, hi=None) -> complex:
    """(1/2 pi i) * int log(1 + |r(s)|^2) / (s - z) ds over the support of r."""
    if r.is_zero:
        return 0.0
    a, b = r.support
    lo = a if lo is None else max(a, lo)
    hi = b if hi is None else min(b, hi)
    if hi <= lo:
        return 0.0
    pts = [p for p in (z.real,) if lo < p < hi]
    f = lambda s: r.log1p_abs2(s) / (s - z)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        val, err = quad(f, lo, hi, points=pts or None, limit=2000, complex_func=True,
                        epsabs=1e-13, epsrel=1e-12)
    if not np.isfinite(val) or abs(err) > 1e-6 * (1 + abs(val)):
        raise IntegrationError(f"trace integral did not converge (error estimate {abs(err):.1e})")
    return val / (2j * np.pi)


def trace_rhs(data: ScatteringData, z: complex) -> complex:
    """Pi (z - conj z_k)/(z - z_k) * exp((1/2 pi i) int log(1+|r|^2)/(s-z) ds)."""
    z = complex(z)
    zk = data.discrete.zs
    blaschke = np.prod((z - np.conj(zk)) / (z - zk)) if zk.size else 1.0
    return complex(blaschke * np.exp(log_transmission_integral(data.r, z)))


def verify_trace_formula(pot: Potential, z: complex, data: ScatteringData | None = None):
    """Compare 1/a(z) from the ODE with the trace-formula reconstruction.

    Returns (lhs, rhs, |lhs - rhs|).
    """
    z = complex(z)
    if data is None:
        data = scatter(pot)
    if abs(z.imag) < 1e-2 or any(abs(z - p.z) < 1e-2 for p in data.discrete):
        raise ValueError("trace formula point too close to the real axis or an eigenvalue")
    if z.imag > 0:
        lhs = 1.0 / complex(scattering_coeffs(pot, z, check=False).a)
        rhs = trace_rhs(data, z)
    else:
        # lower half plane via a(z) = conj(a(conj z))
        lhs = 1.0 / complex(np.conj(scattering_coeffs(pot, np.conj(z), check=False).a))
        rhs = complex(np.conj(trace_rhs(data, np.conj(z))))
    return lhs, rhs, abs(lhs - rhs)
