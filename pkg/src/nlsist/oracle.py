"""Split-step Fourier integrator for i psi_t + psi_xx/2 + |psi|^2 psi = 0.

Strang splitting on a periodic grid: half nonlinear phase, exact linear
step in Fourier space, half nonlinear phase.  Every substep is unitary in
the discrete L^2 norm.  Consecutive nonlinear half steps are fused, which is
exact because the nonlinear flow leaves |psi| unchanged.

``order=4`` composes three Strang steps with the Yoshida triple-jump
weights; it keeps the unitary structure and reaches 1e-6 level accuracy at
dt = 1e-3 where plain Strang stalls near 1e-5.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np
import scipy.fft as sfft
from scipy.integrate import trapezoid

from .core import ComplexField
from .errors import BoundaryContaminationWarning, ConvergenceWarning

EDGE_WARN = 1e-6
EDGE_WIDTH = 8


@dataclass(frozen=True)
class EvolutionConfig:
    """Periodic domain [-X, X) with n points; |dt| steps up to duration T.

    A negative dt integrates backward in time.
    """

    X: float
    n: int
    dt: float
    T: float
    dealias: bool = False
    workers: int = 1
    order: int = 2

    def __post_init__(self):
        if self.order not in (2, 4):
            raise ValueError("splitting order must be 2 or 4")
        if self.n < 256 or self.n & (self.n - 1):
            raise ValueError("grid size n must be a power of two >= 256")
        if self.dt == 0 or not math.isfinite(self.dt):
            raise ValueError("time step must be nonzero")
        if self.X <= 0 or self.T < 0:
            raise ValueError("need X > 0 and T >= 0")

    @property
    def dx(self) -> float:
        return 2 * self.X / self.n

    @property
    def x(self) -> np.ndarray:
        return -self.X + self.dx * np.arange(self.n)

    @property
    def k(self) -> np.ndarray:
        return 2 * np.pi * sfft.fftfreq(self.n, d=self.dx)

    @property
    def steps(self) -> int:
        return int(round(self.T / abs(self.dt)))


def domain_half_width(speed: float, T: float, radiation_speed: float = 0.0) -> float:
    """X >= 10 + v T + 6 sqrt(T), v the largest soliton or radiation speed."""
    return 10.0 + max(abs(speed), abs(radiation_speed)) * T + 6.0 * math.sqrt(T)


def initial_extent(func: Callable, level: float = 1e-10, start: float = 10.0,
                   limit: float = 1e5) -> float:
    """Smallest tested half-width beyond which |psi0| < level (doubling search)."""
    L = start
    while L < limit:
        x = np.linspace(-2 * L, 2 * L, 16001)
        v = np.abs(np.asarray(func(x), dtype=complex))
        outside = np.abs(x) >= L
        if np.max(v[outside]) < level:
            return L
        L *= 2.0
    raise ValueError("initial data does not decay within the search range")


def sample_field(func: Callable, cfg: EvolutionConfig, t: float = 0.0) -> ComplexField:
    """Initial data on the configuration grid."""
    vals = np.asarray(func(cfg.x), dtype=complex)
    field = ComplexField(-cfg.X, cfg.dx, t, vals)
    _check_edges(field, "initial data", 1e-10)
    return field


def _check_edges(field: ComplexField, what: str, level: float = EDGE_WARN) -> float:
    v = field.values
    edge = max(np.max(np.abs(v[:EDGE_WIDTH])), np.max(np.abs(v[-EDGE_WIDTH:])))
    if edge > level:
        warnings.warn(f"{what}: |psi| = {edge:.2e} at the domain edge (t = {field.t})",
                      BoundaryContaminationWarning, stacklevel=3)
    return float(edge)


def _validate(psi0: ComplexField, cfg: EvolutionConfig):
    if psi0.values.size != cfg.n or not np.isclose(psi0.dx, cfg.dx, rtol=1e-12) \
            or not np.isclose(psi0.x_min, -cfg.X, rtol=1e-12, atol=1e-12):
        raise ValueError("initial field is not on the configuration grid; use sample_field")


def evolve(psi0: ComplexField, cfg: EvolutionConfig, checkpoints: Iterable[float] = (),
           callback: Callable[[ComplexField], None] | None = None):
    """Evolve psi0 over duration cfg.T.

    Returns the final ComplexField; with ``checkpoints`` (times relative to
    psi0.t, multiples of |dt|) returns ``(final, [fields])``.
    """
    _validate(psi0, cfg)
    dt = cfg.dt
    k = cfg.k
    weights = _WEIGHTS[cfg.order]
    mask = 1.0
    if cfg.dealias:
        mask = np.abs(k) <= (2.0 / 3.0) * np.max(np.abs(k))
    lins = {wi: np.exp(-0.5j * k * k * wi * dt) * mask for wi in set(weights)}
    # nonlinear phase lengths between linear substeps (fused halves)
    inner = [0.5 * (weights[i] + weights[i + 1]) * dt for i in range(len(weights) - 1)]
    head = 0.5 * weights[0] * dt
    tail = 0.5 * weights[-1] * dt
    marks = {}
    for tc in checkpoints:
        marks.setdefault(int(round(abs(tc) / abs(dt))), []).append(tc)
    saved = []
    u = psi0.values.copy()
    nsteps = cfg.steps
    w = cfg.workers
    sign = 1.0 if dt > 0 else -1.0

    def nl(u, h):
        return u * np.exp(1j * h * np.abs(u) ** 2)

    if nsteps > 0:
        u = nl(u, head)
    for j in range(1, nsteps + 1):
        for i, wi in enumerate(weights):
            u = sfft.ifft(lins[wi] * sfft.fft(u, workers=w), workers=w)
            if i < len(inner):
                u = nl(u, inner[i])
        if j in marks or j == nsteps or callback is not None:
            u = nl(u, tail)
            field = ComplexField(psi0.x_min, psi0.dx, psi0.t + sign * j * abs(dt), u.copy())
            if j in marks:
                saved.append(field)
                _check_edges(field, "evolution")
            if callback is not None:
                callback(field)
            if j < nsteps:
                u = nl(u, head)
        else:
            u = nl(u, tail + head)
    final = ComplexField(psi0.x_min, psi0.dx, psi0.t + sign * nsteps * abs(dt), u)
    _check_edges(final, "evolution")
    if checkpoints:
        return final, saved
    return final


_CBRT2 = 2.0 ** (1.0 / 3.0)
_WEIGHTS = {2: (1.0,),
            4: (1.0 / (2 - _CBRT2), -_CBRT2 / (2 - _CBRT2), 1.0 / (2 - _CBRT2))}


def conserved_mass(field: ComplexField) -> float:
    """Trapezoid rule for int |psi|^2 dx."""
    return float(trapezoid(np.abs(field.values) ** 2, dx=field.dx))


def discrete_mass(field: ComplexField) -> float:
    """Periodic-grid L^2 norm squared, dx sum |psi|^2 (the exactly conserved one)."""
    return float(field.dx * np.sum(np.abs(field.values) ** 2))


@dataclass(frozen=True)
class RichardsonResult:
    error: float
    ratio: float


def richardson_error(psi0: ComplexField, cfg: EvolutionConfig) -> RichardsonResult:
    """Runs at dt, dt/2, dt/4; error of the dt run from the first difference.

    ``ratio`` is the ratio of successive differences (4 for second order,
    16 for ``order=4``).
    """
    fields = []
    for f in (1, 2, 4):
        c = EvolutionConfig(cfg.X, cfg.n, cfg.dt / f, cfg.T, cfg.dealias, cfg.workers, cfg.order)
        fields.append(evolve(psi0, c).values)
    d1 = float(np.max(np.abs(fields[0] - fields[1])))
    d2 = float(np.max(np.abs(fields[1] - fields[2])))
    ratio = d1 / d2 if d2 > 0 else float("inf")
    expect = 2.0 ** cfg.order
    scale = float(np.max(np.abs(fields[0]))) + 1e-300
    if d1 > 1e-12 * scale and not (0.875 * expect <= ratio <= 1.125 * expect):
        warnings.warn(f"time refinement ratio {ratio:.3f} does not match order {cfg.order}",
                      ConvergenceWarning)
    return RichardsonResult(error=d1 * expect / (expect - 1), ratio=ratio)
