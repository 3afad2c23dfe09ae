"""Complex log-gamma via a Lanczos approximation (g = 7, n = 9)."""

import numpy as np

from .errors import GammaPoleError

_G = 7.0
_LANCZOS = np.array([
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
])
_HALF_LOG_2PI = 0.5 * np.log(2.0 * np.pi)


def _lanczos_right(w):
    # valid for Re(w) >= 0.5
    w = w - 1.0
    s = np.full_like(w, _LANCZOS[0])
    for k in range(1, len(_LANCZOS)):
        s = s + _LANCZOS[k] / (w + k)
    t = w + _G + 0.5
    return _HALF_LOG_2PI + (w + 0.5) * np.log(t) - t + np.log(s)


def complex_log_gamma(w):
    """Principal-branch log Gamma(w) for complex (or real) ``w``.

    The branch is the analytic continuation of the real log-gamma from the
    positive axis with the cut along the negative real axis.  For Re w < 0.5
    the upward recurrence log G(w) = log G(w + n) - sum log(w + k) is used,
    which stays on that branch (principal logs of each factor).
    """
    w_arr = np.asarray(w, dtype=complex)
    scalar = w_arr.ndim == 0
    w_arr = np.atleast_1d(w_arr)

    near_int = np.abs(w_arr - np.round(w_arr.real))
    bad = (np.round(w_arr.real) <= 0) & (near_int < 1e-12)
    if np.any(bad):
        raise GammaPoleError(f"log-gamma pole at w = {w_arr[bad][0]}")

    shift = np.maximum(0, np.ceil(0.5 - w_arr.real)).astype(int)
    acc = np.zeros_like(w_arr)
    for k in range(int(shift.max(initial=0))):
        m = shift > k
        acc[m] += np.log(w_arr[m] + k)
    out = _lanczos_right(w_arr + shift) - acc
    return out[0] if scalar else out


def gamma(w):
    """Gamma(w) = exp(log Gamma(w)); convenience for identity checks."""
    return np.exp(complex_log_gamma(w))
