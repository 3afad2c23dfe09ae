import numpy as np
import pytest
from scipy.linalg import expm
from scipy.special import gamma as G

from nlsist.core import DiscreteSpectrum, ReflectionData, ScatteringData
from nlsist.errors import SpectralSingularityError
from nlsist.scattering import (Box, Potential, a_and_derivative, find_discrete_spectrum,
                               integrate_jost, norming_constants, proportionality_constants,
                               scan_spectral_singularities, scatter, scattering_coeffs,
                               trace_rhs, verify_trace_formula, winding_number)
from nlsist.solitons import soliton_psi

S3 = np.diag([1.0, -1.0])


def sech_a(A, z):
    """a(z) for A sech(x): Gamma(1/2 - iz)^2 / (Gamma(1/2 - iz + A) Gamma(1/2 - iz - A))."""
    w = 0.5 - 1j * z
    return G(w) ** 2 / (G(w + A) * G(w - A))


def box_transfer(q0, L, z):
    A = np.array([[-1j * z, q0], [-np.conj(q0), 1j * z]])
    return expm(A * L) @ np.diag([np.exp(1j * z * L), np.exp(-1j * z * L)])


def test_zero_potential_identity():
    m = integrate_jost(Potential.zero(), np.array([0.3, 1 + 1j]))
    assert np.allclose(m, np.eye(2))
    sc = scattering_coeffs(Potential.zero(), 0.7)
    assert sc.a == pytest.approx(1.0) and abs(sc.b) < 1e-15


@pytest.mark.parametrize("z", [-2.0, -0.3, 0.0, 0.8, 3.1])
def test_box_transfer_matrix(z):
    q0, L = 1.7, 1.3
    m = integrate_jost(Potential.box(q0, L), z)
    assert np.max(np.abs(m - box_transfer(q0, L, z))) < 1e-9
    lam = np.sqrt(z * z + q0 * q0)
    a = (np.cos(lam * L) - 1j * z * np.sin(lam * L) / lam) * np.exp(1j * z * L)
    assert abs(scattering_coeffs(Potential.box(q0, L), z).a - a) < 1e-9


def test_jost_determinant(rng):
    pot = Potential.sech(1.3, 0.2, 0.7)
    z = rng.normal(size=6) * 2
    for side in ("left", "right"):
        dets = np.linalg.det(integrate_jost(pot, z, side))
        assert np.max(np.abs(dets - 1)) < 1e-8


def test_unitarity_on_real_line(rng):
    s = rng.uniform(-6, 6, 50)
    sc = scattering_coeffs(Potential.sech(0.8, 0.0, 0.4), s)
    assert np.max(np.abs(np.abs(sc.a) ** 2 + np.abs(sc.b) ** 2 - 1)) < 1e-6


@pytest.mark.parametrize("A", [0.3, 1.0, 2.0])
def test_sech_a_closed_form(A):
    z = np.array([0.4, -1.1, 0.3 + 0.2j, 1j * 1.7])
    a = scattering_coeffs(Potential.sech(A), z, check=False).a
    assert np.max(np.abs(a - sech_a(A, z))) < 1e-9


def test_sech_eigenvalue_value():
    a = scattering_coeffs(Potential.sech(1.0), 0.5j, check=False).a
    assert abs(a) < 1e-4


def test_born_limit_sign():
    # weak Gaussian: r(z) ~ -conj(psi0_hat(-2z)),  psi0_hat(k) = int psi0 e^{-ikx}
    eps = 1e-4
    pot = Potential(lambda x: eps * np.exp(-x * x) * (1 + 0.5j * x), (-9.0, 9.0))
    z = 0.6
    r = scattering_coeffs(pot, z).r
    k = -2 * z
    x = np.linspace(-9, 9, 20001)
    hat = np.trapezoid(pot(x) * np.exp(-1j * k * x), x)
    assert abs(r + np.conj(hat)) < 1e-3 * abs(hat)


def test_taylor_remainder_order():
    pot = Potential.sech(1.0)
    z = 0.4 + 0.3j
    a0, da = a_and_derivative(pot, z)
    hs = np.array([4e-2, 2e-2, 1e-2, 5e-3])
    a = scattering_coeffs(pot, z + 1j * hs, check=False).a
    rem = np.abs(a - a0 - 1j * hs * da)
    order = np.polyfit(np.log(hs), np.log(rem), 1)[0]
    assert order >= 1.9


def test_large_z_decay():
    pot = Potential.sech(1.0)
    R = np.array([10.0, 20.0, 40.0])
    err = np.abs(scattering_coeffs(pot, 1j * R + 1, check=False).a - 1)
    assert np.all(err * R < 2.0)
    assert np.all(err[:-1] / err[1:] > 1.8)


def test_zero_potential_no_spectrum():
    assert find_discrete_spectrum(Potential.zero()).size == 0


def test_two_sech_spectrum(sech2_data):
    zs = sech2_data.discrete.zs
    assert zs.size == 2
    assert np.allclose(zs, [0.5j, 1.5j], atol=1e-9)
    assert np.max(np.abs(zs.real)) < 1e-9
    # imaginary-axis scan of a(iy) changes sign exactly twice
    y = np.linspace(0.05, 2.5, 50)
    a = scattering_coeffs(Potential.sech(2.0), 1j * y, check=False).a
    assert np.max(np.abs(a.imag)) < 1e-9
    assert np.count_nonzero(np.diff(np.sign(a.real))) == 2


def test_galilean_shifted_eigenvalue():
    zs = find_discrete_spectrum(Potential.sech(1.0, 0.0, 2.0))
    assert zs.size == 1
    assert abs(zs[0] - (-1 + 0.5j)) < 1e-9


def test_box_spectrum_count_matches_winding():
    pot = Potential.box(5.0, 1.0)
    zs, count = find_discrete_spectrum(pot, return_count=True)
    assert count == zs.size == 2
    assert np.all(np.abs(scattering_coeffs(pot, zs, check=False).a) < 1e-10)


def test_real_potential_spectrum_symmetry():
    pot = Potential(lambda x: 1.4 * np.exp(-(x - 0.3) ** 2), (-8.0, 8.7))
    z = np.array([0.3 + 0.4j, -0.7 + 1.1j])
    a = scattering_coeffs(pot, z, check=False).a
    a_m = scattering_coeffs(pot, -np.conj(z), check=False).a
    assert np.max(np.abs(a_m - np.conj(a))) < 1e-10


def test_winding_of_small_box():
    pot = Potential.sech(2.0)
    assert winding_number(pot, Box(-0.3, 0.3, 0.2, 0.8)) == 1
    assert winding_number(pot, Box(0.5, 1.5, 0.2, 0.8)) == 0


def test_sech_norming_constant(sech1_data):
    (p,) = sech1_data.discrete
    assert abs(p.z - 0.5j) < 1e-10
    assert abs(p.c - (-1j)) < 1e-8


def test_two_sech_norming_constants(sech2_data):
    cs = sech2_data.discrete.cs
    assert np.allclose(cs, [-2j, -6j], atol=1e-7)


def test_reflectionless_round_trip(sech2_data):
    x = np.linspace(-10, 10, 201)
    psi = soliton_psi(sech2_data.discrete, x, 0.0)
    assert np.max(np.abs(psi - 2 / np.cosh(x))) < 1e-5


def test_translation_multiplies_gamma():
    x0 = 1.0
    z = np.array([0.5j])
    g0 = proportionality_constants(Potential.sech(1.0), z)[0]
    g1 = proportionality_constants(Potential.sech(1.0, x0), z)[0]
    assert abs(g1 / g0 - np.exp(-2j * z[0] * x0)) < 1e-7


def test_norming_requires_eigenvalue():
    with pytest.raises(ValueError):
        norming_constants(Potential.sech(1.0), [0.7j])


def test_spectral_singularity_detected():
    # box with q0 L = pi/2 has a(0) = cos(q0 L) = 0
    pot = Potential.box(np.pi / 2, 1.0)
    with pytest.raises(SpectralSingularityError) as info:
        scan_spectral_singularities(pot, s_max=2.0, n=401)
    assert abs(info.value.z) < 1e-2
    with pytest.raises(SpectralSingularityError):
        scattering_coeffs(pot, 0.0)


def test_trace_rhs_trivial_cases():
    one = ScatteringData(ReflectionData.zero(), DiscreteSpectrum.from_pairs([1j], [1.0]))
    assert trace_rhs(one, 2j) == pytest.approx(3.0)
    assert trace_rhs(ScatteringData(), 0.3 + 0.7j) == pytest.approx(1.0)


@pytest.mark.parametrize("z", [1 + 1j, -0.5 + 0.2j, 2 - 0.5j])
def test_trace_formula_sech(sech1_data, z):
    _, _, res = verify_trace_formula(Potential.sech(1.0), z, sech1_data)
    assert res < 1e-4


def test_trace_formula_rejects_near_axis(sech1_data):
    with pytest.raises(ValueError):
        verify_trace_formula(Potential.sech(1.0), 0.3 + 1e-3j, sech1_data)
