import mpmath
import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import special
from schrosym import specfun
from schrosym.error import AccuracyError, DomainError, PoleError, SingularityError


def mp_hyp1f1(a, c, z):
    with mpmath.workdps(40):
        return complex(mpmath.hyp1f1(a, c, mpmath.mpc(z.real, z.imag)))


def test_gamma_matches_scipy():
    z = np.concatenate([np.linspace(-7.5, -0.1, 37), np.linspace(0.05, 30.0, 200)])
    z = z[np.abs(z - np.round(z)) > 0.02]
    assert_allclose(specfun.gamma(z), special.gamma(z), rtol=1e-12)


def test_gamma_scalar_and_special_values():
    assert isinstance(specfun.gamma(3.0), float)
    assert_allclose(specfun.gamma(5.0), 24.0, rtol=1e-14)
    assert_allclose(specfun.gamma(0.5), np.sqrt(np.pi), rtol=1e-14)


@pytest.mark.parametrize('pole', [0.0, -1.0, -4.0])
def test_gamma_rejects_poles(pole):
    with pytest.raises(PoleError):
        specfun.gamma(pole)


def test_rgamma_vanishes_at_poles():
    assert_allclose(specfun.rgamma(np.array([0.0, -1.0, -2.0])), 0.0, atol=0.0)
    assert_allclose(specfun.rgamma(2.5), 1.0 / special.gamma(2.5), rtol=1e-14)


def test_stirling_cross_check():
    z = np.array([0.3, 1.0, 3.7, 9.5, 15.0])
    assert_allclose(specfun.stirling_gamma(z), special.gamma(z), rtol=1e-12)
    with pytest.raises(DomainError):
        specfun.stirling_gamma(-1.0)


@pytest.mark.parametrize('a, c, z', [
    (0.5, 1.5, 3.0 + 4.0j),
    (-2.5, 1.5, -20.0),
    (1.25, 0.75, 8.0j),
    (-3.3, -1.7, 6.0 - 2.0j),
    (2.0, 5.0, -9.0 + 1.0j),
    (0.75, 1.0, 10.0j),
])
def test_kummer_against_mpmath(a, c, z):
    assert_allclose(specfun.kummer_1f1(a, c, z), mp_hyp1f1(a, c, z), rtol=1e-9)


@pytest.mark.parametrize('a, c, z', [(0.75, 1.0, 200.0j), (1.25, 1.5, -150.0j), (0.5, 2.0, 120.0 + 40.0j)])
def test_kummer_quadrature_at_large_imaginary_argument(a, c, z):
    assert_allclose(specfun.kummer_1f1(a, c, z), mp_hyp1f1(a, c, z), rtol=1e-10)


def test_kummer_asymptotic_branch():
    z = 60.0j
    assert_allclose(specfun.kummer_1f1(0.3, -0.4, z), mp_hyp1f1(0.3, -0.4, z), rtol=1e-6)


def test_kummer_terminating_polynomial():
    z = np.array([0.5, 100.0, -3.0 + 2.0j])
    assert_allclose(specfun.kummer_1f1(-2.0, 1.0, z), 1.0 - 2.0 * z + 0.5 * z ** 2, rtol=1e-12)


def test_kummer_elementary_values():
    assert_allclose(specfun.kummer_1f1(1.0, 2.0, 1.0), np.e - 1.0, rtol=1e-12)
    assert_allclose(specfun.kummer_1f1(2.0, 3.0, 0.0), 1.0, atol=1e-15)
    assert_allclose(specfun.kummer_1f1(1.5, 1.5, 2.0j), np.exp(2.0j), rtol=1e-15)


def test_kummer_random_parameters_against_mpmath():
    rng = np.random.default_rng(29)
    for _ in range(300):
        a, c = rng.uniform(-8.0, 8.0, size=2)
        z = rng.uniform(0.0, 30.0) * np.exp(2j * np.pi * rng.uniform())
        assert_allclose(specfun.kummer_1f1(a, c, z), mp_hyp1f1(a, c, z), rtol=1e-9)


@pytest.mark.parametrize('a, c, z', [(-7.73, -3.14, -2.29 + 29.88j), (0.4, -2.6, 28.0j), (-5.5, 3.2, -1.0 - 27.0j)])
def test_kummer_near_imaginary_axis(a, c, z):
    assert_allclose(specfun.kummer_1f1(a, c, z), mp_hyp1f1(a, c, z), rtol=1e-9)


def test_kummer_transformation(rng):
    for _ in range(50):
        a, c = rng.uniform(-8.0, 8.0, size=2)
        z = rng.uniform(0.0, 30.0) * np.exp(2j * np.pi * rng.uniform())
        assert_allclose(specfun.kummer_1f1(a, c, z), np.exp(z) * specfun.kummer_1f1(c - a, c, -z), rtol=1e-9)


def test_kummer_errors():
    with pytest.raises(PoleError):
        specfun.kummer_1f1(0.5, -2.0, 1.0)
    with pytest.raises(AccuracyError):
        specfun.kummer_1f1(1.5, 0.5, 250.0j)


def test_kummer_bessel_identity():
    z = np.linspace(0.1, 14.0, 60)
    for nu in (-0.25, 0.5, 1.0):
        expected = special.gamma(1.0 + nu) * np.exp(1j * z) * (z / 2.0) ** (-nu) * special.jv(nu, z)
        actual = specfun.kummer_1f1(nu + 0.5, 2.0 * nu + 1.0, 2j * z)
        assert_allclose(actual, expected, atol=1e-10 * np.max(np.abs(expected)))


@pytest.mark.parametrize('nu', [0.0, 0.25, 1.0, 2.5])
def test_bessel_against_scipy(nu):
    x = np.linspace(0.0, 40.0, 161)
    assert_allclose(specfun.bessel_j(nu, x), special.jv(nu, x), atol=5e-12)


def test_half_order_closed_forms():
    x = np.linspace(0.1, 50.0, 100)
    envelope = np.sqrt(2.0 / (np.pi * x))
    assert_allclose(specfun.bessel_j(0.5, x), envelope * np.sin(x), atol=1e-13)
    assert_allclose(specfun.bessel_j(-0.5, x), envelope * np.cos(x), atol=1e-13)


def test_regularized_bessel_at_origin():
    for nu in (-0.25, 0.0, 1.5):
        assert_allclose(specfun.bessel_j_regularized(nu, 0.0), 2.0 ** (-nu) / special.gamma(nu + 1.0), rtol=1e-13)


def test_bessel_domain():
    with pytest.raises(SingularityError):
        specfun.bessel_j(-0.25, np.array([0.0, 1.0]))
    with pytest.raises(DomainError):
        specfun.bessel_j_regularized(-0.75, 1.0)
    with pytest.raises(DomainError):
        specfun.bessel_j_regularized(0.5, -1.0)


def test_exponential_integrals_against_scipy():
    x = np.logspace(-3.0, 2.5, 120)
    assert_allclose(specfun.exp_integral_e1(x), special.exp1(x), rtol=1e-12)
    positive = np.linspace(0.5, 60.0, 120)
    assert_allclose(specfun.exp_integral_ei(positive), special.expi(positive), rtol=1e-12)
    assert_allclose(specfun.exp_integral_ei(-x), special.expi(-x), rtol=1e-12)


def test_exponential_integral_relations():
    x = np.linspace(0.05, 50.0, 101)
    assert_allclose(specfun.exp_integral_e1(x), -specfun.exp_integral_ei(-x), rtol=1e-15)
    assert abs(specfun.exp_integral_e1(50.0)) < 1e-20
    # E1 is continuous where the series hands over to the continued fraction
    h = 1e-9
    jump = specfun.exp_integral_e1(1.0 + h) - specfun.exp_integral_e1(1.0 - h) + 2.0 * h * np.exp(-1.0)
    assert abs(jump) / specfun.exp_integral_e1(1.0) < 1e-12


def test_scaled_exponential_integral_for_large_arguments():
    x = 600.0
    assert_allclose(specfun.exp_scaled_e1(x), (1.0 - 1.0 / x + 2.0 / x ** 2 - 6.0 / x ** 3) / x, rtol=1e-9)
    assert_allclose(specfun.exp_scaled_e1(-5.0), np.exp(-5.0) * special.expi(5.0) * -1.0, rtol=1e-12)


def test_exponential_integral_singular_at_zero():
    with pytest.raises(SingularityError):
        specfun.exp_integral_e1(np.array([1.0, 0.0]))


def test_accuracy_table():
    for accuracy in specfun.ACCURACY.values():
        assert 0.0 < accuracy.target_rel_error <= 1e-6
        assert np.isfinite(accuracy.max_argument_modulus)
    with pytest.raises(ValueError):
        specfun.SpecFunAccuracy('broken', 1e-3, 10.0)
