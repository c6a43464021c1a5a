import functools
import numpy as np
import pytest
from numpy.testing import assert_allclose
from schrosym import kernels, spectral, transforms
from schrosym.error import ParameterError, SingularityError
from schrosym.misc import relative_norm
from schrosym.spectral import PhysParams, WaveField
from schrosym.transforms import PotentialSpec


def points(rng, dimension, count=20, radius=1.5):
    return rng.uniform(-radius, radius, size=(count, dimension))


@pytest.mark.parametrize('dimension, alpha', [(2, 1.0), (3, 1.0), (3, 2.0)])
def test_case1_kernel_solves_free_equation(phys, rng, dimension, alpha):
    kernel = functools.partial(kernels.invariant_kernel_case1, alpha=alpha, phys=phys)
    assert kernels.free_equation_residual(kernel, points(rng, dimension), 1.0, phys) < 1e-6


def test_galilean_and_case2_solve_free_equation(rng):
    phys = PhysParams(1.3, 0.8)
    x = points(rng, 2)
    assert kernels.free_equation_residual(functools.partial(kernels.galilean_kernel, phys=phys), x, 0.7, phys) < 1e-6
    case2 = functools.partial(kernels.case2_kernel, beta=0.5, phys=phys)
    assert kernels.free_equation_residual(case2, x, 0.7, phys) < 1e-6


def test_case1_reduces_to_galilean(phys, rng):
    x = points(rng, 3)
    assert_allclose(kernels.invariant_kernel_case1(x, 1.0, 0.0, phys), kernels.galilean_kernel(x, 1.0, phys),
                    rtol=1e-12)


def test_case2_is_galilean_at_complex_time(phys, rng):
    x = points(rng, 2)
    beta = 0.5
    shifted = 0.8 - 2j * phys.mass * phys.hbar * beta
    assert_allclose(kernels.case2_kernel(x, 0.8, beta, phys), kernels.galilean_kernel(x, shifted, phys), rtol=1e-12)
    assert_allclose(np.exp(kernels.case2_log_kernel(x, 0.8, beta, phys)), kernels.case2_kernel(x, 0.8, beta, phys),
                    rtol=1e-12)


def test_case2_initial_data_is_gaussian(phys, rng):
    x = points(rng, 2)
    beta = 0.5
    expected = (2.0 * np.pi) ** -1.0 * (2.0 * beta) ** -1.0 * np.exp(-np.sum(x ** 2, axis=-1) / (4.0 * beta))
    assert_allclose(kernels.case2_kernel(x, 0.0, beta, phys), expected, rtol=1e-13)
    with pytest.raises(ParameterError):
        kernels.case2_kernel(x, 0.0, -1.0, phys)


def test_bessel_forms(phys, rng):
    x = points(rng, 3)
    assert_allclose(kernels.bessel_kernel_n3_alpha1(x, 1.0, phys), kernels.invariant_kernel_case1(x, 1.0, 1.0, phys),
                    rtol=1e-8)
    for n in (2, 3):
        x = points(rng, n)
        assert_allclose(kernels.bessel_kernel_alpha_eq_n(x, 1.0, phys),
                        kernels.invariant_kernel_case1(x, 1.0, float(n), phys), rtol=1e-8)
    # finite at the origin
    assert np.isfinite(kernels.bessel_kernel_n3_alpha1(np.zeros((1, 3)), 1.0, phys)).all()


def test_kernels_reject_bad_times_and_dimensions(phys):
    with pytest.raises(SingularityError):
        kernels.galilean_kernel(np.zeros((1, 2)), 0.0, phys)
    with pytest.raises(ParameterError):
        kernels.invariant_kernel_case1(np.zeros((1, 1)), 1.0, 0.5, phys)
    with pytest.raises(ParameterError):
        kernels.invariant_kernel_case1(np.zeros((1, 2)), 1.0, 4.0, phys)
    with pytest.raises(SingularityError):
        kernels.oscillator_invariant_kernel(np.zeros((1, 2)), np.pi / 2.0, 1.0, 1.0, phys)


def test_descendant_kernels_reduce_to_case1(phys, rng):
    x = points(rng, 2)
    expected = kernels.invariant_kernel_case1(x, 0.9, 1.0, phys)
    assert_allclose(kernels.dg_effective_mass_kernel(x, 0.9, 1.0, 1.0, phys), expected, rtol=1e-14)
    assert_allclose(kernels.as_invariant_solution(x, 0.9, 1.0),
                    kernels.invariant_kernel_case1(x, 0.9, 1.0, PhysParams(0.5, 1.0)), rtol=1e-14)
    assert_allclose(kernels.linear_potential_invariant_kernel(x, 0.9, [0.0, 0.0], 1.0, 1.0, phys), expected,
                    rtol=1e-12)


def test_oscillator_kernel_solves_oscillator_equation(phys, rng):
    kernel = functools.partial(kernels.oscillator_invariant_kernel, omega=1.0, alpha=1.0, phys=phys)
    potential = PotentialSpec.oscillator(2, 1.0, phys)
    assert kernels.free_equation_residual(kernel, points(rng, 2), 0.4, phys, potential) < 1e-6


@pytest.mark.parametrize('dimension', [2, 3])
def test_oscillator_kernel_reduces_to_case1(phys, rng, dimension):
    x = points(rng, dimension)
    free = kernels.invariant_kernel_case1(x, 1.0, 1.0, phys)
    assert relative_norm(kernels.oscillator_invariant_kernel(x, 1.0, 1e-5, 1.0, phys) - free, free) < 1e-8


@pytest.mark.parametrize('sigma', [1.0, 1.7])
def test_linear_potential_kernel_solves_its_equation(phys, rng, sigma):
    b = np.array([0.3, -0.2])
    kernel = functools.partial(kernels.linear_potential_invariant_kernel, b=b, sigma=sigma, alpha=1.0, phys=phys)
    assert kernels.free_equation_residual(kernel, points(rng, 2), 1.0, phys, PotentialSpec.linear(b)) < 1e-6


def test_linear_potential_kernel_is_the_transform_image(phys, rng):
    b = np.array([0.3, -0.2])
    sigma = 1.7
    x = points(rng, 2)
    coeffs = transforms.linear_potential_coefficients(b, sigma, np.linspace(0.5, 1.5, 41), phys)
    image = transforms.transform_kernel(coeffs, functools.partial(kernels.invariant_kernel_case1, alpha=1.0,
                                                                  phys=phys))
    assert_allclose(kernels.linear_potential_invariant_kernel(x, 0.9, b, sigma, 1.0, phys), image(x, 0.9),
                    rtol=1e-10)


@pytest.mark.parametrize('dimension, alpha', [(2, 1.0), (3, 2.0)])
def test_case1_kernel_is_invariant(phys, rng, dimension, alpha):
    kernel = functools.partial(kernels.invariant_kernel_case1, alpha=alpha, phys=phys)
    x = points(rng, dimension)
    assert kernels.kernel_rotation_residual(kernel, x, 1.0, 0, 1) < 1e-5
    params = kernels.KernelParams(phys, dimension, kernels.PowerAlpha(alpha))
    momenta = rng.uniform(0.5, 2.0, size=(20, dimension))
    for j in range(dimension):
        assert kernels.kernel_boost_residual(params, momenta, 1.0, j, 1e-3) < 1e-5


def test_boost_residual_rejects_zero_momentum(phys):
    params = kernels.KernelParams(phys, 2, kernels.PowerAlpha(1.0))
    with pytest.raises(SingularityError):
        kernels.kernel_boost_residual(params, np.zeros((1, 2)), 1.0, 0)


def test_decay_exponents(phys):
    times = np.logspace(2.0, 4.0, 9)
    origin = np.zeros((1, 3))
    values = [kernels.invariant_kernel_case1(origin, t, 2.0, phys)[0] for t in times]
    assert abs(kernels.decay_exponent(values, times) + kernels.case1_exponent(3, 2.0)) < 0.01
    values = [kernels.case2_kernel(np.zeros((1, 2)), t, 0.5, phys)[0] for t in times]
    assert abs(kernels.decay_exponent(values, times) + 1.0) < 0.01


@pytest.mark.parametrize('symbol', [kernels.PowerAlpha(1.5), kernels.ExpBeta(0.1), kernels.ShiftedSqrt(2.0),
                                    kernels.Identity()])
def test_closure_multipliers(symbol):
    p = np.linspace(0.2, 3.0, 15)
    assert_allclose(symbol.closure_multiplier(p), kernels.SymbolSpec.closure_multiplier(symbol, p), rtol=1e-13)


def test_symbol_configuration():
    assert kernels.symbol_from_config({'variant': 'power', 'alpha': 1.0}) == kernels.PowerAlpha(1.0)
    assert kernels.symbol_from_config({'variant': 'sqrt', 'constant': 1.0}).serialized == {'variant': 'sqrt',
                                                                                           'constant': 1.0}
    with pytest.raises(ParameterError):
        kernels.symbol_from_config({'variant': 'cubic'})
    with pytest.raises(ParameterError):
        kernels.PowerAlpha(-1.0)
    with pytest.raises(ParameterError):
        kernels.KernelParams(PhysParams(), 2, kernels.PowerAlpha(4.0))


def test_profile_singular_where_symbol_vanishes(phys):
    params = kernels.KernelParams(phys, 2, kernels.PowerAlpha(1.0))
    with pytest.raises(SingularityError):
        kernels.fourier_profile(np.array([0.0, 1.0]), 1.0, params)


def test_smoothing_map_without_weight_is_free_evolution(grid2d):
    field = WaveField(grid2d, np.exp(-grid2d.radius_squared / 2.0))
    smoothed = kernels.smoothing_map(field, 0.0, 0.5)
    assert_allclose(smoothed.values, spectral.free_evolve(field, 0.5).values, atol=1e-14)
    weighted = kernels.smoothing_map(field, 1.0, 0.5)
    assert np.all(np.isfinite(weighted.values))
    assert relative_norm(weighted.values - smoothed.values, smoothed.values) > 0.1


def test_sample_rows():
    rows = kernels.sample_rows(np.array([[1.0, 2.0]]), 0.5, np.array([1j]))
    assert_allclose(rows[0], [1.0, 2.0, 0.5, 0.0, 1.0, 1.0, np.pi / 2.0])
