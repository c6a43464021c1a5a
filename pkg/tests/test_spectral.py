import numpy as np
import pytest
from numpy.testing import assert_allclose
from schrosym import spectral
from schrosym.error import InterpolationRangeError, ParameterError, SymbolSingularityError
from schrosym.spectral import PhysParams, SpectralGrid, WaveField


def gaussian(grid, width=1.0):
    return WaveField(grid, np.exp(-grid.radius_squared / (2.0 * width ** 2)))


@pytest.mark.parametrize('mass, hbar', [(0.0, 1.0), (1.0, -1.0), (np.inf, 1.0)])
def test_phys_params_must_be_positive(mass, hbar):
    with pytest.raises(ParameterError):
        PhysParams(mass, hbar)


@pytest.mark.parametrize('dimension, points, half_width', [(0, 64, 1.0), (1, 48, 1.0), (2, 2, 1.0), (1, 64, 0.0)])
def test_grid_validation(dimension, points, half_width):
    with pytest.raises(ParameterError):
        SpectralGrid(dimension, points, half_width)


def test_grid_layout():
    grid = SpectralGrid(1, 8, 2.0, PhysParams(1.0, 0.5))
    assert_allclose(grid.axis, -2.0 + 0.5 * np.arange(8))
    assert grid.dx == 0.5
    assert_allclose(grid.dp, np.pi * 0.5 / 2.0)
    assert_allclose(grid.nyquist_momentum, np.pi * 0.5 / 0.5)
    assert_allclose(grid.momentum_axis.min(), -grid.nyquist_momentum)
    assert grid.regularized_momentum_magnitude[0] == grid.dp
    assert grid == SpectralGrid(1, 8, 2.0, PhysParams(1.0, 0.5))
    assert grid.refined(2).points_per_axis == 16
    assert grid.points().shape == (8, 1)


def test_field_validation(grid2d):
    with pytest.raises(ParameterError):
        WaveField(grid2d, np.zeros((3, 3)))
    field = gaussian(grid2d)
    assert field.components == 1
    assert not field.amplitudes.flags.writeable
    with pytest.raises(ParameterError):
        WaveField(grid2d, np.zeros((2,) + grid2d.shape)).values


def test_gaussian_transform_matches_closed_form(grid1d):
    # with hbar = 1 the transform of exp(-x^2/2) is exp(-p^2/2)
    spectrum = spectral.forward_transform(gaussian(grid1d))
    p = grid1d.momenta[0]
    assert_allclose(spectrum.values, np.exp(-p ** 2 / 2.0), atol=1e-12)


def test_parseval_and_inverse(grid2d, rng):
    values = rng.normal(size=grid2d.shape) + 1j * rng.normal(size=grid2d.shape)
    field = WaveField(grid2d, values)
    spectrum = spectral.forward_transform(field)
    assert_allclose(spectrum.norm(), field.norm(), rtol=1e-12)
    assert_allclose(spectral.inverse_transform(spectrum).values, values, atol=1e-12)
    with pytest.raises(ParameterError):
        spectral.inverse_transform(field)


def test_derivatives_of_gaussian(grid1d):
    field = gaussian(grid1d)
    x = grid1d.coordinates[0]
    assert_allclose(spectral.laplacian(field).values, (x ** 2 - 1.0) * np.exp(-x ** 2 / 2.0), atol=1e-10)
    assert_allclose(spectral.gradient(field, 0).values, -x * np.exp(-x ** 2 / 2.0), atol=1e-10)


def test_free_evolution_of_gaussian(grid1d):
    t = 1.0
    evolved = spectral.free_evolve(gaussian(grid1d), t)
    x = grid1d.coordinates[0]
    expected = (1.0 + 1j * t) ** -0.5 * np.exp(-x ** 2 / (2.0 * (1.0 + 1j * t)))
    assert evolved.time == t
    assert_allclose(evolved.values, expected, atol=1e-10)


def test_padded_position_product(grid2d):
    field = gaussian(grid2d, width=1.5)
    product = spectral.multiply_position(field, 1)
    assert_allclose(product.values, grid2d.coordinates[1] * field.values, atol=1e-10)


def test_spectrum_embedding_round_trip(grid2d, rng):
    spectrum = rng.normal(size=(1,) + grid2d.shape) + 0j
    fine = grid2d.refined(2)
    embedded = spectral.embed_spectrum(spectrum, grid2d, fine)
    assert embedded.shape == (1,) + fine.shape
    assert_allclose(spectral.truncate_spectrum(embedded, fine, grid2d), spectrum)


def test_band_limit_fraction(grid2d, rng):
    assert spectral.band_limit_fraction(gaussian(grid2d)) < 1e-12
    noise = WaveField(grid2d, rng.normal(size=grid2d.shape))
    assert spectral.band_limit_fraction(noise) > 0.1
    assert spectral.band_limit_fraction(WaveField(grid2d, np.zeros(grid2d.shape))) == 0.0


def test_singular_symbol(grid2d):
    field = gaussian(grid2d)

    def inverse_magnitude(momenta):
        with np.errstate(divide='ignore'):
            return 1.0 / np.sqrt(sum(p ** 2 for p in momenta))

    with pytest.raises(SymbolSingularityError):
        spectral.apply_multiplier(field, inverse_magnitude)
    smoothed = spectral.apply_multiplier(field, inverse_magnitude, regularize=True)
    assert np.all(np.isfinite(smoothed.values))


def test_fourier_interpolation(grid2d, rng):
    field = gaussian(grid2d)
    points = rng.uniform(-3.0, 3.0, size=(5, 7, 2))
    expected = np.exp(-np.sum(points ** 2, axis=-1) / 2.0)
    assert_allclose(spectral.fourier_interpolate(field, points)[0], expected, atol=1e-10)
    with pytest.raises(InterpolationRangeError):
        spectral.fourier_interpolate(field, np.array([[0.0, 13.0]]))
    with pytest.raises(ParameterError):
        spectral.fourier_interpolate(field, np.zeros((4, 3)))


def test_window(grid2d):
    window = grid2d.window(0.5, 0.05)
    assert_allclose(window[32, 32], 1.0, atol=1e-12)
    assert window[0, 0] < 1e-12
