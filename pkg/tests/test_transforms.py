import functools
import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal
from schrosym import kernels, transforms
from schrosym.error import BlowUpError, BranchError, ParameterError, PhaseVortexError
from schrosym.misc import relative_norm
from schrosym.nse_dynamics import DoebnerGoldin, dg_residual
from schrosym.spectral import PhysParams, SpectralGrid, WaveField
from schrosym.transforms import GaugeParams, PotentialSpec

DG_COEFFICIENTS = [0.05, 0.0, 0.0, -0.05, 0.0]


def sample_points(rng, dimension, count=20, radius=1.5):
    return rng.uniform(-radius, radius, size=(count, dimension))


def gaussian_field(grid, t=0.7, beta=0.5):
    return WaveField(grid, kernels.case2_kernel(grid.points(), t, beta, grid.phys), t)


def test_potential_values():
    potential = PotentialSpec.constant(2, a=0.5, b=[1.0, -2.0], c=3.0)
    points = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, -1.0]])
    assert_allclose(potential(points, 0.3), [3.0, 3.0, 9.5])


def test_potential_from_config():
    assert PotentialSpec.from_config({'type': 'oscillator', 'omega': 2.0}, 3).coefficients(0.0)[0] == 2.0
    polynomial = PotentialSpec.from_config({'type': 'polynomial', 'a': [0.0, 1.0], 'b': [[1.0], [0.0, 2.0]]}, 2)
    a, b, c = polynomial.coefficients(2.0)
    assert a == 2.0
    assert_allclose(b, [1.0, 4.0])
    assert c == 0.0
    random = PotentialSpec.from_config({'type': 'trigonometric'}, 2, np.random.default_rng(1))
    assert random.coefficients(0.5)[1].shape == (2,)


def test_potential_errors():
    with pytest.raises(ParameterError):
        PotentialSpec.constant(2, b=[1.0, 2.0, 3.0])
    with pytest.raises(ParameterError):
        PotentialSpec.from_config({'type': 'trigonometric'}, 2)
    with pytest.raises(ParameterError):
        PotentialSpec.from_config({'type': 'quartic'}, 2)
    with pytest.raises(ParameterError):
        PotentialSpec.polynomial(2, b=[[1.0]])
    mismatched = PotentialSpec(lambda t: 0.0, lambda t: np.zeros(3), lambda t: 0.0, 2)
    with pytest.raises(ParameterError):
        mismatched.validate([0.0, 0.5])


def test_niederer_flow():
    phys = PhysParams(1.3, 0.8)
    numeric = transforms.solve_transform_coefficients(PotentialSpec.oscillator(2, 1.0, phys), (0.0, 1.0), 1e-3, phys)
    closed = transforms.niederer_coefficients(1.0, numeric.times, 2, phys)
    assert numeric.compare(closed) < 1e-8
    assert numeric.tau_defect() < 1e-8
    assert abs(numeric.at(0.0).tau) < 1e-15
    assert numeric.at(0.0).sigma == pytest.approx(1.0, abs=1e-15)


def test_flow_runs_backwards_in_time(phys):
    numeric = transforms.solve_transform_coefficients(PotentialSpec.oscillator(2, 1.0, phys), (-0.5, 0.5), 1e-3, phys)
    assert numeric.times[0] == pytest.approx(-0.5)
    assert numeric.times[-1] == pytest.approx(0.5)
    closed = transforms.niederer_coefficients(1.0, numeric.times, 2, phys)
    assert numeric.compare(closed) < 1e-8
    assert numeric.at(-0.5).tau == pytest.approx(np.tan(-0.5), rel=1e-8)


def test_linear_potential_flow(phys):
    force = np.array([0.3, -0.2])
    numeric = transforms.solve_transform_coefficients(PotentialSpec.linear(force), (0.0, 1.0), 1e-3, phys)
    closed = transforms.linear_potential_coefficients(force, 1.0, numeric.times, phys)
    assert numeric.compare(closed) < 1e-8
    assert numeric.tau_defect() < 1e-8


def test_coefficient_errors(phys):
    potential = PotentialSpec.oscillator(2, 1.0, phys)
    with pytest.raises(ParameterError):
        transforms.solve_transform_coefficients(potential, (0.1, 1.0))
    with pytest.raises(ParameterError):
        transforms.solve_transform_coefficients(potential, (0.0, 1.0), dt=0.0)
    with pytest.raises(BlowUpError):
        transforms.niederer_coefficients(1.0, np.linspace(0.0, 2.0, 11), 2)
    with pytest.raises(ParameterError):
        transforms.niederer_coefficients(-1.0, np.linspace(0.0, 1.0, 11), 2)
    with pytest.raises(ParameterError):
        transforms.linear_potential_coefficients([0.1, 0.2], 0.0, np.linspace(0.0, 1.0, 11))
    coeffs = transforms.niederer_coefficients(1.0, np.linspace(0.0, 1.0, 11), 2)
    with pytest.raises(ParameterError):
        coeffs.at(1.5)


def test_niederer_image_of_invariant_kernel(phys, rng):
    t = 0.4
    mesh = transforms.niederer_coefficients(1.0, np.linspace(0.0, 0.5, 1001), 2, phys)
    image = transforms.transform_kernel(mesh, functools.partial(kernels.invariant_kernel_case1, alpha=1.0,
                                                                phys=phys))
    points = sample_points(rng, 2)
    expected = kernels.oscillator_invariant_kernel(points, t, 1.0, 1.0, phys)
    assert relative_norm(image(points, t) - expected, expected) < 1e-8


def test_transformed_gaussian_solves_random_potentials(phys, rng):
    u = functools.partial(kernels.case2_kernel, beta=0.5, phys=phys)
    points = sample_points(rng, 2)
    for _ in range(3):
        potential = PotentialSpec.trigonometric(2, rng, scale=0.3)
        coeffs = transforms.solve_transform_coefficients(potential, (0.0, 1.0), 1e-3, phys)
        for t in (0.25, 0.5, 0.75):
            assert transforms.transformed_residual(coeffs, potential, u, points, t) < 1e-5


def test_apply_transform_to_a_grid_field(grid2d):
    phys = grid2d.phys
    coeffs = transforms.linear_potential_coefficients([0.3, -0.2], 0.5, np.linspace(0.0, 1.0, 101), phys)
    initial = gaussian_field(grid2d, t=0.0)
    mapped = transforms.apply_transform(coeffs, initial, grid2d, 0.5)
    u = functools.partial(kernels.case2_kernel, beta=0.5, phys=phys)
    expected = transforms.transform_kernel(coeffs, u)(grid2d.points(), 0.5)
    assert mapped.time == 0.5
    assert_allclose(mapped.values, expected, atol=1e-10 * np.max(np.abs(expected)))


def test_apply_transform_checks_dimension(grid2d):
    coeffs = transforms.niederer_coefficients(1.0, np.linspace(0.0, 1.0, 11), 3)
    with pytest.raises(ParameterError):
        transforms.apply_transform(coeffs, gaussian_field(grid2d), grid2d, 0.5)


def test_gauge_from_coefficients():
    phys = PhysParams(1.3, 0.8)
    diffusion, diffusion_prime, c2 = 0.05, 1.0, 0.1
    params = GaugeParams.from_coefficients(diffusion, diffusion_prime, c2, phys)
    radicand = 1.0 - 4.0 * 1.3 / 0.8 * diffusion_prime * c2 - 4.0 * 1.3 ** 2 * diffusion ** 2 / 0.8 ** 2
    assert params.lam == pytest.approx(radicand ** -0.5, rel=1e-14)
    assert params.gamma == pytest.approx(-2.0 * 1.3 * diffusion * params.lam / 0.8, rel=1e-14)
    with pytest.raises(ParameterError):
        GaugeParams.from_coefficients(1.0, 1.0, 0.0, phys)
    with pytest.raises(ParameterError):
        GaugeParams(0.3, 0.0)


def test_gauge_group_law(rng):
    first, second, third = [GaugeParams(rng.normal(), rng.uniform(0.5, 2.0) * rng.choice([-1.0, 1.0]))
                            for _ in range(3)]
    assert first.compose(second).compose(third) == first.compose(second.compose(third))
    assert first.inverse().compose(first) == GaugeParams.identity()
    assert first.compose(first.inverse()) == GaugeParams.identity()
    assert first.compose(GaugeParams.identity()) == first
    assert first != second
    assert first.serialized == {'gamma': first.gamma, 'lambda': first.lam}


def test_linearizability_relations():
    assert transforms.is_linearizable(0.05, 1.0, DG_COEFFICIENTS)
    assert not transforms.is_linearizable(0.05, 1.0, [0.05, 0.0, 0.1, -0.05, 0.0])
    assert not transforms.is_linearizable(0.05, 1.0, [0.05, 0.2, 0.0, -0.05, 0.0])
    assert transforms.is_linearizable(0.0, 0.0, [1.0, 2.0, 3.0, 4.0, 5.0])
    with pytest.raises(ParameterError):
        transforms.is_linearizable(0.05, 1.0, [0.05, 0.0, 0.0])


def test_zero_mask():
    assert_array_equal(transforms.zero_mask(np.array([1.0, 1e-13, 0.5, 0.0])), [False, True, False, True])
    assert np.all(transforms.zero_mask(np.zeros(4)))


def test_continuous_phase_follows_a_chirp():
    x = np.linspace(-3.0, 3.0, 200)
    values = np.exp(3j * x - 0.1 * x ** 2)
    phase = transforms.continuous_phase(values)
    assert_allclose(np.diff(phase), 3.0 * np.diff(x), atol=1e-12)
    reference = np.argmax(np.abs(values))
    target = float(np.angle(values[reference])) + 6.0 * np.pi
    shifted = transforms.continuous_phase(values, reference_phase=target)
    assert shifted[reference] == pytest.approx(target, abs=1e-12)


def test_continuous_phase_detects_vortex():
    x = np.linspace(-4.0, 4.0, 64)
    X, Y = np.meshgrid(x, x, indexing='ij')
    values = (X + 1j * Y) * np.exp(-0.5 * (X ** 2 + Y ** 2))
    with pytest.raises(PhaseVortexError):
        transforms.continuous_phase(values)
    assert transforms.continuous_phase(values, strict=False).shape == values.shape
    with pytest.raises(ParameterError):
        transforms.continuous_phase(values, phase=np.zeros(10))


def test_gauge_round_trip_on_a_field(grid2d):
    field = gaussian_field(grid2d)
    params = GaugeParams(0.2, 1.5)
    theta = transforms.continuous_phase(field.values)
    mapped = transforms.dg_gauge_forward(field, params, theta)
    live = ~transforms.zero_mask(field.values)
    assert_allclose(np.abs(mapped.values[live]), np.abs(field.values[live]), rtol=1e-12)
    mapped_phase = params.phase(np.log(np.abs(field.values)), theta)
    restored = transforms.dg_gauge_inverse(mapped, params, mapped_phase)
    assert_allclose(restored.values[live], field.values[live], rtol=1e-10)
    assert restored.time == field.time


def test_pointwise_gauge_round_trip(phys, rng):
    params = GaugeParams(0.4, -1.3)
    points = sample_points(rng, 2)

    def log_kernel(q, s):
        return kernels.case2_log_kernel(q, s, 0.5, phys)

    def mapped_log(q, s):
        logarithm = log_kernel(q, s)
        return logarithm.real + 1j * params.phase(logarithm.real, logarithm.imag)

    mapped = transforms.gauge_kernel(None, params, log_kernel)
    restored = transforms.gauge_kernel(mapped, params.inverse(), mapped_log)
    original = kernels.case2_kernel(points, 0.7, 0.5, phys)
    assert relative_norm(restored(points, 0.7) - original, original) < 1e-10


def test_gauge_image_solves_doebner_goldin(phys):
    nl = DoebnerGoldin(0.05, 1.0, DG_COEFFICIENTS)
    params = nl.gauge(phys)
    grid = SpectralGrid(2, 64, 12.0, phys)
    effective = phys.with_mass(phys.mass * params.lam)
    chain = transforms.gauge_kernel(functools.partial(kernels.case2_kernel, beta=0.5, phys=effective),
                                    params.inverse(),
                                    functools.partial(kernels.case2_log_kernel, beta=0.5, phys=effective))

    def solution(s):
        return WaveField(grid, chain(grid.points(), s), s)

    assert dg_residual(solution, 1.0, nl) < 1e-5


def test_auberson_sabatier_pullback(rng):
    s, alpha = 0.5, 1.0
    a = kernels.case1_exponent(2, alpha)

    def kernel(q, time):
        return kernels.as_invariant_solution(q, time, alpha)

    def log_kernel(q, time):
        values = kernel(q, time)
        return np.log(np.abs(values)) + 1j * (np.angle(values * np.exp(0.5j * np.pi * a)) - 0.5 * np.pi * a)

    pulled_back = transforms.as_pullback_kernel(kernel, s, log_kernel)
    assert transforms.as_residual(pulled_back, sample_points(rng, 2), 1.0, s) < 1e-5


def test_auberson_sabatier_maps_time_and_keeps_modulus(grid2d):
    field = gaussian_field(grid2d)
    linear = transforms.as_linearize(field, 0.5)
    assert linear.time == pytest.approx(np.sqrt(0.5) * field.time)
    live = ~transforms.zero_mask(field.values)
    assert_allclose(np.abs(linear.values[live]), np.abs(field.values[live]), rtol=1e-12)
    assert transforms.as_pullback(linear, 0.5).time == pytest.approx(field.time)
    with pytest.raises(BranchError):
        transforms.as_linearize(field, 1.0)
    with pytest.raises(BranchError):
        transforms.as_pullback_kernel(lambda q, t: q, 1.5)
