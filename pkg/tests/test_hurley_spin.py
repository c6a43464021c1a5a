import numpy as np
import pytest
from numpy.testing import assert_allclose
from schrosym import hurley_spin
from schrosym.error import ParameterError, UnsupportedSpinError
from schrosym.kernels import PowerAlpha
from schrosym.spectral import PhysParams, SpectralGrid
from schrosym.symmetry_ops import OperatorSpec, random_wave_packets

PHYS = PhysParams(1.3, 0.7)


@pytest.fixture(scope='module')
def grid():
    return SpectralGrid(3, 32, 10.0, PHYS)


def free_field(grid, seed):
    rng = np.random.default_rng(seed)
    return random_wave_packets(grid, rng, count=2, width=1.5, carrier=0.3, spread=0.1)


@pytest.mark.parametrize('s', [0.5, 1.0, 1.5])
def test_spin_matrices(s):
    hbar = 0.7
    sx, sy, sz = hurley_spin.spin_matrices(s, hbar)
    size = int(round(2 * s)) + 1
    assert_allclose(sx @ sy - sy @ sx, 1j * hbar * sz, atol=1e-14)
    assert_allclose(sx @ sx + sy @ sy + sz @ sz, hbar ** 2 * s * (s + 1) * np.eye(size), atol=1e-14)
    assert_allclose(np.diag(sz).real, hbar * (s - np.arange(size)))


@pytest.mark.parametrize('s, psi_size, omega_size', [(0.5, 2, 0), (1.0, 3, 1)])
def test_spin_systems(s, psi_size, omega_size):
    spin = hurley_spin.build_spin_system(s, PHYS)
    assert (spin.psi_size, spin.omega_size, spin.size) == (psi_size, omega_size, int(6 * s + 1))
    assert spin.algebra_residual() < 1e-12


def test_unsupported_spin():
    with pytest.raises(UnsupportedSpinError):
        hurley_spin.build_spin_system(1.5)


@pytest.mark.parametrize('s', hurley_spin.SUPPORTED_SPINS)
def test_elimination_gives_free_dispersion(s, rng):
    spin = hurley_spin.build_spin_system(s, PHYS)
    for _ in range(20):
        p = rng.normal(size=3)
        energy = float(p @ p) / (2.0 * PHYS.mass)
        assert_allclose(hurley_spin.eliminated_block(p, spin), energy * np.eye(spin.psi_size), atol=1e-12)
        on_shell = hurley_spin.hurley_symbol(energy, p, spin) @ hurley_spin.null_vectors(p, spin)
        assert np.max(np.abs(on_shell)) < 1e-12


@pytest.mark.parametrize('s', hurley_spin.SUPPORTED_SPINS)
def test_modified_generators_per_wavevector(s, rng):
    spin = hurley_spin.build_spin_system(s, PHYS)
    generators = hurley_spin.modified_generators(PowerAlpha(1.0))
    assert sorted(op.kind for op in generators) == ['G'] * 3 + ['J'] * 3 + ['J0'] * 3
    for _ in range(10):
        p = rng.normal(size=3)
        for op in generators:
            assert hurley_spin.invariance_defect(op, p, spin) < 1e-10
    with pytest.raises(ParameterError):
        hurley_spin.invariance_defect(OperatorSpec('P', 1), p, spin)


def test_spin_term_commutators_are_reported(rng):
    spin = hurley_spin.build_spin_system(1.0, PHYS)
    result = hurley_spin.spin_term_commutators(spin, rng)
    assert sorted(result) == ['angular_momentum_defect', 'lambda_squared_max']
    assert result['lambda_squared_max'] == 0.0


def test_solution_validation(grid):
    spin = hurley_spin.build_spin_system(0.5, PHYS)
    field = free_field(grid, 1)
    with pytest.raises(ParameterError):
        hurley_spin.hurley_solution(field, [1.0, 0.0, 0.0], spin)
    flat = SpectralGrid(2, 32, 10.0, PHYS)
    with pytest.raises(ParameterError):
        hurley_spin.hurley_solution(free_field(flat, 1), [1.0, 0.0], spin)
    with pytest.raises(ParameterError):
        hurley_spin.HurleyField(grid, np.zeros((3,) + grid.shape), spin)


@pytest.mark.parametrize('s', hurley_spin.SUPPORTED_SPINS)
def test_solution_solves_hurley_equation(grid, s):
    spin = hurley_spin.build_spin_system(s, PHYS)
    field = free_field(grid, 2)
    beta = np.arange(1, spin.psi_size + 1) * (1.0 - 0.5j)
    solution = hurley_spin.evolving_solution(field, beta, spin)
    state = solution(0.2)
    assert state.components == spin.size
    assert_allclose(state.psi[0], beta[0] * hurley_spin.evolving_solution(field, [1.0] * spin.psi_size,
                                                                          spin)(0.2).psi[0])
    assert hurley_spin.hurley_residual(solution, 0.2) < 1e-6


def test_modified_boost_on_a_field(grid):
    spin = hurley_spin.build_spin_system(0.5, PHYS)
    solution = hurley_spin.evolving_solution(free_field(grid, 3), [1.0, 1j], spin)
    for op in (OperatorSpec('G', 1), OperatorSpec('J', 1, 2)):
        assert hurley_spin.field_invariance_residual(op, solution, 0.2) < 1e-6
    with pytest.raises(ParameterError):
        hurley_spin.apply_tilde_operator(OperatorSpec('P', 1), solution(0.2))
