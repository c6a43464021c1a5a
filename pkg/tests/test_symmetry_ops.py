import numpy as np
import pytest
from numpy.testing import assert_allclose
from schrosym import symmetry_ops
from schrosym.error import ParameterError
from schrosym.kernels import PowerAlpha, ShiftedSqrt
from schrosym.spectral import PhysParams, SpectralGrid, WaveField, band_limit_fraction
from schrosym.symmetry_ops import OperatorSpec


@pytest.fixture
def packet_grid():
    return SpectralGrid(2, 128, 12.0, PhysParams(1.3, 0.7))


@pytest.fixture
def packets(packet_grid):
    rng = np.random.default_rng(7)
    return symmetry_ops.random_wave_packets(packet_grid, rng, carrier=4.0, width=1.25, spread=0.1, time=0.3)


def test_operator_validation():
    with pytest.raises(ParameterError):
        OperatorSpec('Q', 1)
    with pytest.raises(ParameterError):
        OperatorSpec('J', 1, 1).validate(2)
    with pytest.raises(ParameterError):
        OperatorSpec('P', 3).validate(2)
    with pytest.raises(ParameterError):
        OperatorSpec('J0', 1).validate(1)
    with pytest.raises(ParameterError):
        OperatorSpec('OscG', 1).validate(2)
    with pytest.raises(ParameterError):
        OperatorSpec('J0', 1, symbol=PowerAlpha(5.0)).validate(2)


def test_labels():
    assert OperatorSpec('J', 1, 2).label == 'J12'
    assert OperatorSpec('J0', 1).label == 'J01'
    assert OperatorSpec('J0', 2, symbol=PowerAlpha(1.0)).label == 'J02[power,alpha=1.0]'


def test_random_packets_are_reproducible_and_band_limited(packet_grid):
    first = symmetry_ops.random_wave_packets(packet_grid, np.random.default_rng(3), carrier=4.0)
    second = symmetry_ops.random_wave_packets(packet_grid, np.random.default_rng(3), carrier=4.0)
    assert_allclose(first.values, second.values)
    assert band_limit_fraction(first) < 1e-10


def test_canonical_commutator(packets):
    phys = packets.grid.phys
    for j in (1, 2):
        for k in (1, 2):
            constant = 1j * phys.hbar * phys.mass if j == k else 0.0
            _, residual = symmetry_ops.commutator_residual(OperatorSpec('P', j), OperatorSpec('G', k), packets,
                                                           lambda field: field * constant)
            assert residual < 1e-10


def test_operator_commutes_with_itself(packets):
    op = OperatorSpec('J0', 1, symbol=PowerAlpha(1.0))
    value, scale = symmetry_ops.commutator(op, op, packets)
    assert value.norm() <= 1e-12 * scale


@pytest.mark.parametrize('op', [OperatorSpec('P0'), OperatorSpec('P', 2), OperatorSpec('G', 1),
                                OperatorSpec('J', 1, 2), OperatorSpec('J0', 1), OperatorSpec('J0', 2),
                                OperatorSpec('J0', 1, symbol=PowerAlpha(1.0)),
                                OperatorSpec('J0', 2, symbol=ShiftedSqrt(1.0))])
def test_generators_are_symmetries_of_the_free_equation(packets, op):
    assert symmetry_ops.schrodinger_invariance_residual(op, packets) < 1e-6


def test_rotation_relations_in_three_dimensions():
    grid = SpectralGrid(3, 64, 10.0)
    field = symmetry_ops.random_wave_packets(grid, np.random.default_rng(11), width=1.2, carrier=1.0, spread=0.1)
    residuals = symmetry_ops.run_relations(symmetry_ops.rotation_relations(3), field)
    assert sorted(residuals) == ['[J12,J13]', '[J12,J23]', '[J13,J23]']
    assert max(residuals.values()) < 1e-6


@pytest.mark.parametrize('symbol', [PowerAlpha(1.0), PowerAlpha(2.0), ShiftedSqrt(1.0)])
def test_boost_and_closure_relations(packets, symbol):
    hbar = packets.grid.phys.hbar
    residuals = symmetry_ops.run_relations(symmetry_ops.boost_relations(2, symbol, hbar=hbar), packets)
    assert len(residuals) == 2
    assert max(residuals.values()) < 1e-6
    report = symmetry_ops.check_lorentz_closure(symbol, packets)
    assert report['symbol'] == symbol.key
    assert max(report['relations'].values()) < 1e-6


def test_non_closure_measure(packets):
    assert symmetry_ops.lorentz_non_closure(ShiftedSqrt(1.0), packets) < 1e-6
    # f f'/p is constant for alpha = 1 and varies with |p| for alpha = 2
    assert symmetry_ops.lorentz_non_closure(PowerAlpha(1.0), packets) < 1e-6
    assert symmetry_ops.lorentz_non_closure(PowerAlpha(2.0), packets) > 1e-3


def test_oscillator_propagator(packet_grid):
    phys = packet_grid.phys
    omega, duration = 1.0, 0.4
    ground = WaveField(packet_grid, np.exp(-phys.mass * omega * packet_grid.radius_squared / (2.0 * phys.hbar)))
    evolved = symmetry_ops.oscillator_propagator(ground, duration, omega)
    assert_allclose(np.abs(evolved.values), np.abs(ground.values), atol=1e-10)
    restored = symmetry_ops.oscillator_propagator(evolved, duration, omega, adjoint=True)
    assert_allclose(restored.values, ground.values, atol=1e-12)


def test_oscillator_generators(packets):
    result = symmetry_ops.oscillator_generators_check(1.0, packets.replace(time=0.4))
    assert max(result['relations'].values()) < 1e-6
    assert set(result['informational']) == set(['[p^%d,G^%d]' % (j, k) for j in (1, 2) for k in (1, 2)])


def test_time_derivative_of_non_free_operator(packets):
    with pytest.raises(ParameterError):
        symmetry_ops.time_derivative_operator(OperatorSpec('OscP', 1, omega=1.0), packets)
