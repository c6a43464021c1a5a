import logging
import numpy as np
from schrosym import hurley_spin, kernels
from schrosym.error import ConfigError
from schrosym.misc import run_parallel
from schrosym.report import Report
from schrosym.symmetry_ops import random_wave_packets

log = logging.getLogger(__name__)

ALGEBRA_TOLERANCE = 1e-12
DISPERSION_TOLERANCE = 1e-12
DEFECT_TOLERANCE = 1e-10
FIELD_TOLERANCE = 1e-6


def matrix_checks(phys, seed, samples, symbol, s):
    """ Spin algebra, dispersion and per-wavevector invariance for one spin. """
    spin = hurley_spin.build_spin_system(s, phys)
    rng = np.random.default_rng([seed, int(2 * s)])
    dispersion = 0.0
    defects = dict((op.label, 0.0) for op in hurley_spin.modified_generators(symbol))
    for _ in range(samples):
        p = rng.normal(size=3)
        expected = float(p @ p) / (2.0 * phys.mass) * np.eye(spin.psi_size)
        block = hurley_spin.eliminated_block(p, spin)
        dispersion = max(dispersion, float(np.max(np.abs(block - expected)) / np.max(np.abs(expected))))
        for op in hurley_spin.modified_generators(symbol):
            defects[op.label] = max(defects[op.label], hurley_spin.invariance_defect(op, p, spin))
    informational = hurley_spin.spin_term_commutators(spin, rng)
    return s, spin.algebra_residual(), dispersion, defects, informational


def field_checks(grid, seed, settings, symbol, s):
    """ The Hurley equation and the modified generators on a solution built from random free packets. """
    spin = hurley_spin.build_spin_system(s, grid.phys)
    rng = np.random.default_rng([seed, int(2 * s), 1])
    free_field = random_wave_packets(grid, rng, count=2, width=settings['width'], carrier=settings['carrier'],
                                     spread=settings['spread'])
    beta = rng.normal(size=spin.psi_size) + 1j * rng.normal(size=spin.psi_size)
    solution = hurley_spin.evolving_solution(free_field, beta, spin)
    t = settings['t']
    results = {'hurley_residual': hurley_spin.hurley_residual(solution, t)}
    for op in hurley_spin.modified_generators(symbol):
        results['commutator.%s' % op.label] = hurley_spin.field_invariance_residual(op, solution, t)
    for name, value in hurley_spin.run_tilde_relations(solution(t), symbol).items():
        results['relation.%s' % name] = value
    return s, results


def main(clargs, config):
    """ Checks the spin 1/2 and spin 1 Hurley systems. """
    seed = config.seed
    phys = config.phys
    grid = config.grid(dimension=3, points=32, half_width=10.0)
    if grid.dimension != 3:
        raise ConfigError("hurley-check runs on a three-dimensional grid, got dimension %d" % grid.dimension)
    spins = config.parameters('spins', list(hurley_spin.SUPPORTED_SPINS), float)
    samples = config.parameter('samples', 100, int)
    symbol = kernels.symbol_from_config(config.parameter('symbol', {'variant': 'power', 'alpha': 1.0}, None))
    settings = {'t': config.parameter('t', 0.2),
                'width': config.parameter('width', 1.5),
                'carrier': config.parameter('carrier', 0.3),
                'spread': config.parameter('spread', 0.1)}
    report = Report('hurley-check', seed, grid)

    rows = []
    for s, algebra, dispersion, defects, informational in run_parallel(matrix_checks, spins, clargs.process_limit,
                                                                       (phys, seed, samples, symbol)):
        report.add('spin%g.algebra' % s, algebra, ALGEBRA_TOLERANCE)
        report.add('spin%g.dispersion' % s, dispersion, DISPERSION_TOLERANCE)
        for label, value in sorted(defects.items()):
            report.add('spin%g.defect.%s' % (s, label), value, DEFECT_TOLERANCE)
            rows.append([s, label, value])
        for name, value in sorted(informational.items()):
            report.add('spin%g.spin_terms.%s' % (s, name), value, binding=False)
    report.table('wavevector_defects', ['spin', 'generator', 'relative_defect'], rows)

    rows = []
    for s, results in run_parallel(field_checks, spins, clargs.process_limit, (grid, seed, settings, symbol)):
        for name, value in sorted(results.items()):
            report.add('spin%g.%s' % (s, name), value, FIELD_TOLERANCE)
            rows.append([s, name, value])
    report.table('field_checks', ['spin', 'check', 'relative_residual'], rows)

    report.write(config.output_directory, config.serialized)
    return report
