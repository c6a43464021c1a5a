import logging
import numpy as np
from schrosym import kernels, symmetry_ops
from schrosym.misc import run_parallel
from schrosym.report import Report
from schrosym.spectral import SpectralGrid

log = logging.getLogger(__name__)

RELATION_TOLERANCE = 1e-6
REFINEMENT_GAIN = 4.0
# (carrier momentum, width) of the random packets per dimension. The carrier keeps the kink of |p|^alpha at
# p = 0 out of the spectrum and the packets inside 2/3 Nyquist; the tails must be negligible at the boundary,
# where multiplying by x leaves a jump that the momentum factors amplify
PACKETS = {2: (5.0, 1.25), 3: (3.0, 1.6)}
PACKET_SPREAD = 0.1
DEFAULT_POINTS = {2: 128, 3: 64}
DEFAULT_SYMBOLS = ({'variant': 'power', 'alpha': 1.0},
                   {'variant': 'power', 'alpha': 2.0},
                   {'variant': 'sqrt', 'constant': 1.0})


def sample_field(grid, seed, index, packet):
    # each sample gets its own stream so results do not depend on the order workers finish in
    rng = np.random.default_rng([seed, index])
    carrier, width = packet
    return symmetry_ops.random_wave_packets(grid, rng, carrier=carrier, width=width, spread=PACKET_SPREAD,
                                            time=rng.uniform(-0.5, 0.5))


def invariance_residuals(grid, seed, packet, symbols, index):
    """ [L_S, J] residuals for every generator on one random free solution. """
    field = sample_field(grid, seed, index, packet)
    n = grid.dimension
    residuals = {}
    for j in range(1, n + 1):
        op = symmetry_ops.OperatorSpec('G', j)
        residuals[op.label] = symmetry_ops.schrodinger_invariance_residual(op, field)
        for k in range(j + 1, n + 1):
            op = symmetry_ops.OperatorSpec('J', j, k)
            residuals[op.label] = symmetry_ops.schrodinger_invariance_residual(op, field)
        for symbol in symbols:
            op = symmetry_ops.OperatorSpec('J0', j, symbol=symbol)
            residuals[op.label] = symmetry_ops.schrodinger_invariance_residual(op, field)
    return index, residuals


def relation_residuals(seed, task):
    """ The commutation relations of one symbol on one grid. """
    grid, symbol, packet = task
    # the same packets on every resolution of a dimension
    field = sample_field(grid, seed, 1000 + grid.dimension, packet)
    hbar = grid.phys.hbar
    n = grid.dimension
    residuals = {}
    residuals.update(symmetry_ops.run_relations(symmetry_ops.rotation_relations(n, hbar=hbar), field))
    residuals.update(symmetry_ops.run_relations(symmetry_ops.boost_relations(n, symbol, hbar=hbar), field))
    residuals.update(symmetry_ops.run_relations(symmetry_ops.closure_relations(n, symbol, hbar=hbar), field))
    return n, grid.points_per_axis, symbol.key, residuals, symmetry_ops.lorentz_non_closure(symbol, field)


def oscillator_residuals(grid, seed, omega, t, packet):
    field = sample_field(grid, seed, 2000, packet).replace(time=t)
    return symmetry_ops.oscillator_generators_check(omega, field)


def main(clargs, config):
    """ Checks invariance of the free equation and the commutation relations of the nonlocal generators. """
    seed = config.seed
    base = config.grid(dimension=2, points=DEFAULT_POINTS[2], half_width=12.0)
    dimensions = [base.dimension] if clargs.dimension else config.parameters('dimensions', [2, 3], int)
    samples = config.parameter('samples', 20, int)
    omega = config.parameter('omega', 1.0)
    oscillator_time = config.parameter('oscillator_time', 0.4)
    symbols = []
    tolerances = {}
    # optional per-symbol relation tolerance, e.g. {'variant': 'exp', 'beta': 0.01, 'tolerance': 1e-4}
    for data in config.parameters('symbols', DEFAULT_SYMBOLS, None):
        data = dict(data)
        tolerance = float(data.pop('tolerance', RELATION_TOLERANCE))
        symbols.append(kernels.symbol_from_config(data))
        tolerances[symbols[-1].key] = tolerance
    report = Report('verify-commutators', seed, base)

    grids = {}
    packets = {}
    for n in dimensions:
        if n == base.dimension:
            grids[n] = base
        else:
            grids[n] = SpectralGrid(n, DEFAULT_POINTS.get(n, 64), base.half_width, base.phys)
        carrier, width = PACKETS.get(n, (2.0, 1.6))
        packets[n] = (config.parameter('carrier_%dd' % n, carrier), config.parameter('width_%dd' % n, width))

    n = dimensions[0]
    log.info("Checking [L_S, J] on %d random free solutions in %d dimensions", samples, n)
    results = run_parallel(invariance_residuals, range(samples), clargs.process_limit,
                           (grids[n], seed, packets[n], symbols))
    rows = []
    worst = {}
    for index, residuals in sorted(results, key=lambda item: item[0]):
        for label, value in residuals.items():
            rows.append([index, label, value])
            worst[label] = max(worst.get(label, 0.0), value)
    for label in sorted(worst):
        report.add('invariance.%s' % label, worst[label], RELATION_TOLERANCE)
    report.table('invariance', ['sample', 'operator', 'residual'], rows)

    # the relations on each grid, and for the first symbol also on the halved grid
    tasks = []
    for n in dimensions:
        grid = grids[n]
        for symbol in symbols:
            tasks.append((grid, symbol, packets[n]))
        tasks.append((SpectralGrid(n, grid.points_per_axis // 2, grid.half_width, grid.phys), symbols[0], packets[n]))
    log.info("Checking the commutation relations for %d grid and symbol combinations", len(tasks))
    rows = []
    worst = {}
    for dimension, points, key, residuals, non_closure in run_parallel(relation_residuals, tasks,
                                                                      clargs.process_limit, (seed,)):
        for name, value in residuals.items():
            rows.append([dimension, points, key, name, value])
        largest = max(residuals.values())
        worst[(dimension, points, key)] = largest
        if points == grids[dimension].points_per_axis:
            for name, value in residuals.items():
                report.add('relations.%dd.%s.%s' % (dimension, key, name), value, tolerances[key])
            report.add('non_closure.%dd.%s' % (dimension, key), non_closure, binding=False)
    report.table('relations', ['dimension', 'points', 'symbol', 'relation', 'residual'], rows)
    for n in dimensions:
        fine = worst[(n, grids[n].points_per_axis, symbols[0].key)]
        coarse = worst[(n, grids[n].points_per_axis // 2, symbols[0].key)]
        report.measure('refinement.%dd' % n, {'coarse': coarse, 'fine': fine})
        # once the fine grid is at round-off there is nothing left to gain
        report.add_condition('refinement.%dd' % n, fine <= 1e-12 or coarse >= REFINEMENT_GAIN * fine)

    if 2 in grids:
        oscillator = oscillator_residuals(grids[2], seed, omega, oscillator_time, packets[2])
        for name, value in sorted(oscillator['relations'].items()):
            report.add('oscillator.%s' % name, value, RELATION_TOLERANCE)
        for name, value in sorted(oscillator['informational'].items()):
            report.add('oscillator.%s' % name, value, binding=False)

    report.write(config.output_directory, config.serialized)
    return report
