import functools
import logging
import numpy as np
from schrosym import kernels, transforms
from schrosym.misc import relative_norm, run_parallel
from schrosym.nse_dynamics import DoebnerGoldin, dg_residual
from schrosym.report import Report
from schrosym.spectral import SpectralGrid, WaveField
from schrosym.transforms import GaugeParams, PotentialSpec

log = logging.getLogger(__name__)

COEFFICIENT_TOLERANCE = 1e-8
RESIDUAL_TOLERANCE = 1e-5
GROUP_TOLERANCE = 1e-12


def sample_points(seed, dimension, count=20, radius=1.5):
    rng = np.random.default_rng([seed, dimension, 3])
    return rng.uniform(-radius, radius, size=(count, dimension))


def _case1_log(values, a):
    # arg = -pi a/2 + arg 1F1, continuous near the origin
    return np.log(np.abs(values)) + 1j * (np.angle(values * np.exp(0.5j * np.pi * a)) - 0.5 * np.pi * a)


def coefficient_checks(phys, settings):
    """ The integrated coefficient flow against the Niederer and linear-potential closed forms. """
    n = settings['dimension']
    omega = settings['omega']
    end = settings['window']
    dt = settings['coefficient_step']
    checks = {}

    numeric = transforms.solve_transform_coefficients(PotentialSpec.oscillator(n, omega, phys), (0.0, end), dt, phys)
    closed = transforms.niederer_coefficients(omega, numeric.times, n, phys)
    checks['niederer.max_difference'] = numeric.compare(closed)
    checks['niederer.tau_defect'] = numeric.tau_defect()
    checks['niederer.tau_at_zero'] = abs(numeric.at(0.0).tau)

    force = np.asarray(settings['force'][:n], dtype=float)
    numeric = transforms.solve_transform_coefficients(PotentialSpec.linear(force), (0.0, end), dt, phys)
    closed = transforms.linear_potential_coefficients(force, 1.0, numeric.times, phys)
    checks['linear.max_difference'] = numeric.compare(closed)
    checks['linear.tau_defect'] = numeric.tau_defect()

    # the Niederer image of the invariant kernel is the oscillator kernel
    t = settings['oscillator_time']
    alpha = settings['alpha']
    points = sample_points(settings['seed'], n)
    mesh = transforms.niederer_coefficients(omega, np.linspace(0.0, 1.25 * t, 1001), n, phys)
    image = transforms.transform_kernel(mesh, functools.partial(kernels.invariant_kernel_case1, alpha=alpha, phys=phys))
    expected = kernels.oscillator_invariant_kernel(points, t, omega, alpha, phys)
    checks['niederer.kernel_image'] = relative_norm(image(points, t) - expected, expected)
    return checks


def potential_residual(phys, seed, settings, index):
    """ The transformed Case II Gaussian against one random smooth potential. """
    n = settings['dimension']
    rng = np.random.default_rng([seed, index, 11])
    potential = PotentialSpec.trigonometric(n, rng, scale=settings['potential_scale'])
    coeffs = transforms.solve_transform_coefficients(potential, (0.0, settings['window']),
                                                     settings['coefficient_step'], phys)
    u = functools.partial(kernels.case2_kernel, beta=settings['beta'], phys=phys)
    points = sample_points(seed, n)
    times = np.linspace(0.25, 0.75, 3) * settings['window']
    residual = max(transforms.transformed_residual(coeffs, potential, u, points, t) for t in times)
    return index, residual, coeffs.tau_defect()


def gauge_checks(phys, seed, points):
    """ The group law of the gauge maps, on parameters and pointwise on a Gaussian. """
    rng = np.random.default_rng([seed, 17])
    first, second, third = [GaugeParams(rng.normal(), rng.uniform(0.5, 2.0) * rng.choice([-1.0, 1.0]))
                            for _ in range(3)]
    checks = {}

    def distance(a, b):
        return max(abs(a.gamma - b.gamma), abs(a.lam - b.lam))

    checks['associativity'] = distance(first.compose(second).compose(third), first.compose(second.compose(third)))
    checks['left_inverse'] = distance(first.inverse().compose(first), GaugeParams.identity())
    checks['right_inverse'] = distance(first.compose(first.inverse()), GaugeParams.identity())
    checks['identity'] = distance(first.compose(GaugeParams.identity()), first)

    t = 0.7

    def log_kernel(q, s):
        return kernels.case2_log_kernel(q, s, 0.5, phys)

    def mapped_log(q, s):
        logarithm = log_kernel(q, s)
        return logarithm.real + 1j * first.phase(logarithm.real, logarithm.imag)

    mapped = transforms.gauge_kernel(None, first, log_kernel)
    restored = transforms.gauge_kernel(mapped, first.inverse(), mapped_log)
    original = kernels.case2_kernel(points, t, 0.5, phys)
    checks['pointwise_round_trip'] = relative_norm(restored(points, t) - original, original)
    return checks


def dg_check(phys, settings):
    """ N^{-1} of an effective-mass Gaussian solves the linearizable Doebner-Goldin equation. """
    n = settings['dimension']
    nl = DoebnerGoldin(settings['D'], settings['D_prime'], settings['c'])
    params = nl.gauge(phys)
    grid = SpectralGrid(n, settings['dg_points'], settings['dg_half_width'], phys)
    effective = phys.with_mass(phys.mass * params.lam)
    beta = settings['dg_beta']

    def kernel(q, s):
        return kernels.case2_kernel(q, s, beta, effective)

    def log_kernel(q, s):
        return kernels.case2_log_kernel(q, s, beta, effective)

    chain = transforms.gauge_kernel(kernel, params.inverse(), log_kernel)

    def solution(s):
        return WaveField(grid, chain(grid.points(), s), s)

    t = settings['dg_time']
    return {'residual': dg_residual(solution, t, nl), 'Lambda': params.lam, 'gamma': params.gamma}


def as_check(settings):
    """ The pullback of the linearized invariant solution solves the Auberson-Sabatier equation. """
    n = settings['dimension']
    s = settings['s']
    alpha = settings['alpha']
    a = kernels.case1_exponent(n, alpha)
    points = sample_points(settings['seed'], n)

    def kernel(q, time):
        return kernels.as_invariant_solution(q, time, alpha)

    def log_kernel(q, time):
        return _case1_log(kernel(q, time), a)

    pulled_back = transforms.as_pullback_kernel(kernel, s, log_kernel)
    return transforms.as_residual(pulled_back, points, settings['as_time'], s)


def main(clargs, config):
    """ Checks the potential transforms, the gauge maps and the Auberson-Sabatier linearization. """
    seed = config.seed
    phys = config.phys
    settings = {'seed': seed,
                'dimension': config.value('grid.dimension', 2, int),
                'omega': config.parameter('omega', 1.0),
                'window': config.parameter('window', 1.0),
                'coefficient_step': config.parameter('coefficient_step', 1e-3),
                'force': config.parameters('force', [0.3, -0.2, 0.1], float),
                'oscillator_time': config.parameter('oscillator_time', 0.4),
                'alpha': config.parameter('alpha', 1.0),
                'beta': config.parameter('beta', 0.5),
                'potential_scale': config.parameter('potential_scale', 0.3),
                'D': config.parameter('D', 0.05),
                'D_prime': config.parameter('D_prime', 1.0),
                'c': config.parameters('c', [0.05, 0.0, 0.0, -0.05, 0.0], float),
                'dg_points': config.parameter('dg_points', 64, int),
                'dg_half_width': config.parameter('dg_half_width', 12.0),
                'dg_beta': config.parameter('dg_beta', 0.5),
                'dg_time': config.parameter('dg_time', 1.0),
                's': config.parameter('s', 0.5),
                'as_time': config.parameter('as_time', 1.0)}
    potentials = config.parameter('potentials', 10, int)
    report = Report('transform-check', seed)

    rows = []
    for name, value in sorted(coefficient_checks(phys, settings).items()):
        report.add('coefficients.%s' % name, value, COEFFICIENT_TOLERANCE)
        rows.append([name, value])
    report.table('coefficients', ['check', 'value'], rows)

    log.info("Transforming a Gaussian solution to %d random potentials", potentials)
    rows = []
    for index, residual, tau_defect in run_parallel(potential_residual, range(potentials), clargs.process_limit,
                                                    (phys, seed, settings)):
        report.add('potential%d.residual' % index, residual, RESIDUAL_TOLERANCE)
        report.add('potential%d.tau_defect' % index, tau_defect, COEFFICIENT_TOLERANCE)
        rows.append([index, residual, tau_defect])
    report.table('potentials', ['potential', 'relative_residual', 'tau_defect'], rows)

    rows = []
    for name, value in sorted(gauge_checks(phys, seed, sample_points(seed, settings['dimension'])).items()):
        report.add('gauge.%s' % name, value, GROUP_TOLERANCE if name != 'pointwise_round_trip' else 1e-10)
        rows.append([name, value])
    report.table('gauge', ['check', 'value'], rows)

    dg = dg_check(phys, settings)
    report.add('doebner_goldin.residual', dg['residual'], RESIDUAL_TOLERANCE)
    report.measure('doebner_goldin.gauge', {'Lambda': dg['Lambda'], 'gamma': dg['gamma']})
    report.add('auberson_sabatier.residual', as_check(settings), RESIDUAL_TOLERANCE)

    report.write(config.output_directory, config.serialized)
    return report
