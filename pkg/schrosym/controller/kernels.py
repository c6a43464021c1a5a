import functools
import logging
import numpy as np
from schrosym import kernels
from schrosym.misc import relative_norm, run_parallel
from schrosym.report import Report
from schrosym.transforms import PotentialSpec

log = logging.getLogger(__name__)

RESIDUAL_TOLERANCE = 1e-6
INVARIANCE_TOLERANCE = 1e-5
DECAY_TOLERANCE = 0.01
CASE1_PARAMETERS = ((2, 1.0), (3, 1.0), (3, 2.0), (4, 4.0))


def sample_points(seed, dimension, count=20, radius=1.5):
    rng = np.random.default_rng([seed, dimension])
    return rng.uniform(-radius, radius, size=(count, dimension))


def residual_case(phys, seed, settings, case):
    """ The free-equation residual of one closed-form kernel. Returns (name, residual). """
    name, dimension = case[0], case[1]
    points = sample_points(seed, dimension)
    t = settings['t']
    potential = None
    if name == 'case1':
        alpha = case[2]
        kernel = functools.partial(kernels.invariant_kernel_case1, alpha=alpha, phys=phys)
        name = 'case1.n%d.alpha%g' % (dimension, alpha)
    elif name == 'galilean':
        kernel = functools.partial(kernels.galilean_kernel, phys=phys)
    elif name == 'bessel_n3_alpha1':
        kernel = functools.partial(kernels.bessel_kernel_n3_alpha1, phys=phys)
    elif name == 'bessel_alpha_eq_n':
        kernel = functools.partial(kernels.bessel_kernel_alpha_eq_n, phys=phys)
    elif name == 'case2':
        kernel = functools.partial(kernels.case2_kernel, beta=settings['beta'], phys=phys)
    elif name == 'oscillator':
        omega = settings['omega']
        kernel = functools.partial(kernels.oscillator_invariant_kernel, omega=omega, alpha=settings['alpha'],
                                   phys=phys)
        potential = PotentialSpec.oscillator(dimension, omega, phys)
        t = settings['oscillator_time']
    elif name == 'linear':
        b = np.asarray(settings['force'][:dimension], dtype=float)
        kernel = functools.partial(kernels.linear_potential_invariant_kernel, b=b, sigma=1.0,
                                   alpha=settings['alpha'], phys=phys)
        potential = PotentialSpec.linear(b)
    else:
        raise ValueError("Unknown kernel case %s" % name)
    residual = kernels.free_equation_residual(lambda x, s: kernel(x, s), points, t, phys, potential)
    return '%s.n%d' % (name, dimension) if not name.startswith('case1') else name, residual


def reduction_checks(phys, seed, settings):
    """ Closed forms that must coincide. """
    t = settings['t']
    beta = settings['beta']
    checks = {}
    for n in (2, 3):
        points = sample_points(seed, n)
        checks['case1_alpha0_vs_galilean.n%d' % n] = relative_norm(
            kernels.invariant_kernel_case1(points, t, 0.0, phys) - kernels.galilean_kernel(points, t, phys),
            kernels.galilean_kernel(points, t, phys))
        # the Case II kernel is the Galilean one at the complex time t - 2 i m hbar beta
        shifted = t - 2j * phys.mass * phys.hbar * beta
        checks['case2_vs_shifted_galilean.n%d' % n] = relative_norm(
            kernels.case2_kernel(points, t, beta, phys) - kernels.galilean_kernel(points, shifted, phys),
            kernels.galilean_kernel(points, shifted, phys))
        # the oscillator kernel tends to the Case I kernel as omega -> 0, with an O((omega t)^2) error
        free = kernels.invariant_kernel_case1(points, t, settings['alpha'], phys)
        checks['oscillator_small_omega_vs_case1.n%d' % n] = relative_norm(
            kernels.oscillator_invariant_kernel(points, t, 1e-5, settings['alpha'], phys) - free, free)
        checks['bessel_alpha_eq_n_vs_case1.n%d' % n] = relative_norm(
            kernels.bessel_kernel_alpha_eq_n(points, t, phys) - kernels.invariant_kernel_case1(points, t, n, phys),
            kernels.invariant_kernel_case1(points, t, n, phys))
    points = sample_points(seed, 3)
    checks['bessel_n3_alpha1_vs_case1'] = relative_norm(
        kernels.bessel_kernel_n3_alpha1(points, t, phys) - kernels.invariant_kernel_case1(points, t, 1.0, phys),
        kernels.invariant_kernel_case1(points, t, 1.0, phys))
    return checks


def invariance_checks(phys, seed, settings, case):
    """ J_jk on the closed form and J_0j on the momentum profile, each at two step sizes. """
    dimension, alpha = case
    t = settings['t']
    points = sample_points(seed, dimension)
    kernel = functools.partial(kernels.invariant_kernel_case1, alpha=alpha, phys=phys)
    params = kernels.KernelParams(phys, dimension, kernels.PowerAlpha(alpha))
    rng = np.random.default_rng([seed, dimension, 7])
    momenta = rng.uniform(0.5, 2.0, size=(20, dimension)) * rng.choice([-1.0, 1.0], size=(20, dimension))
    results = {}
    for h in (0.04, 0.02):
        rotation = max(kernels.kernel_rotation_residual(kernel, points, t, j, k, h)
                       for j in range(dimension) for k in range(j + 1, dimension))
        results[('rotation', h)] = rotation
    for h in (2e-3, 1e-3):
        boost = max(kernels.kernel_boost_residual(params, momenta, t, j, h) for j in range(dimension))
        results[('boost', h)] = boost
    return dimension, alpha, results


def decay_checks(phys, settings):
    times = np.logspace(2.0, 4.0, 9)
    origin = {2: np.zeros((1, 2)), 3: np.zeros((1, 3))}
    slopes = {}
    for n, alpha in CASE1_PARAMETERS[:3]:
        values = [kernels.invariant_kernel_case1(origin[n], t, alpha, phys)[0] for t in times]
        slopes['case1.n%d.alpha%g' % (n, alpha)] = (kernels.decay_exponent(values, times),
                                                    -kernels.case1_exponent(n, alpha))
    for n in (2, 3):
        values = [kernels.galilean_kernel(origin[n], t, phys)[0] for t in times]
        slopes['galilean.n%d' % n] = (kernels.decay_exponent(values, times), -0.5 * n)
        values = [kernels.case2_kernel(origin[n], t, settings['beta'], phys)[0] for t in times]
        slopes['case2.n%d' % n] = (kernels.decay_exponent(values, times), -0.5 * n)
    return slopes


def main(clargs, config):
    """ Checks that the closed-form kernels solve their equations, coincide where they should and are invariant. """
    seed = config.seed
    phys = config.phys
    settings = {'t': config.parameter('t', 1.0),
                'beta': config.parameter('beta', 0.5),
                'alpha': config.parameter('alpha', 1.0),
                'omega': config.parameter('omega', 1.0),
                'oscillator_time': config.parameter('oscillator_time', 0.4),
                'force': config.parameters('force', [0.3, -0.2, 0.1], float)}
    report = Report('kernel-residuals', seed)

    cases = [('case1', n, alpha) for n, alpha in CASE1_PARAMETERS]
    cases += [('galilean', n) for n in (2, 3)] + [('case2', n) for n in (2, 3)]
    cases += [('bessel_n3_alpha1', 3), ('bessel_alpha_eq_n', 2), ('bessel_alpha_eq_n', 3)]
    cases += [('oscillator', n) for n in (2, 3)] + [('linear', n) for n in (2, 3)]
    log.info("Evaluating free-equation residuals of %d kernels", len(cases))
    rows = []
    for name, residual in run_parallel(residual_case, cases, clargs.process_limit, (phys, seed, settings)):
        report.add('residual.%s' % name, residual, RESIDUAL_TOLERANCE)
        rows.append([name, residual])
    report.table('residuals', ['kernel', 'relative_residual'], rows)

    rows = []
    for name, value in sorted(reduction_checks(phys, seed, settings).items()):
        tolerance = 1e-8 if name.startswith(('bessel', 'oscillator')) else 1e-12
        report.add('reduction.%s' % name, value, tolerance)
        rows.append([name, value])
    report.table('reductions', ['identity', 'relative_difference'], rows)

    rows = []
    invariance_cases = [(n, alpha) for n, alpha in CASE1_PARAMETERS]
    for dimension, alpha, results in run_parallel(invariance_checks, invariance_cases, clargs.process_limit,
                                                  (phys, seed, settings)):
        for generator in ('rotation', 'boost'):
            steps = sorted(h for kind, h in results if kind == generator)
            fine, coarse = results[(generator, steps[0])], results[(generator, steps[1])]
            name = 'invariance.%s.n%d.alpha%g' % (generator, dimension, alpha)
            report.add(name, fine, INVARIANCE_TOLERANCE)
            report.add_condition(name + '.refines', fine <= coarse or fine <= 1e-10)
            for h in steps:
                rows.append([generator, dimension, alpha, h, results[(generator, h)]])
    report.table('invariance', ['generator', 'dimension', 'alpha', 'step', 'relative_norm'], rows)

    rows = []
    for name, (slope, expected) in sorted(decay_checks(phys, settings).items()):
        report.add('decay.%s' % name, abs(slope - expected), DECAY_TOLERANCE)
        rows.append([name, slope, expected])
    report.table('decay', ['kernel', 'slope', 'expected'], rows)

    report.write(config.output_directory, config.serialized)
    return report
