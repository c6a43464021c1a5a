import logging
import mpmath
import numpy as np
from schrosym import specfun
from schrosym.report import Report

log = logging.getLogger(__name__)


def _relative(left, right):
    left, right = np.asarray(left), np.asarray(right)
    scale = np.maximum(np.maximum(np.abs(left), np.abs(right)), np.finfo(float).tiny)
    return float(np.max(np.abs(left - right) / scale))


def kummer_transform(rng, samples):
    """ 1F1(a; c; z) = e^z 1F1(c - a; c; -z) at random parameters away from the poles. """
    worst = 0.0
    for _ in range(samples):
        a, c = rng.uniform(-8.0, 8.0, size=2)
        z = rng.uniform(0.0, 30.0) * np.exp(2j * np.pi * rng.uniform())
        left = specfun.kummer_1f1(a, c, z)
        right = np.exp(z) * specfun.kummer_1f1(c - a, c, -z)
        worst = max(worst, _relative(left, right))
    return worst


def kummer_reference(rng, samples):
    """ 1F1 against mpmath at 40 digits, over the series range of the parameters. """
    worst = 0.0
    for _ in range(samples):
        a, c = rng.uniform(-8.0, 8.0, size=2)
        z = rng.uniform(0.0, 30.0) * np.exp(2j * np.pi * rng.uniform())
        with mpmath.workdps(40):
            reference = complex(mpmath.hyp1f1(a, c, mpmath.mpc(z.real, z.imag)))
        worst = max(worst, _relative(specfun.kummer_1f1(a, c, z), reference))
    return worst


def kummer_derivative(rng, samples):
    """ d/dz 1F1(a; c; z) = (a/c) 1F1(a + 1; c + 1; z) against a central difference. """
    worst = 0.0
    for _ in range(samples):
        a, c = rng.uniform(0.5, 4.0, size=2)
        z = rng.uniform(0.1, 10.0) * np.exp(2j * np.pi * rng.uniform())
        h = 1e-5 * abs(z) + 1e-8
        difference = (specfun.kummer_1f1(a, c, z + h) - specfun.kummer_1f1(a, c, z - h)) / (2.0 * h)
        worst = max(worst, _relative(difference, a / c * specfun.kummer_1f1(a + 1.0, c + 1.0, z)))
    return worst


def gamma_duplication(rng, samples):
    z = rng.uniform(0.0, 20.0, size=samples)
    z = z[z > 0]
    left = specfun.gamma(z) * specfun.gamma(z + 0.5)
    right = np.sqrt(np.pi) * 2.0 ** (1.0 - 2.0 * z) * specfun.gamma(2.0 * z)
    return _relative(left, right)


def bessel_identity(rng, samples):
    """ 1F1(nu + 1/2; 2 nu + 1; 2iz) = Gamma(1 + nu) e^{iz} (z/2)^{-nu} J_nu(z). """
    worst = 0.0
    for nu in (-0.25, 0.0, 0.25, 0.75):
        z = rng.uniform(0.05, 14.0, size=samples)
        left = specfun.kummer_1f1(nu + 0.5, 2.0 * nu + 1.0, 2j * z)
        right = specfun.gamma(1.0 + nu) * np.exp(1j * z) * 2.0 ** nu * specfun.bessel_j_regularized(nu, z)
        # both sides vanish at the zeros of J_nu, so the error is scaled by the largest value
        worst = max(worst, float(np.max(np.abs(left - right)) / np.max(np.abs(right))))
    return worst


def half_order_bessel():
    x = np.linspace(0.05, 50.0, 400)
    envelope = np.sqrt(2.0 / (np.pi * x))
    plus = np.max(np.abs(specfun.bessel_j(0.5, x) - envelope * np.sin(x)) / envelope)
    minus = np.max(np.abs(specfun.bessel_j(-0.5, x) - envelope * np.cos(x)) / envelope)
    return float(max(plus, minus))


def exp_integral_checks():
    x = np.linspace(0.05, 60.0, 300)
    reflection = _relative(specfun.exp_integral_e1(x), -specfun.exp_integral_ei(-x))
    h = 1e-9
    # E1' = -e^{-x}/x, so the two branches meet at x = 1 without a jump
    crossover = abs(specfun.exp_integral_e1(1.0 + h) - specfun.exp_integral_e1(1.0 - h)
                    + 2.0 * h * np.exp(-1.0)) / specfun.exp_integral_e1(1.0)
    scaled = _relative(specfun.exp_scaled_e1(x[x < 30.0]), np.exp(x[x < 30.0]) * specfun.exp_integral_e1(x[x < 30.0]))
    return {'reflection': reflection, 'crossover': float(crossover), 'scaled': scaled,
            'decay_at_50': float(abs(specfun.exp_integral_e1(50.0)))}


def main(clargs, config):
    """ Checks the special function identities the closed forms rely on. """
    seed = config.seed
    samples = config.parameter('samples', 1000, int)
    rng = np.random.default_rng([seed, 31])
    report = Report('specfun-selftest', seed)

    report.add('gamma.one', abs(specfun.gamma(1.0) - 1.0), 1e-14)
    report.add('gamma.half', abs(specfun.gamma(0.5) - np.sqrt(np.pi)) / np.sqrt(np.pi), 1e-14)
    report.add('gamma.duplication', gamma_duplication(rng, samples), 1e-11)
    z = np.linspace(0.5, 20.0, 200)
    report.add('gamma.stirling', _relative(specfun.gamma(z), specfun.stirling_gamma(z)), 1e-12)

    report.add('kummer.at_zero', abs(specfun.kummer_1f1(2.0, 3.0, 0.0) - 1.0), 1e-15)
    report.add('kummer.elementary', abs(specfun.kummer_1f1(1.0, 2.0, 1.0) - (np.e - 1.0)) / (np.e - 1.0), 1e-12)
    report.add('kummer.transform', kummer_transform(rng, samples), specfun.ACCURACY['kummer_series'].target_rel_error)
    report.add('kummer.reference', kummer_reference(rng, max(1, samples // 5)),
               specfun.ACCURACY['kummer_series'].target_rel_error)
    report.add('kummer.derivative', kummer_derivative(rng, max(1, samples // 10)), 1e-6)

    report.add('bessel.identity', bessel_identity(rng, max(1, samples // 10)), 1e-9)
    report.add('bessel.half_order', half_order_bessel(), 1e-12)
    report.add('bessel.regularized_origin',
               abs(specfun.bessel_j_regularized(-0.25, 0.0) - 2.0 ** 0.25 / specfun.gamma(0.75)), 1e-12)

    exp_integral = exp_integral_checks()
    report.add('exp_integral.reflection', exp_integral['reflection'], 1e-12)
    report.add('exp_integral.crossover', exp_integral['crossover'], 1e-12)
    report.add('exp_integral.scaled', exp_integral['scaled'], 1e-12)
    report.add('exp_integral.decay_at_50', exp_integral['decay_at_50'], 1e-20)

    report.measure('accuracy', dict((name, {'target_rel_error': accuracy.target_rel_error,
                                            'max_argument_modulus': accuracy.max_argument_modulus})
                                    for name, accuracy in specfun.ACCURACY.items()))
    rows = [[check.name, check.value, check.tolerance] for check in report.checks]
    report.table('identities', ['identity', 'value', 'tolerance'], rows)

    report.write(config.output_directory, config.serialized)
    return report
