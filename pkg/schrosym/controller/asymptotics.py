import logging
import numpy as np
from scipy.integrate import solve_ivp
from schrosym import kernels, nse_dynamics
from schrosym.misc import run_parallel, time_derivative
from schrosym.nse_dynamics import DoebnerGoldin, Logarithmic, Power
from schrosym.report import Report
from schrosym.spectral import SpectralGrid

log = logging.getLogger(__name__)

PHASE_ODE_TOLERANCE = 1e-8
ODE_ORACLE_TOLERANCE = 1e-6
RJ_FACTOR = 3.0
PHASE_FACTOR = 10.0
KAPPA_TOLERANCE = 0.02
FREE_TOLERANCE = 1e-8
RJ_PARAMETERS = ((2, 1.0), (3, 1.0))


def _max_relative(difference, reference):
    scale = float(np.max(np.abs(reference)))
    return float(np.max(np.abs(difference)) / scale) if scale > 0 else float(np.max(np.abs(difference)))


def phase_ode_checks(phys, settings):
    """ Every closed-form phase solution against the derivative its reduced equation prescribes. """
    n, alpha, beta = 2, settings['alpha'], 1.0
    times = np.logspace(0.0, 2.0, 25)
    checks = {}

    def step(t):
        return 1e-3 * t

    a = kernels.case1_exponent(n, alpha)
    for label, k in (('power.generic', 1.0), ('power.logarithmic_branch', 1.0 / (2.0 * a))):
        actual, expected = [], []
        for t in times:
            phi = nse_dynamics.power_phase_solution(t, n, alpha, k, 1.0, beta, phys=phys)
            derivative = time_derivative(lambda s: nse_dynamics.power_phase_solution(s, n, alpha, k, 1.0, beta,
                                                                                     phys=phys), t, step(t))
            rate = nse_dynamics.power_phase_rate(t, n, alpha, k, 1.0, beta, phys)
            actual.append(derivative)
            expected.append(-1j * rate * phi)
        checks[label] = _max_relative(np.array(actual) - np.array(expected), np.array(expected))

    for label, xi1, xi2 in (('log.case_a', 1.0, 0.0), ('log.case_b', 1.0, 1.0), ('log.case_b_negative', 1.0, -1.0)):
        actual, expected = [], []
        for t in times:
            delta = nse_dynamics.log_phase_delta(t, n, alpha, xi1, xi2, beta, phys=phys)
            actual.append(time_derivative(lambda s: nse_dynamics.log_phase_delta(s, n, alpha, xi1, xi2, beta,
                                                                                 phys=phys), t, step(t)))
            expected.append(nse_dynamics.log_phase_rate(delta, t, n, alpha, xi1, xi2, beta, phys))
        checks[label] = _max_relative(np.array(actual) - np.array(expected), np.array(expected))

    actual, expected = [], []
    for t in times:
        phi = nse_dynamics.dg_phase_solution(t, n, alpha, 1.0, 0.05, phys=phys)
        actual.append(time_derivative(lambda s: nse_dynamics.dg_phase_solution(s, n, alpha, 1.0, 0.05, phys=phys),
                                      t, step(t)))
        expected.append(nse_dynamics.dg_phase_rate(t, n, alpha, 1.0, 0.05, phys) * phi)
    checks['doebner_goldin'] = _max_relative(np.array(actual) - np.array(expected), np.array(expected))
    return checks


def log_ode_oracle(phys, settings):
    """ Case B integrated numerically from t = 100 down to t = 1, where the homogeneous part decays. """
    n, alpha, beta, xi1, xi2 = 2, settings['alpha'], 1.0, 1.0, 1.0
    start = float(nse_dynamics.log_phase_delta(100.0, n, alpha, xi1, xi2, beta, phys=phys))
    times = np.linspace(100.0, 1.0, 100)
    solution = solve_ivp(lambda t, y: nse_dynamics.log_phase_rate(y, t, n, alpha, xi1, xi2, beta, phys),
                         (100.0, 1.0), [start], t_eval=times, rtol=1e-11, atol=1e-12, method='DOP853')
    closed = nse_dynamics.log_phase_delta(times, n, alpha, xi1, xi2, beta, phys=phys)
    return float(np.max(np.abs(solution.y[0] - closed)))


def _region_points(seed, n, t, phys, r_low, r_high, count=40):
    """ Random points with m|x|^2/(2 hbar t) spread over [r_low, r_high]. """
    rng = np.random.default_rng([seed, n, 23])
    ratios = rng.uniform(r_low, r_high, size=count)
    directions = rng.normal(size=(count, n))
    directions /= np.linalg.norm(directions, axis=-1)[:, np.newaxis]
    radii = np.sqrt(2.0 * phys.hbar * t * ratios / phys.mass)
    return directions * radii[:, np.newaxis], ratios


def rj_checks(phys, seed, settings):
    """ Exact functionals of g against the leading terms, as error/r. Also the density and phase-ratio forms. """
    t = settings['rj_time']
    checks = {}
    rows = []
    for n, alpha in RJ_PARAMETERS:
        points, ratios = _region_points(seed, n, t, phys, 0.005, 0.05)
        exact = nse_dynamics.kernel_rj(points, t, alpha, phys)
        leading = nse_dynamics.rj_asymptotics(n, alpha, points, t, phys)
        for name, value, approximation in zip(nse_dynamics.RJ_NAMES, exact, leading):
            error = np.abs(value - approximation) / np.abs(approximation)
            worst = float(np.max(error / ratios))
            checks['%s.n%d.alpha%g' % (name, n, alpha)] = worst
            rows.append([name, n, alpha, float(np.max(error)), worst])

        points, ratios = _region_points(seed, n, t, phys, 0.005, 0.1)
        g = kernels.invariant_kernel_case1(points, t, alpha, phys)
        density = nse_dynamics.density_asymptotic(n, alpha, t, phys)
        checks['density.n%d.alpha%g' % (n, alpha)] = float(np.max(np.abs(np.abs(g) ** 2 - density) / density
                                                                   / ratios ** 2))
        ratio = g / np.conj(g) * np.conj(nse_dynamics.phase_ratio_asymptotic(n, alpha))
        checks['phase_ratio.n%d.alpha%g' % (n, alpha)] = float(np.max(np.abs(np.angle(ratio)) / ratios))
    return checks, rows


def run_variant(settings, name):
    """ One simulation compared with its reduced phase solution. """
    phys = settings['phys']
    alpha = settings['alpha']
    if name.startswith('dg.'):
        n = int(name[-1])
        nl = DoebnerGoldin(settings['D'], settings['D_prime'], settings['c'])
        grid = SpectralGrid(n, 32, 8.0, phys)
    else:
        n = 2
        grid = SpectralGrid(n, settings['points'], settings['half_width'], phys)
        nl = {'free': Power(0.0, 1.0),
              'power': Power(settings['lambda'], settings['k']),
              'log.case_a': Logarithmic(settings['xi1'], 0.0),
              'log.case_b': Logarithmic(settings['xi1'], settings['xi2'])}[name]
    log.info("Comparing %r with its reduced phase solution", nl)
    result = nse_dynamics.asymptotic_compare(nl, n, alpha, settings['t0'], settings['T'], grid,
                                             beta=settings['beta'], r_max=settings['r_max'], dt=settings['dt'])
    return name, result


def experiment_settings(config):
    return {'phys': config.phys,
            'alpha': config.parameter('alpha', 1.0),
            'points': config.value('grid.points', 256, int),
            'half_width': config.value('grid.half_width', 40.0),
            't0': config.parameter('t0', 20.0),
            'T': config.parameter('T', 80.0),
            'r_max': config.parameter('r_max', 0.02),
            'beta': config.parameter('beta', 10.0),
            'dt': config.parameter('dt', 0.025),
            'lambda': config.parameter('lambda', 1.0),
            'k': config.parameter('k', 1.0),
            'xi1': config.parameter('xi1', 0.01),
            'xi2': config.parameter('xi2', -0.005),
            'D': config.parameter('D', 0.05),
            'D_prime': config.parameter('D_prime', 1.0),
            'c': config.parameters('c', [0.05, 0.0, 0.0, -0.05, 0.0], float),
            'rj_time': config.parameter('rj_time', 10.0)}


def main(clargs, config):
    """ Asymptotic comparisons of nonlinear evolutions with the reduced phase equations. """
    seed = config.seed
    phys = config.phys
    settings = experiment_settings(config)
    variants = config.parameters('variants', ['free', 'power', 'log.case_a', 'log.case_b', 'dg.n2', 'dg.n3'], str)
    report = Report('asymptotic-compare', seed)

    rows = []
    for name, value in sorted(phase_ode_checks(phys, settings).items()):
        report.add('phase_ode.%s' % name, value, PHASE_ODE_TOLERANCE)
        rows.append([name, value])
    report.table('phase_ode', ['solution', 'relative_residual'], rows)
    report.add('phase_ode.log.case_b_oracle', log_ode_oracle(phys, settings), ODE_ORACLE_TOLERANCE)
    for n in (2, 3):
        report.measure('log_branch.n%d' % n, {'term': nse_dynamics.log_branch_term(n, settings['alpha']),
                                              'vanishes': nse_dynamics.branch_term_vanishes(n, settings['alpha'])})

    checks, rows = rj_checks(phys, seed, settings)
    for name, value in sorted(checks.items()):
        report.add('expansions.%s' % name, value, RJ_FACTOR)
    report.table('rj_expansions', ['functional', 'dimension', 'alpha', 'max_relative_error', 'error_over_r'], rows)

    rows = []
    for name, result in run_parallel(run_variant, variants, clargs.process_limit, (settings,)):
        drifts = [row.get('phase_drift', 0.0) for row in result['rows']]
        for row in result['rows']:
            rows.append([name, row['t'], row['r'], row['modulus_mismatch'], row['phase_mismatch'],
                         row.get('phase_drift', 0.0), row.get('closed_form_phase', 0.0),
                         row.get('free_deviation', 0.0)])
        if name == 'free':
            worst = max(max(row['modulus_mismatch'], row['phase_mismatch']) for row in result['rows'])
            report.add('compare.free.mismatch', max([worst] + drifts), FREE_TOLERANCE)
        else:
            report.add('compare.%s.phase_over_r' % name,
                       max(row['phase_mismatch'] / row['r'] for row in result['rows']), PHASE_FACTOR)
        if name in ('power', 'log.case_a', 'log.case_b'):
            report.add('compare.%s.drift_over_r' % name,
                       max(row['phase_drift'] / row['r'] for row in result['rows']), PHASE_FACTOR)
            report.add('compare.%s.closed_form_phase' % name,
                       max(row['closed_form_phase'] for row in result['rows']), binding=False)
        if name == 'power':
            decreasing = all(later <= earlier or later <= 1e-10 for earlier, later in zip(drifts, drifts[1:]))
            report.add_condition('compare.power.decreasing', decreasing)
        if name.startswith('dg.'):
            report.add('compare.%s.kappa' % name, result['constants']['kappa_error'], KAPPA_TOLERANCE)
            report.add('compare.%s.delta' % name, result['constants']['delta_error'], binding=False)
        report.measure('compare.%s' % name, result['constants'])
    report.table('comparisons', ['variant', 't', 'r', 'modulus_mismatch', 'phase_mismatch', 'phase_drift',
                                 'closed_form_phase', 'free_deviation'], rows)

    report.write(config.output_directory, config.serialized)
    return report
