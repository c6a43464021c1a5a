"""
Special functions needed by the closed-form kernels and the reduced phase solutions: the gamma function,
the confluent hypergeometric function 1F1 at complex argument, Bessel functions of the first kind and the
exponential integrals.

All functions are vectorized over their argument and reject poles and out-of-range arguments with explicit
errors instead of returning infinities.

"""
import functools
import logging
import mpmath
import numpy as np
from scipy.special import roots_jacobi
from schrosym.constants import EULER_GAMMA
from schrosym.error import AccuracyError, DomainError, PoleError, SingularityError

log = logging.getLogger(__name__)


class SpecFunAccuracy(object):
    """ Documented accuracy of one evaluation branch. """
    def __init__(self, name, target_rel_error, max_argument_modulus):
        if not 0.0 < target_rel_error <= 1e-6:
            raise ValueError("Target relative error of %s must lie in (0, 1e-6]" % name)
        if not np.isfinite(max_argument_modulus):
            raise ValueError("Maximum argument modulus of %s must be finite" % name)
        self.name = name
        self.target_rel_error = target_rel_error
        self.max_argument_modulus = max_argument_modulus

    def check(self, modulus):
        if modulus > self.max_argument_modulus:
            raise AccuracyError("%s: argument modulus %g exceeds the documented range %g"
                                % (self.name, modulus, self.max_argument_modulus))

    def __repr__(self):
        return "SpecFunAccuracy(%s, %g, %g)" % (self.name, self.target_rel_error, self.max_argument_modulus)


ACCURACY = {
    'gamma': SpecFunAccuracy('gamma', 1e-14, 171.0),
    'kummer_series': SpecFunAccuracy('kummer_series', 1e-9, 30.0),
    'kummer_asymptotic': SpecFunAccuracy('kummer_asymptotic', 1e-6, 200.0),
    'kummer_quadrature': SpecFunAccuracy('kummer_quadrature', 1e-12, 500.0),
    'bessel_j': SpecFunAccuracy('bessel_j', 1e-12, 500.0),
    'exp_integral': SpecFunAccuracy('exp_integral', 1e-13, 700.0),
}

LANCZOS_G = 7.0
LANCZOS_COEFFICIENTS = (0.99999999999980993, 676.5203681218851, -1259.1392167224028,
                        771.32342877765313, -176.61502916214059, 12.507343278686905,
                        -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7)

# B_2k / (2k (2k - 1)) for k = 1..8
STIRLING_COEFFICIENTS = (1.0 / 12.0, -1.0 / 360.0, 1.0 / 1260.0, -1.0 / 1680.0, 1.0 / 1188.0,
                         -691.0 / 360360.0, 1.0 / 156.0, -3617.0 / 122400.0)

KUMMER_MAX_TERMS = 10000
SERIES_RADIUS = 30.0
# largest sum of |terms| over |sum| the double precision series may keep: 1e5 * 2^-53 stays below 1e-10
CANCELLATION_LIMIT = 1e5
QUADRATURE_CHUNK = 4096


def _is_nonpositive_integer(value):
    return np.logical_and(value <= 0, value == np.round(value))


def _lanczos_gamma(x):
    # valid for x in [0.5, 1.5)
    x = x - 1.0
    series = np.full_like(x, LANCZOS_COEFFICIENTS[0])
    for i, coefficient in enumerate(LANCZOS_COEFFICIENTS[1:], 1):
        series = series + coefficient / (x + i)
    tt = x + LANCZOS_G + 0.5
    return np.sqrt(2.0 * np.pi) * tt ** (x + 0.5) * np.exp(-tt) * series


def _gamma_positive(z):
    # upward recursion from the reduced argument in [0.5, 1.5)
    shifts = np.floor(z - 0.5)
    reduced = z - shifts
    result = _lanczos_gamma(reduced)
    for i in range(int(shifts.max()) if shifts.size else 0):
        active = shifts > i
        result = np.where(active, result * (reduced + i), result)
    return result


def _restore(result, shape):
    result = result.reshape(shape)
    return result[()] if result.ndim == 0 else result


def gamma(z):
    """ Gamma function of a real argument. Raises PoleError at 0, -1, -2, ... """
    z = np.asarray(z, dtype=float)
    shape = z.shape
    z = z.ravel()
    poles = _is_nonpositive_integer(z)
    if np.any(poles):
        raise PoleError("Gamma function evaluated at a pole: %s" % z[poles])
    ACCURACY['gamma'].check(np.max(np.abs(z)) if z.size else 0.0)
    result = np.empty_like(z)
    upper = z >= 0.5
    result[upper] = _gamma_positive(z[upper])
    lower = ~upper
    if np.any(lower):
        reflected = z[lower]
        result[lower] = np.pi / (np.sin(np.pi * reflected) * _gamma_positive(1.0 - reflected))
    return _restore(result, shape)


def rgamma(z):
    """ Reciprocal gamma function; exactly zero at the poles of gamma. """
    z = np.asarray(z, dtype=float)
    shape = z.shape
    z = z.ravel()
    result = np.zeros_like(z)
    regular = ~_is_nonpositive_integer(z) & (z < 171.0)
    if np.any(regular):
        result[regular] = 1.0 / gamma(z[regular])
    return _restore(result, shape)


def stirling_gamma(z):
    """ Gamma from the Stirling series, shifted upward until the series is converged. Used as a cross-check. """
    z = np.asarray(z, dtype=float)
    if np.any(z <= 0):
        raise DomainError("The Stirling cross-check is only defined for positive arguments")
    shape = z.shape
    z = z.ravel()
    shift = np.maximum(np.ceil(10.0 - z), 0.0)
    shifted = z + shift
    log_gamma = (shifted - 0.5) * np.log(shifted) - shifted + 0.5 * np.log(2.0 * np.pi)
    power = shifted
    for coefficient in STIRLING_COEFFICIENTS:
        log_gamma = log_gamma + coefficient / power
        power = power * shifted * shifted
    result = np.exp(log_gamma)
    for i in range(int(shift.max()) if shift.size else 0):
        active = shift > i
        result = np.where(active, result / (z + i), result)
    return _restore(result, shape)


@functools.lru_cache(maxsize=64)
def _jacobi_rule(order, alpha, beta):
    nodes, weights = roots_jacobi(order, alpha, beta)
    return nodes, weights / weights.sum()


def _kummer_quadrature(a, c, z):
    # Euler integral: 1F1 = Γ(c)/(Γ(a)Γ(c-a)) ∫ e^{zs} s^{a-1} (1-s)^{c-a-1} ds, valid for c > a > 0
    modulus = np.max(np.abs(z)) if z.size else 0.0
    ACCURACY['kummer_quadrature'].check(modulus)
    order = int(0.5 * modulus) + 32
    nodes, weights = _jacobi_rule(order, c - a - 1.0, a - 1.0)
    s = 0.5 * (1.0 + nodes)
    result = np.empty(z.shape, dtype=complex)
    for start in range(0, z.size, QUADRATURE_CHUNK):
        chunk = z[start:start + QUADRATURE_CHUNK]
        result[start:start + QUADRATURE_CHUNK] = np.exp(np.outer(chunk, s)) @ weights
    return result


def _kahan_series(a, c, z, magnitudes=False):
    total = np.ones(z.shape, dtype=complex)
    compensation = np.zeros(z.shape, dtype=complex)
    term = np.ones(z.shape, dtype=complex)
    absolute = np.ones(z.shape)
    quiet = 0
    for k in range(KUMMER_MAX_TERMS):
        term = term * ((a + k) / (c + k)) * z / (k + 1)
        absolute = absolute + np.abs(term)
        y = term - compensation
        t = total + y
        compensation = (t - total) - y
        total = t
        if np.all(np.abs(term) <= 1e-17 * np.abs(total)):
            quiet += 1
            if quiet >= 2:
                break
        else:
            quiet = 0
    else:
        raise AccuracyError("1F1(%g; %g; z) series did not converge in %d terms" % (a, c, KUMMER_MAX_TERMS))
    if not magnitudes:
        return total
    with np.errstate(divide='ignore', invalid='ignore'):
        return total, absolute / np.abs(total)


def _redo_cancelled(a, c, z, result, condition):
    """ Points whose series lost more than CANCELLATION_LIMIT to cancellation, redone by mpmath. """
    lossy = ~(condition <= CANCELLATION_LIMIT)
    if not np.any(lossy):
        return result
    # enough extra digits to absorb the cancellation of the double precision sum
    digits = int(np.ceil(np.log10(min(np.max(condition[lossy]), 1e200)))) + 20
    log.debug("1F1(%g; %g; z) at %d point(s) redone with %d digits", a, c, int(lossy.sum()), digits)
    with mpmath.workdps(digits):
        result[lossy] = [complex(mpmath.hyp1f1(a, c, mpmath.mpc(point.real, point.imag))) for point in z[lossy]]
    return result


def _series_with_kummer_transform(a, c, z):
    result = np.empty(z.shape, dtype=complex)
    condition = np.empty(z.shape)
    left = z.real < 0
    if np.any(left):
        total, condition[left] = _kahan_series(c - a, c, -z[left], magnitudes=True)
        result[left] = np.exp(z[left]) * total
    if np.any(~left):
        result[~left], condition[~left] = _kahan_series(a, c, z[~left], magnitudes=True)
    return _redo_cancelled(a, c, z, result, condition)


def _optimally_truncated_sum(p, q, w):
    # sum_s (p)_s (q)_s / s! w^{-s}, stopped at the smallest term
    total = np.ones(w.shape, dtype=complex)
    term = np.ones(w.shape, dtype=complex)
    active = np.ones(w.shape, dtype=bool)
    for s in range(200):
        candidate = term * (p + s) * (q + s) / ((s + 1) * w)
        growing = np.abs(candidate) >= np.abs(term)
        small = np.abs(candidate) <= 1e-17 * np.abs(total)
        active &= ~growing
        total = np.where(active, total + candidate, total)
        term = np.where(active, candidate, term)
        active &= ~small
        if not np.any(active):
            break
    return total


def _kummer_asymptotic(a, c, z):
    # two-sided large-|z| expansion for Re z >= 0
    sign = np.where(z.imag >= 0, 1.0, -1.0)
    first = (np.exp(1j * np.pi * a * sign) * z ** (-a) * rgamma(c - a)
             * _optimally_truncated_sum(a, a - c + 1.0, -z))
    second = np.exp(z) * z ** (a - c) * rgamma(a) * _optimally_truncated_sum(c - a, 1.0 - a, z)
    return gamma(c) * (first + second)


def _kummer_general(a, c, z):
    result = np.empty(z.shape, dtype=complex)
    modulus = np.abs(z)
    if _is_nonpositive_integer(a):
        # terminating polynomial
        total, condition = _kahan_series(a, c, z, magnitudes=True)
        return _redo_cancelled(a, c, z, total, condition)
    ACCURACY['kummer_asymptotic'].check(modulus.max() if z.size else 0.0)
    near = modulus <= SERIES_RADIUS
    if np.any(near):
        result[near] = _series_with_kummer_transform(a, c, z[near])
    far = ~near
    if np.any(far):
        log.warning("1F1(%g; %g; z) evaluated by its asymptotic expansion at |z| up to %.1f; accuracy target %g",
                    a, c, modulus[far].max(), ACCURACY['kummer_asymptotic'].target_rel_error)
        zf = z[far]
        flipped = zf.real < 0
        values = np.empty(zf.shape, dtype=complex)
        if np.any(flipped):
            values[flipped] = np.exp(zf[flipped]) * _kummer_asymptotic(c - a, c, -zf[flipped])
        if np.any(~flipped):
            values[~flipped] = _kummer_asymptotic(a, c, zf[~flipped])
        result[far] = values
    return result


def kummer_1f1(a, c, z):
    """
    Confluent hypergeometric function 1F1(a; c; z) for real parameters and complex z.

    Branches: the Euler integral by Gauss-Jacobi quadrature when c > a > 0, otherwise the compensated Taylor
    series (after a Kummer transformation when Re z < 0) for |z| <= 30 and the asymptotic expansion for
    30 < |z| <= 200.

    """
    a = float(a)
    c = float(c)
    if _is_nonpositive_integer(c):
        raise PoleError("1F1 is undefined for c = %g" % c)
    z = np.asarray(z, dtype=complex)
    flat = z.ravel()
    if a == c:
        result = np.exp(flat)
    elif a == 0.0:
        result = np.ones(flat.shape, dtype=complex)
    elif c > a > 0.0:
        result = _kummer_quadrature(a, c, flat)
    else:
        result = _kummer_general(a, c, flat)
    result = result.reshape(z.shape)
    return result[()] if result.ndim == 0 else result


def bessel_j_regularized(nu, x):
    """
    x^{-nu} J_nu(x), finite at x = 0, from the Poisson integral with Gauss-Jacobi quadrature.

    """
    nu = float(nu)
    x = np.asarray(x, dtype=float)
    if nu < -0.5:
        raise DomainError("Bessel order %g is below the supported range nu >= -1/2" % nu)
    if np.any(x < 0):
        raise DomainError("Bessel functions are evaluated for x >= 0 only")
    if nu == -0.5:
        result = np.sqrt(2.0 / np.pi) * np.cos(x)
        return result[()] if result.ndim == 0 else result
    largest = x.max() if x.size else 0.0
    ACCURACY['bessel_j'].check(largest)
    order = int(0.5 * largest) + 32
    nodes, weights = _jacobi_rule(order, nu - 0.5, nu - 0.5)
    flat = x.ravel()
    average = np.empty(flat.shape)
    for start in range(0, flat.size, QUADRATURE_CHUNK):
        chunk = flat[start:start + QUADRATURE_CHUNK]
        average[start:start + QUADRATURE_CHUNK] = np.cos(np.outer(chunk, nodes)) @ weights
    result = (2.0 ** (-nu) / gamma(nu + 1.0) * average).reshape(x.shape)
    return result[()] if result.ndim == 0 else result


def bessel_j(nu, x):
    """ Bessel function of the first kind J_nu(x) for x >= 0 and nu >= -1/2. """
    x = np.asarray(x, dtype=float)
    if nu < 0 and np.any(x == 0):
        raise SingularityError("J_%g diverges at x = 0; use bessel_j_regularized" % nu)
    result = x ** nu * bessel_j_regularized(nu, x)
    return result[()] if np.ndim(result) == 0 else result


def _ei_positive(y):
    # Ei(y) for y > 0
    result = np.empty_like(y)
    small = y <= 40.0
    if np.any(small):
        ys = y[small]
        total = np.zeros_like(ys)
        compensation = np.zeros_like(ys)
        power = np.ones_like(ys)
        for k in range(1, 500):
            power = power * ys / k
            term = power / k
            corrected = term - compensation
            t = total + corrected
            compensation = (t - total) - corrected
            total = t
            if np.all(term <= 1e-17 * total):
                break
        result[small] = EULER_GAMMA + np.log(ys) + total
    if np.any(~small):
        result[~small] = np.exp(y[~small]) * _ei_asymptotic_scaled(y[~small])
    return result


def _ei_asymptotic_scaled(y):
    # e^{-y} Ei(y) ~ (1/y) sum k!/y^k, truncated at the smallest term
    total = np.ones_like(y)
    term = np.ones_like(y)
    active = np.ones(y.shape, dtype=bool)
    for k in range(1, 100):
        candidate = term * k / y
        active &= candidate < term
        total = np.where(active, total + candidate, total)
        term = np.where(active, candidate, term)
        if not np.any(active):
            break
    return total / y


def _e1_series(x):
    # 0 < x <= 1
    total = np.zeros_like(x)
    term = np.ones_like(x)
    for k in range(1, 60):
        term = -term * x / k
        total = total - term / k
    return -EULER_GAMMA - np.log(x) + total


def _e1_continued_fraction_scaled(x):
    # e^x E1(x) for x > 1 by the modified Lentz method
    tiny = 1e-300
    b = x + 1.0
    c = np.full_like(x, 1.0 / tiny)
    d = 1.0 / b
    h = d.copy()
    for i in range(1, 1000):
        an = -float(i * i)
        b = b + 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        delta = c * d
        h = h * delta
        if np.all(np.abs(delta - 1.0) < 1e-16):
            break
    return h


def _validate_exp_integral_argument(x):
    x = np.asarray(x, dtype=float)
    if np.any(x == 0):
        raise SingularityError("The exponential integral is singular at x = 0")
    ACCURACY['exp_integral'].check(np.max(np.abs(x)) if x.size else 0.0)
    return x.ravel(), x.shape


def _e1_flat(x):
    result = np.empty_like(x)
    small = (x > 0) & (x <= 1.0)
    large = x > 1.0
    negative = x < 0
    if np.any(small):
        result[small] = _e1_series(x[small])
    if np.any(large):
        result[large] = np.exp(-x[large]) * _e1_continued_fraction_scaled(x[large])
    if np.any(negative):
        result[negative] = -_ei_positive(-x[negative])
    return result


def exp_integral_e1(x):
    """ E1(x) for x > 0; for x < 0 the principal-value extension -Ei(-x). """
    x, shape = _validate_exp_integral_argument(x)
    return _restore(_e1_flat(x), shape)


def exp_integral_ei(x):
    """ Ei(x); for x < 0 this is -E1(-x). """
    x, shape = _validate_exp_integral_argument(x)
    return _restore(-_e1_flat(-x), shape)


def exp_scaled_e1(x):
    """ e^x E1(x), finite for large |x| where E1 alone under- or overflows. """
    x, shape = _validate_exp_integral_argument(x)
    result = np.empty_like(x)
    small = (x > 0) & (x <= 1.0)
    large = x > 1.0
    negative = x < 0
    if np.any(small):
        result[small] = np.exp(x[small]) * _e1_series(x[small])
    if np.any(large):
        result[large] = _e1_continued_fraction_scaled(x[large])
    if np.any(negative):
        y = -x[negative]
        scaled = np.empty_like(y)
        near = y <= 40.0
        if np.any(near):
            scaled[near] = np.exp(-y[near]) * _ei_positive(y[near])
        if np.any(~near):
            scaled[~near] = _ei_asymptotic_scaled(y[~near])
        result[negative] = -scaled
    return _restore(result, shape)
