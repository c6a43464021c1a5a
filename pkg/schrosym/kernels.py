"""
Closed-form invariant fundamental solutions of the free Schrodinger equation, their oscillator, linear
potential and effective-mass descendants, the momentum-space profiles they come from and the smoothing maps.

Positions are arrays with a trailing axis of length n. Fractional powers use the principal branch, so
(m/(2 pi i hbar t))^a = (m/(2 pi hbar t))^a exp(-i pi a/2) for t > 0.

"""
import logging
import numpy as np
from schrosym import specfun
from schrosym.error import DomainError, ParameterError, SingularityError
from schrosym.misc import gradient_at_points, laplacian_at_points, relative_norm, time_derivative
from schrosym.spectral import WaveField, MOMENTUM, apply_multiplier, inverse_transform

log = logging.getLogger(__name__)


class SymbolSpec(object):
    """ The function f(p) of |p| that defines J_0j. """
    name = None

    def value(self, p):
        raise NotImplementedError

    def derivative(self, p):
        raise NotImplementedError

    def closure_multiplier(self, p):
        """ f f'/p, the factor in [J_0j, J_0k] = -i hbar (f f'/p) J_jk. """
        return self.value(p) * self.derivative(p) / p

    def validate(self, dimension):
        pass

    def normalization(self, phys, dimension):
        return (2.0 * np.pi * phys.hbar) ** (-0.5 * dimension)

    @property
    def parameters(self):
        return {}

    @property
    def serialized(self):
        data = {'variant': self.name}
        data.update(self.parameters)
        return data

    @property
    def key(self):
        return ','.join([self.name] + ['%s=%r' % item for item in sorted(self.parameters.items())])

    def __eq__(self, other):
        return type(self) is type(other) and self.parameters == other.parameters

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return self.key


class Identity(SymbolSpec):
    name = 'identity'

    def value(self, p):
        return np.ones_like(np.asarray(p, dtype=float))

    def derivative(self, p):
        return np.zeros_like(np.asarray(p, dtype=float))

    def closure_multiplier(self, p):
        return np.zeros_like(np.asarray(p, dtype=float))


class PowerAlpha(SymbolSpec):
    name = 'power'

    def __init__(self, alpha):
        if not np.isfinite(alpha) or alpha <= 0:
            raise ParameterError("PowerAlpha needs a positive exponent, got %r" % alpha)
        self.alpha = float(alpha)

    def value(self, p):
        return np.asarray(p, dtype=float) ** self.alpha

    def derivative(self, p):
        return self.alpha * np.asarray(p, dtype=float) ** (self.alpha - 1.0)

    def closure_multiplier(self, p):
        return self.alpha * np.asarray(p, dtype=float) ** (2.0 * self.alpha - 2.0)

    def validate(self, dimension):
        if not 0.0 < self.alpha < 2.0 * dimension:
            raise ParameterError("PowerAlpha needs 0 < alpha < 2n = %d, got %r" % (2 * dimension, self.alpha))

    def normalization(self, phys, dimension):
        # the constant for which the inverse transform of the profile is exactly the Case I kernel
        exponent = 0.5 * dimension - 0.25 * self.alpha
        return (2.0 * phys.hbar) ** (0.5 * dimension) * (4.0 * np.pi * phys.hbar ** 2) ** (-exponent)

    @property
    def parameters(self):
        return {'alpha': self.alpha}


class ExpBeta(SymbolSpec):
    name = 'exp'

    def __init__(self, beta):
        if not np.isfinite(beta) or beta <= 0:
            raise ParameterError("ExpBeta needs beta > 0, got %r" % beta)
        self.beta = float(beta)

    def value(self, p):
        return np.exp(2.0 * self.beta * np.asarray(p, dtype=float) ** 2)

    def derivative(self, p):
        p = np.asarray(p, dtype=float)
        return 4.0 * self.beta * p * np.exp(2.0 * self.beta * p ** 2)

    def closure_multiplier(self, p):
        return 4.0 * self.beta * np.exp(4.0 * self.beta * np.asarray(p, dtype=float) ** 2)

    @property
    def parameters(self):
        return {'beta': self.beta}


class ShiftedSqrt(SymbolSpec):
    name = 'sqrt'

    def __init__(self, constant):
        if not np.isfinite(constant) or constant < 0:
            raise ParameterError("ShiftedSqrt needs a non-negative constant, got %r" % constant)
        self.constant = float(constant)

    def value(self, p):
        return np.sqrt(np.asarray(p, dtype=float) ** 2 + self.constant)

    def derivative(self, p):
        p = np.asarray(p, dtype=float)
        return p / np.sqrt(p ** 2 + self.constant)

    def closure_multiplier(self, p):
        return np.ones_like(np.asarray(p, dtype=float))

    @property
    def parameters(self):
        return {'constant': self.constant}


SYMBOLS = {'identity': Identity, 'power': PowerAlpha, 'exp': ExpBeta, 'sqrt': ShiftedSqrt}


def symbol_from_config(data):
    """ Builds a SymbolSpec from a mapping such as {'variant': 'power', 'alpha': 1.0}. """
    data = dict(data)
    variant = data.pop('variant', None)
    if variant not in SYMBOLS:
        raise ParameterError("Unknown symbol variant %r; choose from %s" % (variant, ', '.join(sorted(SYMBOLS))))
    return SYMBOLS[variant](**data)


class KernelParams(object):
    def __init__(self, phys, dimension, symbol, normalization=None):
        symbol.validate(dimension)
        self.phys = phys
        self.dimension = dimension
        self.symbol = symbol
        self.normalization = symbol.normalization(phys, dimension) if normalization is None else normalization


def _squared_radius(x):
    x = np.asarray(x, dtype=float)
    return np.sum(x ** 2, axis=-1)


def _check_time(t):
    if t == 0:
        raise SingularityError("The kernel is singular at t = 0")


def case1_exponent(dimension, alpha):
    if not 0.0 <= alpha < 2.0 * dimension:
        raise ParameterError("Case I kernels need 0 <= alpha < 2n = %d, got %r" % (2 * dimension, alpha))
    return 0.5 * dimension - 0.25 * alpha


def galilean_kernel(x, t, phys):
    """ (m/(2 pi i hbar t))^{n/2} exp(i m |x|^2 / (2 hbar t)). t may be complex. """
    _check_time(t)
    n = np.shape(x)[-1]
    m, hbar = phys.mass, phys.hbar
    return (m / (2j * np.pi * hbar * t)) ** (0.5 * n) * np.exp(1j * m * _squared_radius(x) / (2.0 * hbar * t))


def galilean_log_kernel(x, t, phys):
    """ The logarithm of the Galilean kernel, continuous in x; its imaginary part is a continuous phase. """
    _check_time(t)
    n = np.shape(x)[-1]
    m, hbar = phys.mass, phys.hbar
    return 0.5 * n * np.log(m / (2j * np.pi * hbar * t) + 0j) + 1j * m * _squared_radius(x) / (2.0 * hbar * t)


def _case1_formula(x, t, alpha, mass, hbar):
    n = np.shape(x)[-1]
    a = case1_exponent(n, alpha)
    prefactor = (mass / (2j * np.pi * hbar * t)) ** a * specfun.gamma(a) / specfun.gamma(0.5 * n)
    argument = 1j * mass * _squared_radius(x) / (2.0 * hbar * t)
    return prefactor * specfun.kummer_1f1(a, 0.5 * n, argument)


def invariant_kernel_case1(x, t, alpha, phys):
    """
    The solution annihilated by J_jk and J_0j for f(p) = p^alpha:

        (m/(2 pi i hbar t))^{n/2 - alpha/4} Gamma(n/2 - alpha/4)/Gamma(n/2) 1F1(n/2 - alpha/4; n/2; i m|x|^2/(2 hbar t))

    alpha = 0 is accepted and gives the Galilean kernel.

    """
    _check_time(t)
    if np.shape(x)[-1] < 2:
        raise ParameterError("Invariant kernels need n >= 2")
    return _case1_formula(x, t, alpha, phys.mass, phys.hbar)


def _require_positive_time(t):
    _check_time(t)
    if t < 0:
        raise DomainError("The Bessel forms are written for t > 0")


def bessel_kernel_n3_alpha1(x, t, phys):
    """ The n = 3, alpha = 1 kernel in terms of J_{-1/4} and J_{3/4}, finite at x = 0. """
    _require_positive_time(t)
    if np.shape(x)[-1] != 3:
        raise ParameterError("This Bessel form is specific to n = 3")
    m, hbar = phys.mass, phys.hbar
    z = m * _squared_radius(x) / (4.0 * hbar * t)
    # |x|^{1/2} J_{-1/4}(z) = (4 hbar t/m)^{1/4} z^{1/4} J_{-1/4}(z), and |x|^{1/2} J_{3/4}(z) likewise
    scale = (4.0 * hbar * t / m) ** 0.25
    bracket = scale * (specfun.bessel_j_regularized(-0.25, z) + 1j * z * specfun.bessel_j_regularized(0.75, z))
    prefactor = np.exp(0.25j * np.pi / 2.0) * np.pi ** 0.75 / 2.0 * (m / (2j * np.pi * hbar * t)) ** 1.5
    return prefactor * np.exp(1j * z) * bracket


def bessel_kernel_alpha_eq_n(x, t, phys):
    """ The alpha = n kernel through J_{n/4 - 1/2}. """
    _require_positive_time(t)
    n = np.shape(x)[-1]
    if n < 2:
        raise ParameterError("Invariant kernels need n >= 2")
    m, hbar = phys.mass, phys.hbar
    nu = 0.25 * n - 0.5
    z = m * _squared_radius(x) / (4.0 * hbar * t)
    # (z/2)^{-nu} J_nu(z) = 2^nu z^{-nu} J_nu(z)
    bessel = 2.0 ** nu * specfun.bessel_j_regularized(nu, z)
    prefactor = np.sqrt(np.pi) / 2.0 ** (0.5 * n - 1.0) * (m / (2j * np.pi * hbar * t)) ** (0.25 * n)
    return prefactor * np.exp(1j * z) * bessel


def case2_kernel(x, t, beta, phys, normalization=None):
    """ c (2 hbar beta + i t/m)^{-n/2} exp(-|x|^2 / (4 hbar^2 (beta + i t/(2 m hbar)))), regular at t = 0. """
    if not np.isfinite(beta) or beta <= 0:
        raise ParameterError("Case II kernels need beta > 0, got %r" % beta)
    n = np.shape(x)[-1]
    m, hbar = phys.mass, phys.hbar
    c = (2.0 * np.pi * hbar) ** (-0.5 * n) if normalization is None else normalization
    width = beta + 1j * t / (2.0 * m * hbar)
    return c * (2.0 * hbar * beta + 1j * t / m) ** (-0.5 * n) * np.exp(-_squared_radius(x) / (4.0 * hbar ** 2 * width))


def case2_log_kernel(x, t, beta, phys, normalization=None):
    """ The logarithm of the Case II kernel. Its imaginary part is continuous in x and t. """
    if not np.isfinite(beta) or beta <= 0:
        raise ParameterError("Case II kernels need beta > 0, got %r" % beta)
    n = np.shape(x)[-1]
    m, hbar = phys.mass, phys.hbar
    c = (2.0 * np.pi * hbar) ** (-0.5 * n) if normalization is None else normalization
    width = beta + 1j * t / (2.0 * m * hbar)
    return (np.log(c + 0j) - 0.5 * n * np.log(2.0 * hbar * beta + 1j * t / m)
            - _squared_radius(x) / (4.0 * hbar ** 2 * width))


def fourier_profile(p, t, params):
    """
    c f(p)^{-1/2} exp(-i t p^2 / (2 m hbar)) at momentum magnitudes p. Raises SingularityError where f vanishes;
    pass the regularized magnitude of a grid to avoid the p = 0 bin.

    """
    p = np.asarray(p, dtype=float)
    f = params.symbol.value(p)
    if np.any(f <= 0):
        raise SingularityError("f(p) vanishes at %d momentum value(s)" % int(np.sum(f <= 0)))
    phys = params.phys
    return params.normalization * f ** -0.5 * np.exp(-1j * t * p ** 2 / (2.0 * phys.mass * phys.hbar))


def profile_field(grid, t, params):
    """ The inverse transform of the profile on a grid, with the p = 0 bin regularized. """
    profile = fourier_profile(grid.regularized_momentum_magnitude, t, params)
    return inverse_transform(WaveField(grid, profile, t, MOMENTUM))


def smoothing_map(field, alpha, t, phys=None):
    """ Multiplies the spectrum by |p|^{-alpha/2} exp(-i t |p|^2/(2 m hbar)). """
    grid = field.grid
    phys = phys or grid.phys
    if not 0.0 <= alpha < 2.0 * grid.dimension:
        raise ParameterError("Smoothing maps need 0 <= alpha < 2n, got %r" % alpha)

    def symbol(momenta):
        p2 = sum(p ** 2 for p in momenta)
        with np.errstate(divide='ignore'):
            power = p2 ** (-0.25 * alpha) if alpha > 0 else np.ones_like(p2)
        return power * np.exp(-1j * t * p2 / (2.0 * phys.mass * phys.hbar))

    return apply_multiplier(field, symbol, regularize=alpha > 0).replace(time=field.time + t)


def oscillator_invariant_kernel(x, t, omega, alpha, phys):
    """
    The Niederer image of the Case I kernel:

        (m w/(2 pi i hbar sin wt))^{n/2} (m w/(2 pi i hbar tan wt))^{-alpha/4} Gamma(a)/Gamma(n/2)
            exp(-i m w tan(wt) |x|^2 / (2 hbar)) 1F1(a; n/2; i m w |x|^2 / (hbar sin 2wt))

    """
    n = np.shape(x)[-1]
    if n < 2:
        raise ParameterError("Invariant kernels need n >= 2")
    a = case1_exponent(n, alpha)
    phase = omega * t
    sine, cosine = np.sin(phase), np.cos(phase)
    if abs(sine) < 1e-14 or abs(cosine) < 1e-14:
        raise SingularityError("Oscillator kernel evaluated on a caustic, omega t = %g" % phase)
    m, hbar = phys.mass, phys.hbar
    r2 = _squared_radius(x)
    prefactor = ((m * omega / (2j * np.pi * hbar * sine)) ** (0.5 * n)
                 * (m * omega * cosine / (2j * np.pi * hbar * sine)) ** (-0.25 * alpha)
                 * specfun.gamma(a) / specfun.gamma(0.5 * n))
    chirp = np.exp(-1j * m * omega * sine / cosine * r2 / (2.0 * hbar))
    return prefactor * chirp * specfun.kummer_1f1(a, 0.5 * n, 1j * m * omega * r2 / (hbar * np.sin(2.0 * phase)))


def linear_potential_invariant_kernel(x, t, b, sigma, alpha, phys):
    """
    The image of the Case I kernel under the mapping that adds the potential b.x, amplitude factor sigma^{n/2}
    included, so it equals transform_kernel(linear_potential_coefficients(b, sigma, ...), case I kernel).

    """
    _check_time(t)
    if sigma == 0:
        raise ParameterError("The linear potential map needs sigma != 0")
    n = np.shape(x)[-1]
    if n < 2:
        raise ParameterError("Invariant kernels need n >= 2")
    a = case1_exponent(n, alpha)
    b = np.asarray(b, dtype=float)
    m, hbar = phys.mass, phys.hbar
    x = np.asarray(x, dtype=float)
    bx = x @ b
    b2 = float(b @ b)
    prefactor = (sigma ** (0.5 * n) * (m / (2j * np.pi * hbar * sigma ** 2 * t)) ** a
                 * specfun.gamma(a) / specfun.gamma(0.5 * n))
    gauge = np.exp(-1j / hbar * (t * bx + b2 * t ** 3 / (6.0 * m)))
    argument = (1j * m * _squared_radius(x) / (2.0 * hbar * t) + 1j * t * bx / (2.0 * hbar)
                + 1j * b2 * t ** 3 / (8.0 * m * hbar))
    return prefactor * gauge * specfun.kummer_1f1(a, 0.5 * n, argument)


def dg_effective_mass_kernel(x, t, lam, alpha, phys):
    """ The Case I kernel with the mass m replaced by the effective mass m Lambda. """
    _check_time(t)
    if lam == 0:
        raise ParameterError("The effective mass factor Lambda must be nonzero")
    if np.shape(x)[-1] < 2:
        raise ParameterError("Invariant kernels need n >= 2")
    return _case1_formula(x, t, alpha, phys.mass * lam, phys.hbar)


def as_invariant_solution(x, t, alpha):
    """ The invariant solution of the linearized Auberson-Sabatier equation, written with m = 1/2, hbar = 1. """
    _check_time(t)
    return _case1_formula(x, t, alpha, 0.5, 1.0)


def free_equation_residual(kernel, points, t, phys, potential=None, h=0.02, dt=None):
    """
    Relative residual of i hbar psi_t = -(hbar^2/2m) Laplacian psi + V psi at sample points.
    kernel(points, t) evaluates the solution; potential(points, t), if given, is V.

    """
    points = np.asarray(points, dtype=float)
    dt = 1e-4 * abs(t) if dt is None else dt
    m, hbar = phys.mass, phys.hbar
    values = kernel(points, t)
    psi_t = time_derivative(lambda s: kernel(points, s), t, dt)
    lap = laplacian_at_points(lambda q: kernel(q, t), points, h)
    residual = 1j * hbar * psi_t + hbar ** 2 / (2.0 * m) * lap
    if potential is not None:
        residual = residual - potential(points, t) * values
    return relative_norm(residual, values)


def kernel_rotation_residual(kernel, points, t, j, k, h=0.02):
    """ Relative norm of J_jk psi = (x_j p_k - x_k p_j) psi at sample points, by finite differences. """
    points = np.asarray(points, dtype=float)
    values = kernel(points, t)
    grad = gradient_at_points(lambda q: kernel(q, t), points, h)
    rotated = points[..., j] * grad[..., k] - points[..., k] * grad[..., j]
    return relative_norm(rotated, values)


def kernel_boost_residual(params, momenta, t, j, h=1e-4):
    """
    Relative norm of J_0j applied to the momentum profile, where in momentum space
    J_0j = (t/m) f p_j - i hbar f d/dp_j - (i hbar/2) f' p_j/p. Sample momenta must avoid p = 0.

    """
    momenta = np.asarray(momenta, dtype=float)
    phys, symbol = params.phys, params.symbol
    magnitude = np.sqrt(np.sum(momenta ** 2, axis=-1))
    if np.any(magnitude == 0):
        raise SingularityError("Boost residual sampled at p = 0")

    def profile(q):
        return fourier_profile(np.sqrt(np.sum(q ** 2, axis=-1)), t, params)

    values = profile(momenta)
    derivative = gradient_at_points(profile, momenta, h)[..., j]
    f = symbol.value(magnitude)
    pj = momenta[..., j]
    boosted = (t / phys.mass * f * pj * values - 1j * phys.hbar * f * derivative
               - 0.5j * phys.hbar * symbol.derivative(magnitude) * pj / magnitude * values)
    return relative_norm(boosted, f * pj * values)


def decay_exponent(values, times):
    """ Least-squares slope of log|values| against log(times). """
    return float(np.polyfit(np.log(np.asarray(times, dtype=float)), np.log(np.abs(values)), 1)[0])


def sample_rows(x, t, values):
    """ Rows (x..., t, Re, Im, |psi|, arg psi) for CSV output. """
    x = np.asarray(x, dtype=float).reshape(-1, np.shape(x)[-1])
    values = np.asarray(values).ravel()
    rows = []
    for position, value in zip(x, values):
        rows.append(list(position) + [t, value.real, value.imag, abs(value), float(np.angle(value))])
    return rows
