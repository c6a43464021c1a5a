"""
Maps between solutions of different Schrodinger equations.

A solution u(y, tau) of the free equation becomes a solution of

    i hbar psi_t = -(hbar^2/2m) Laplacian psi + (a(t)|x|^2 + b(t).x + c(t)) psi

through psi(x, t) = sigma^{n/2} exp(-(i/hbar)(A|x|^2 + B.x + C)) u(sigma x + rho, tau), with the coefficients
following

    A' = a + 2A^2/m,  B' = b + 2AB/m,  C' = c + |B|^2/2m,  sigma' = 2A sigma/m,  rho' = sigma B/m,  tau' = sigma^2

from the identity at t = 0. The module also holds the nonlinear gauge maps that linearize the Doebner-Goldin
family and the Auberson-Sabatier linearization.

"""
import collections
import logging
import numpy as np
from scipy.interpolate import CubicHermiteSpline
from schrosym.constants import CAUSTIC_LIMIT, DEFAULT_TRANSFORM_STEP, ZERO_AMPLITUDE_FRACTION
from schrosym.error import BlowUpError, BranchError, ParameterError, PhaseVortexError
from schrosym.kernels import free_equation_residual
from schrosym.misc import FIRST_DERIVATIVE_WEIGHTS, laplacian_at_points, relative_norm, time_derivative
from schrosym.spectral import PhysParams, WaveField, fourier_interpolate, free_evolve

log = logging.getLogger(__name__)

CoefficientSample = collections.namedtuple('CoefficientSample', ['A', 'B', 'C', 'sigma', 'rho', 'tau'])


class PotentialSpec(object):
    """
    V(x, t) = a(t)|x|^2 + b(t).x + c(t). a and c return scalars, b returns a vector of length n.

    """
    def __init__(self, a, b, c, dimension, description='custom'):
        self.a = a
        self.b = b
        self.c = c
        self.dimension = dimension
        self.description = description

    @classmethod
    def constant(cls, dimension, a=0.0, b=None, c=0.0):
        b = np.zeros(dimension) if b is None else np.asarray(b, dtype=float)
        if b.shape != (dimension,):
            raise ParameterError("b needs %d components, got %d" % (dimension, b.size))
        return cls(lambda t: a, lambda t: b, lambda t: c, dimension, 'constant')

    @classmethod
    def oscillator(cls, dimension, omega, phys=None):
        phys = phys or PhysParams()
        return cls.constant(dimension, a=0.5 * phys.mass * omega ** 2)

    @classmethod
    def linear(cls, b):
        b = np.asarray(b, dtype=float)
        return cls.constant(b.size, b=b)

    @classmethod
    def polynomial(cls, dimension, a=(0.0,), b=None, c=(0.0,)):
        """ Coefficients as polynomials in t, lowest order first. b holds one list per axis. """
        b = [[0.0]] * dimension if b is None else b
        if len(b) != dimension:
            raise ParameterError("b needs one polynomial per axis")
        a_poly = np.polynomial.Polynomial(a)
        c_poly = np.polynomial.Polynomial(c)
        b_polys = [np.polynomial.Polynomial(coefficients) for coefficients in b]
        return cls(a_poly, lambda t: np.array([poly(t) for poly in b_polys]), c_poly, dimension, 'polynomial')

    @classmethod
    def trigonometric(cls, dimension, rng, terms=2, scale=0.3):
        """ A random smooth potential: each coefficient is a short cosine series with random phases. """
        def series():
            amplitudes = scale * rng.uniform(-1.0, 1.0, size=terms + 1)
            frequencies = rng.uniform(0.5, 2.0, size=terms)
            phases = rng.uniform(0.0, 2.0 * np.pi, size=terms)

            def value(t):
                return amplitudes[0] + np.sum(amplitudes[1:] * np.cos(frequencies * t + phases))
            return value

        a = series()
        b_series = [series() for _ in range(dimension)]
        c = series()
        return cls(a, lambda t: np.array([component(t) for component in b_series]), c, dimension, 'trigonometric')

    @classmethod
    def from_config(cls, data, dimension, rng=None):
        kind = data.get('type', 'constant')
        if kind == 'constant':
            return cls.constant(dimension, float(data.get('a', 0.0)), data.get('b'), float(data.get('c', 0.0)))
        if kind == 'oscillator':
            return cls.oscillator(dimension, float(data['omega']))
        if kind == 'polynomial':
            return cls.polynomial(dimension, data.get('a', [0.0]), data.get('b'), data.get('c', [0.0]))
        if kind == 'trigonometric':
            if rng is None:
                raise ParameterError("Random potentials need a random generator")
            return cls.trigonometric(dimension, rng, int(data.get('terms', 2)), float(data.get('scale', 0.3)))
        raise ParameterError("Unknown potential type: %s" % kind)

    def coefficients(self, t):
        b = np.asarray(self.b(t), dtype=float)
        return float(self.a(t)), b, float(self.c(t))

    def validate(self, times):
        for t in times:
            a, b, c = self.coefficients(t)
            if not (np.isfinite(a) and np.isfinite(c) and np.all(np.isfinite(b))):
                raise ParameterError("The potential is not finite at t = %g" % t)
            if b.shape != (self.dimension,):
                raise ParameterError("b(t) has %d components but the potential is %d-dimensional"
                                     % (b.size, self.dimension))

    def __call__(self, points, t):
        points = np.asarray(points, dtype=float)
        a, b, c = self.coefficients(t)
        return a * np.sum(points ** 2, axis=-1) + points @ b + c

    def __repr__(self):
        return "PotentialSpec(%s, n=%d)" % (self.description, self.dimension)


def _layout(dimension):
    # state vector: A, B_1..B_n, C, sigma, rho_1..rho_n, tau
    return {'A': slice(0, 1), 'B': slice(1, 1 + dimension), 'C': slice(1 + dimension, 2 + dimension),
            'sigma': slice(2 + dimension, 3 + dimension), 'rho': slice(3 + dimension, 3 + 2 * dimension),
            'tau': slice(3 + 2 * dimension, 4 + 2 * dimension)}


def _rate(potential, mass, t, state):
    n = potential.dimension
    A = state[0]
    B = state[1:1 + n]
    sigma = state[2 + n]
    a, b, c = potential.coefficients(t)
    rate = np.empty_like(state)
    rate[0] = a + 2.0 * A ** 2 / mass
    rate[1:1 + n] = b + 2.0 * A * B / mass
    rate[1 + n] = c + B @ B / (2.0 * mass)
    rate[2 + n] = 2.0 * A * sigma / mass
    rate[3 + n:3 + 2 * n] = sigma * B / mass
    rate[3 + 2 * n] = sigma ** 2
    return rate


def _identity_state(dimension):
    state = np.zeros(4 + 2 * dimension)
    state[2 + dimension] = 1.0
    return state


class TransformCoefficients(object):
    """
    The coefficient functions sampled on a time mesh, together with their derivatives. Values between mesh
    points come from cubic Hermite interpolation.

    """
    def __init__(self, times, states, rates, dimension, phys):
        self._times = np.asarray(times, dtype=float)
        self._states = np.asarray(states, dtype=float)
        self._rates = np.asarray(rates, dtype=float)
        self._dimension = dimension
        self._phys = phys
        self._layout = _layout(dimension)
        if np.any(self._states[:, self._layout['sigma']] == 0):
            raise ParameterError("sigma vanishes on the mesh")
        self._spline = CubicHermiteSpline(self._times, self._states, self._rates, axis=0)

    @property
    def times(self):
        return self._times

    @property
    def dimension(self):
        return self._dimension

    @property
    def phys(self):
        return self._phys

    def _component(self, name):
        return self._states[:, self._layout[name]]

    @property
    def A(self):
        return self._component('A')[:, 0]

    @property
    def B(self):
        return self._component('B')

    @property
    def C(self):
        return self._component('C')[:, 0]

    @property
    def sigma(self):
        return self._component('sigma')[:, 0]

    @property
    def rho(self):
        return self._component('rho')

    @property
    def tau(self):
        return self._component('tau')[:, 0]

    def at(self, t):
        if not self._times[0] - 1e-12 <= t <= self._times[-1] + 1e-12:
            raise ParameterError("t = %g lies outside the coefficient window [%g, %g]"
                                 % (t, self._times[0], self._times[-1]))
        state = self._spline(t)
        return CoefficientSample(float(state[self._layout['A']][0]), state[self._layout['B']],
                                 float(state[self._layout['C']][0]), float(state[self._layout['sigma']][0]),
                                 state[self._layout['rho']], float(state[self._layout['tau']][0]))

    def tau_defect(self):
        """ max |tau' - sigma^2| over the interior of the mesh, with tau' from a fourth-order difference. """
        if self._times.size < 5:
            return 0.0
        step = np.diff(self._times)
        if not np.allclose(step, step[0]):
            raise ParameterError("tau_defect needs a uniform mesh")
        derivative = np.convolve(self.tau, FIRST_DERIVATIVE_WEIGHTS[::-1], mode='valid') / step[0]
        return float(np.max(np.abs(derivative - self.sigma[2:-2] ** 2)))

    def compare(self, other):
        """ The largest difference between two coefficient sets on this mesh. """
        differences = []
        for t in self._times:
            mine, theirs = self.at(t), other.at(t)
            differences.append(max(np.max(np.abs(np.atleast_1d(getattr(mine, name))
                                                 - np.atleast_1d(getattr(theirs, name))))
                                   for name in CoefficientSample._fields))
        return float(max(differences))


def _check_caustic(state, t, layout):
    sigma = state[layout['sigma']][0]
    if not np.all(np.isfinite(state)) or np.max(np.abs(state)) > CAUSTIC_LIMIT or abs(sigma) < 1.0 / CAUSTIC_LIMIT:
        raise BlowUpError("The coefficient flow diverges near t = %g (focusing caustic)" % t)


def _integrate(potential, mass, end, dt):
    """ Classical RK4 from t = 0 to end, returning the mesh, states and rates. """
    steps = max(1, int(np.ceil(abs(end) / dt - 1e-9)))
    h = end / steps
    layout = _layout(potential.dimension)
    times = np.linspace(0.0, end, steps + 1)
    states = np.empty((steps + 1, 4 + 2 * potential.dimension))
    states[0] = _identity_state(potential.dimension)
    for index in range(steps):
        t, y = times[index], states[index]
        k1 = _rate(potential, mass, t, y)
        k2 = _rate(potential, mass, t + 0.5 * h, y + 0.5 * h * k1)
        k3 = _rate(potential, mass, t + 0.5 * h, y + 0.5 * h * k2)
        k4 = _rate(potential, mass, t + h, y + h * k3)
        states[index + 1] = y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        _check_caustic(states[index + 1], times[index + 1], layout)
    return times, states


def solve_transform_coefficients(potential, window, dt=DEFAULT_TRANSFORM_STEP, phys=None):
    """
    Integrates the coefficient flow over window = (start, end), which must contain t = 0 where the transform
    is the identity (tau(0) = 0).

    """
    phys = phys or PhysParams()
    start, end = float(window[0]), float(window[1])
    if dt <= 0:
        raise ParameterError("The coefficient step must be positive, got %r" % dt)
    if not start <= 0.0 <= end or start == end:
        raise ParameterError("The window [%g, %g] must contain t = 0" % (start, end))
    forward_times, forward_states = _integrate(potential, phys.mass, end, dt) if end > 0 else (
        np.zeros(1), _identity_state(potential.dimension)[np.newaxis])
    if start < 0:
        backward_times, backward_states = _integrate(potential, phys.mass, start, dt)
        times = np.concatenate([backward_times[:0:-1], forward_times])
        states = np.concatenate([backward_states[:0:-1], forward_states])
    else:
        times, states = forward_times, forward_states
    potential.validate(times)
    rates = np.array([_rate(potential, phys.mass, t, state) for t, state in zip(times, states)])
    log.debug("Solved transform coefficients for %s on [%g, %g] with %d steps", potential, start, end, times.size)
    return TransformCoefficients(times, states, rates, potential.dimension, phys)


def _closed_form(times, dimension, phys, A, dA, B, dB, C, dC, sigma, dsigma, rho, drho, tau, dtau):
    states = np.column_stack([A, B, C, sigma, rho, tau])
    rates = np.column_stack([dA, dB, dC, dsigma, drho, dtau])
    return TransformCoefficients(times, states, rates, dimension, phys)


def niederer_coefficients(omega, times, dimension, phys=None):
    """ A = (m w/2) tan wt, sigma = sec wt, tau = tan(wt)/w, B = C = rho = 0. Needs |wt| < pi/2. """
    phys = phys or PhysParams()
    times = np.asarray(times, dtype=float)
    if omega <= 0:
        raise ParameterError("The oscillator frequency must be positive, got %r" % omega)
    if np.any(np.abs(omega * times) >= 0.5 * np.pi):
        raise BlowUpError("The Niederer map is singular at |wt| = pi/2")
    m = phys.mass
    phase = omega * times
    tangent, secant = np.tan(phase), 1.0 / np.cos(phase)
    zero = np.zeros_like(times)
    zeros = np.zeros((times.size, dimension))
    return _closed_form(times, dimension, phys,
                        0.5 * m * omega * tangent, 0.5 * m * omega ** 2 * secant ** 2,
                        zeros, zeros, zero, zero,
                        secant, omega * tangent * secant,
                        zeros, zeros, tangent / omega, secant ** 2)


def linear_potential_coefficients(b, sigma, times, phys=None):
    """ A = 0, B = t b, C = |b|^2 t^3/6m, rho = sigma t^2 b/2m, tau = sigma^2 t for a constant force b. """
    phys = phys or PhysParams()
    if sigma == 0:
        raise ParameterError("The linear potential map needs sigma != 0")
    times = np.asarray(times, dtype=float)
    b = np.asarray(b, dtype=float)
    m = phys.mass
    b2 = float(b @ b)
    zero = np.zeros_like(times)
    column = times[:, np.newaxis]
    return _closed_form(times, b.size, phys,
                        zero, zero,
                        column * b, np.tile(b, (times.size, 1)),
                        b2 * times ** 3 / (6.0 * m), b2 * times ** 2 / (2.0 * m),
                        np.full_like(times, sigma), zero,
                        sigma * column ** 2 * b / (2.0 * m), sigma * column * b / m,
                        sigma ** 2 * times, np.full_like(times, sigma ** 2))


def transform_kernel(coeffs, u):
    """
    Returns psi(points, t) for a free solution u(y, tau) given as a callable. The amplitude factor
    sigma^{n/2} is included.

    """
    hbar = coeffs.phys.hbar
    n = coeffs.dimension

    def psi(points, t):
        points = np.asarray(points, dtype=float)
        sample = coeffs.at(t)
        mapped = sample.sigma * points + sample.rho
        gauge = np.exp(-1j / hbar * (sample.A * np.sum(points ** 2, axis=-1) + points @ sample.B + sample.C))
        return sample.sigma ** (0.5 * n) * gauge * u(mapped, sample.tau)

    return psi


def _field_as_function(field):
    """ A free solution given on a grid, evolved exactly to tau and interpolated at the mapped points. """
    def u(points, tau):
        evolved = free_evolve(field, tau - field.time)
        return fourier_interpolate(evolved, points)[0]
    return u


def apply_transform(coeffs, u, grid, t):
    """ The transformed field on a grid at time t. u is a callable u(y, tau) or a free WaveField. """
    if coeffs.dimension != grid.dimension:
        raise ParameterError("Coefficients are %d-dimensional but the grid is %d-dimensional"
                             % (coeffs.dimension, grid.dimension))
    if isinstance(u, WaveField):
        u = _field_as_function(u)
    values = transform_kernel(coeffs, u)(grid.points(), t)
    return WaveField(grid, values, t)


def transformed_residual(coeffs, potential, u, points, t, h=0.02, dt=None):
    """ Relative residual of the potential equation for the transformed free solution at sample points. """
    if isinstance(u, WaveField):
        u = _field_as_function(u)
    return free_equation_residual(transform_kernel(coeffs, u), points, t, coeffs.phys, potential=potential,
                                  h=h, dt=dt)


class GaugeParams(object):
    """ The nonlinear gauge map N(psi) = |psi| exp(i[gamma ln|psi| + Lambda Arg psi]). """
    def __init__(self, gamma, lam):
        if lam == 0 or not np.isfinite(lam) or not np.isfinite(gamma):
            raise ParameterError("Gauge maps need a finite gamma and a finite nonzero Lambda")
        self.gamma = float(gamma)
        self.lam = float(lam)

    @classmethod
    def identity(cls):
        return cls(0.0, 1.0)

    @classmethod
    def from_coefficients(cls, diffusion, diffusion_prime, c2, phys=None):
        """
        Lambda = (1 - (4m/hbar) D' c2 - 4m^2 D^2/hbar^2)^{-1/2} and gamma = -2 m D Lambda / hbar, the map
        taking a linearizable Doebner-Goldin equation to a linear one with mass m Lambda.

        """
        phys = phys or PhysParams()
        m, hbar = phys.mass, phys.hbar
        radicand = 1.0 - 4.0 * m / hbar * diffusion_prime * c2 - 4.0 * m ** 2 * diffusion ** 2 / hbar ** 2
        if radicand <= 0:
            raise ParameterError("(4m/hbar) D' c2 + 4 m^2 D^2/hbar^2 must stay below 1, the radicand is %g"
                                 % radicand)
        lam = radicand ** -0.5
        return cls(-2.0 * m * diffusion * lam / hbar, lam)

    def compose(self, other):
        """ self after other. """
        return GaugeParams(self.gamma + self.lam * other.gamma, self.lam * other.lam)

    def inverse(self):
        return GaugeParams(-self.gamma / self.lam, 1.0 / self.lam)

    def phase(self, modulus_log, phase):
        return self.gamma * modulus_log + self.lam * phase

    @property
    def serialized(self):
        return {'gamma': self.gamma, 'lambda': self.lam}

    def __eq__(self, other):
        return (isinstance(other, GaugeParams) and np.isclose(self.gamma, other.gamma, rtol=1e-12, atol=1e-14)
                and np.isclose(self.lam, other.lam, rtol=1e-12, atol=1e-14))

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash((round(self.gamma, 12), round(self.lam, 12)))

    def __repr__(self):
        return "GaugeParams(gamma=%g, Lambda=%g)" % (self.gamma, self.lam)


def is_linearizable(diffusion, diffusion_prime, c, tolerance=1e-12):
    """ D = D' c1 = -D' c4 and D'(c2 + 2 c5) = D' c3 = 0, for c = (c1, ..., c5). """
    if len(c) != 5:
        raise ParameterError("The Doebner-Goldin family has five coefficients c1..c5")
    c1, c2, c3, c4, c5 = c
    scale = max(1.0, abs(diffusion), abs(diffusion_prime) * max(abs(value) for value in c))

    def vanishes(value):
        return abs(value) <= tolerance * scale

    return (vanishes(diffusion - diffusion_prime * c1) and vanishes(diffusion + diffusion_prime * c4)
            and vanishes(diffusion_prime * (c2 + 2.0 * c5)) and vanishes(diffusion_prime * c3))


def zero_mask(values, fraction=ZERO_AMPLITUDE_FRACTION):
    modulus = np.abs(values)
    peak = np.max(modulus)
    return modulus <= fraction * peak if peak > 0 else np.ones(modulus.shape, dtype=bool)


def _unwrap_from(phase, axis, index):
    """ Unwraps along one axis outward from the slice at index, which keeps its values. """
    forward = np.unwrap(np.take(phase, np.arange(index, phase.shape[axis]), axis=axis), axis=axis)
    backward = np.unwrap(np.take(phase, np.arange(index, -1, -1), axis=axis), axis=axis)
    backward = np.flip(np.take(backward, np.arange(1, index + 1), axis=axis), axis=axis)
    return np.concatenate([backward, forward], axis=axis)


def continuous_phase(values, phase=None, reference=None, reference_phase=None, strict=True):
    """
    A continuous branch of Arg psi. The raw angle is unwrapped axis by axis outward from the reference point
    (the point of largest |psi| by default). With reference_phase given, the branch is the one whose value at
    the reference point lies within pi of it. A precomputed phase is only checked for shape. Without strict,
    phase vortices are logged instead of raised.

    """
    values = np.asarray(values)
    if phase is not None:
        phase = np.asarray(phase, dtype=float)
        if phase.shape != values.shape:
            raise ParameterError("The phase has shape %s but the field has shape %s" % (phase.shape, values.shape))
        return phase
    if reference is None:
        reference = np.unravel_index(np.argmax(np.abs(values)), values.shape)
    unwrapped = np.angle(values)
    for axis in range(values.ndim):
        unwrapped = _unwrap_from(unwrapped, axis, reference[axis])
    mask = zero_mask(values)
    for axis in range(values.ndim):
        jumps = np.abs(np.diff(unwrapped, axis=axis))
        live = ~(np.delete(mask, 0, axis=axis) | np.delete(mask, -1, axis=axis))
        if np.any(jumps[live] >= np.pi):
            message = ("Arg psi has no continuous branch: a neighbour difference of %.3g along axis %d"
                       % (float(np.max(jumps[live])), axis))
            if strict:
                raise PhaseVortexError(message)
            log.debug(message)
            break
    if reference_phase is not None:
        turns = np.round((reference_phase - unwrapped[tuple(reference)]) / (2.0 * np.pi))
        unwrapped = unwrapped + 2.0 * np.pi * turns
    return unwrapped


def _gauge(field, params, phase, direction):
    values = field.values
    mask = zero_mask(values)
    if np.any(mask):
        log.warning("%s: %d grid point(s) with |psi| below %g of the maximum are masked",
                    direction, int(np.sum(mask)), ZERO_AMPLITUDE_FRACTION)
    modulus = np.abs(values)
    modulus_log = np.log(np.where(mask, 1.0, modulus))
    arg = continuous_phase(values, phase)
    mapped = np.where(mask, 0.0, modulus * np.exp(1j * params.phase(modulus_log, arg)))
    return field.replace(mapped[np.newaxis])


def dg_gauge_forward(field, params, phase=None):
    """ N(psi). phase, if given, is the continuous Arg psi to use. """
    return _gauge(field, params, phase, 'N')


def dg_gauge_inverse(field, params, phase=None):
    """ N^{-1}(psi') = |psi'| exp(i[-gamma/Lambda ln|psi'| + Arg psi'/Lambda]). """
    return _gauge(field, params.inverse(), phase, 'N^-1')


def gauge_kernel(kernel, params, log_kernel=None):
    """
    N applied pointwise to kernel(points, t). log_kernel, if given, supplies a continuous logarithm; otherwise
    the principal Arg is used, which is continuous only away from the branch cut.

    """
    def mapped(points, t):
        if log_kernel is not None:
            logarithm = log_kernel(points, t)
            modulus_log, arg = logarithm.real, logarithm.imag
        else:
            values = kernel(points, t)
            modulus_log, arg = np.log(np.abs(values)), np.angle(values)
        return np.exp(modulus_log + 1j * params.phase(modulus_log, arg))
    return mapped


def _check_as_branch(s):
    if s >= 1:
        raise BranchError("Only the s < 1 linearization leads to a Schrodinger equation, got s = %g" % s)
    return np.sqrt(1.0 - s)


def as_linearize(field, s, phase=None):
    """
    psi'(x, t') = |psi(x, t)| exp(-i theta'), theta' = theta/(1-s)^{1/2}, with psi = |psi| exp(-i theta) and
    t' = (1-s)^{1/2} t.

    """
    root = _check_as_branch(s)
    mapped = dg_gauge_forward(field, GaugeParams(0.0, 1.0 / root), phase)
    return mapped.replace(time=root * field.time)


def as_pullback(field, s, phase=None):
    """ The inverse of as_linearize: psi(x, t) = |psi'| exp(i (1-s)^{1/2} Arg psi') with t = t'/(1-s)^{1/2}. """
    root = _check_as_branch(s)
    mapped = dg_gauge_forward(field, GaugeParams(0.0, root), phase)
    return mapped.replace(time=field.time / root)


def as_pullback_kernel(kernel, s, log_kernel=None):
    """ The pullback applied pointwise to a solution kernel(points, t') of the linearized equation. """
    root = _check_as_branch(s)
    mapped = gauge_kernel(kernel, GaugeParams(0.0, root), log_kernel)

    def pulled_back(points, t):
        return mapped(points, root * t)
    return pulled_back


def as_residual(kernel, points, t, s, potential=None, h=0.02, dt=None):
    """
    Relative residual of i psi_t = (-Laplacian + V) psi + s (Laplacian|psi| / |psi|) psi, written with hbar = 1
    and 2m = 1, at sample points.

    """
    _check_as_branch(s)
    points = np.asarray(points, dtype=float)
    dt = 1e-4 * abs(t) if dt is None else dt
    values = kernel(points, t)
    psi_t = time_derivative(lambda time: kernel(points, time), t, dt)
    lap = laplacian_at_points(lambda q: kernel(q, t), points, h)
    modulus_lap = laplacian_at_points(lambda q: np.abs(kernel(q, t)), points, h)
    residual = 1j * psi_t + lap - s * modulus_lap / np.abs(values) * values
    if potential is not None:
        residual = residual - potential(points, t) * values
    return relative_norm(residual, values)
