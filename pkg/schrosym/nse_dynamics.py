"""
Nonlinear Schrodinger dynamics around the invariant free solution g(x, t).

The solver integrates

    i hbar psi_t = -(hbar^2/2m) Laplacian psi + F(psi)

by Strang splitting: an exact spectral half step of the free evolution, a nonlinear step, and a second half
step. The reduced phase equations come from the ansatz psi = phi(t) g(x, t) in the region m|x|^2 << 2 hbar t,
where g has the leading behaviour

    |g|^2 ~ (m/(2 pi hbar t))^{2a} (Gamma(a)/Gamma(n/2))^2,   arg g(0, t) = -pi a/2,   a = n/2 - alpha/4.

"""
import collections
import logging
import numpy as np
from scipy.integrate import solve_ivp
from schrosym import specfun
from schrosym.constants import (BAND_LIMIT_TOLERANCE, BLOW_UP_FACTOR, DEFAULT_REGION_RATIO, DENSITY_EPSILON,
                                DENSITY_FLOOR_FRACTION, LOG_BAND_LIMIT_TOLERANCE)
from schrosym.error import (AliasingError, BlowUpError, BranchError, DomainError, ParameterError, PhaseVortexError,
                            RegionError)
from schrosym.kernels import case1_exponent, dg_effective_mass_kernel, invariant_kernel_case1
from schrosym.misc import time_derivative
from schrosym.spectral import (PhysParams, WaveField, band_limit_fraction, forward_array, free_evolve,
                               free_propagator_symbol, inverse_array)
from schrosym.transforms import GaugeParams, continuous_phase, gauge_kernel, is_linearizable, zero_mask

log = logging.getLogger(__name__)

RjFields = collections.namedtuple('RjFields', ['R1', 'R2', 'R3', 'R4', 'R5', 'mask'])
RJ_NAMES = ('R1', 'R2', 'R3', 'R4', 'R5')
REGION_LIMIT = 0.2


def _spectral_derivatives(values, grid):
    """ The gradient components and the Laplacian of a scalar array. """
    spectrum = forward_array(grid, values[np.newaxis])
    hbar = grid.phys.hbar
    gradient = [inverse_array(grid, 1j * momentum / hbar * spectrum)[0] for momentum in grid.momenta]
    laplacian = inverse_array(grid, -grid.momentum_squared / hbar ** 2 * spectrum)[0]
    return gradient, laplacian


def _rj_arrays(values, grid, epsilon=0.0):
    rho = np.abs(values) ** 2
    rho = rho + epsilon * np.max(rho)
    gradient, laplacian = _spectral_derivatives(values, grid)
    conjugate = np.conj(values)
    current = [np.imag(conjugate * g) for g in gradient]
    rho_gradient = [2.0 * np.real(conjugate * g) for g in gradient]
    divergence = np.imag(conjugate * laplacian)
    rho_laplacian = 2.0 * np.real(conjugate * laplacian) + 2.0 * sum(np.abs(g) ** 2 for g in gradient)
    with np.errstate(divide='ignore', invalid='ignore'):
        r1 = divergence / rho
        r2 = rho_laplacian / rho
        r3 = sum(j ** 2 for j in current) / rho ** 2
        r4 = sum(j * d for j, d in zip(current, rho_gradient)) / rho ** 2
        r5 = sum(d ** 2 for d in rho_gradient) / rho ** 2
    return r1, r2, r3, r4, r5


def compute_rj(field):
    """
    R1 = div j/rho, R2 = Laplacian rho/rho, R3 = j^2/rho^2, R4 = j.grad rho/rho^2, R5 = (grad rho)^2/rho^2 with
    rho = |psi|^2 and j = Im(conj(psi) grad psi), all derivatives spectral. Points where |psi| vanishes are
    masked and set to zero.

    """
    values = field.values
    mask = zero_mask(values)
    fields = [np.where(mask, 0.0, r) for r in _rj_arrays(values, field.grid)]
    return RjFields(*(fields + [mask]))


def kernel_rj(x, t, alpha, phys=None):
    """
    The five functionals of the Case I kernel at sample points, exact through the derivative relation
    d/dz 1F1(a; b; iz) = i (a/b) 1F1(a+1; b+1; iz) with z = m|x|^2/(2 hbar t).

    """
    phys = phys or PhysParams()
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    a = case1_exponent(n, alpha)
    b = 0.5 * n
    m, hbar = phys.mass, phys.hbar
    u = m / (hbar * t)
    z = 0.5 * u * np.sum(x ** 2, axis=-1)
    f = specfun.kummer_1f1(a, b, 1j * z)
    df = 1j * a / b * specfun.kummer_1f1(a + 1.0, b + 1.0, 1j * z)
    d2f = -a * (a + 1.0) / (b * (b + 1.0)) * specfun.kummer_1f1(a + 2.0, b + 2.0, 1j * z)
    norm = np.abs(f) ** 2
    grad_z2 = 2.0 * u * z
    current = np.imag(np.conj(f) * df)
    density_rate = 2.0 * np.real(np.conj(f) * df)
    r1 = (np.imag(np.conj(f) * d2f) * grad_z2 + current * n * u) / norm
    r2 = ((2.0 * np.real(np.conj(f) * d2f) + 2.0 * np.abs(df) ** 2) * grad_z2 + density_rate * n * u) / norm
    r3 = current ** 2 / norm ** 2 * grad_z2
    r4 = current * density_rate / norm ** 2 * grad_z2
    r5 = density_rate ** 2 / norm ** 2 * grad_z2
    return r1, r2, r3, r4, r5


def region_ratio(x, t, phys=None):
    """ m|x|^2/(2 hbar t). """
    phys = phys or PhysParams()
    x = np.asarray(x, dtype=float)
    return phys.mass * np.sum(x ** 2, axis=-1) / (2.0 * phys.hbar * t)


def rj_asymptotics(n, alpha, x, t, phys=None, corrected=True):
    """
    Leading terms of R1..R5 of g for r = m|x|^2/(2 hbar t) < 0.2, with q = 1 - alpha/2n:

        R1 = q mn/(hbar t),  R2 = -q (2 alpha/n)(m/hbar t) r,  R3 = q^2 (2m/hbar t) r,
        R4 = -q^2 (2 alpha/(n(n+2))) (2m/hbar t) r^2,  R5 = 4 q^2 alpha^2/(n^2 (n+2)^2) (2m/hbar t) r^3.

    R5 is the square of d rho/dz = -2 q alpha z/(n(n+2)), hence the factor 4. corrected=False drops it.

    """
    phys = phys or PhysParams()
    case1_exponent(n, alpha)
    r = region_ratio(x, t, phys)
    if np.any(r >= REGION_LIMIT):
        raise RegionError("The expansions need m|x|^2/(2 hbar t) < %g, got %g" % (REGION_LIMIT, float(np.max(r))))
    m, hbar = phys.mass, phys.hbar
    q = 1.0 - alpha / (2.0 * n)
    rate = 2.0 * m / (hbar * t)
    r1 = q * m * n / (hbar * t) * np.ones_like(r)
    r2 = -q * 2.0 * alpha / n * m / (hbar * t) * r
    r3 = q ** 2 * rate * r
    r4 = -q ** 2 * 2.0 * alpha / (n * (n + 2.0)) * rate * r ** 2
    r5 = q ** 2 * alpha ** 2 / (n ** 2 * (n + 2.0) ** 2) * rate * r ** 3
    if corrected:
        r5 = 4.0 * r5
    return r1, r2, r3, r4, r5


def _gamma_ratio(n, alpha):
    a = case1_exponent(n, alpha)
    return float(np.real(specfun.gamma(a) / specfun.gamma(0.5 * n)))


def density_asymptotic(n, alpha, t, phys=None):
    """ |g|^2 ~ (m/(2 pi hbar t))^{n - alpha/2} (Gamma(n/2 - alpha/4)/Gamma(n/2))^2. """
    phys = phys or PhysParams()
    a = case1_exponent(n, alpha)
    return (phys.mass / (2.0 * np.pi * phys.hbar * t)) ** (2.0 * a) * _gamma_ratio(n, alpha) ** 2


def phase_ratio_asymptotic(n, alpha):
    """ g/conj(g) ~ exp(-i pi a) on the principal branch of the prefactor. """
    return np.exp(-1j * np.pi * case1_exponent(n, alpha))


def _check_time(t):
    if np.any(np.asarray(t) <= 0):
        raise DomainError("Reduced phase solutions are written for t > 0")


def _power_phase(t, n, alpha, k, lam, beta, phys):
    # h with h' = (lam/hbar) (beta Gamma ratio)^{2k} (m/(2 pi hbar t))^{2ak}
    a = case1_exponent(n, alpha)
    m, hbar = phys.mass, phys.hbar
    scale = lam / hbar * (beta * _gamma_ratio(n, alpha)) ** (2.0 * k) * (m / (2.0 * np.pi * hbar)) ** (2.0 * a * k)
    exponent = 1.0 - 2.0 * a * k
    t = np.asarray(t, dtype=float)
    if abs(exponent) < 1e-12:
        return scale * np.log(t)
    return scale * t ** exponent / exponent


def power_phase_rate(t, n, alpha, k, lam, beta, phys=None):
    """ h'(t) for phi = beta exp(-i h). """
    phys = phys or PhysParams()
    _check_time(t)
    return lam / phys.hbar * beta ** (2.0 * k) * density_asymptotic(n, alpha, t, phys) ** k


def power_phase_solution(t, n, alpha, k, lam, beta, omega_bar=0.0, phys=None):
    """
    beta exp(-i h(t)) with h the exact antiderivative of the reduced rate plus omega_bar. For k = 1/(n - alpha/2)
    the antiderivative is logarithmic.

    """
    phys = phys or PhysParams()
    _check_time(t)
    if k <= 0:
        raise ParameterError("Power nonlinearities need k > 0, got %r" % k)
    if np.imag(lam) != 0:
        raise ParameterError("The reduced phase solution needs a real coupling, got %r" % lam)
    h = _power_phase(t, n, alpha, k, float(np.real(lam)), beta, phys) + omega_bar
    return beta * np.exp(-1j * h)


def polynomial_phase_solution(t, n, alpha, coefficients, beta, omega_bar=0.0, phys=None):
    """ F = -a0 psi - a1 |psi|^2 psi - a2 |psi|^4 psi: the phases of the three power terms add. """
    phys = phys or PhysParams()
    _check_time(t)
    h = omega_bar + sum(_power_phase(t, n, alpha, k, -coefficient, beta, phys)
                        for k, coefficient in enumerate(coefficients))
    return beta * np.exp(-1j * h)


def dg_phase_rate(t, n, alpha, diffusion_prime, c1, phys=None):
    """ phi'/phi with only R1 kept: -i D' c1 (1 - alpha/2n)(mn/hbar)/t. """
    phys = phys or PhysParams()
    _check_time(t)
    q = 1.0 - alpha / (2.0 * n)
    return -1j * diffusion_prime * c1 * q * phys.mass * n / phys.hbar / np.asarray(t, dtype=float)


def dg_phase_solution(t, n, alpha, diffusion_prime, c1, kappa=1.0, phys=None):
    """ kappa exp(-i D' c1 (1 - alpha/2n)(mn/hbar) ln t). """
    phys = phys or PhysParams()
    _check_time(t)
    case1_exponent(n, alpha)
    q = 1.0 - alpha / (2.0 * n)
    return kappa * np.exp(-1j * diffusion_prime * c1 * q * phys.mass * n / phys.hbar * np.log(t))


def dg_consistency_constants(n, alpha, lam, diffusion, phys=None):
    """
    (beta, delta) with kappa = beta exp(-i delta) the constant that makes the gauge image of the effective-mass
    kernel agree with the reduced solution: beta = Lambda^{n/2 - alpha/4} and

        delta = n (1 - alpha/2n) [pi/4 (1/Lambda - 1) - (mD/hbar) ln(m Lambda/(2 pi hbar))]
                - (2mD/hbar) ln(Gamma(n/2 - alpha/4)/Gamma(n/2)).

    """
    phys = phys or PhysParams()
    if lam <= 0:
        raise ParameterError("Lambda must be positive, got %r" % lam)
    a = case1_exponent(n, alpha)
    m, hbar = phys.mass, phys.hbar
    beta = lam ** a
    delta = (n * (1.0 - alpha / (2.0 * n)) * (0.25 * np.pi * (1.0 / lam - 1.0)
                                              - m * diffusion / hbar * np.log(m * lam / (2.0 * np.pi * hbar)))
             - 2.0 * m * diffusion / hbar * np.log(abs(_gamma_ratio(n, alpha))))
    return beta, delta


def log_branch_term(n, alpha):
    """ arg g(0, t) = -pi a/2 reduced to (-pi, pi]. """
    return float(np.angle(np.exp(-0.5j * np.pi * case1_exponent(n, alpha))))


def branch_term_vanishes(n, alpha):
    """ Whether n/2 - alpha/4 is an even integer. """
    a = case1_exponent(n, alpha)
    return bool(abs(a - round(a)) < 1e-12 and int(round(a)) % 2 == 0)


def _log_constant(n, alpha, beta, phys):
    # ln(beta^2 (m/(2 pi hbar))^{n - alpha/2} Gamma ratio^2)
    a = case1_exponent(n, alpha)
    return (np.log(beta ** 2) + 2.0 * a * np.log(phys.mass / (2.0 * np.pi * phys.hbar))
            + 2.0 * np.log(abs(_gamma_ratio(n, alpha))))


def log_phase_rate(delta, t, n, alpha, xi1, xi2, beta, phys=None, branch=None):
    """
    delta'(t) = -(xi1/hbar) ln(beta^2 |g(0, t)|^2) + (xi2/hbar)(delta + arg g(0, t)) for phi = beta exp(i delta).

    """
    phys = phys or PhysParams()
    _check_time(t)
    branch = log_branch_term(n, alpha) if branch is None else branch
    hbar = phys.hbar
    logarithm = np.log(beta ** 2 * density_asymptotic(n, alpha, t, phys))
    return -xi1 / hbar * logarithm + xi2 / hbar * (delta + branch)


def log_phase_delta(t, n, alpha, xi1, xi2, beta, zeta=0.0, phys=None, branch=None):
    """
    Closed-form delta(t).

    xi2 = 0:  delta = -(xi1 t/hbar) [L + 2a] + (xi1/hbar) 2a t ln t + zeta
    xi2 != 0: delta = (xi1/xi2) L - (2a xi1/xi2)(ln t + e^{s} E1(s)) - arg g(0, t) + zeta e^{s},  s = xi2 t/hbar

    with L = ln(beta^2 (m/(2 pi hbar))^{2a} Gamma ratio^2). zeta multiplies the homogeneous solution in the
    second case.

    """
    phys = phys or PhysParams()
    _check_time(t)
    t = np.asarray(t, dtype=float)
    a = case1_exponent(n, alpha)
    hbar = phys.hbar
    constant = _log_constant(n, alpha, beta, phys)
    if xi2 == 0:
        return -xi1 * t / hbar * (constant + 2.0 * a) + xi1 / hbar * 2.0 * a * t * np.log(t) + zeta
    branch = log_branch_term(n, alpha) if branch is None else branch
    s = xi2 * t / hbar
    return (xi1 / xi2 * constant - 2.0 * a * xi1 / xi2 * (np.log(t) + specfun.exp_scaled_e1(s)) - branch
            + zeta * np.exp(s))


def log_phase_solution(t, n, alpha, xi1, xi2, beta, zeta=0.0, phys=None, branch=None):
    """ beta exp(i delta(t)). """
    return beta * np.exp(1j * log_phase_delta(t, n, alpha, xi1, xi2, beta, zeta, phys, branch))


class NonlinearitySpec(object):
    """ The nonlinear term F(psi) and its exact (or Runge-Kutta) substep. """
    name = None
    # energy fraction beyond 2/3 Nyquist the solver accepts during a run
    band_limit_tolerance = BAND_LIMIT_TOLERANCE

    @property
    def is_trivial(self):
        return False

    def validate(self, grid):
        pass

    def initial_state(self, values, grid):
        return {}

    def step(self, values, dt, grid, t, state):
        raise NotImplementedError

    @property
    def parameters(self):
        return {}

    @property
    def serialized(self):
        data = {'type': self.name}
        data.update(self.parameters)
        return data

    def __repr__(self):
        return "%s(%s)" % (self.__class__.__name__, ", ".join("%s=%r" % item for item in
                                                               sorted(self.parameters.items())))


def _serialize_complex(value):
    value = complex(value)
    return value.real if value.imag == 0 else [value.real, value.imag]


class Power(NonlinearitySpec):
    """ F = lambda |psi|^{2k} psi with complex lambda and k > 0. """
    name = 'power'

    def __init__(self, lam, k):
        if not k > 0:
            raise ParameterError("Power nonlinearities need k > 0, got %r" % k)
        self.lam = complex(lam)
        self.k = float(k)

    @property
    def is_trivial(self):
        return self.lam == 0

    def step(self, values, dt, grid, t, state):
        # rho' = mu rho^{k+1} and theta' = -(Re lambda/hbar) rho^k, both solved exactly
        hbar = grid.phys.hbar
        rho = np.abs(values) ** 2
        mu = 2.0 * self.lam.imag / hbar
        base = rho ** self.k
        u = self.k * mu * base * dt
        if np.any(u >= 1.0):
            raise BlowUpError("The nonlinear substep blows up within dt = %g" % dt)
        safe = np.where(np.abs(u) > 1e-12, u, 0.5)
        ratio = np.where(np.abs(u) > 1e-12, -np.log1p(-safe) / safe, 1.0 + 0.5 * u)
        integral = base * dt * ratio
        growth = np.exp(-np.log1p(-u) / (2.0 * self.k))
        return values * growth * np.exp(-1j * self.lam.real / hbar * integral)

    @property
    def parameters(self):
        return {'lambda': _serialize_complex(self.lam), 'k': self.k}


class Polynomial(NonlinearitySpec):
    """ F = -a0 psi - a1 |psi|^2 psi - a2 |psi|^4 psi with a2 != 0. """
    name = 'polynomial'

    def __init__(self, a0, a1, a2):
        if a2 == 0:
            raise ParameterError("The quintic coefficient a2 must be nonzero")
        self.coefficients = (float(a0), float(a1), float(a2))

    def step(self, values, dt, grid, t, state):
        rho = np.abs(values) ** 2
        a0, a1, a2 = self.coefficients
        return values * np.exp(1j / grid.phys.hbar * (a0 + a1 * rho + a2 * rho ** 2) * dt)

    @property
    def parameters(self):
        a0, a1, a2 = self.coefficients
        return {'a0': a0, 'a1': a1, 'a2': a2}


class DoebnerGoldin(NonlinearitySpec):
    """
    F = V psi + (i hbar D/2) R2 psi + hbar D' sum_j c_j R_j psi. The substep is a classical Runge-Kutta step with
    spectral derivatives and the density regularized as rho + epsilon max(rho).

    """
    name = 'doebner-goldin'

    def __init__(self, diffusion, diffusion_prime, c, potential=None, epsilon=DENSITY_EPSILON):
        c = tuple(float(value) for value in c)
        if len(c) != 5:
            raise ParameterError("The Doebner-Goldin family has five coefficients c1..c5")
        self.diffusion = float(diffusion)
        self.diffusion_prime = float(diffusion_prime)
        self.c = c
        self.potential = potential
        self.epsilon = epsilon

    @property
    def is_trivial(self):
        return self.potential is None and self.diffusion == 0 and (self.diffusion_prime == 0 or not any(self.c))

    @property
    def linearizable(self):
        return is_linearizable(self.diffusion, self.diffusion_prime, self.c)

    def gauge(self, phys=None):
        """ The gauge map that takes this equation to a linear one with mass m Lambda. """
        if not self.linearizable:
            raise ParameterError("%r does not satisfy the linearizability relations" % self)
        return GaugeParams.from_coefficients(self.diffusion, self.diffusion_prime, self.c[1], phys)

    def rate(self, values, grid, t, epsilon=None):
        """ psi_t from the nonlinear terms alone. """
        epsilon = self.epsilon if epsilon is None else epsilon
        hbar = grid.phys.hbar
        rj = _rj_arrays(values, grid, epsilon)
        total = self.diffusion_prime * sum(c * r for c, r in zip(self.c, rj))
        rate = 0.5 * self.diffusion * rj[1] * values - 1j * total * values
        if self.potential is not None:
            rate = rate - 1j / hbar * self.potential(grid.points(), t) * values
        return rate

    def step(self, values, dt, grid, t, state):
        k1 = self.rate(values, grid, t - 0.5 * dt)
        k2 = self.rate(values + 0.5 * dt * k1, grid, t)
        k3 = self.rate(values + 0.5 * dt * k2, grid, t)
        k4 = self.rate(values + dt * k3, grid, t + 0.5 * dt)
        return values + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    @property
    def parameters(self):
        return {'D': self.diffusion, 'D_prime': self.diffusion_prime, 'c': list(self.c)}


class Logarithmic(NonlinearitySpec):
    """
    F = xi1 ln(|psi|^2) psi - xi2 Arg(psi) psi. The substep keeps |psi| and solves
    theta' = (xi2/hbar) theta - (xi1/hbar) ln rho exactly, with Arg psi followed continuously in space and time.

    """
    name = 'logarithmic'
    band_limit_tolerance = LOG_BAND_LIMIT_TOLERANCE

    def __init__(self, xi1, xi2, epsilon=DENSITY_EPSILON):
        self.xi1 = float(xi1)
        self.xi2 = float(xi2)
        self.epsilon = epsilon

    @property
    def is_trivial(self):
        return self.xi1 == 0 and self.xi2 == 0

    def initial_state(self, values, grid):
        reference = np.unravel_index(np.argmax(np.abs(values)), values.shape)
        return {'reference': reference, 'phase': float(np.angle(values[reference])), 'vortex': False}

    def step(self, values, dt, grid, t, state):
        hbar = grid.phys.hbar
        rho = np.abs(values) ** 2
        log_rho = np.log(rho + self.epsilon * np.max(rho))
        if self.xi2 == 0:
            return values * np.exp(-1j * self.xi1 / hbar * log_rho * dt)
        try:
            theta = continuous_phase(values, reference=state['reference'], reference_phase=state['phase'])
        except PhaseVortexError as e:
            if not state['vortex']:
                log.warning("t = %g: %s; Arg psi follows the unwrapped branch from here on", t, e)
                state['vortex'] = True
            theta = continuous_phase(values, reference=state['reference'], reference_phase=state['phase'],
                                     strict=False)
        rate = self.xi2 / hbar
        theta = np.exp(rate * dt) * theta - self.xi1 / hbar * log_rho * np.expm1(rate * dt) / rate
        state['phase'] = float(theta[state['reference']])
        return np.sqrt(rho) * np.exp(1j * theta)

    @property
    def parameters(self):
        return {'xi1': self.xi1, 'xi2': self.xi2}


class AubersonSabatier(NonlinearitySpec):
    """
    F = V psi + s (Laplacian|psi| / |psi|) psi in units hbar = 1, 2m = 1. |psi| is constant during the substep,
    which is therefore a phase rotation.

    """
    name = 'auberson-sabatier'

    def __init__(self, s, potential=None, epsilon=DENSITY_EPSILON):
        if s >= 1:
            raise BranchError("Only s < 1 is supported, got s = %g" % s)
        self.s = float(s)
        self.potential = potential
        self.epsilon = epsilon

    @property
    def is_trivial(self):
        return self.s == 0 and self.potential is None

    def validate(self, grid):
        if grid.phys != PhysParams(0.5, 1.0):
            raise ParameterError("The Auberson-Sabatier equation is written with hbar = 1 and m = 1/2")

    def step(self, values, dt, grid, t, state):
        rho = np.abs(values) ** 2
        modulus = np.sqrt(rho + self.epsilon * np.max(rho))
        _, laplacian = _spectral_derivatives(modulus.astype(complex), grid)
        energy = self.s * np.real(laplacian) / modulus
        if self.potential is not None:
            energy = energy + self.potential(grid.points(), t)
        return values * np.exp(-1j * energy * dt)

    @property
    def parameters(self):
        return {'s': self.s}


NONLINEARITIES = {'power': Power, 'polynomial': Polynomial, 'doebner-goldin': DoebnerGoldin,
                  'logarithmic': Logarithmic, 'auberson-sabatier': AubersonSabatier}


def nonlinearity_from_config(data):
    kind = data.get('type')
    try:
        if kind == 'power':
            lam = data.get('lambda', 1.0)
            if isinstance(lam, (list, tuple)):
                lam = complex(lam[0], lam[1])
            return Power(lam, float(data.get('k', 1.0)))
        if kind == 'polynomial':
            return Polynomial(float(data.get('a0', 0.0)), float(data.get('a1', 0.0)), float(data['a2']))
        if kind == 'doebner-goldin':
            return DoebnerGoldin(float(data.get('D', 0.0)), float(data.get('D_prime', 0.0)),
                                 data.get('c', [0.0] * 5))
        if kind == 'logarithmic':
            return Logarithmic(float(data.get('xi1', 0.0)), float(data.get('xi2', 0.0)))
        if kind == 'auberson-sabatier':
            return AubersonSabatier(float(data['s']))
    except KeyError as e:
        raise ParameterError("The %s nonlinearity needs the parameter %s" % (kind, e))
    raise ParameterError("Unknown nonlinearity type: %r" % kind)


class TimeSeries(object):
    """ (t, norm, max |psi|) rows recorded during a run. """
    def __init__(self):
        self.rows = []

    def record(self, field):
        values = field.amplitudes
        self.rows.append((float(field.time), field.norm(), float(np.max(np.abs(values)))))

    @property
    def times(self):
        return np.array([row[0] for row in self.rows])

    @property
    def norms(self):
        return np.array([row[1] for row in self.rows])

    @property
    def peaks(self):
        return np.array([row[2] for row in self.rows])


def _check_aliasing(field, context, tolerance=BAND_LIMIT_TOLERANCE):
    fraction = band_limit_fraction(field)
    if fraction > tolerance:
        raise AliasingError("%s: %.3g of the spectral energy lies beyond 2/3 Nyquist" % (context, fraction))


def split_step_evolve(field, nl, dt, steps, series=None, record_every=1, check_every=None):
    """
    Strang splitting over steps steps of size dt. Zero coupling reduces to the exact free propagator. Raises
    BlowUpError when the peak amplitude grows by more than BLOW_UP_FACTOR and AliasingError when more than
    nl.band_limit_tolerance of the spectral energy leaves the 2/3 Nyquist band.

    """
    grid = field.grid
    phys = grid.phys
    if dt <= 0 or steps < 0:
        raise ParameterError("Need dt > 0 and a nonnegative step count")
    phase_per_step = dt * float(np.max(grid.momentum_squared)) / (2.0 * phys.mass * phys.hbar)
    if phase_per_step >= np.pi:
        raise ParameterError("dt = %g is too large for this grid: the free step rotates the highest mode by %.3g"
                             % (dt, phase_per_step))
    nl.validate(grid)
    _check_aliasing(field, 'initial data')
    check_every = max(1, steps // 10) if check_every is None else check_every
    values = field.values
    peak = float(np.max(np.abs(values)))
    t = field.time
    state = nl.initial_state(values, grid)
    trivial = nl.is_trivial
    full = free_propagator_symbol(grid, dt)
    half = free_propagator_symbol(grid, 0.5 * dt)

    def linear(array, symbol):
        return inverse_array(grid, symbol * forward_array(grid, array[np.newaxis]))[0]

    if series is not None:
        series.record(field)
    for step in range(1, steps + 1):
        if trivial:
            values = linear(values, full)
        else:
            values = linear(values, half)
            values = nl.step(values, dt, grid, t + 0.5 * dt, state)
            values = linear(values, half)
        t = field.time + step * dt
        current = float(np.max(np.abs(values)))
        if not np.isfinite(current) or current > BLOW_UP_FACTOR * peak:
            raise BlowUpError("The peak amplitude grew from %.3g to %.3g by t = %g" % (peak, current, t))
        if step % check_every == 0 or step == steps:
            evolved = WaveField(grid, values, t)
            _check_aliasing(evolved, 't = %g' % t, nl.band_limit_tolerance)
            if series is not None and step % record_every == 0:
                series.record(evolved)
        elif series is not None and step % record_every == 0:
            series.record(WaveField(grid, values, t))
    return WaveField(grid, values, t)


def dg_residual(solution, t, nl, dt=1e-3):
    """
    Relative L2 residual of the Doebner-Goldin equation for a solution given as a function of time returning
    WaveFields. psi_t is a fourth-order difference across snapshots; points where rho falls below
    DENSITY_FLOOR_FRACTION of its maximum are left out.

    """
    field = solution(t)
    grid = field.grid
    phys = grid.phys
    values = field.values
    derivative = time_derivative(lambda s: solution(s).values, t, dt)
    _, laplacian = _spectral_derivatives(values, grid)
    kinetic = -phys.hbar ** 2 / (2.0 * phys.mass) * laplacian
    nonlinear = 1j * phys.hbar * nl.rate(values, grid, t, epsilon=0.0)
    left = 1j * phys.hbar * derivative
    rho = np.abs(values) ** 2
    live = rho >= DENSITY_FLOOR_FRACTION * np.max(rho)
    residual = (left - kinetic - nonlinear)[live]
    scale = max(np.linalg.norm(left[live]), np.linalg.norm(kinetic[live]))
    return float(np.linalg.norm(residual) / scale) if scale > 0 else float(np.linalg.norm(residual))


class ReducedPhaseState(object):
    """
    The ODE solution phi(t) of the reduced equation, with its integration constant fixed by phi(t0) = beta.
    kind names the nonlinearity family; constants holds omega_bar, zeta or the branch term as they apply.

    """
    def __init__(self, kind, beta, function, constants=None):
        self.kind = kind
        self.beta = beta
        self._function = function
        self.constants = constants or {}

    def __call__(self, t):
        return self._function(t)

    def modulus(self, t):
        return np.abs(self._function(t))


def reduced_phase(nl, n, alpha, beta, t0, phys=None):
    """ The reduced phase solution for a nonlinearity with phi(t0) = beta. """
    phys = phys or PhysParams()
    if nl.is_trivial:
        return ReducedPhaseState('free', beta, lambda t: beta * np.ones_like(np.asarray(t, dtype=float)) + 0j)
    if isinstance(nl, Power):
        omega_bar = -float(_power_phase(t0, n, alpha, nl.k, nl.lam.real, beta, phys))
        return ReducedPhaseState('power', beta,
                                 lambda t: power_phase_solution(t, n, alpha, nl.k, nl.lam, beta, omega_bar, phys),
                                 {'omega_bar': omega_bar})
    if isinstance(nl, Polynomial):
        terms = [-a for a in nl.coefficients]
        omega_bar = -float(sum(_power_phase(t0, n, alpha, k, lam, beta, phys) for k, lam in enumerate(terms)))
        return ReducedPhaseState('polynomial', beta,
                                 lambda t: polynomial_phase_solution(t, n, alpha, nl.coefficients, beta,
                                                                     omega_bar, phys),
                                 {'omega_bar': omega_bar})
    if isinstance(nl, Logarithmic):
        delta0 = float(log_phase_delta(t0, n, alpha, nl.xi1, nl.xi2, beta, 0.0, phys))
        zeta = -delta0 if nl.xi2 == 0 else -delta0 * np.exp(-nl.xi2 * t0 / phys.hbar)
        return ReducedPhaseState('logarithmic', beta,
                                 lambda t: log_phase_solution(t, n, alpha, nl.xi1, nl.xi2, beta, zeta, phys),
                                 {'zeta': zeta, 'branch': log_branch_term(n, alpha),
                                  'branch_term_vanishes': branch_term_vanishes(n, alpha)})
    if isinstance(nl, DoebnerGoldin):
        return ReducedPhaseState('doebner-goldin', beta,
                                 lambda t: beta * dg_phase_solution(t, n, alpha, nl.diffusion_prime, nl.c[0],
                                                                    phys=phys) / dg_phase_solution(
                                     t0, n, alpha, nl.diffusion_prime, nl.c[0], phys=phys))
    raise ParameterError("No reduced phase equation for %r" % nl)


class AsymptoticRegion(object):
    """ The grid points with m|x|^2/(2 hbar t) <= r_max at time t. """
    def __init__(self, grid, t, r_max=DEFAULT_REGION_RATIO):
        if not 0 < r_max < 1:
            raise RegionError("The region ratio must lie in (0, 1), got %r" % r_max)
        self.t = t
        self.r_max = r_max
        ratios = region_ratio(grid.points(), t, grid.phys)
        self.mask = ratios <= r_max
        if not np.any(self.mask):
            raise RegionError("No grid point satisfies m|x|^2/(2 hbar t) <= %g at t = %g" % (r_max, t))
        self.ratio = float(np.max(ratios[self.mask]))
        self.points = grid.points()[self.mask]

    @property
    def size(self):
        return int(np.sum(self.mask))


def _mismatch(actual, expected):
    modulus = float(np.max(np.abs(np.abs(actual) - np.abs(expected))) / np.max(np.abs(expected)))
    phase = float(np.max(np.abs(np.angle(actual * np.conj(expected)))))
    return modulus, phase


def _checkpoint_times(t0, T, checkpoints):
    if checkpoints is None:
        checkpoints = np.linspace(t0, T, 7)[1:]
    checkpoints = np.asarray(sorted(checkpoints), dtype=float)
    if checkpoints[0] <= t0 or checkpoints[-1] > T + 1e-12:
        raise ParameterError("Checkpoints must lie in (t0, T]")
    return checkpoints


def _origin_amplitude(field):
    """ psi(0, t) under free evolution of field, from the momentum quadrature (2 pi hbar)^{-n/2} sum psi^(p) dp. """
    grid = field.grid
    phys = grid.phys
    spectrum = forward_array(grid, field.values[np.newaxis])[0].ravel()
    weight = (2.0 * np.pi * phys.hbar) ** (-0.5 * grid.dimension) * grid.momentum_cell_volume
    energies = grid.momentum_squared.ravel() / (2.0 * phys.mass * phys.hbar)

    def amplitude(t):
        return weight * np.sum(spectrum * np.exp(-1j * energies * (t - field.time)))
    return amplitude


def carried_phase(nl, beta, free, times):
    """
    phi at the given times from the reduced equation driven by the density and phase the grid carries at the
    origin, |free(0, t)|^2 and arg free(0, t), in place of the leading behaviour of g. phi(free.time) = beta.

    The closed-form solutions differ from this only through the deviation of the windowed free data from g.

    """
    times = np.asarray(times, dtype=float)
    if nl.is_trivial:
        return beta * np.ones(times.shape) + 0j
    t0 = free.time
    hbar = free.grid.phys.hbar
    amplitude = _origin_amplitude(free)
    if isinstance(nl, (Power, Polynomial)):
        if isinstance(nl, Power):
            couplings = [(nl.k, nl.lam)]
        else:
            couplings = [(k, -a) for k, a in enumerate(nl.coefficients)]

        def rate(t, y):
            phi = y[0] + 1j * y[1]
            weight = abs(phi) ** 2 * abs(amplitude(t)) ** 2
            derivative = -1j / hbar * sum(lam * weight ** k for k, lam in couplings) * phi
            return [derivative.real, derivative.imag]

        solution = solve_ivp(rate, (t0, times[-1]), [beta, 0.0], t_eval=times, method='DOP853', rtol=1e-11,
                             atol=1e-12 * beta)
        return solution.y[0] + 1j * solution.y[1]
    if isinstance(nl, Logarithmic):
        start = amplitude(t0)
        # the branch Logarithmic.step follows: unwrapped outward from the largest |psi|
        reference = np.unravel_index(np.argmax(np.abs(free.values)), free.values.shape)
        origin = (free.grid.points_per_axis // 2,) * free.grid.dimension
        start_phase = float(continuous_phase(free.values, reference=reference, strict=False)[origin])

        def rate(t, y):
            value = amplitude(t)
            arg = start_phase + float(np.angle(value * np.conj(start)))
            return [-nl.xi1 / hbar * np.log(beta ** 2 * abs(value) ** 2) + nl.xi2 / hbar * (y[0] + arg)]

        solution = solve_ivp(rate, (t0, times[-1]), [0.0], t_eval=times, method='DOP853', rtol=1e-11, atol=1e-12)
        return beta * np.exp(1j * solution.y[0])
    raise ParameterError("No reduced phase equation for %r" % nl)


def asymptotic_compare(nl, n, alpha, t0, T, grid, beta=1.0, r_max=DEFAULT_REGION_RATIO, dt=0.025,
                       checkpoints=None, window=(0.2, 0.15)):
    """
    Evolves beta g(x, t0) W(x) with the split-step solver and compares it on the region m|x|^2/(2 hbar t) <= r_max
    with phi(t) g_free, where g_free is the free evolution of the same windowed data and phi solves the reduced
    equation driven by what the grid carries at the origin (carried_phase). Doebner-Goldin equations are compared
    through their executed gauge chain instead, with kappa fitted.

    Returns a dict with one row per checkpoint:

    - t, r
    - modulus_mismatch, phase_mismatch: psi against phi(t) g_free
    - phase_drift: the phase mismatch accrued since the previous checkpoint, psi against the free evolution of
      the previous psi times phi(t)/phi(t_prev)
    - closed_form_phase: |arg| of the closed-form phi over the carried one
    - free_deviation: g_free against the closed form g

    Under a logarithmic nonlinearity a steep window edge is pushed outward, wraps around the periodic box and
    crosses the region, so the default window tapers slowly.

    """
    if grid.dimension != n:
        raise ParameterError("The grid is %d-dimensional, asked for n = %d" % (grid.dimension, n))
    if not 0 < t0 < T:
        raise ParameterError("Need 0 < t0 < T")
    checkpoints = _checkpoint_times(t0, T, checkpoints)
    if isinstance(nl, DoebnerGoldin):
        return _dg_compare(nl, n, alpha, grid, checkpoints, r_max)
    phys = grid.phys
    points = grid.points()
    taper = grid.window(*window)
    closed0 = invariant_kernel_case1(points, t0, alpha, phys)
    free0 = WaveField(grid, closed0 * taper, t0)
    field = free0 * beta
    reduced = reduced_phase(nl, n, alpha, beta, t0, phys)
    carried = carried_phase(nl, beta, free0, checkpoints)
    rows = []
    previous, previous_phi = field, beta
    for checkpoint, phi in zip(checkpoints, carried):
        steps = int(round((checkpoint - field.time) / dt))
        field = split_step_evolve(field, nl, (checkpoint - field.time) / steps, steps)
        t = checkpoint
        region = AsymptoticRegion(grid, t, r_max)
        actual = field.values[region.mask]
        free = free_evolve(free0, t - t0).values[region.mask]
        modulus, phase = _mismatch(actual, phi * free)
        drifted = free_evolve(previous, t - previous.time).values[region.mask] * (phi / previous_phi)
        _, drift = _mismatch(actual, drifted)
        closed_form = abs(float(np.angle(reduced(t) * np.conj(phi))))
        closed = invariant_kernel_case1(region.points, t, alpha, phys)
        free_deviation = float(np.max(np.abs(free - closed)) / np.max(np.abs(closed)))
        rows.append({'t': float(t), 'r': region.ratio, 'modulus_mismatch': modulus, 'phase_mismatch': phase,
                     'phase_drift': drift, 'closed_form_phase': closed_form, 'free_deviation': free_deviation})
        log.info("t = %g: r = %.3g, modulus mismatch %.3g, phase mismatch %.3g, drift %.3g", t, region.ratio,
                 modulus, phase, drift)
        previous, previous_phi = field, phi
    return {'nonlinearity': nl.serialized, 'n': n, 'alpha': alpha, 'beta': beta, 't0': t0, 'T': T,
            'r_max': r_max, 'rows': rows, 'constants': reduced.constants}


def _dg_compare(nl, n, alpha, grid, checkpoints, r_max):
    """ psi = N^{-1}(effective-mass kernel) against kappa phi(t) g(x, t), kappa fitted by least squares. """
    if nl.potential is not None:
        raise ParameterError("The gauge chain comparison needs V = 0")
    phys = grid.phys
    params = nl.gauge(phys)
    a = case1_exponent(n, alpha)
    lam = params.lam

    def kernel(points, t):
        return dg_effective_mass_kernel(points, t, lam, alpha, phys)

    def log_kernel(points, t):
        values = kernel(points, t)
        # arg psi' = -pi a/2 + arg 1F1, continuous near the origin
        return np.log(np.abs(values)) + 1j * (np.angle(values * np.exp(0.5j * np.pi * a)) - 0.5 * np.pi * a)

    chain = gauge_kernel(kernel, params.inverse(), log_kernel)
    samples = []
    for t in checkpoints:
        region = AsymptoticRegion(grid, t, r_max)
        actual = chain(region.points, t)
        reduced = (dg_phase_solution(t, n, alpha, nl.diffusion_prime, nl.c[0], phys=phys)
                   * invariant_kernel_case1(region.points, t, alpha, phys))
        samples.append((t, region, actual, reduced))
    numerator = sum(np.sum(np.conj(reduced) * actual) for _, _, actual, reduced in samples)
    denominator = sum(np.sum(np.abs(reduced) ** 2) for _, _, _, reduced in samples)
    kappa = numerator / denominator
    beta, delta = dg_consistency_constants(n, alpha, lam, nl.diffusion, phys)
    rows = []
    for t, region, actual, reduced in samples:
        modulus, phase = _mismatch(actual, kappa * reduced)
        rows.append({'t': float(t), 'r': region.ratio, 'modulus_mismatch': modulus, 'phase_mismatch': phase})
    kappa_error = abs(abs(kappa) / beta - 1.0)
    delta_error = abs(float(np.angle(kappa * np.exp(1j * delta))))
    log.info("Fitted |kappa| = %.6g against Lambda^a = %.6g, delta mismatch %.3g", abs(kappa), beta, delta_error)
    return {'nonlinearity': nl.serialized, 'n': n, 'alpha': alpha, 'r_max': r_max, 'rows': rows,
            'constants': {'Lambda': lam, 'gamma': params.gamma, 'kappa': [float(kappa.real), float(kappa.imag)],
                          'beta': beta, 'delta': delta, 'kappa_error': kappa_error, 'delta_error': delta_error}}
