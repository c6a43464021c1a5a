"""
Fourier-multiplier realizations of the free-particle operators

    P0 = i hbar d/dt (applied on shell as p^2/2m),  P_j = p_j,  G_j = t p_j - m x_j,
    J_jk = x_j p_k - x_k p_j,  J_0j = (f(p) G_j + G_j f(p)) / 2m,

the harmonic-oscillator generators, and the commutator harness used to check their algebra numerically.
Indices are 1-based, as in the commutation relations they are checked against.

"""
import logging
import numpy as np
from schrosym.error import ParameterError
from schrosym.kernels import Identity
from schrosym.spectral import WaveField, apply_multiplier, check_band_limit, multiply_position

log = logging.getLogger(__name__)

KINDS = ('P0', 'P', 'G', 'J', 'J0', 'OscP', 'OscG', 'OscJ0')


class OperatorSpec(object):
    def __init__(self, kind, j=None, k=None, symbol=None, omega=None, phys=None):
        if kind not in KINDS:
            raise ParameterError("Unknown operator kind %r" % kind)
        self.kind = kind
        self.j = j
        self.k = k
        self.symbol = symbol if symbol is not None else Identity()
        self.omega = omega
        self.phys = phys

    def validate(self, dimension):
        for index in (self.j, self.k):
            if index is not None and not 1 <= index <= dimension:
                raise ParameterError("Operator index %d is outside 1..%d" % (index, dimension))
        if self.kind != 'P0' and self.j is None:
            raise ParameterError("%s needs an index" % self.kind)
        if self.kind == 'J':
            if self.k is None or self.j == self.k:
                raise ParameterError("J_jk needs two different indices")
        if self.kind in ('J', 'J0', 'OscJ0') and dimension < 2:
            raise ParameterError("Nonlocal symmetries need at least two spatial dimensions")
        if self.kind == 'J0':
            self.symbol.validate(dimension)
        if self.kind.startswith('Osc') and not self.omega:
            raise ParameterError("Oscillator generators need a nonzero frequency")

    @property
    def label(self):
        indices = ''.join(str(i) for i in (self.j, self.k) if i is not None)
        label = '%s%s' % (self.kind, indices)
        if self.kind == 'J0' and not isinstance(self.symbol, Identity):
            label += '[%s]' % self.symbol.key
        return label

    def __repr__(self):
        return "OperatorSpec(%s)" % self.label


def _phys(op, field):
    return op.phys or field.grid.phys


def _momentum(field, axis):
    return apply_multiplier(field, field.grid.momenta[axis])


def _symbol(field, symbol):
    def multiplier(momenta):
        return symbol.value(np.sqrt(sum(p ** 2 for p in momenta)))
    return apply_multiplier(field, multiplier, regularize=True)


def _boost(field, axis, mass):
    return field.time * _momentum(field, axis) - mass * multiply_position(field, axis)


def _rotation(field, j, k):
    return multiply_position(_momentum(field, k), j) - multiply_position(_momentum(field, j), k)


def _oscillator_momentum(field, axis, mass, omega):
    phase = omega * field.time
    return np.cos(phase) * _momentum(field, axis) - mass * omega * np.sin(phase) * multiply_position(field, axis)


def _oscillator_boost(field, axis, mass, omega):
    phase = omega * field.time
    return -np.sin(phase) * _momentum(field, axis) - mass * omega * np.cos(phase) * multiply_position(field, axis)


def oscillator_propagator(field, duration, omega, mass=None, adjoint=False):
    """
    Exact oscillator evolution over duration (up to a global phase) as a kick-drift-kick product:
    a chirp exp(-i kappa |x|^2 / 2 hbar) with kappa = m w tan(w T/2), free drift for sin(w T)/(m w), chirp.

    """
    grid = field.grid
    mass = mass or grid.phys.mass
    hbar = grid.phys.hbar
    sign = -1.0 if adjoint else 1.0
    kappa = mass * omega * np.tan(0.5 * omega * duration)
    drift = np.sin(omega * duration) / (mass * omega)
    chirp = np.exp(-sign * 0.5j * kappa * grid.radius_squared / hbar)
    kinetic = np.exp(-sign * 0.5j * drift * grid.momentum_squared / hbar)
    kicked = field.replace(field.amplitudes * chirp)
    drifted = apply_multiplier(kicked, kinetic)
    return drifted.replace(drifted.amplitudes * chirp)


def oscillator_momentum_magnitude(field, omega, mass=None):
    """ |p^| = U(t)^dagger |p| U(t), with U the oscillator propagator over the field's time. """
    evolved = oscillator_propagator(field, field.time, omega, mass)
    magnitude = apply_multiplier(evolved, field.grid.momentum_magnitude)
    return oscillator_propagator(magnitude, field.time, omega, mass, adjoint=True)


def apply_operator(op, field):
    grid = field.grid
    op.validate(grid.dimension)
    mass = _phys(op, field).mass
    j = op.j - 1 if op.j is not None else None
    k = op.k - 1 if op.k is not None else None
    if op.kind == 'P0':
        return apply_multiplier(field, grid.momentum_squared / (2.0 * mass))
    if op.kind == 'P':
        return _momentum(field, j)
    if op.kind == 'G':
        return _boost(field, j, mass)
    if op.kind == 'J':
        return _rotation(field, j, k)
    if op.kind == 'J0':
        # both orderings of the symmetrized product
        f_then_g = _boost(_symbol(field, op.symbol), j, mass)
        g_then_f = _symbol(_boost(field, j, mass), op.symbol)
        return (f_then_g + g_then_f) * (0.5 / mass)
    if op.kind == 'OscP':
        return _oscillator_momentum(field, j, mass, op.omega)
    if op.kind == 'OscG':
        return _oscillator_boost(field, j, mass, op.omega)
    p_of_g = oscillator_momentum_magnitude(_oscillator_boost(field, j, mass, op.omega), op.omega, mass)
    g_of_p = _oscillator_boost(oscillator_momentum_magnitude(field, op.omega, mass), j, mass, op.omega)
    return (p_of_g + g_of_p) * (0.5 / (mass * op.omega))


def linear_combination(terms, apply=apply_operator):
    """ terms: (coefficient, OperatorSpec) pairs. Returns field -> sum of coefficient * op(field). """
    def combined(field):
        total = field * 0.0
        for coefficient, op in terms:
            total = total + coefficient * apply(op, field)
        return total
    return combined


def commutator(op_a, op_b, field, apply=apply_operator):
    """ Returns ([A, B] field, scale) where scale is the larger of |AB field| and |BA field|. """
    ab = apply(op_a, apply(op_b, field))
    ba = apply(op_b, apply(op_a, field))
    return ab - ba, max(ab.norm(), ba.norm())


def commutator_residual(op_a, op_b, field, expected=None, apply=apply_operator):
    """
    ([A, B] - E) field and its norm relative to the larger of |AB field|, |BA field|.
    expected is a callable field -> field for the asserted right-hand side, or None for zero.

    """
    check_band_limit(field, context='commutator input')
    value, scale = commutator(op_a, op_b, field, apply)
    if expected is not None:
        value = value - expected(field)
    residual = value.norm() / scale if scale > 0 else value.norm()
    log.debug("[%s, %s]: relative residual %.3g", op_a.label, op_b.label, residual)
    return value, residual


def _delta(u, v):
    return 1.0 if u == v else 0.0


def _rotation_term(coefficient, a, b, phys):
    # J_ab with J_aa = 0 and J_ba = -J_ab
    if a == b:
        return []
    if a < b:
        return [(coefficient, OperatorSpec('J', a, b, phys=phys))]
    return [(-coefficient, OperatorSpec('J', b, a, phys=phys))]


def rotation_relations(dimension, phys=None, hbar=1.0, apply=apply_operator):
    """ Yields (name, A, B, expected) for [J_jk, J_qr] = i hbar (d_rk J_jq - d_qk J_jr + d_qj J_kr - d_jr J_kq). """
    pairs = [(j, k) for j in range(1, dimension + 1) for k in range(j + 1, dimension + 1)]
    for index, (j, k) in enumerate(pairs):
        for q, r in pairs[index + 1:]:
            terms = []
            for coefficient, a, b in ((_delta(r, k), j, q), (-_delta(q, k), j, r),
                                      (_delta(q, j), k, r), (-_delta(j, r), k, q)):
                if coefficient:
                    terms += _rotation_term(1j * hbar * coefficient, a, b, phys)
            yield ('[J%d%d,J%d%d]' % (j, k, q, r), OperatorSpec('J', j, k, phys=phys),
                   OperatorSpec('J', q, r, phys=phys), linear_combination(terms, apply))


def boost_relations(dimension, symbol, phys=None, hbar=1.0, apply=apply_operator):
    """ Yields (name, A, B, expected) for [J_jk, J_0q] = i hbar (d_qj J_0k - d_kq J_0j). """
    for j in range(1, dimension + 1):
        for k in range(j + 1, dimension + 1):
            for q in range(1, dimension + 1):
                terms = []
                if q == j:
                    terms.append((1j * hbar, OperatorSpec('J0', k, symbol=symbol, phys=phys)))
                if q == k:
                    terms.append((-1j * hbar, OperatorSpec('J0', j, symbol=symbol, phys=phys)))
                yield ('[J%d%d,J0%d]' % (j, k, q), OperatorSpec('J', j, k, phys=phys),
                       OperatorSpec('J0', q, symbol=symbol, phys=phys), linear_combination(terms, apply))


def closure_multiplier_field(field, symbol):
    def multiplier(momenta):
        return symbol.closure_multiplier(np.sqrt(sum(p ** 2 for p in momenta)))
    return apply_multiplier(field, multiplier, regularize=True)


def closure_relations(dimension, symbol, phys=None, hbar=1.0, apply=apply_operator):
    """ Yields (name, A, B, expected) for [J_0j, J_0k] = -i hbar (f f'/p) J_jk. """
    for j in range(1, dimension + 1):
        for k in range(j + 1, dimension + 1):
            rotation = OperatorSpec('J', j, k, phys=phys)

            def expected(field, rotation=rotation):
                return -1j * hbar * closure_multiplier_field(apply(rotation, field), symbol)

            yield ('[J0%d,J0%d]' % (j, k), OperatorSpec('J0', j, symbol=symbol, phys=phys),
                   OperatorSpec('J0', k, symbol=symbol, phys=phys), expected)


def run_relations(relations, field, apply=apply_operator):
    """ Returns {name: relative residual} for (name, A, B, expected) tuples. """
    return dict((name, commutator_residual(op_a, op_b, field, expected, apply)[1])
                for name, op_a, op_b, expected in relations)


def check_lorentz_closure(symbol, field):
    """ Residuals of [J_0j, J_0k] = -i hbar (f f'/p) J_jk, plus the informational non-closure measure. """
    grid = field.grid
    grid.require_nonlocal()
    hbar = grid.phys.hbar
    report = {'symbol': symbol.key,
              'relations': run_relations(closure_relations(grid.dimension, symbol, hbar=hbar), field),
              'non_closure': lorentz_non_closure(symbol, field)}
    return report


def lorentz_non_closure(symbol, field):
    """
    Distance of [J_01, J_02] field from the best constant multiple of J_12 field, relative to the commutator.
    Zero when the operators close linearly on this field.

    """
    value, _ = commutator(OperatorSpec('J0', 1, symbol=symbol), OperatorSpec('J0', 2, symbol=symbol), field)
    rotation = apply_operator(OperatorSpec('J', 1, 2), field)
    target = value.amplitudes.ravel()
    basis = rotation.amplitudes.ravel()
    denominator = np.vdot(basis, basis)
    if denominator == 0 or not np.any(target):
        return 0.0
    coefficient = np.vdot(basis, target) / denominator
    return float(np.linalg.norm(target - coefficient * basis) / np.linalg.norm(target))


def time_derivative_operator(op, field):
    """ (d/dt J) field for operators whose only time dependence is the explicit t. """
    mass = _phys(op, field).mass
    if op.kind == 'G':
        return _momentum(field, op.j - 1)
    if op.kind == 'J0':
        return _symbol(_momentum(field, op.j - 1), op.symbol) * (1.0 / mass)
    if op.kind in ('P0', 'P', 'J'):
        return field * 0.0
    raise ParameterError("%s is not a free-particle symmetry" % op.kind)


def schrodinger_invariance_residual(op, field):
    """
    Relative norm of [L_S, J] field for a free solution, with L_S = i hbar d/dt - H and H = p^2/2m:
    [L_S, J] psi = i hbar (dJ/dt) psi + J(H psi) - H(J psi).

    """
    op.validate(field.grid.dimension)
    hamiltonian = OperatorSpec('P0', phys=op.phys)
    hbar = field.grid.phys.hbar
    explicit = 1j * hbar * time_derivative_operator(op, field)
    j_h = apply_operator(op, apply_operator(hamiltonian, field))
    h_j = apply_operator(hamiltonian, apply_operator(op, field))
    value = explicit + j_h - h_j
    scale = max(j_h.norm(), h_j.norm())
    return value.norm() / scale if scale > 0 else value.norm()


def oscillator_generators_check(omega, field):
    """
    Residuals of [J_jk, J^_0q] = i hbar (d_qj J^_0k - d_qk J^_0j) and [J^_0j, J^_0k] = -i hbar J_jk, and the
    measured [p^_j, G^_k] - i hbar m w d_jk, which is reported but not asserted.

    """
    grid = field.grid
    grid.require_nonlocal()
    n = grid.dimension
    hbar, mass = grid.phys.hbar, grid.phys.mass
    relations = {}
    for j in range(1, n + 1):
        for k in range(j + 1, n + 1):
            rotation = OperatorSpec('J', j, k)
            for q in range(1, n + 1):
                terms = []
                if q == j:
                    terms.append((1j * hbar, OperatorSpec('OscJ0', k, omega=omega)))
                if q == k:
                    terms.append((-1j * hbar, OperatorSpec('OscJ0', j, omega=omega)))
                relations['[J%d%d,J^0%d]' % (j, k, q)] = commutator_residual(
                    rotation, OperatorSpec('OscJ0', q, omega=omega), field, linear_combination(terms))[1]
            relations['[J^0%d,J^0%d]' % (j, k)] = commutator_residual(
                OperatorSpec('OscJ0', j, omega=omega), OperatorSpec('OscJ0', k, omega=omega), field,
                linear_combination([(-1j * hbar, rotation)]))[1]
    measured = {}
    for j in range(1, n + 1):
        for k in range(1, n + 1):
            constant = 1j * hbar * mass * omega if j == k else 0.0
            value, scale = commutator(OperatorSpec('OscP', j, omega=omega), OperatorSpec('OscG', k, omega=omega),
                                      field)
            value = value - field * constant
            measured['[p^%d,G^%d]' % (j, k)] = value.norm() / scale if scale > 0 else value.norm()
    return {'relations': relations, 'informational': measured}


def random_wave_packets(grid, rng, count=3, width=1.6, carrier=4.0, spread=0.25, time=0.0):
    """
    Sums of Gaussian packets exp(-|x - x0|^2 / 2 width^2 + i k0.x/hbar) with random centres (within
    spread * L of the origin), carrier directions of magnitude carrier, and complex amplitudes.

    """
    hbar = grid.phys.hbar
    amplitudes = np.zeros(grid.shape, dtype=complex)
    for _ in range(count):
        centre = rng.uniform(-spread, spread, grid.dimension) * grid.half_width
        direction = rng.normal(size=grid.dimension)
        direction /= np.linalg.norm(direction)
        momentum = carrier * direction
        weight = rng.normal() + 1j * rng.normal()
        exponent = np.zeros(grid.shape, dtype=complex)
        for axis in range(grid.dimension):
            offset = grid.coordinates[axis] - centre[axis]
            exponent = exponent - offset ** 2 / (2.0 * width ** 2) + 1j * momentum[axis] * grid.coordinates[axis] / hbar
        amplitudes += weight * np.exp(exponent)
    return WaveField(grid, amplitudes, time)
