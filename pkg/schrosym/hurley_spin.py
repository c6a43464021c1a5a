"""
The Hurley free-particle system for spin 1/2 and spin 1.

The 6s+1 components are stacked as (psi, chi, Omega) with 2s+1, 2s+1 and 2s-1 components. Per wavevector the
operator is the block matrix

    [ E I              -(i/hbar s) S.p      -(i/hbar s) K*.p ]
    [ (i/2m hbar s) S.p        I                  0          ]
    [ (i/2m hbar s) K.p        0                  I          ]

with E standing for i hbar d/dt. Eliminating chi and Omega leaves E - p^2/2m on psi.

"""
import logging
import numpy as np
from schrosym.error import NotASolutionError, ParameterError, UnsupportedSpinError
from schrosym.kernels import Identity
from schrosym.misc import relative_norm
from schrosym.spectral import PhysParams, WaveField, apply_multiplier, check_band_limit, free_evolve
from schrosym.symmetry_ops import (OperatorSpec, apply_operator, boost_relations, closure_relations,
                                   rotation_relations, run_relations)

log = logging.getLogger(__name__)

LEVI_CIVITA = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    LEVI_CIVITA[_i, _j, _k] = 1.0
    LEVI_CIVITA[_i, _k, _j] = -1.0

SUPPORTED_SPINS = (0.5, 1.0)


def spin_matrices(s, hbar=1.0):
    """ The standard spin-s matrices (S_x, S_y, S_z) with S_z diagonal, eigenvalues s, s-1, ..., -s. """
    dimension = int(round(2 * s)) + 1
    m = s - np.arange(dimension)
    raising = np.zeros((dimension, dimension), dtype=complex)
    for a in range(1, dimension):
        raising[a - 1, a] = np.sqrt(s * (s + 1) - m[a] * (m[a] + 1))
    lowering = raising.conj().T
    sx = 0.5 * (raising + lowering)
    sy = -0.5j * (raising - lowering)
    sz = np.diag(m).astype(complex)
    return hbar * np.array([sx, sy, sz])


def spin_algebra_defect(spin_s, spin_k, s, hbar):
    """ S_i S_j + K*_i K_j - (i s hbar eps_ijk S_k + hbar^2 s^2 d_ij), stacked over (i, j). """
    size = spin_s.shape[1]
    defect = np.empty((3, 3, size, size), dtype=complex)
    for i in range(3):
        for j in range(3):
            right = 1j * s * hbar * np.einsum('k,kab->ab', LEVI_CIVITA[i, j], spin_s)
            if i == j:
                right = right + hbar ** 2 * s ** 2 * np.eye(size)
            defect[i, j] = spin_s[i] @ spin_s[j] + spin_k[i].conj().T @ spin_k[j] - right
    return defect


def _factor_gram_family(target, rank, size):
    """
    Solves K*_i K_j = target[i, j] for K_i of shape (rank, size). The family is the Gram matrix of a stacked
    3 size x rank matrix U, with K_i[r, a] = conj(U[(i, a), r]).

    """
    gram = target.transpose(0, 2, 1, 3).reshape(3 * size, 3 * size)
    if not np.allclose(gram, gram.conj().T, atol=1e-12):
        raise ParameterError("The K family is not Hermitian")
    eigenvalues, eigenvectors = np.linalg.eigh(gram)
    order = np.argsort(eigenvalues)[::-1]
    eigenvalues, eigenvectors = eigenvalues[order], eigenvectors[:, order]
    if np.any(np.abs(eigenvalues[rank:]) > 1e-10 * max(1.0, eigenvalues[0])):
        raise ParameterError("The K family is not a Gram family of rank %d" % rank)
    stacked = eigenvectors[:, :rank] * np.sqrt(eigenvalues[:rank])
    return stacked.reshape(3, size, rank).conj().transpose(0, 2, 1)


class SpinSystem(object):
    def __init__(self, s, spin_s, spin_k, phys):
        self.s = s
        self.S = spin_s
        self.K = spin_k
        self.phys = phys
        for matrix in list(self.S) + list(self.K):
            matrix.flags.writeable = False

    @property
    def psi_size(self):
        return self.S.shape[1]

    @property
    def omega_size(self):
        return self.K.shape[1]

    @property
    def size(self):
        return 2 * self.psi_size + self.omega_size

    def algebra_residual(self):
        defect = spin_algebra_defect(self.S, self.K, self.s, self.phys.hbar)
        return float(np.max(np.abs(defect)))

    def __repr__(self):
        return "SpinSystem(s=%g)" % self.s


def build_spin_system(s, phys=None):
    phys = phys or PhysParams()
    if s not in SUPPORTED_SPINS:
        raise UnsupportedSpinError("Only s = 1/2 and s = 1 are implemented, got s = %r" % s)
    hbar = phys.hbar
    spin_s = spin_matrices(s, hbar)
    size = spin_s.shape[1]
    rank = int(round(2 * s)) - 1
    if rank == 0:
        spin_k = np.zeros((3, 0, size), dtype=complex)
    else:
        target = -spin_algebra_defect(spin_s, np.zeros((3, 0, size), dtype=complex), s, hbar)
        spin_k = _factor_gram_family(target, rank, size)
    system = SpinSystem(s, spin_s, spin_k, phys)
    residual = system.algebra_residual()
    if residual > 1e-12 * max(1.0, hbar ** 2):
        raise ParameterError("Spin system for s = %g violates the spin algebra by %.3g" % (s, residual))
    log.debug("Built spin %g system, algebra residual %.3g", s, residual)
    return system


def _coupling(spin):
    hbar, s, m = spin.phys.hbar, spin.s, spin.phys.mass
    return 1j / (hbar * s), 1j / (2.0 * m * hbar * s)


def _dot(matrices, p):
    return np.einsum('k,kab->ab', np.asarray(p, dtype=float), matrices)


def hurley_symbol(energy, p, spin):
    """ The (6s+1)-square operator matrix at energy E and momentum p (a 3-vector). """
    upper, lower = _coupling(spin)
    a, c = spin.psi_size, spin.omega_size
    sp = _dot(spin.S, p)
    kp = _dot(spin.K, p)
    matrix = np.zeros((spin.size, spin.size), dtype=complex)
    matrix[:a, :a] = energy * np.eye(a)
    matrix[:a, a:2 * a] = -upper * sp
    matrix[:a, 2 * a:] = -upper * kp.conj().T
    matrix[a:2 * a, :a] = lower * sp
    matrix[a:2 * a, a:2 * a] = np.eye(a)
    matrix[2 * a:, :a] = lower * kp
    matrix[2 * a:, 2 * a:] = np.eye(c)
    return matrix


def symbol_derivative(spin, axis):
    """ d/dp_axis of the operator matrix, which does not depend on p. """
    unit = np.zeros(3)
    unit[axis] = 1.0
    return hurley_symbol(0.0, unit, spin) - hurley_symbol(0.0, np.zeros(3), spin)


def eliminated_block(p, spin):
    """ B D^{-1} C for the constraint block D; the psi equation reads (E - this) psi = 0. """
    a = spin.psi_size
    matrix = hurley_symbol(0.0, p, spin)
    coupling = matrix[:a, a:]
    constraint = matrix[a:, a:]
    return coupling @ np.linalg.solve(constraint, matrix[a:, :a])


def null_vectors(p, spin):
    """ Columns (beta, -c S.p beta, -c K.p beta), c = i/(2 m hbar s), for beta running over a basis. """
    _, lower = _coupling(spin)
    basis = np.eye(spin.psi_size)
    return np.vstack([basis, -lower * _dot(spin.S, p) @ basis, -lower * _dot(spin.K, p) @ basis])


def spin_lambda(spin, axis):
    """ The strictly lower block matrix lambda_j. """
    a = spin.psi_size
    matrix = np.zeros((spin.size, spin.size), dtype=complex)
    matrix[a:2 * a, :a] = spin.S[axis] / (2.0 * spin.s)
    matrix[2 * a:, :a] = spin.K[axis] / (2.0 * spin.s)
    return matrix


def _projector(spin):
    projector = np.zeros((spin.size, spin.size))
    projector[:spin.psi_size, :spin.psi_size] = np.eye(spin.psi_size)
    return projector


def _boost_commutator(axis, p, energy, spin):
    # [L_H, G~_j] = i hbar p_j P + i m hbar dM/dp_j + [M, lambda_j]
    hbar, m = spin.phys.hbar, spin.phys.mass
    matrix = hurley_symbol(energy, p, spin)
    lam = spin_lambda(spin, axis)
    terms = [1j * hbar * p[axis] * _projector(spin), 1j * m * hbar * symbol_derivative(spin, axis),
             matrix @ lam - lam @ matrix]
    return terms


def _rotation_commutator(j, k, p, energy, spin):
    # [L_H, J~_jk] = -i hbar (p_k dM_j - p_j dM_k) - (p_k [M, lambda_j] - p_j [M, lambda_k]) / m
    hbar, m = spin.phys.hbar, spin.phys.mass
    matrix = hurley_symbol(energy, p, spin)
    lam_j, lam_k = spin_lambda(spin, j), spin_lambda(spin, k)
    terms = [-1j * hbar * (p[k] * symbol_derivative(spin, j) - p[j] * symbol_derivative(spin, k)),
             -(p[k] * (matrix @ lam_j - lam_j @ matrix) - p[j] * (matrix @ lam_k - lam_k @ matrix)) / m]
    return terms


def invariance_defect(generator, p, spin, symbol=None):
    """
    |[L_H, generator](E, p) V| on the on-shell null vectors V, relative to the largest single term.
    generator is an OperatorSpec of kind 'G', 'J' or 'J0' (1-based indices).

    """
    p = np.asarray(p, dtype=float)
    energy = float(p @ p) / (2.0 * spin.phys.mass)
    vectors = null_vectors(p, spin)
    if generator.kind == 'G':
        terms = _boost_commutator(generator.j - 1, p, energy, spin)
    elif generator.kind == 'J0':
        symbol = symbol or generator.symbol
        factor = symbol.value(np.sqrt(p @ p)) / spin.phys.mass
        terms = [factor * term for term in _boost_commutator(generator.j - 1, p, energy, spin)]
    elif generator.kind == 'J':
        terms = _rotation_commutator(generator.j - 1, generator.k - 1, p, energy, spin)
    else:
        raise ParameterError("No modified generator of kind %s" % generator.kind)
    applied = [term @ vectors for term in terms]
    scale = max(np.linalg.norm(term) for term in applied)
    total = np.linalg.norm(sum(applied))
    return float(total / scale) if scale > 0 else float(total)


def spin_term_commutators(spin, rng, samples=10):
    """
    How far the spin terms L_jk = -(lambda_j p_k - lambda_k p_j)/m are from the angular momentum relation
    [L_12, L_13] = i hbar L_23, averaged over random wavevectors. Reported, not asserted.

    """
    hbar, m = spin.phys.hbar, spin.phys.mass
    lam = [spin_lambda(spin, axis) for axis in range(3)]

    def term(j, k, p):
        return -(lam[j] * p[k] - lam[k] * p[j]) / m

    defects = []
    for _ in range(samples):
        p = rng.normal(size=3)
        left = term(0, 1, p) @ term(0, 2, p) - term(0, 2, p) @ term(0, 1, p)
        right = 1j * hbar * term(1, 2, p)
        defects.append(np.linalg.norm(left - right) / np.linalg.norm(right))
    squares = max(float(np.max(np.abs(matrix @ matrix))) for matrix in lam)
    return {'angular_momentum_defect': float(np.mean(defects)), 'lambda_squared_max': squares}


class HurleyField(WaveField):
    """ A 6s+1 component field stacked as (psi, chi, Omega). """
    def __init__(self, grid, amplitudes, spin, time=0.0):
        super(HurleyField, self).__init__(grid, amplitudes, time)
        if self.components != spin.size:
            raise ParameterError("A spin %g field has %d components, got %d" % (spin.s, spin.size, self.components))
        self._spin = spin

    @property
    def spin(self):
        return self._spin

    @property
    def psi(self):
        return self.amplitudes[:self._spin.psi_size]

    @property
    def chi(self):
        return self.amplitudes[self._spin.psi_size:2 * self._spin.psi_size]

    @property
    def omega(self):
        return self.amplitudes[2 * self._spin.psi_size:]

    def replace(self, amplitudes=None, time=None, representation=None):
        return HurleyField(self.grid, self.amplitudes if amplitudes is None else amplitudes, self._spin,
                           self.time if time is None else time)


def _matrix_multiplier(field, matrices):
    """ Applies sum_k matrices[k] p_k, a matrix-valued symbol, to the components of a field. """
    total = np.zeros((matrices.shape[1],) + field.grid.shape, dtype=complex)
    for axis in range(3):
        momentum = apply_multiplier(field, field.grid.momenta[axis]).amplitudes
        total += np.einsum('ab,b...->a...', matrices[axis], momentum)
    return total


def hurley_solution(free_field, beta, spin, check=True):
    """
    (psi, -(i/2m hbar s) S.p psi, -(i/2m hbar s) K.p psi) with psi = beta F for a scalar free solution F on a
    three-dimensional grid. With check set, F must satisfy the free equation under exact free evolution.

    """
    grid = free_field.grid
    if grid.dimension != 3:
        raise ParameterError("The Hurley system is posed in three dimensions")
    beta = np.asarray(beta, dtype=complex)
    if beta.shape != (spin.psi_size,):
        raise ParameterError("beta needs %d components for spin %g" % (spin.psi_size, spin.s))
    if check:
        residual = scalar_free_residual(free_field)
        if residual > 1e-6:
            raise NotASolutionError("F does not solve the free equation: relative residual %.3g" % residual)
    _, lower = _coupling(spin)
    psi_field = WaveField(grid, np.einsum('a,...->a...', beta, free_field.values), free_field.time)
    chi = -lower * _matrix_multiplier(psi_field, spin.S)
    omega = -lower * _matrix_multiplier(psi_field, spin.K)
    return HurleyField(grid, np.concatenate([psi_field.amplitudes, chi, omega]), spin, free_field.time)


def scalar_free_residual(field, dt=1e-3):
    """ |i hbar F_t - p^2/2m F| / |p^2/2m F|, with F_t from a fourth-order difference of the exact evolution. """
    phys = field.grid.phys
    weights = ((-2, 1.0 / 12.0), (-1, -2.0 / 3.0), (1, 2.0 / 3.0), (2, -1.0 / 12.0))
    derivative = sum((free_evolve(field, offset * dt) * weight for offset, weight in weights), field * 0.0)
    kinetic = apply_multiplier(field, field.grid.momentum_squared / (2.0 * phys.mass))
    return relative_norm((1j * phys.hbar / dt * derivative - kinetic).amplitudes, kinetic.amplitudes)


def apply_hurley_operator(field, time_derivative):
    """ L_H applied to a field, with time_derivative the field d/dt of its psi block. """
    spin = field.spin
    hbar = spin.phys.hbar
    upper, lower = _coupling(spin)
    chi_field = WaveField(field.grid, field.chi, field.time)
    psi_field = WaveField(field.grid, field.psi, field.time)
    first = 1j * hbar * time_derivative - upper * _matrix_multiplier(chi_field, spin.S)
    if spin.omega_size:
        omega_field = WaveField(field.grid, field.omega, field.time)
        first = first - upper * _matrix_multiplier(omega_field, spin.K.conj().transpose(0, 2, 1))
    second = lower * _matrix_multiplier(psi_field, spin.S) + field.chi
    third = lower * _matrix_multiplier(psi_field, spin.K) + field.omega
    return field.replace(np.concatenate([first, second, third]))


def _component_matrix(field, matrix):
    return field.replace(np.einsum('ab,b...->a...', matrix, field.amplitudes))


def apply_tilde_operator(op, field):
    """
    The modified generators acting on a Hurley field:
    J~_jk = J_jk - (lambda_j p_k - lambda_k p_j)/m, G~_j = G_j + lambda_j, J~_0j = (f G~_j + G~_j f)/2m.

    """
    spin = field.spin
    mass = spin.phys.mass
    if op.kind == 'G':
        return apply_operator(op, field) + _component_matrix(field, spin_lambda(spin, op.j - 1))
    if op.kind == 'J':
        j, k = op.j - 1, op.k - 1
        p_k = apply_multiplier(field, field.grid.momenta[k])
        p_j = apply_multiplier(field, field.grid.momenta[j])
        spin_part = (_component_matrix(p_k, spin_lambda(spin, j)) - _component_matrix(p_j, spin_lambda(spin, k)))
        return apply_operator(op, field) - spin_part * (1.0 / mass)
    if op.kind == 'J0':
        boost = OperatorSpec('G', op.j)
        symbol = op.symbol

        def f(target):
            return apply_multiplier(target, lambda momenta: symbol.value(np.sqrt(sum(p ** 2 for p in momenta))),
                                    regularize=True)

        return (f(apply_tilde_operator(boost, field)) + apply_tilde_operator(boost, f(field))) * (0.5 / mass)
    raise ParameterError("No modified generator of kind %s" % op.kind)


def modified_generators(symbol=None):
    """
    The three-dimensional family G~_j, J~_jk and J~_0j as OperatorSpecs. They act on a HurleyField through
    apply_tilde_operator and on a single wavevector through invariance_defect.

    """
    symbol = symbol or Identity()
    specs = [OperatorSpec('G', j) for j in (1, 2, 3)]
    specs += [OperatorSpec('J', j, k) for j, k in ((1, 2), (1, 3), (2, 3))]
    specs += [OperatorSpec('J0', j, symbol=symbol) for j in (1, 2, 3)]
    return specs


def tilde_relations(symbol=None, hbar=1.0):
    """ (name, A, B, expected) for the modified generators in three dimensions. """
    symbol = symbol or Identity()
    for relations in (rotation_relations(3, hbar=hbar, apply=apply_tilde_operator),
                      boost_relations(3, symbol, hbar=hbar, apply=apply_tilde_operator),
                      closure_relations(3, symbol, hbar=hbar, apply=apply_tilde_operator)):
        for name, op_a, op_b, expected in relations:
            yield name.replace('J', 'J~'), op_a, op_b, expected


def run_tilde_relations(field, symbol=None):
    check_band_limit(field, context='Hurley commutator input')
    return run_relations(tilde_relations(symbol, field.grid.phys.hbar), field, apply=apply_tilde_operator)


def _psi_derivative(solution, t, dt):
    weights = ((-2, 1.0 / 12.0), (-1, -2.0 / 3.0), (1, 2.0 / 3.0), (2, -1.0 / 12.0))
    return sum(weight * solution(t + offset * dt).psi for offset, weight in weights) / dt


def hurley_residual(solution, t, dt=1e-3):
    """ |L_H psi| relative to the larger of |i hbar psi_t| and |psi| for a solution t -> HurleyField. """
    field = solution(t)
    derivative = _psi_derivative(solution, t, dt)
    value = apply_hurley_operator(field, derivative)
    scale = max(field.spin.phys.hbar * float(np.sqrt(np.sum(np.abs(derivative) ** 2) * field.grid.cell_volume)),
                field.norm())
    return value.norm() / scale if scale > 0 else value.norm()


def field_invariance_residual(generator, solution, t, dt=1e-3):
    """
    Relative norm of [L_H, generator] psi = L_H(generator psi) - generator(L_H psi) for a solution given as a
    function of time returning HurleyFields. Time derivatives are fourth-order differences.

    """
    field = solution(t)
    transformed = apply_tilde_operator(generator, field)
    transformed_derivative = _psi_derivative(lambda s: apply_tilde_operator(generator, solution(s)), t, dt)
    left = apply_hurley_operator(transformed, transformed_derivative)
    right = apply_tilde_operator(generator, apply_hurley_operator(field, _psi_derivative(solution, t, dt)))
    value = left - right
    scale = max(left.norm(), transformed.norm())
    return value.norm() / scale if scale > 0 else value.norm()


def evolving_solution(free_field, beta, spin):
    """ t -> Hurley solution built from the exact free evolution of F. """
    def solution(t):
        evolved = free_evolve(free_field, t - free_field.time)
        return hurley_solution(evolved, beta, spin, check=False)
    return solution
