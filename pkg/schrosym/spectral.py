"""
Periodic n-dimensional grids, the discrete Fourier transform convention and the complex field container.

Positions are x_j = -L + j dx with dx = 2L/N. Momenta carry hbar: p = hbar * 2 pi * fftfreq(N, dx), so the
Nyquist bin sits at p = -pi hbar / dx. The transforms approximate

    psi~(p) = (2 pi hbar)^{-n/2} ∫ exp(-i p.x / hbar) psi(x) d^n x

and its inverse, so that Parseval holds with the weights dx^n and dp^n, dp = pi hbar / L.

"""
import logging
import numpy as np
from scipy.special import erfc
from schrosym.constants import BAND_LIMIT_TOLERANCE
from schrosym.error import InterpolationRangeError, ParameterError, SymbolSingularityError
from schrosym.misc import is_power_of_2

log = logging.getLogger(__name__)

POSITION = 'position'
MOMENTUM = 'momentum'


class PhysParams(object):
    def __init__(self, mass=1.0, hbar=1.0):
        for name, value in (('mass', mass), ('hbar', hbar)):
            if not np.isfinite(value) or value <= 0:
                raise ParameterError("%s must be strictly positive and finite, got %r" % (name, value))
        self._mass = float(mass)
        self._hbar = float(hbar)

    @property
    def mass(self):
        return self._mass

    @property
    def hbar(self):
        return self._hbar

    def with_mass(self, mass):
        return PhysParams(mass, self._hbar)

    def __eq__(self, other):
        return isinstance(other, PhysParams) and self._mass == other.mass and self._hbar == other.hbar

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash((self._mass, self._hbar))

    def __repr__(self):
        return "PhysParams(mass=%r, hbar=%r)" % (self._mass, self._hbar)


class SpectralGrid(object):
    """
    An n-dimensional periodic grid on [-L, L)^n with N points per axis.

    Coordinate and momentum arrays are stored sparsely (one broadcastable array per axis).

    """
    def __init__(self, dimension, points, half_width, phys=None):
        if int(dimension) != dimension or dimension < 1:
            raise ParameterError("Grid dimension must be a positive integer, got %r" % dimension)
        if int(points) != points or not is_power_of_2(int(points)) or points < 4:
            raise ParameterError("Points per axis must be a power of two of at least 4, got %r" % points)
        if not np.isfinite(half_width) or half_width <= 0:
            raise ParameterError("Box half width must be positive, got %r" % half_width)
        self._dimension = int(dimension)
        self._points = int(points)
        self._half_width = float(half_width)
        self._phys = phys or PhysParams()
        self._dx = 2.0 * self._half_width / self._points
        self._axis = -self._half_width + self._dx * np.arange(self._points)
        self._momentum_axis = self._phys.hbar * 2.0 * np.pi * np.fft.fftfreq(self._points, self._dx)
        self._coordinates = tuple(self._sparse(self._axis, a) for a in range(self._dimension))
        self._momenta = tuple(self._sparse(self._momentum_axis, a) for a in range(self._dimension))
        self._momentum_squared = sum(p ** 2 for p in self._momenta) * np.ones(self.shape)
        sign = (-1.0) ** np.arange(self._points)
        self._sign = np.ones(self.shape)
        for a in range(self._dimension):
            self._sign = self._sign * self._sparse(sign, a)

    def _sparse(self, values, axis):
        shape = [1] * self._dimension
        shape[axis] = self._points
        return values.reshape(shape)

    @property
    def dimension(self):
        return self._dimension

    @property
    def points_per_axis(self):
        return self._points

    @property
    def half_width(self):
        return self._half_width

    @property
    def phys(self):
        return self._phys

    @property
    def dx(self):
        return self._dx

    @property
    def dp(self):
        return np.pi * self._phys.hbar / self._half_width

    @property
    def shape(self):
        return (self._points,) * self._dimension

    @property
    def size(self):
        return self._points ** self._dimension

    @property
    def axis(self):
        return self._axis

    @property
    def momentum_axis(self):
        return self._momentum_axis

    @property
    def coordinates(self):
        return self._coordinates

    @property
    def momenta(self):
        return self._momenta

    @property
    def momentum_squared(self):
        return self._momentum_squared

    @property
    def momentum_magnitude(self):
        return np.sqrt(self._momentum_squared)

    @property
    def regularized_momentum_magnitude(self):
        # the zero bin takes the mean of the smallest nonzero |p| on the grid, which is dp
        magnitude = self.momentum_magnitude.copy()
        magnitude[(0,) * self._dimension] = self.dp
        return magnitude

    @property
    def nyquist_momentum(self):
        return np.pi * self._phys.hbar / self._dx

    @property
    def cell_volume(self):
        return self._dx ** self._dimension

    @property
    def momentum_cell_volume(self):
        return self.dp ** self._dimension

    @property
    def sign(self):
        return self._sign

    @property
    def radius_squared(self):
        return sum(x ** 2 for x in self._coordinates) * np.ones(self.shape)

    def points(self):
        """ All grid positions as an array of shape grid.shape + (n,). """
        return np.stack(np.broadcast_arrays(*self._coordinates), axis=-1)

    def refined(self, factor=2):
        return SpectralGrid(self._dimension, self._points * factor, self._half_width, self._phys)

    def with_phys(self, phys):
        return SpectralGrid(self._dimension, self._points, self._half_width, phys)

    def window(self, center_fraction, width_fraction):
        """ Smooth radial taper 1/2 erfc((r - R)/w), with R and w given as fractions of L. """
        radius = np.sqrt(self.radius_squared)
        center = center_fraction * self._half_width
        width = width_fraction * self._half_width
        return 0.5 * erfc((radius - center) / width)

    def require_nonlocal(self):
        if self._dimension < 2:
            raise ParameterError("Nonlocal symmetries need at least two spatial dimensions")

    def __eq__(self, other):
        return (isinstance(other, SpectralGrid) and self._dimension == other.dimension
                and self._points == other.points_per_axis and self._half_width == other.half_width
                and self._phys == other.phys)

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash((self._dimension, self._points, self._half_width, self._phys))

    def __repr__(self):
        return "SpectralGrid(dimension=%d, points=%d, half_width=%r)" % (self._dimension, self._points,
                                                                         self._half_width)


class WaveField(object):
    """
    Complex amplitudes on a grid, stored with a leading component axis, plus the time they belong to.
    Instances are immutable; operations return new fields.

    """
    def __init__(self, grid, amplitudes, time=0.0, representation=POSITION):
        amplitudes = np.array(amplitudes, dtype=complex)
        if amplitudes.shape == grid.shape:
            amplitudes = amplitudes[np.newaxis]
        if amplitudes.ndim != grid.dimension + 1 or amplitudes.shape[1:] != grid.shape:
            raise ParameterError("Amplitude array of shape %s does not fit grid %r" % (amplitudes.shape, grid))
        if representation not in (POSITION, MOMENTUM):
            raise ParameterError("Unknown representation %r" % representation)
        amplitudes.flags.writeable = False
        self._grid = grid
        self._amplitudes = amplitudes
        self._time = time
        self._representation = representation

    @property
    def grid(self):
        return self._grid

    @property
    def amplitudes(self):
        return self._amplitudes

    @property
    def values(self):
        """ The single component of a scalar field. """
        if self.components != 1:
            raise ParameterError("Field has %d components; use amplitudes" % self.components)
        return self._amplitudes[0]

    @property
    def components(self):
        return self._amplitudes.shape[0]

    @property
    def time(self):
        return self._time

    @property
    def representation(self):
        return self._representation

    def replace(self, amplitudes=None, time=None, representation=None):
        return WaveField(self._grid,
                         self._amplitudes if amplitudes is None else amplitudes,
                         self._time if time is None else time,
                         self._representation if representation is None else representation)

    def _compatible(self, other):
        if self._grid != other.grid or self._representation != other.representation:
            raise ParameterError("Fields live on different grids or representations")

    def __add__(self, other):
        self._compatible(other)
        return self.replace(self._amplitudes + other.amplitudes)

    def __sub__(self, other):
        self._compatible(other)
        return self.replace(self._amplitudes - other.amplitudes)

    def __mul__(self, scalar):
        return self.replace(self._amplitudes * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return self.replace(-self._amplitudes)

    def norm(self):
        weight = self._grid.cell_volume if self._representation == POSITION else self._grid.momentum_cell_volume
        return float(np.sqrt(np.sum(np.abs(self._amplitudes) ** 2) * weight))

    def __repr__(self):
        return "WaveField(%r, components=%d, time=%r, %s)" % (self._grid, self.components, self._time,
                                                             self._representation)


def _axes(grid):
    return tuple(range(1, grid.dimension + 1))


def forward_array(grid, amplitudes):
    """ Position amplitudes (components first) to momentum amplitudes. """
    n = grid.dimension
    scale = (2.0 * np.pi * grid.phys.hbar) ** (-0.5 * n) * grid.cell_volume
    return scale * grid.sign * np.fft.fftn(amplitudes, axes=_axes(grid))


def inverse_array(grid, spectrum):
    n = grid.dimension
    scale = (2.0 * np.pi * grid.phys.hbar) ** (-0.5 * n) * grid.momentum_cell_volume * grid.size
    return scale * np.fft.ifftn(grid.sign * spectrum, axes=_axes(grid))


def forward_transform(field):
    if field.representation != POSITION:
        raise ParameterError("forward_transform expects a field in position representation")
    return field.replace(forward_array(field.grid, field.amplitudes), representation=MOMENTUM)


def inverse_transform(field):
    if field.representation != MOMENTUM:
        raise ParameterError("inverse_transform expects a field in momentum representation")
    return field.replace(inverse_array(field.grid, field.amplitudes), representation=POSITION)


def _regularized_momenta(grid):
    momenta = list(grid.momenta)
    shifted = momenta[0].copy()
    shifted.flat[0] = grid.dp
    momenta[0] = shifted
    return tuple(momenta)


def evaluate_symbol(grid, symbol, spectrum=None, regularize=False):
    """
    Evaluates a symbol (callable of the momentum tuple, or an array) on the grid. Non-finite values are
    replaced by the value at the regularized zero bin when regularize is set, zeroed when the bin carries no
    amplitude, and rejected otherwise.

    """
    values = symbol(grid.momenta) if callable(symbol) else symbol
    values = np.asarray(values) * np.ones(grid.shape)
    bad = ~np.isfinite(values)
    if not np.any(bad):
        return values
    values = np.array(values, dtype=complex)
    if regularize and callable(symbol):
        replacement = np.asarray(symbol(_regularized_momenta(grid))) * np.ones(grid.shape)
        values[bad] = replacement[bad]
        log.info("Symbol regularized at %d bin(s) with |p| = dp", int(np.sum(bad)))
        if not np.all(np.isfinite(values)):
            raise SymbolSingularityError("Symbol remains singular after regularization")
        return values
    if spectrum is not None:
        magnitude = np.max(np.abs(spectrum), axis=0)
        populated = magnitude[bad] > 1e-12 * magnitude.max()
        if np.any(populated):
            raise SymbolSingularityError("Symbol is non-finite at %d populated bin(s)" % int(np.sum(populated)))
    values[bad] = 0.0
    return values


def apply_multiplier(field, symbol, regularize=False):
    """ Multiplies the spectrum of a position-space field by symbol(p) and transforms back. """
    if field.representation == MOMENTUM:
        values = evaluate_symbol(field.grid, symbol, field.amplitudes, regularize)
        return field.replace(values * field.amplitudes)
    spectrum = forward_array(field.grid, field.amplitudes)
    values = evaluate_symbol(field.grid, symbol, spectrum, regularize)
    return field.replace(inverse_array(field.grid, values * spectrum))


def free_propagator_symbol(grid, dt):
    phys = grid.phys
    return np.exp(-1j * grid.momentum_squared * dt / (2.0 * phys.mass * phys.hbar))


def free_evolve(field, dt):
    """ Exact free evolution over dt. """
    return apply_multiplier(field, free_propagator_symbol(field.grid, dt)).replace(time=field.time + dt)


def laplacian(field):
    hbar = field.grid.phys.hbar
    return apply_multiplier(field, -field.grid.momentum_squared / hbar ** 2)


def gradient(field, axis):
    hbar = field.grid.phys.hbar
    return apply_multiplier(field, 1j * field.grid.momenta[axis] / hbar)


def embed_spectrum(spectrum, grid, fine):
    """ Places a spectrum on a finer grid with the same box, filling the new high bins with zeros. """
    axes = _axes(grid)
    shifted = np.fft.fftshift(spectrum, axes=axes)
    pad = (fine.points_per_axis - grid.points_per_axis) // 2
    widths = [(0, 0)] + [(pad, pad)] * grid.dimension
    return np.fft.ifftshift(np.pad(shifted, widths, mode='constant'), axes=axes)


def truncate_spectrum(spectrum, fine, grid):
    axes = _axes(grid)
    shifted = np.fft.fftshift(spectrum, axes=axes)
    pad = (fine.points_per_axis - grid.points_per_axis) // 2
    window = (slice(None),) + (slice(pad, pad + grid.points_per_axis),) * grid.dimension
    return np.fft.ifftshift(shifted[window], axes=axes)


def multiply_position(field, axis, padded=True):
    """
    Multiplies by the coordinate x_axis. With padding the product is formed on a grid with twice the
    resolution and truncated back, which keeps the aliasing of the product out of band-limited fields.

    """
    grid = field.grid
    if not padded:
        return field.replace(field.amplitudes * grid.coordinates[axis])
    fine = grid.refined(2)
    spectrum = forward_array(grid, field.amplitudes)
    fine_values = inverse_array(fine, embed_spectrum(spectrum, grid, fine))
    product = forward_array(fine, fine_values * fine.coordinates[axis])
    return field.replace(inverse_array(grid, truncate_spectrum(product, fine, grid)))


def band_limit_fraction(field):
    """ Largest fraction of spectral energy beyond 2/3 of the Nyquist momentum along any axis. """
    grid = field.grid
    spectrum = field.amplitudes if field.representation == MOMENTUM else forward_array(grid, field.amplitudes)
    energy = np.abs(spectrum) ** 2
    total = energy.sum()
    if total == 0.0:
        return 0.0
    cutoff = 2.0 / 3.0 * grid.nyquist_momentum
    fraction = 0.0
    for momentum in grid.momenta:
        outside = (np.abs(momentum) > cutoff) * np.ones(grid.shape)
        fraction = max(fraction, float((energy * outside).sum() / total))
    return fraction


def check_band_limit(field, tolerance=BAND_LIMIT_TOLERANCE, context='field'):
    fraction = band_limit_fraction(field)
    if fraction > tolerance:
        log.warning("%s is not band limited: %.3g of its energy lies beyond 2/3 Nyquist", context, fraction)
    return fraction


def fourier_interpolate(field, points, chunk=2048):
    """
    Evaluates the trigonometric interpolant of a position-space field at arbitrary points (shape (..., n)).
    Returns an array of shape (components,) + points.shape[:-1].

    """
    grid = field.grid
    points = np.asarray(points, dtype=float)
    if points.shape[-1] != grid.dimension:
        raise ParameterError("Points have %d coordinates but the grid has %d" % (points.shape[-1], grid.dimension))
    flat = points.reshape(-1, grid.dimension)
    if np.any(np.abs(flat) > grid.half_width):
        raise InterpolationRangeError("Mapped points leave the grid box [-%g, %g]" % (grid.half_width,
                                                                                    grid.half_width))
    spectrum = forward_array(grid, field.amplitudes)
    n = grid.dimension
    scale = (2.0 * np.pi * grid.phys.hbar) ** (-0.5 * n) * grid.momentum_cell_volume
    phase_rate = 1j * grid.momentum_axis / grid.phys.hbar
    result = np.empty((field.components, flat.shape[0]), dtype=complex)
    for start in range(0, flat.shape[0], chunk):
        block = flat[start:start + chunk]
        for component in range(field.components):
            partial = spectrum[component]
            # contract the leading momentum axis against each point's phase, one axis at a time
            partial = np.einsum('mk,k...->m...', np.exp(np.outer(block[:, 0], phase_rate)), partial)
            for a in range(1, n):
                phases = np.exp(np.outer(block[:, a], phase_rate))
                partial = np.einsum('mk,mk...->m...', phases, partial)
            result[component, start:start + chunk] = scale * partial
    return result.reshape((field.components,) + points.shape[:-1])
