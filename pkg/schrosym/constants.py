VERSION = '0.9.0'

# Euler-Mascheroni constant
EULER_GAMMA = 0.57721566490153286061

# Amplitudes below this fraction of the maximum are treated as zeros in gauge maps and residual norms
ZERO_AMPLITUDE_FRACTION = 1e-12
# Densities below this fraction of the maximum are excluded from DG residual norms
DENSITY_FLOOR_FRACTION = 1e-8
# Regularization of 1/rho inside nonlinear substeps
DENSITY_EPSILON = 1e-14
# Fraction of spectral energy allowed beyond 2/3 of the Nyquist momentum
BAND_LIMIT_TOLERANCE = 1e-10
# ln rho is not smooth where psi nearly vanishes, so logarithmic runs carry a power-law spectral tail
LOG_BAND_LIMIT_TOLERANCE = 1e-6
# A run is declared divergent when the peak amplitude grows by this factor
BLOW_UP_FACTOR = 1e6

DEFAULT_POINTS = {1: 256, 2: 256, 3: 64}
DEFAULT_TRANSFORM_STEP = 1e-3
DEFAULT_REGION_RATIO = 0.02
# Transform coefficients beyond this magnitude (or sigma below its inverse) mark a caustic
CAUSTIC_LIMIT = 1e8
