import sys


def fail(message, return_code=1):
    # Instead of dumping stack traces back the user we provide them a readable message and a composable return code
    print(message)
    sys.exit(return_code)


class SchrosymError(Exception):
    """ Base class for every error raised by the library. """


class PoleError(SchrosymError, ValueError):
    """ A special function was evaluated at one of its poles. """


class AccuracyError(SchrosymError):
    """ The argument lies outside the range where the documented accuracy holds. """


class DomainError(SchrosymError, ValueError):
    pass


class SingularityError(SchrosymError, ValueError):
    """ Evaluation at a point where the quantity is singular, e.g. t = 0 for a propagator. """


class ParameterError(SchrosymError, ValueError):
    pass


class SymbolSingularityError(SchrosymError):
    """ A Fourier symbol is non-finite at a populated bin and no regularization was requested. """


class AliasingError(SchrosymError):
    pass


class BlowUpError(SchrosymError):
    pass


class InterpolationRangeError(SchrosymError):
    pass


class BranchError(SchrosymError):
    pass


class PhaseVortexError(SchrosymError):
    """ The field has a phase singularity, so no single-valued continuous argument exists. """


class UnsupportedSpinError(SchrosymError):
    pass


class NotASolutionError(SchrosymError):
    pass


class RegionError(SchrosymError):
    """ An asymptotic formula was requested outside the region where it applies. """


class ConfigError(SchrosymError):
    pass
