# Contains the error classes raised by the library and their exit codes


class HyersUlamError(ValueError):
    """Base class of every error raised by the library

    Attributes
    ----------
    exit_code : int
        The exit code the command line reports for this class of error
    """
    exit_code = 1


class InputError(HyersUlamError):
    """A file, flag or argument could not be parsed or is out of range"""


class DegreeError(HyersUlamError):
    """A polynomial of degree zero was given where an equation of order n >= 1 is needed"""


class NonConvergence(HyersUlamError):
    """The simultaneous root iteration did not converge"""


class IllConditioned(HyersUlamError):
    """The partial fraction residues do not recombine to 1/p

    Parameters
    ----------
    message : str
        Description of the failure

    error : float
        The recombination error that was measured
    """
    def __init__(self, message, error):
        super().__init__(message)
        self.error = error


class NotARoot(HyersUlamError):
    """Synthetic division left a remainder that is too large

    Parameters
    ----------
    message : str
        Description of the failure

    remainder : complex
        The discarded remainder
    """
    def __init__(self, message, remainder):
        super().__init__(message)
        self.remainder = remainder


class NotIntegrable(HyersUlamError):
    """A term of an exponential-polynomial function is not in L1"""


class UnsupportedSupport(HyersUlamError):
    """The closed-form transform was asked for a term that is not on a half-line at zero"""


class NonFinite(HyersUlamError):
    """Sampling produced a value that is not finite"""


class GridMismatch(HyersUlamError):
    """Two sampled functions do not live on the same grid"""


class NotHyperbolic(HyersUlamError):
    """The characteristic polynomial has a root on (or too close to) the imaginary axis

    Parameters
    ----------
    message : str
        Description of the failure

    witness : complex
        The offending root
    """
    exit_code = 2

    def __init__(self, message, witness):
        super().__init__(message)
        self.witness = witness


class ExcessJumps(HyersUlamError):
    """A candidate solution jumps in a derivative of order below n - 1

    Parameters
    ----------
    message : str
        Description of the failure

    jumps : list
        The offending jump records
    """
    exit_code = 4

    def __init__(self, message, jumps):
        super().__init__(message)
        self.jumps = jumps


# Not an exception: a report that fails the bound exits with this code
BOUND_VIOLATED_EXIT_CODE = 3
