# Contains the numerical Fourier oracle used to cross-check the closed forms
import math

import numpy
import scipy.fft
import scipy.integrate
import scipy.signal
from loguru import logger

from errors import GridMismatch, InputError, NonFinite
from expfun import ExpPolyFunction, ExpPolyTerm, Support

logger.disable(__name__)

REFERENCE_T = 30.0
REFERENCE_N = 2 ** 14
# relative to the largest |sample|
JUMP_TOL = 1e-3
MIDPOINT_TOL = 0.1
# powers of 1/(iw + 1) removed from a truncated spectrum before inversion
TAIL_TERMS = 3


class Grid:
    """A uniform time grid on [-T, T) and its matching frequency grid

    Parameters
    ----------
    T : float, optional
        Half-width of the time window. Defaults to `REFERENCE_T`

    N : int, optional
        Number of samples, a power of two no smaller than 8. Defaults to `REFERENCE_N`

    Attributes
    ----------
    h : float
        Time step 2T/N

    times : ndarray
        t_k = -T + k h for k = 0..N-1

    frequencies : ndarray
        w_j = j pi/T for j = -N/2..N/2-1, so that the top frequency is the Nyquist pi/h
    """
    def __init__(self, T=REFERENCE_T, N=REFERENCE_N):
        if not numpy.isfinite(T) or T <= 0:
            raise InputError("grid half-width T must be positive, got {}".format(T))
        if int(N) != N or N < 8 or int(N) & (int(N) - 1):
            raise InputError("grid size N must be a power of two >= 8, got {}".format(N))
        self.T = float(T)
        self.N = int(N)
        self.h = 2 * self.T / self.N

    @classmethod
    def reference(cls):
        return cls(REFERENCE_T, REFERENCE_N)

    @property
    def times(self):
        return -self.T + numpy.arange(self.N) * self.h

    @property
    def frequencies(self):
        return (numpy.arange(self.N) - self.N // 2) * numpy.pi / self.T

    def __eq__(self, other):
        return isinstance(other, Grid) and self.T == other.T and self.N == other.N

    def __hash__(self):
        return hash((self.T, self.N))

    def to_dict(self):
        return {'T': self.T, 'N': self.N}

    def __repr__(self):
        return "Grid(T={}, N={})".format(self.T, self.N)


class SampledFunction:
    """Samples of a function on a grid, in time or in frequency

    Parameters
    ----------
    grid : Grid

    values : array_like
        N complex samples

    domain : {'time', 'frequency'}, optional
        Which axis of the grid the samples live on

    error : float, optional
        Estimated absolute error of the samples

    right_end : complex, optional
        The value at t = T, one step past the last sample, when it is known

    truncated : bool, optional
        The samples are point values of a continuous transform cut off at the Nyquist
        frequency, rather than the discrete transform of time samples
    """
    def __init__(self, grid, values, domain='time', error=0.0, right_end=None, truncated=False):
        values = numpy.asarray(values, dtype=complex)
        if values.shape != (grid.N,):
            raise InputError("expected {} samples, got shape {}".format(grid.N, values.shape))
        if not numpy.all(numpy.isfinite(values)):
            bad = int(numpy.flatnonzero(~numpy.isfinite(values))[0])
            raise NonFinite("sample {} is not finite".format(bad))
        if domain not in ('time', 'frequency'):
            raise InputError("unknown domain {!r}".format(domain))
        self.grid = grid
        self.values = values
        self.domain = domain
        self.error = float(error)
        self.right_end = None if right_end is None else complex(right_end)
        self.truncated = bool(truncated)

    @property
    def axis(self):
        return self.grid.times if self.domain == 'time' else self.grid.frequencies

    def _check(self, other):
        if self.grid != other.grid or self.domain != other.domain:
            raise GridMismatch("{} ({}) does not match {} ({})".format(self.grid, self.domain,
                                                                      other.grid, other.domain))

    def _combine(self, other, op):
        self._check(other)
        right_end = None
        if self.right_end is not None and other.right_end is not None:
            right_end = op(self.right_end, other.right_end)
        return SampledFunction(self.grid, op(self.values, other.values), self.domain,
                               self.error + other.error, right_end, self.truncated or other.truncated)

    def __add__(self, other):
        return self._combine(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a - b)

    def __mul__(self, other):
        if isinstance(other, SampledFunction):
            return self._combine(other, lambda a, b: a * b)
        scalar = complex(other)
        right_end = None if self.right_end is None else self.right_end * scalar
        return SampledFunction(self.grid, self.values * scalar, self.domain, self.error * abs(scalar), right_end,
                               self.truncated)

    __rmul__ = __mul__

    def __repr__(self):
        return "SampledFunction({!r}, domain={!r})".format(self.grid, self.domain)


def sample(f, grid):
    """Samples `f` on the time grid

    An ExpPolyFunction is evaluated with `eval_avg`, so a jump is sampled at the mean
    of its one-sided limits (e^(-t)u(t) gives 1/2 at t = 0). Plain callables are
    evaluated as they are.

    Parameters
    ----------
    f : ExpPolyFunction or callable

    grid : Grid

    Returns
    -------
    s : SampledFunction
    """
    times = grid.times
    if isinstance(f, ExpPolyFunction):
        values, right_end = f.eval_avg(times), f.eval_avg(grid.T)
    else:
        values, right_end = f(times), f(grid.T)
    values = numpy.broadcast_to(numpy.asarray(values, dtype=complex), times.shape)
    if not numpy.isfinite(right_end):
        raise NonFinite("value at t = T is not finite")
    return SampledFunction(grid, values, 'time', right_end=right_end)


def sample_spectrum(F, grid):
    """Samples a transform (a RationalFunction or any callable of w) on the frequency grid"""
    w = grid.frequencies
    return SampledFunction(grid, numpy.broadcast_to(numpy.asarray(F(w), dtype=complex), w.shape), 'frequency',
                           truncated=True)


def _alternating(n):
    return 1 - 2 * (numpy.arange(n) % 2)


def _transform(values, h, right_end):
    n = len(values)
    # (-1)^k moves t = -T to the origin, (-1)^(j - n/2) centres the spectrum
    phase = _alternating(n) * (-1) ** (n // 2)
    spectrum = h * phase * scipy.fft.fft(_alternating(n) * values)
    if right_end is not None:
        spectrum += 0.5 * h * (right_end - values[0]) * phase
    return spectrum


def ft_numeric(s):
    """FFT approximation of F(f)(w) = integral of e^(-iwt) f(t) dt

    The sum is the trapezoid rule on [-T, T] with the phase e^(i w T) of the grid
    offset applied. The error estimate compares against the same rule at step 2h on
    the band both resolutions share (Richardson, O(h^2)) and adds the boundary mass
    2T max(|f(-T)|, |f(T)|) as a truncation proxy.

    Parameters
    ----------
    s : SampledFunction
        Time samples

    Returns
    -------
    S : SampledFunction
        Frequency samples at w_j = j pi/T
    """
    if s.domain != 'time':
        raise GridMismatch("ft_numeric needs time samples")
    grid = s.grid
    spectrum = _transform(s.values, grid.h, s.right_end)
    coarse = _transform(s.values[::2], 2 * grid.h, s.right_end)
    band = slice(grid.N // 4, grid.N // 4 + grid.N // 2)
    richardson = numpy.max(numpy.abs(spectrum[band] - coarse)) / 3
    edge = max(abs(s.values[0]), abs(s.right_end) if s.right_end is not None else abs(s.values[-1]))
    error = float(richardson + 2 * grid.T * edge)
    logger.debug("ft_numeric on {}: error estimate {:.3g}", grid, error)
    return SampledFunction(grid, spectrum, 'frequency', error=error)


def _tail_fit(S):
    w = S.grid.frequencies
    band = numpy.abs(w) >= 0.5 * numpy.pi / S.grid.h
    coefficients = numpy.zeros(TAIL_TERMS, dtype=complex)
    if numpy.count_nonzero(band) < 2 * TAIL_TERMS or not numpy.any(S.values[band]):
        return coefficients
    basis = numpy.stack([(1j * w[band] + 1) ** -k for k in range(1, TAIL_TERMS + 1)], axis=1)
    scale = numpy.max(numpy.abs(basis), axis=0)
    coefficients[:] = numpy.linalg.lstsq(basis / scale, S.values[band], rcond=None)[0] / scale
    return coefficients


def ift_numeric(S):
    """Inverse of `ft_numeric`: f(t) = (1/2pi) integral of e^(iwt) F(w) dw on the frequency grid

    A truncated spectrum (see `sample_spectrum`) of a function that jumps at t = 0
    decays only like 1/w, and inverting it as it is rings around the jump. For such
    spectra the leading powers c_k/(iw + 1)^k are fitted on the upper half of the
    band and inverted in closed form as c_k t^(k-1)/(k-1)! e^(-t) u(t); only the
    remainder goes through the FFT. Discrete transforms from `ft_numeric` are
    inverted exactly.

    Parameters
    ----------
    S : SampledFunction
        Frequency samples

    Returns
    -------
    s : SampledFunction
        Time samples; a jump at 0 is sampled at the mean of its one-sided limits
    """
    if S.domain != 'frequency':
        raise GridMismatch("ift_numeric needs frequency samples")
    grid = S.grid
    n = grid.N
    spectrum, tail = S.values, None
    if S.truncated:
        coefficients = _tail_fit(S)
        if numpy.any(coefficients):
            w = grid.frequencies
            spectrum = spectrum - sum(c * (1j * w + 1) ** -(k + 1) for k, c in enumerate(coefficients))
            tail = ExpPolyFunction([ExpPolyTerm(c / math.factorial(k), k, -1, Support.pos())
                                    for k, c in enumerate(coefficients)])
            logger.debug("ift_numeric on {}: tail coefficients {}", grid, coefficients)
    phase = _alternating(n) * (-1) ** (n // 2)
    values = _alternating(n) * scipy.fft.ifft(phase * spectrum) / grid.h
    if tail is not None:
        values = values + tail.eval_avg(grid.times)
    return SampledFunction(grid, values, 'time', error=S.error / (2 * grid.T) * n)


def jump_sizes(s, tol=JUMP_TOL, breakpoints_only=True):
    """Jumps read off the samples of a piecewise smooth function

    At sample k the left limit is extrapolated quadratically from samples k-3..k-1
    and the right limit from k+1..k+3. Their difference counts as a jump when it
    exceeds `tol` times the largest |sample|.

    Parameters
    ----------
    s : SampledFunction
        Time samples

    tol : float, optional
        Relative threshold. Defaults to `JUMP_TOL`

    breakpoints_only : bool, optional
        Keep only samples lying at the mean of the two limits, which is how `sample`
        records a breakpoint on the grid. Without it the samples around a jump that
        falls between grid points are flagged as well.

    Returns
    -------
    sizes : ndarray
        Right limit minus left limit at the flagged samples, zero elsewhere
    """
    y = s.values
    n = len(y)
    sizes = numpy.zeros(n, dtype=complex)
    scale = numpy.max(numpy.abs(y)) if n else 0.0
    if n < 7 or scale == 0:
        return sizes
    left = 3 * y[2:n - 4] - 3 * y[1:n - 5] + y[0:n - 6]
    right = 3 * y[4:n - 2] - 3 * y[5:n - 1] + y[6:n]
    jump = right - left
    flagged = numpy.abs(jump) > tol * scale
    if breakpoints_only:
        flagged &= numpy.abs(y[3:n - 3] - 0.5 * (left + right)) <= MIDPOINT_TOL * numpy.abs(jump)
    sizes[3:n - 3] = numpy.where(flagged, jump, 0)
    return sizes


def conv_numeric(a, b):
    """Linear convolution h sum_k a(t - t_k) b(t_k) on the common grid

    Where a breakpoint of `a` and one of `b` meet in the sum, the product of the two
    sampled means is replaced by the mean of the integrand's one-sided limits, which
    takes (h/4) J_a J_b off that output sample.

    Parameters
    ----------
    a, b : SampledFunction
        Time samples on the same grid

    Returns
    -------
    c : SampledFunction
        The central N samples of the zero-padded convolution
    """
    a._check(b)
    if a.domain != 'time':
        raise GridMismatch("conv_numeric needs time samples")
    grid = a.grid
    full = scipy.signal.fftconvolve(a.values, b.values, mode='full')
    jumps_a, jumps_b = jump_sizes(a), jump_sizes(b)
    ia, ib = numpy.flatnonzero(jumps_a), numpy.flatnonzero(jumps_b)
    if len(ia) and len(ib):
        numpy.add.at(full, numpy.add.outer(ia, ib).ravel(),
                     -0.25 * numpy.multiply.outer(jumps_a[ia], jumps_b[ib]).ravel())
    start = grid.N // 2
    return SampledFunction(grid, grid.h * full[start:start + grid.N], 'time')


def l1_norm_numeric(s):
    """Composite trapezoid rule of |f| over [-T, T]; no tail term"""
    values = numpy.abs(s.values)
    if s.right_end is not None:
        values = numpy.append(values, abs(s.right_end))
    return float(scipy.integrate.trapezoid(values, dx=s.grid.h))


def cumulative_integral(s):
    """Samples of (f * u)(t), the integral of f over (-inf, t], taken from -T"""
    if s.domain != 'time':
        raise GridMismatch("cumulative_integral needs time samples")
    values = scipy.integrate.cumulative_trapezoid(s.values, dx=s.grid.h, initial=0)
    right_end = None
    if s.right_end is not None:
        right_end = values[-1] + 0.5 * s.grid.h * (s.values[-1] + s.right_end)
    return SampledFunction(s.grid, values, 'time', right_end=right_end)


def sup_error(a, b, window=None, exclude=0.0):
    """Largest |a - b| over the samples

    Parameters
    ----------
    a, b : SampledFunction

    window : tuple of float, optional
        Only samples with window[0] <= x <= window[1] count

    exclude : float, optional
        Samples with |x| < exclude are skipped (the neighbourhood of a jump at 0)
    """
    a._check(b)
    x = a.axis
    mask = numpy.abs(x) >= exclude
    if window is not None:
        mask &= (x >= window[0]) & (x <= window[1])
    if not numpy.any(mask):
        return 0.0
    return float(numpy.max(numpy.abs(a.values[mask] - b.values[mask])))
