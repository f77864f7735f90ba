# Contains the closed-form algebra of exponential-polynomial functions
import dataclasses
import math

import numpy
import numpy.polynomial
import scipy.integrate
import scipy.special
from loguru import logger

from errors import InputError, NotIntegrable, UnsupportedSupport
from poly import Poly

logger.disable(__name__)

TIE_TOL = 1e-12
MERGE_TOL = 1e-12
JUMP_TOL = 1e-12
TAIL_TOL = 1e-13
QUAD_RTOL = 1e-12
NORM_RTOL = 1e-9

_INF = float('inf')


@dataclasses.dataclass(frozen=True)
class Support:
    """A closed, half-open or open interval of the real line

    Infinite ends are always stored as closed so that equal sets compare equal.
    """
    lo: float = -_INF
    hi: float = _INF
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if not lo < hi:
            raise InputError("support needs lo < hi, got [{}, {}]".format(lo, hi))
        object.__setattr__(self, 'lo', lo)
        object.__setattr__(self, 'hi', hi)
        object.__setattr__(self, 'lo_closed', bool(self.lo_closed) or lo == -_INF)
        object.__setattr__(self, 'hi_closed', bool(self.hi_closed) or hi == _INF)

    @classmethod
    def pos(cls):
        return cls(0.0, _INF)

    @classmethod
    def neg(cls):
        return cls(-_INF, 0.0)

    @classmethod
    def interval(cls, a, b):
        return cls(a, b)

    @classmethod
    def whole(cls):
        return cls()

    @property
    def kind(self):
        """One of pos, neg, whole, interval, halfline; closedness of the ends is ignored"""
        if self.lo == 0 and self.hi == _INF:
            return 'pos'
        if self.lo == -_INF and self.hi == 0:
            return 'neg'
        if self.lo == -_INF and self.hi == _INF:
            return 'whole'
        if numpy.isfinite(self.lo) and numpy.isfinite(self.hi):
            return 'interval'
        return 'halfline'

    @property
    def bounded(self):
        return numpy.isfinite(self.lo) and numpy.isfinite(self.hi)

    def contains(self, t):
        t = numpy.asarray(t, dtype=float)
        left = (t > self.lo) | (self.lo_closed & (t == self.lo))
        right = (t < self.hi) | (self.hi_closed & (t == self.hi))
        return left & right

    def covers(self, a, b):
        """`True` if the open interval (a, b) lies inside the support"""
        return self.lo <= a and b <= self.hi

    def shifted(self, t0):
        return Support(self.lo + t0, self.hi + t0, self.lo_closed, self.hi_closed)

    def reflected(self):
        return Support(-self.hi, -self.lo, self.hi_closed, self.lo_closed)

    def key(self):
        return self.lo, self.hi, self.lo_closed, self.hi_closed

    def to_json(self):
        kind = self.kind
        closed = self.lo_closed and self.hi_closed
        if kind == 'whole' or (kind in ('pos', 'neg') and closed):
            return kind
        if kind == 'interval':
            out = {'interval': [self.lo, self.hi]}
        elif self.hi == _INF:
            out = {'from': self.lo}
        else:
            out = {'to': self.hi}
        if not (self.lo_closed and self.hi_closed):
            out['closed'] = [self.lo_closed, self.hi_closed]
        return out

    @classmethod
    def from_json(cls, value):
        if value == 'pos':
            return cls.pos()
        if value == 'neg':
            return cls.neg()
        if value == 'whole':
            return cls.whole()
        if not isinstance(value, dict):
            raise InputError("unknown support {!r}".format(value))
        lo_closed, hi_closed = value.get('closed', [True, True])
        if 'interval' in value:
            a, b = value['interval']
            return cls(a, b, lo_closed, hi_closed)
        if 'from' in value:
            return cls(value['from'], _INF, lo_closed, True)
        if 'to' in value:
            return cls(-_INF, value['to'], True, hi_closed)
        raise InputError("unknown support {!r}".format(value))


@dataclasses.dataclass(frozen=True)
class Jump:
    """A discontinuity of a function (order 0) or of one of its derivatives

    Attributes
    ----------
    location : float
        Where the jump happens

    size : complex
        Right limit minus left limit

    order : int
        Which derivative jumps
    """
    location: float
    size: complex
    order: int = 0

    def to_dict(self):
        return {'location': self.location, 'size': [self.size.real, self.size.imag], 'order': self.order}


@dataclasses.dataclass(frozen=True)
class ExpPolyTerm:
    """The term c * t^m * e^(z t) restricted to `support`"""
    c: complex
    m: int
    z: complex
    support: Support

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 0:
            raise InputError("the power of t must be a nonnegative integer, got {}".format(self.m))
        object.__setattr__(self, 'c', complex(self.c))
        object.__setattr__(self, 'm', int(self.m))
        object.__setattr__(self, 'z', complex(self.z))

    @property
    def integrable(self):
        s = self.support
        if s.bounded:
            return True
        if s.hi == _INF and numpy.isfinite(s.lo):
            return self.z.real < 0
        if s.lo == -_INF and numpy.isfinite(s.hi):
            return self.z.real > 0
        return False

    def raw(self, t):
        """The term's formula, ignoring the support"""
        t = numpy.asarray(t, dtype=float)
        return self.c * t ** self.m * numpy.exp(self.z * t)

    def _masked(self, t, mask):
        t = numpy.asarray(t, dtype=float)
        out = numpy.zeros(t.shape, dtype=complex)
        if numpy.any(mask):
            out[mask] = self.raw(t[mask])
        return out

    def __call__(self, t):
        return self._masked(t, self.support.contains(t))

    def right_limit(self, t):
        t = numpy.asarray(t, dtype=float)
        return self._masked(t, (t >= self.support.lo) & (t < self.support.hi))

    def left_limit(self, t):
        t = numpy.asarray(t, dtype=float)
        return self._masked(t, (t > self.support.lo) & (t <= self.support.hi))

    def derivative_terms(self):
        terms = [ExpPolyTerm(self.c * self.z, self.m, self.z, self.support)]
        if self.m > 0:
            terms.append(ExpPolyTerm(self.c * self.m, self.m - 1, self.z, self.support))
        return terms

    def closed_form_norm(self):
        """The L1 norm for a term on a half-line at zero, ``None`` otherwise"""
        if self.support.kind not in ('pos', 'neg') or not self.integrable:
            return None
        return abs(self.c) * math.factorial(self.m) / abs(self.z.real) ** (self.m + 1)

    def to_dict(self):
        out = {'c': [self.c.real, self.c.imag], 'm': self.m, 'z': [self.z.real, self.z.imag],
               'support': self.support.to_json()}
        return out

    @classmethod
    def from_dict(cls, d):
        try:
            c, m, z = complex(*d['c']), d['m'], complex(*d['z'])
            support = Support.from_json(d['support'])
        except (KeyError, TypeError, ValueError) as e:
            raise InputError("malformed term {!r}: {}".format(d, e)) from e
        return cls(c, m, z, support)


def _term_sort_key(term):
    return term.support.key() + (term.m, term.z.real, term.z.imag)


def _canonical(terms):
    merged = []
    for term in terms:
        for k, other in enumerate(merged):
            if (other.m == term.m and other.support == term.support
                    and abs(other.z - term.z) <= MERGE_TOL):
                merged[k] = dataclasses.replace(other, c=other.c + term.c)
                break
        else:
            merged.append(term)
    return tuple(sorted((t for t in merged if t.c != 0), key=_term_sort_key))


class ExpPolyFunction:
    """A finite sum of exponential-polynomial terms

    Parameters
    ----------
    terms : iterable of ExpPolyTerm
        The terms, merged into canonical form

    integrable : bool, optional
        If `True` every term must be in L1 (the constructor for L1 contexts).
        Defaults to `False`

    Attributes
    ----------
    terms : tuple of ExpPolyTerm
        Canonical terms: identical (m, z, support) merged, zero amplitudes dropped
    """
    def __init__(self, terms=(), integrable=False):
        self.terms = _canonical(terms)
        if integrable:
            _require_integrable(self)

    @classmethod
    def single(cls, c, m, z, support):
        return cls([ExpPolyTerm(c, m, z, support)])

    @property
    def integrable(self):
        return all(t.integrable for t in self.terms)

    def is_zero(self):
        return not self.terms

    def __call__(self, t):
        t = numpy.asarray(t, dtype=float)
        total = numpy.zeros(t.shape, dtype=complex)
        for term in self.terms:
            total += term(t)
        return total[()] if total.ndim == 0 else total

    def right_limit(self, t):
        t = numpy.asarray(t, dtype=float)
        return sum((term.right_limit(t) for term in self.terms), numpy.zeros(t.shape, dtype=complex))

    def left_limit(self, t):
        t = numpy.asarray(t, dtype=float)
        return sum((term.left_limit(t) for term in self.terms), numpy.zeros(t.shape, dtype=complex))

    def eval_avg(self, t):
        """Mean of the one-sided limits, the value the inversion theorem gives at a jump"""
        value = 0.5 * (self.left_limit(t) + self.right_limit(t))
        return value[()] if value.ndim == 0 else value

    def breakpoints(self):
        points = set()
        for term in self.terms:
            points.update(p for p in (term.support.lo, term.support.hi) if numpy.isfinite(p))
        return sorted(points)

    def jumps(self):
        """The discontinuities of the function

        Returns
        -------
        jumps : tuple of Jump
            Jumps whose size is not negligible against the one-sided contributions
        """
        found = []
        for b in self.breakpoints():
            contributions = [term.right_limit(b) - term.left_limit(b) for term in self.terms]
            size = complex(sum(contributions))
            magnitude = sum(abs(c) for c in contributions)
            if magnitude > 0 and abs(size) > JUMP_TOL * magnitude:
                found.append(Jump(b, size))
        return tuple(found)

    def derivative(self):
        """The classical derivative and the jumps of the function

        Returns
        -------
        derivative : ExpPolyFunction
            Termwise derivative on the same supports

        jumps : tuple of Jump
            The distributional part, kept out of the function
        """
        terms = [d for term in self.terms for d in term.derivative_terms()]
        return ExpPolyFunction(terms), self.jumps()

    def __add__(self, other):
        if not isinstance(other, ExpPolyFunction):
            return NotImplemented
        return ExpPolyFunction(self.terms + other.terms)

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        if isinstance(scalar, ExpPolyFunction):
            return NotImplemented
        return ExpPolyFunction(dataclasses.replace(t, c=t.c * complex(scalar)) for t in self.terms)

    __rmul__ = __mul__

    def modulate(self, w0):
        """Multiplies by e^(i w0 t)"""
        return ExpPolyFunction(dataclasses.replace(t, z=t.z + 1j * w0) for t in self.terms)

    def multiply_by_t(self):
        return ExpPolyFunction(dataclasses.replace(t, m=t.m + 1) for t in self.terms)

    def reflect(self):
        """Returns f(-t)"""
        return ExpPolyFunction(ExpPolyTerm(t.c * (-1) ** t.m, t.m, -t.z, t.support.reflected())
                               for t in self.terms)

    def shift(self, t0):
        """Returns f(t - t0)"""
        terms = []
        for t in self.terms:
            scale = t.c * numpy.exp(-t.z * t0)
            for k in range(t.m + 1):
                terms.append(ExpPolyTerm(scale * math.comb(t.m, k) * (-t0) ** (t.m - k), k, t.z,
                                         t.support.shifted(t0)))
        return ExpPolyFunction(terms)

    def conjugate(self):
        return ExpPolyFunction(ExpPolyTerm(t.c.conjugate(), t.m, t.z.conjugate(), t.support) for t in self.terms)

    def max_abs_coefficient(self):
        return max((abs(t.c) for t in self.terms), default=0.0)

    def to_dict(self):
        return {'terms': [t.to_dict() for t in self.terms]}

    @classmethod
    def from_dict(cls, d, integrable=False):
        if not isinstance(d, dict) or not isinstance(d.get('terms'), list):
            raise InputError("function JSON needs a 'terms' list")
        return cls([ExpPolyTerm.from_dict(t) for t in d['terms']], integrable=integrable)

    def __repr__(self):
        return "ExpPolyFunction({})".format(list(self.terms))


def _require_integrable(f):
    bad = [t for t in f.terms if not t.integrable]
    if bad:
        raise NotIntegrable("terms not in L1: {}".format(bad))


class RationalFunction:
    """A ratio of polynomials in the transform variable w

    Parameters
    ----------
    numerator : Poly

    denominator : Poly
        Not identically zero
    """
    def __init__(self, numerator, denominator):
        if denominator.is_zero():
            raise InputError("rational function with zero denominator")
        self.numerator = numerator
        self.denominator = denominator

    def __call__(self, w):
        return self.numerator(w) / self.denominator(w)

    def __mul__(self, other):
        if isinstance(other, RationalFunction):
            return RationalFunction(self.numerator * other.numerator, self.denominator * other.denominator)
        if isinstance(other, Poly):
            return RationalFunction(self.numerator * other, self.denominator)
        return RationalFunction(self.numerator * complex(other), self.denominator)

    __rmul__ = __mul__

    def substitute_shift(self, w0):
        """Returns F(w - w0)"""
        return RationalFunction(self.numerator.compose_shift(-w0), self.denominator.compose_shift(-w0))

    def derivative(self):
        n, d = self.numerator, self.denominator
        return RationalFunction(n.derivative() * d - n * d.derivative(), d * d)

    def cross_error(self, other):
        """Coefficient error of the cross-multiplied comparison, relative to the larger side"""
        left = self.numerator * other.denominator
        right = other.numerator * self.denominator
        size = max(left.scale, right.scale, 1e-300)
        n = max(len(left.coeffs), len(right.coeffs))
        diff = numpy.pad(left.coeffs, (0, n - len(left.coeffs))) - numpy.pad(right.coeffs, (0, n - len(right.coeffs)))
        return float(numpy.max(numpy.abs(diff)) / size)

    def equals(self, other, rtol=1e-10):
        return self.cross_error(other) <= rtol

    def __repr__(self):
        return "RationalFunction({!r}, {!r})".format(self.numerator, self.denominator)


def evaluate(f, t):
    """Evaluates `f` at `t`; terms count at their (closed) support boundaries"""
    return f(t)


def eval_avg(f, t):
    return f.eval_avg(t)


def derivative(f):
    return f.derivative()


def _tail_bound(terms, T):
    """Bound on the integral of |f| over |t| > T"""
    total = 0.0
    for term in terms:
        s = term.support
        a = abs(term.z.real)
        if s.hi == _INF and s.lo < T:
            start = max(T, s.lo)
        elif s.lo == -_INF and s.hi > -T:
            start = max(T, -s.hi)
        else:
            continue
        if start <= 0:
            continue
        # integral of t^m e^(-a t) over [start, inf)
        total += abs(term.c) * scipy.special.gammaincc(term.m + 1, a * start) * math.factorial(term.m) / a ** (term.m + 1)
    return total


def _norm_scale(terms):
    scale = 0.0
    for term in terms:
        if term.support.bounded:
            edge = max(abs(term.support.lo), abs(term.support.hi))
            width = term.support.hi - term.support.lo
            scale += abs(term.c) * width * max(1.0, edge) ** term.m * numpy.exp(max(term.z.real * term.support.lo,
                                                                                   term.z.real * term.support.hi))
        else:
            anchor = term.support.lo if numpy.isfinite(term.support.lo) else term.support.hi
            shifted = ExpPolyTerm(term.c * numpy.exp(term.z.real * anchor), term.m, term.z,
                                  Support.pos() if term.support.hi == _INF else Support.neg())
            scale += shifted.closed_form_norm() * max(1.0, abs(anchor)) ** term.m
    return scale


def l1_norm_estimate(f, tail_tol=TAIL_TOL, rtol=QUAD_RTOL):
    """The L1 norm of `f` with an error estimate

    A single term on a half-line at zero uses m!/|Re z|^(m+1); anything else is
    integrated with adaptive Gauss-Kronrod quadrature (QUADPACK) between the
    breakpoints on [-T, T], T chosen so the exponential tails are below `tail_tol`
    relative to the size of `f`.

    Parameters
    ----------
    f : ExpPolyFunction
        An integrable function

    tail_tol : float, optional
        Relative tail bound

    rtol : float, optional
        Relative quadrature tolerance per segment

    Returns
    -------
    norm : float

    error : float
        Quadrature error estimate plus the tail bound
    """
    _require_integrable(f)
    if f.is_zero():
        return 0.0, 0.0
    if len(f.terms) == 1:
        closed = f.terms[0].closed_form_norm()
        if closed is not None:
            return closed, 4 * numpy.finfo(float).eps * closed

    terms = f.terms
    scale = _norm_scale(terms)
    target = tail_tol * scale
    points = f.breakpoints()
    T = max([1.0] + [abs(p) for p in points])
    for _ in range(200):
        if _tail_bound(terms, T) <= target:
            break
        T *= 1.5
    tail = _tail_bound(terms, T)

    lo = min([p for p in points] + [-T]) if any(t.support.lo == -_INF for t in terms) else min(points)
    hi = max([p for p in points] + [T]) if any(t.support.hi == _INF for t in terms) else max(points)
    edges = sorted(set([lo, hi] + [p for p in points if lo < p < hi]))

    rates = [abs(t.z.real) for t in terms if abs(t.z.real) > 0]
    max_piece = 10.0 / min(rates) if rates else _INF

    total, error, segments = 0.0, tail, 0
    for a, b in zip(edges[:-1], edges[1:]):
        active = [t for t in terms if t.support.covers(a, b)]
        if not active:
            continue
        c = numpy.array([t.c for t in active])
        m = numpy.array([t.m for t in active])
        z = numpy.array([t.z for t in active])

        def integrand(t):
            return abs(numpy.sum(c * t ** m * numpy.exp(z * t)))

        pieces = int(min(64, max(1, numpy.ceil((b - a) / max_piece))))
        cuts = numpy.linspace(a, b, pieces + 1)
        for u, v in zip(cuts[:-1], cuts[1:]):
            value, err = scipy.integrate.quad(integrand, u, v, epsabs=1e-16 * scale, epsrel=rtol, limit=200)
            total += value
            error += err
            segments += 1

    logger.debug("L1 norm over [{:.4g}, {:.4g}] in {} segments: {:.12g} +- {:.2g}", lo, hi, segments, total, error)
    if error > NORM_RTOL * max(total, 1e-300):
        logger.warning("L1 norm error estimate {:.2g} exceeds the relative target for norm {:.6g}", error, total)
    return total, error


def l1_norm(f, **kwargs):
    """The L1 norm of an integrable exponential-polynomial function"""
    return l1_norm_estimate(f, **kwargs)[0]


def _antiderivative(j, delta, resonant):
    """Polynomial P with d/dx[e^(delta x) P(x)] = x^j (or x^(j+1)/(j+1) when resonant)"""
    if resonant:
        coef = numpy.zeros(j + 2, dtype=complex)
        coef[j + 1] = 1.0 / (j + 1)
        return numpy.polynomial.Polynomial(coef)
    coef = numpy.zeros(j + 1, dtype=complex)
    for r in range(j + 1):
        coef[j - r] = (-1) ** r * math.factorial(j) / math.factorial(j - r) / delta ** (r + 1)
    return numpy.polynomial.Polynomial(coef)


def _add_poly(collected, exponent, poly):
    for k, (z, existing) in enumerate(collected):
        if abs(z - exponent) <= MERGE_TOL:
            collected[k] = (z, existing + poly)
            return
    collected.append((exponent, poly))


def _convolve_terms(A, B):
    alpha, beta = A.z, B.z
    delta = beta - alpha
    resonant = abs(delta) <= TIE_TOL
    a1, a2 = A.support.lo, A.support.hi
    b1, b2 = B.support.lo, B.support.hi

    with numpy.errstate(invalid='ignore'):
        candidates = numpy.array([a1 + b1, a1 + b2, a2 + b1, a2 + b2])
    breaks = sorted(set(float(c) for c in candidates if numpy.isfinite(c)))
    start, stop = a1 + b1, a2 + b2
    edges = [start] + [b for b in breaks if start < b < stop] + [stop]
    t_var = numpy.polynomial.Polynomial([0, 1])

    antiderivatives = {}

    def F(j):
        if j not in antiderivatives:
            antiderivatives[j] = _antiderivative(j, delta, resonant)
        return antiderivatives[j]

    terms = []
    for piece, (lo, hi) in enumerate(zip(edges[:-1], edges[1:])):
        if lo == -_INF and hi == _INF:
            probe = 0.0
        elif lo == -_INF:
            probe = hi - 1.0
        elif hi == _INF:
            probe = lo + 1.0
        else:
            probe = 0.5 * (lo + hi)
        lower = max(b1, probe - a2)
        upper = min(b2, probe - a1)
        if not lower < upper:
            continue
        # x runs over [max(b1, t - a2), min(b2, t - a1)]
        lower_const = b1 >= probe - a2
        upper_const = b2 <= probe - a1

        collected = []
        for k in range(A.m + 1):
            weight = A.c * B.c * math.comb(A.m, k) * (-1) ** k
            t_power = numpy.polynomial.Polynomial([0] * (A.m - k) + [1])
            P = F(B.m + k)
            for sign, is_const, value, shift in ((1, upper_const, b2, a1), (-1, lower_const, b1, a2)):
                if is_const:
                    if not numpy.isfinite(value):
                        continue
                    K = P(value) * (1.0 if resonant else numpy.exp(delta * value))
                    _add_poly(collected, alpha, sign * weight * K * t_power)
                else:
                    # x = t - shift
                    composed = P(t_var - shift)
                    if resonant:
                        _add_poly(collected, alpha, sign * weight * t_power * composed)
                    else:
                        factor = numpy.exp(-delta * shift)
                        _add_poly(collected, beta, sign * weight * factor * t_power * composed)

        support = Support(lo, hi, True, piece == len(edges) - 2)
        for exponent, poly in collected:
            for power, coefficient in enumerate(poly.coef):
                if coefficient != 0:
                    terms.append(ExpPolyTerm(coefficient, power, exponent, support))
    return terms


def convolve(f, g):
    """Closed-form convolution (f * g)(t) = integral of f(t - x) g(x) dx

    Parameters
    ----------
    f, g : ExpPolyFunction
        Integrable functions

    Returns
    -------
    h : ExpPolyFunction
        Piecewise exponential-polynomial, pieces split at the sums of support ends
    """
    _require_integrable(f)
    _require_integrable(g)
    terms = []
    for A in f.terms:
        for B in g.terms:
            terms.extend(_convolve_terms(A, B))
    return ExpPolyFunction(terms)


def _iw_minus(z):
    return Poly([-complex(z), 1j])


def fourier_transform(f):
    """The exact transform of `f` as a rational function of w

    Uses F(t^m e^(zt) u(t))(w) = m!/(iw - z)^(m+1) for Re z < 0 and
    F(t^m e^(zt) u(-t))(w) = -m!/(iw - z)^(m+1) for Re z > 0.

    Parameters
    ----------
    f : ExpPolyFunction
        Integrable, every term on the half-line t >= 0 or t <= 0

    Returns
    -------
    F : RationalFunction
    """
    _require_integrable(f)
    groups = []
    for term in f.terms:
        kind = term.support.kind
        if kind not in ('pos', 'neg'):
            raise UnsupportedSupport("closed-form transform needs supports t >= 0 or t <= 0, got {}"
                                     .format(term.support))
        sign = 1.0 if kind == 'pos' else -1.0
        for group in groups:
            if abs(group[0] - term.z) <= MERGE_TOL:
                group[1].append((term.m, sign * term.c * math.factorial(term.m)))
                break
        else:
            groups.append((term.z, [(term.m, sign * term.c * math.factorial(term.m))]))

    if not groups:
        return RationalFunction(Poly([0]), Poly([1]))

    powers = [max(m for m, _ in entries) + 1 for _, entries in groups]
    denominator = Poly([1])
    for (z, _), power in zip(groups, powers):
        denominator = denominator * _iw_minus(z) ** power

    numerator = Poly([0])
    for i, (z, entries) in enumerate(groups):
        others = Poly([1])
        for k, ((z_other, _), power) in enumerate(zip(groups, powers)):
            if k != i:
                others = others * _iw_minus(z_other) ** power
        for m, weight in entries:
            numerator = numerator + others * _iw_minus(z) ** (powers[i] - m - 1) * weight
    return RationalFunction(numerator, denominator)


def apply_ode_operator(p, y):
    """Applies sum p_k d^k/dt^k to `y`

    Parameters
    ----------
    p : Poly
        The characteristic polynomial, its leading coefficient multiplies y^(n)

    y : ExpPolyFunction

    Returns
    -------
    value : ExpPolyFunction
        The classical part

    jumps : tuple of Jump
        Jumps of y^(k) for k = 0..n-1, tagged with their order
    """
    result = ExpPolyFunction()
    jumps = []
    current = y
    for k, coefficient in enumerate(p.coeffs):
        if k > 0:
            current, found = current.derivative()
            jumps.extend(dataclasses.replace(j, order=k - 1) for j in found)
        if coefficient != 0:
            result = result + current * coefficient
    return result, tuple(jumps)
