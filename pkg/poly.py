# Contains complex polynomial arithmetic, root finding and partial fractions
import numpy
import numpy.polynomial
from loguru import logger

from errors import DegreeError, IllConditioned, InputError, NonConvergence, NotARoot

logger.disable(__name__)

CLUSTER_TOL = 1e-6
ROOT_RESIDUAL_TOL = 1e-8
DEFLATION_TOL = 1e-6
RECOMBINATION_TOL = 1e-8
MAX_ITER = 200
MAX_RESTARTS = 5

_EPS = numpy.finfo(float).eps


class Poly:
    """A polynomial with complex coefficients

    Parameters
    ----------
    coeffs : array_like
        Coefficients in ascending degree.
        Trailing (leading-degree) zeros are trimmed, the zero polynomial is kept as ``[0]``

    Attributes
    ----------
    coeffs : numpy.ndarray
        Read-only complex coefficients, ascending degree
    """
    def __init__(self, coeffs):
        coeffs = numpy.atleast_1d(numpy.array(coeffs, dtype=complex))
        if coeffs.ndim != 1 or coeffs.size == 0:
            raise InputError("polynomial coefficients must be a non-empty 1d sequence")
        if not numpy.all(numpy.isfinite(coeffs)):
            raise InputError("polynomial coefficients must be finite")
        nonzero = numpy.flatnonzero(coeffs)
        coeffs = coeffs[:nonzero[-1] + 1] if nonzero.size else coeffs[:1]
        coeffs.setflags(write=False)
        self.coeffs = coeffs

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def lead(self):
        return complex(self.coeffs[-1])

    @property
    def scale(self):
        """Largest coefficient magnitude, used for relative tolerances"""
        return float(numpy.max(numpy.abs(self.coeffs)))

    def is_zero(self):
        return self.degree == 0 and self.coeffs[0] == 0

    def __call__(self, z):
        # Horner
        z = numpy.asarray(z, dtype=complex)
        result = numpy.zeros_like(z)
        for c in self.coeffs[::-1]:
            result = result * z + c
        return result[()] if result.ndim == 0 else result

    def monic(self):
        """Divides out the leading coefficient

        Returns
        -------
        monic : Poly
            The monic polynomial

        lead : complex
            The leading coefficient that was divided out
        """
        if self.is_zero():
            raise InputError("the zero polynomial has no monic form")
        return Poly(self.coeffs / self.lead), self.lead

    def derivative(self, order=1):
        coeffs = self.coeffs
        for _ in range(order):
            if len(coeffs) == 1:
                return Poly([0])
            coeffs = coeffs[1:] * numpy.arange(1, len(coeffs))
        return Poly(coeffs)

    def compose_scale(self, c):
        """Returns p(c*z)"""
        return Poly(self.coeffs * complex(c) ** numpy.arange(len(self.coeffs)))

    def compose_shift(self, a):
        """Returns p(z + a), i.e. the Taylor coefficients of p about `a`"""
        shifted = numpy.polynomial.Polynomial(self.coeffs)(numpy.polynomial.Polynomial([complex(a), 1]))
        return Poly(shifted.coef)

    def coefficient_error(self, other):
        """Largest coefficient difference relative to max(1, scale of `self`)"""
        n = max(len(self.coeffs), len(other.coeffs))
        a = numpy.pad(self.coeffs, (0, n - len(self.coeffs)))
        b = numpy.pad(other.coeffs, (0, n - len(other.coeffs)))
        return float(numpy.max(numpy.abs(a - b)) / max(1.0, self.scale))

    def __add__(self, other):
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly(numpy.pad(self.coeffs, (0, n - len(self.coeffs)))
                    + numpy.pad(other.coeffs, (0, n - len(other.coeffs))))

    __radd__ = __add__

    def __neg__(self):
        return Poly(-self.coeffs)

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        if isinstance(other, Poly):
            return Poly(numpy.convolve(self.coeffs, other.coeffs))
        return Poly(self.coeffs * complex(other))

    __rmul__ = __mul__

    def __pow__(self, k):
        result = Poly([1])
        for _ in range(int(k)):
            result = result * self
        return result

    def __repr__(self):
        return "Poly({})".format(list(self.coeffs))


def _as_poly(value):
    return value if isinstance(value, Poly) else Poly([value])


class RootMultiset:
    """The distinct roots of a polynomial with their multiplicities

    Parameters
    ----------
    entries : iterable of (complex, int)
        Pairs of root and multiplicity

    scale : float
        Largest coefficient magnitude of the (monic) source polynomial

    Attributes
    ----------
    entries : tuple of (complex, int)
        Pairs of root and multiplicity

    scale : float
        Largest coefficient magnitude of the source polynomial
    """
    def __init__(self, entries, scale=1.0):
        self.entries = tuple((complex(r), int(m)) for r, m in entries)
        if any(m < 1 for _, m in self.entries):
            raise InputError("root multiplicities must be positive")
        self.scale = float(scale)

    @property
    def degree(self):
        return sum(m for _, m in self.entries)

    @property
    def roots(self):
        return [r for r, _ in self.entries]

    def multiplicity(self, root, tol=1e-8):
        for r, m in self.entries:
            if abs(r - root) <= tol * max(1.0, abs(root)):
                return m
        return 0

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def expand(self):
        return expand(self.entries)

    def __repr__(self):
        return "RootMultiset({})".format(list(self.entries))


class PartialFractions:
    """The residue table of 1/p

    Parameters
    ----------
    terms : iterable of (complex, int, complex)
        Triples of root w_i, order j and coefficient lambda_ij

    Attributes
    ----------
    terms : tuple of (complex, int, complex)
        Triples of root, order and coefficient, every order 1..multiplicity present per root

    error : float
        Recombination error measured when the table was built (``nan`` if never checked)
    """
    def __init__(self, terms, error=float('nan')):
        self.terms = tuple((complex(r), int(j), complex(lam)) for r, j, lam in terms)
        self.error = error

    def __call__(self, w):
        w = numpy.asarray(w, dtype=complex)
        return sum(lam / (w - r) ** j for r, j, lam in self.terms)

    def __iter__(self):
        return iter(self.terms)

    def coefficient(self, root, order, tol=1e-8):
        for r, j, lam in self.terms:
            if j == order and abs(r - root) <= tol * max(1.0, abs(root)):
                return lam
        raise KeyError((root, order))

    def multiplicities(self):
        orders = {}
        for r, j, _ in self.terms:
            orders[r] = max(orders.get(r, 0), j)
        return orders

    def recombine(self, lead=1.0):
        """Returns sum lambda_ij * p(w)/(w - w_i)^j as a polynomial (ideally the constant 1)

        Parameters
        ----------
        lead : complex, optional
            Leading coefficient of p.
            Defaults to 1
        """
        multiplicities = self.multiplicities()
        total = Poly([0])
        for r, j, lam in self.terms:
            others = expand([(s, m) for s, m in multiplicities.items() if s != r])
            total = total + others * expand([(r, multiplicities[r] - j)]) * (lam * lead)
        return total

    def recombination_error(self, lead=1.0):
        return Poly([1]).coefficient_error(self.recombine(lead))

    def __repr__(self):
        return "PartialFractions({})".format(list(self.terms))


def evaluate(p, z):
    """Evaluates `p` at `z` with Horner's scheme

    Parameters
    ----------
    p : Poly
        The polynomial

    z : complex or array_like
        Evaluation point(s)
    """
    return p(z)


def expand(entries):
    """Expands the monic polynomial with the given roots

    Parameters
    ----------
    entries : RootMultiset or iterable of (complex, int)
        Roots and multiplicities

    Returns
    -------
    p : Poly
        prod (z - r)^m
    """
    coeffs = numpy.array([1], dtype=complex)
    for r, m in entries:
        for _ in range(int(m)):
            coeffs = numpy.convolve(coeffs, [-complex(r), 1])
    return Poly(coeffs)


def synthetic_divide(p, root, deflation_tol=DEFLATION_TOL, full_output=False):
    """Divides `p` by (w - root)

    Parameters
    ----------
    p : Poly
        The dividend, degree >= 1

    root : complex
        A root of `p`

    deflation_tol : float, optional
        Largest accepted remainder relative to max(1, scale of `p`)

    full_output : bool, optional
        If `True` the discarded remainder is returned as well.
        Defaults to `False`

    Returns
    -------
    q : Poly
        The quotient

    remainder : complex
        Only if `full_output` is `True`
    """
    if p.degree < 1:
        raise DegreeError("cannot deflate a constant polynomial")
    root = complex(root)
    descending = p.coeffs[::-1]
    quotient = numpy.empty(p.degree, dtype=complex)
    acc = 0j
    for k, c in enumerate(descending):
        acc = acc * root + c
        if k < p.degree:
            quotient[k] = acc
    remainder = acc
    if abs(remainder) > deflation_tol * max(1.0, p.scale):
        raise NotARoot("{} is not a root: remainder {:.3g}".format(root, abs(remainder)), remainder)
    logger.debug("deflated root {} with remainder {:.3g}", root, abs(remainder))
    q = Poly(quotient[::-1])
    return (q, remainder) if full_output else q


def _initial_circle(monic, attempt):
    n = monic.degree
    center = -monic.coeffs[n - 1] / n
    shifted = monic.compose_shift(center).coeffs
    radius = max((abs(shifted[k]) ** (1.0 / (n - k)) for k in range(n)), default=0.0)
    radius = 2.0 * radius if radius > 0 else 1.0
    radius *= 1.0 + 0.1 * attempt
    angles = 2 * numpy.pi * numpy.arange(n) / n + 0.4 + 0.7 * attempt
    return center + radius * numpy.exp(1j * angles)


def _aberth(monic, max_iter, max_restarts):
    n = monic.degree
    derivative = monic.derivative()
    magnitudes = Poly(numpy.abs(monic.coeffs))

    for attempt in range(max_restarts):
        z = _initial_circle(monic, attempt)
        frozen = numpy.zeros(n, dtype=bool)
        for iteration in range(max_iter):
            pz = monic(z)
            dpz = derivative(z)
            # roundoff bound of the Horner evaluation
            bound = 4 * n * _EPS * magnitudes(numpy.abs(z)).real
            frozen |= numpy.abs(pz) <= bound
            if frozen.all():
                logger.debug("Aberth converged after {} iterations (attempt {})", iteration, attempt)
                return z

            diff = z[:, None] - z[None, :]
            numpy.fill_diagonal(diff, numpy.inf)
            with numpy.errstate(divide='ignore', invalid='ignore'):
                sums = numpy.sum(1.0 / diff, axis=1)
                step = pz / (dpz - pz * sums)
            step[frozen] = 0
            if not numpy.all(numpy.isfinite(step)):
                break
            z = z - step
            frozen |= numpy.abs(step) <= 2 * _EPS * numpy.maximum(1.0, numpy.abs(z))
        logger.warning("Aberth iteration restarting with a perturbed circle (attempt {})", attempt + 1)
    raise NonConvergence("root iteration did not converge after {} attempts of {} iterations"
                         .format(max_restarts, max_iter))


def _cluster(monic, z, cluster_tol):
    n = len(z)
    magnitudes = Poly(numpy.abs(monic.coeffs))
    pz = numpy.maximum(numpy.abs(monic(z)), 4 * n * _EPS * magnitudes(numpy.abs(z)).real)
    diff = z[:, None] - z[None, :]
    numpy.fill_diagonal(diff, 1.0)
    # Weierstrass inclusion radii
    radii = 2 * n * pz / numpy.abs(numpy.prod(diff, axis=1))
    merge_radius = cluster_tol * max(1.0, monic.scale)

    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            gap = abs(z[i] - z[j])
            if gap <= radii[i] + radii[j] or gap <= merge_radius:
                parent[find(i)] = find(j)

    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return [(numpy.mean(z[idx]), len(idx), float(numpy.max(radii[idx]))) for idx in groups.values()]


def _polish(monic, root, multiplicity, radius):
    g = monic.derivative(multiplicity - 1)
    dg = g.derivative()
    r = root
    for _ in range(20):
        dgr = dg(r)
        if dgr == 0:
            break
        step = g(r) / dgr
        r = r - step
        if abs(step) <= 2 * _EPS * max(1.0, abs(r)):
            break
    if not numpy.isfinite(r) or abs(r - root) > max(radius, 1e-8 * max(1.0, abs(root))):
        return root
    return complex(r)


def roots(p, cluster_tol=CLUSTER_TOL, root_residual_tol=ROOT_RESIDUAL_TOL,
          max_iter=MAX_ITER, max_restarts=MAX_RESTARTS):
    """Finds the distinct roots of `p` with their multiplicities

    Aberth-Ehrlich simultaneous iteration on the monic polynomial, then the estimates
    are clustered (overlapping inclusion discs, or closer than
    ``cluster_tol * max(1, scale)``), each cluster is replaced by its centroid and
    polished with Newton steps on the derivative of order multiplicity - 1.

    Parameters
    ----------
    p : Poly
        Polynomial of degree >= 1

    cluster_tol : float, optional
        Relative distance below which estimates are merged

    root_residual_tol : float, optional
        Accepted |p(r)| relative to scale * max(1, |r|)^degree

    max_iter : int, optional
        Iterations per attempt

    max_restarts : int, optional
        Attempts, each from a perturbed initial circle

    Returns
    -------
    roots : RootMultiset
    """
    if p.degree < 1:
        raise DegreeError("roots needs a polynomial of degree >= 1, got a constant")
    monic, _ = p.monic()
    n = monic.degree
    scale = monic.scale
    if n == 1:
        return RootMultiset([(-monic.coeffs[0], 1)], scale)

    estimates = _aberth(monic, max_iter, max_restarts)
    clusters = [(_polish(monic, centroid, m, radius), m)
                for centroid, m, radius in _cluster(monic, estimates, cluster_tol)]

    # polished centroids may still fall within the merge radius of each other
    merge_radius = cluster_tol * max(1.0, scale)
    merged = []
    for r, m in sorted(clusters, key=lambda e: (e[0].real, e[0].imag)):
        for k, (s, k_m) in enumerate(merged):
            if abs(r - s) <= merge_radius:
                merged[k] = ((s * k_m + r * m) / (k_m + m), k_m + m)
                break
        else:
            merged.append((r, m))

    for r, m in merged:
        residual = abs(monic(r))
        if residual > root_residual_tol * scale * max(1.0, abs(r)) ** n:
            raise NonConvergence("root {} (multiplicity {}) has residual {:.3g}".format(r, m, residual))

    logger.debug("found {} distinct roots of a degree {} polynomial", len(merged), n)
    return RootMultiset(merged, scale)


def _reciprocal_series(b, order):
    """First `order` Taylor coefficients of 1/Q given those of Q"""
    c = numpy.zeros(order, dtype=complex)
    c[0] = 1 / b[0]
    for k in range(1, order):
        acc = sum(b[j] * c[k - j] for j in range(1, min(k, len(b) - 1) + 1))
        c[k] = -acc / b[0]
    return c


def partial_fractions(p, roots, recombination_tol=RECOMBINATION_TOL, deflation_tol=DEFLATION_TOL):
    """Decomposes 1/p into sum lambda_ij / (w - w_i)^j

    The residues of root w_i of multiplicity n_i are the Taylor coefficients of
    1/q_i about w_i, where q_i = p/(w - w_i)^{n_i} is obtained by repeated synthetic
    division. A non-monic `p` has its leading coefficient folded into the residues.

    Parameters
    ----------
    p : Poly
        The polynomial

    roots : RootMultiset
        Roots of `p`

    recombination_tol : float, optional
        Largest accepted recombination error

    deflation_tol : float, optional
        Passed on to `synthetic_divide`

    Returns
    -------
    fractions : PartialFractions
    """
    monic, lead = p.monic()
    if roots.degree != monic.degree:
        raise InputError("root multiplicities sum to {} but p has degree {}".format(roots.degree, monic.degree))

    terms = []
    for r, m in roots:
        q = monic
        for _ in range(m):
            q = synthetic_divide(q, r, deflation_tol)
        taylor = q.compose_shift(r).coeffs
        series = _reciprocal_series(taylor, m)
        for j in range(1, m + 1):
            terms.append((r, j, series[m - j] / lead))

    fractions = PartialFractions(terms)
    fractions.error = fractions.recombination_error(lead)
    if fractions.error > recombination_tol:
        raise IllConditioned("partial fractions recombine with error {:.3g}".format(fractions.error),
                             fractions.error)
    return fractions
