# Contains the Green's kernel of a constant-coefficient operator and its L1 norm
import math

import numpy
from loguru import logger

import poly
from errors import DegreeError, NotHyperbolic
from expfun import ExpPolyFunction, ExpPolyTerm, Support, apply_ode_operator, l1_norm_estimate

logger.disable(__name__)

AXIS_TOL = 1e-9
# open at 0: the causal terms alone give the value there
ANTICAUSAL = Support(-math.inf, 0.0, hi_closed=False)
# margins below this multiple of axis_tol are accepted with a warning
MARGIN_WARNING = 1e3


def _complex_pair(z):
    return [z.real, z.imag]


def _margin(root):
    return abs(root.real) / max(1.0, abs(root))


def is_hyperbolic(p, axis_tol=AXIS_TOL, roots=None):
    """Checks that every root of `p` is off the imaginary axis

    Parameters
    ----------
    p : Poly
        Polynomial of degree >= 1

    axis_tol : float, optional
        A root z counts as on the axis when |Re z| <= axis_tol * max(1, |z|)

    roots : RootMultiset, optional
        Roots of `p` when they are already known

    Returns
    -------
    hyperbolic : bool

    witness : complex or None
        The root closest to the axis (relative to its size) when `hyperbolic` is False
    """
    if roots is None:
        roots = poly.roots(p)
    closest = min(roots.roots, key=_margin)
    margin = _margin(closest)
    if margin <= axis_tol:
        return False, closest
    if margin <= MARGIN_WARNING * axis_tol:
        logger.warning("root {} is within {:.3g} of the imaginary axis; M grows like 1/|Re z|", closest, margin)
    return True, None


class GreensFunction:
    """The L1 kernel G with F(G)(w) = 1/p(iw)

    Parameters
    ----------
    kernel : ExpPolyFunction
        Causal terms for roots with Re < 0, anti-causal terms for roots with Re > 0

    charpoly : Poly
        The characteristic polynomial

    roots : RootMultiset
        Its roots

    fractions : PartialFractions
        The residues the kernel was built from

    M : float
        The stability constant, the L1 norm of the kernel

    M_error : float
        Error estimate of `M`

    Attributes
    ----------
    hyperbolic : bool
        Always True; a GreensFunction only exists for hyperbolic polynomials
    """
    hyperbolic = True

    def __init__(self, kernel, charpoly, roots, fractions, M, M_error=0.0):
        self.kernel = kernel
        self.charpoly = charpoly
        self.roots = roots
        self.fractions = fractions
        self.M = M
        self.M_error = M_error

    def to_dict(self):
        return {
            'charpoly': [_complex_pair(c) for c in self.charpoly.coeffs],
            'roots': [{'root': _complex_pair(r), 'multiplicity': m} for r, m in self.roots],
            'kernel': self.kernel.to_dict()['terms'],
            'M': self.M,
            'M_error': self.M_error,
            'hyperbolic': self.hyperbolic,
        }

    def __repr__(self):
        return "GreensFunction(M={}, kernel={!r})".format(self.M, self.kernel)


def green_function(p, axis_tol=AXIS_TOL):
    """Builds the Green's kernel of the operator with characteristic polynomial `p`

    1/p(s) is split into partial fractions lambda_ij/(s - w_i)^j and every fraction,
    read at s = iw, is inverted termwise:
    lambda t^(j-1)/(j-1)! e^(w_i t) u(t) when Re w_i < 0 and
    -lambda t^(j-1)/(j-1)! e^(w_i t) u(-t) when Re w_i > 0.

    Parameters
    ----------
    p : Poly
        Characteristic polynomial of degree >= 1

    axis_tol : float, optional
        Relative distance from the imaginary axis below which a root is rejected

    Returns
    -------
    G : GreensFunction
    """
    if p.degree < 1:
        raise DegreeError("the operator needs order >= 1, got a constant polynomial")
    roots = poly.roots(p)
    hyperbolic, witness = is_hyperbolic(p, axis_tol, roots)
    if not hyperbolic:
        raise NotHyperbolic("root {} lies on the imaginary axis (|Re| = {:.3g}); 1/p(iw) has no L1 inverse"
                            .format(witness, abs(witness.real)), witness)
    fractions = poly.partial_fractions(p, roots)

    terms = []
    for root, order, lam in fractions:
        amplitude = lam / math.factorial(order - 1)
        if root.real < 0:
            terms.append(ExpPolyTerm(amplitude, order - 1, root, Support.pos()))
        else:
            terms.append(ExpPolyTerm(-amplitude, order - 1, root, ANTICAUSAL))
    kernel = ExpPolyFunction(terms, integrable=True)

    if p.degree == 1:
        root = roots.roots[0]
        M, M_error = 1 / (abs(p.lead) * abs(root.real)), 0.0
    else:
        M, M_error = l1_norm_estimate(kernel)
    logger.debug("kernel of a degree {} operator has {} terms, M = {:.12g}", p.degree, len(kernel.terms), M)
    return GreensFunction(kernel, p, roots, fractions, M, M_error)


def stability_constant(p, axis_tol=AXIS_TOL):
    """The Hyers-Ulam constant M = ||G||_1 of the operator with characteristic polynomial `p`"""
    return green_function(p, axis_tol).M


def triangle_bound(G):
    """Upper bound on M from the per-term norms, sum |lambda_ij| / |Re w_i|^j"""
    return float(sum(abs(lam) / abs(root.real) ** order for root, order, lam in G.fractions))


def delta_identity(G):
    """Jump bookkeeping of the kernel at t = 0

    Returns
    -------
    jumps : ndarray
        Jump of G^(k) at 0 for k = 0..n-1; ideally zero except the last, 1/lead

    defect : float
        Largest coefficient left in the classical part of p(d/dt) G
    """
    n = G.charpoly.degree
    sizes = numpy.zeros(n, dtype=complex)
    current = G.kernel
    for k in range(n):
        derivative, jumps = current.derivative()
        sizes[k] = sum(j.size for j in jumps if j.location == 0)
        current = derivative
    value, _ = apply_ode_operator(G.charpoly, G.kernel)
    return sizes, value.max_abs_coefficient()


def transform_variable_green_function(p, axis_tol=AXIS_TOL):
    """The kernel with F(G)(w) = 1/p(w), through the substitution s = iw

    Real roots of `p` put roots of p(-is) on the imaginary axis and are rejected.
    """
    return green_function(p.compose_scale(-1j), axis_tol)
