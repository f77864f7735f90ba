# Shared fixtures and random families for the test suite
import os
import sys

import numpy
import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from expfun import ExpPolyFunction, ExpPolyTerm, Support  # noqa: E402
from poly import expand  # noqa: E402


def random_exponent(rng, sign):
    return sign * rng.uniform(0.3, 3.0) + 1j * rng.uniform(-3.0, 3.0)


def random_hyperbolic_poly(rng, max_degree=5, degree=None):
    """Monic polynomial with distinct roots at least 0.3 from the imaginary axis"""
    if degree is None:
        degree = int(rng.integers(1, max_degree + 1))
    roots = []
    while len(roots) < degree:
        r = random_exponent(rng, rng.choice([-1, 1]))
        if all(abs(r - s) > 0.3 for s in roots):
            roots.append(r)
    return expand([(r, 1) for r in roots]), roots


def random_halfline_function(rng, max_terms=3, max_power=2):
    """Integrable exp-poly function with terms on t >= 0 and t <= 0"""
    terms = []
    for _ in range(int(rng.integers(1, max_terms + 1))):
        causal = rng.uniform() < 0.6
        z = random_exponent(rng, -1 if causal else 1)
        c = rng.normal() + 1j * rng.normal()
        m = int(rng.integers(0, max_power + 1))
        terms.append(ExpPolyTerm(c, m, z, Support.pos() if causal else Support.neg()))
    return ExpPolyFunction(terms, integrable=True)


def random_decaying_function(rng, max_terms=3, min_power=0, max_power=2, imag=(-2.0, 2.0)):
    """Terms on t >= 0 and t <= 0 decaying at rates in [1, 2], coefficients of total modulus 1"""
    count = int(rng.integers(1, max_terms + 1))
    terms = []
    for _ in range(count):
        causal = rng.uniform() < 0.6
        z = (-1 if causal else 1) * rng.uniform(1.0, 2.0) + 1j * rng.uniform(*imag)
        c = numpy.exp(2j * numpy.pi * rng.uniform()) / count
        m = int(rng.integers(min_power, max_power + 1))
        terms.append(ExpPolyTerm(c, m, z, Support.pos() if causal else Support.neg()))
    return ExpPolyFunction(terms, integrable=True)


def random_function(rng, max_terms=3):
    """Like `random_halfline_function` but some terms live on bounded intervals"""
    terms = list(random_halfline_function(rng, max_terms).terms)
    a = rng.uniform(-2, 1)
    terms.append(ExpPolyTerm(rng.normal() + 1j * rng.normal(), int(rng.integers(0, 2)),
                             rng.normal() + 1j * rng.normal(), Support.interval(a, a + rng.uniform(0.5, 2))))
    return ExpPolyFunction(terms, integrable=True)


@pytest.fixture
def rng():
    return numpy.random.default_rng(20190722)


@pytest.fixture
def decay():
    """e^(-t) u(t)"""
    return ExpPolyFunction.single(1, 0, -1, Support.pos())


@pytest.fixture
def decay2():
    """e^(-2t) u(t)"""
    return ExpPolyFunction.single(1, 0, -2, Support.pos())
