"""Scalar information-theoretic helpers shared by the Gaussian and binary code.

All logarithms are base 2 unless a name says otherwise.
"""
import math

import numpy as np
from scipy import optimize, special

from .errors import DomainError

# absolute tolerance of the inverse binary entropy
HINV_XTOL = 1e-12


def _check_probability(name, value):
    if not (0.0 <= value <= 1.0):
        raise DomainError(f"{name} must lie in [0, 1], got {value!r}")


def binary_entropy(q):
    """Binary entropy h(q) in bits, with 0*log(0) taken as 0."""
    q = float(q)
    _check_probability("q", q)
    if q == 0.0 or q == 1.0:
        return 0.0
    return -q * math.log2(q) - (1.0 - q) * math.log2(1.0 - q)


def binary_entropy_array(q):
    """Vectorised :func:`binary_entropy` for plotting sweeps."""
    q = np.asarray(q, dtype=float)
    if np.any((q < 0) | (q > 1)):
        raise DomainError("q must lie in [0, 1]")
    with np.errstate(divide="ignore", invalid="ignore"):
        out = -q * np.log2(q) - (1 - q) * np.log2(1 - q)
    return np.where((q == 0) | (q == 1), 0.0, out)


def inv_binary_entropy(h):
    """Inverse of the binary entropy restricted to [0, 1/2].

    Solved by bisection to an absolute tolerance of ``HINV_XTOL``.
    """
    h = float(h)
    if not (0.0 <= h <= 1.0):
        raise DomainError(f"entropy must lie in [0, 1], got {h!r}")
    if h == 0.0:
        return 0.0
    if h == 1.0:
        return 0.5
    return optimize.bisect(lambda x: binary_entropy(x) - h, 0.0, 0.5,
                           xtol=HINV_XTOL, rtol=4 * np.finfo(float).eps, maxiter=200)


def star(a, b):
    """Binary convolution a*(1-b) + (1-a)*b (crossover of cascaded BSCs)."""
    a = float(a)
    b = float(b)
    _check_probability("a", a)
    _check_probability("b", b)
    return a * (1.0 - b) + (1.0 - a) * b


def q_function(x):
    """Standard normal tail probability Q(x) = P[N(0,1) > x]."""
    return 0.5 * float(special.erfc(float(x) / math.sqrt(2.0)))


def log2_plus(x):
    """max(0, log2 x), the clipped logarithm used in reverse waterfilling."""
    x = float(x)
    if not x > 0.0:
        raise DomainError(f"log2_plus needs x > 0, got {x!r}")
    return max(0.0, math.log2(x))
