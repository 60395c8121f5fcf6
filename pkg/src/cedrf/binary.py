"""Binary source in bit-flip noise under Hamming distortion.

Notation: ``pi`` is the source bias P[X=1] and ``alpha_l`` the crossover
probability of the l-th observation channel, ``Y_l = X xor Z_l``. Encoder
``l`` compresses ``Y_l`` to its Hamming distortion-rate function; the decoder
picks the most likely source bit from the reproductions.

Each reproduction disagrees with the source with probability
``xi_l = alpha_l * D_l`` (binary convolution), and the decoder error is the
tail probability of a weighted sum of independent signs ``S_l``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, special

from . import _kernels, rng
from .errors import DomainError, SizeError
from .rdmath import binary_entropy, inv_binary_entropy, q_function, star

MAX_EXACT_L = 24
TIE_RTOL = 1e-12
_MC_BLOCK = 1 << 16


@dataclass(frozen=True)
class BinaryObservationModel:
    source_bias: float
    alphas: tuple[float, ...]

    def __post_init__(self):
        pi = float(self.source_bias)
        a = tuple(float(v) for v in self.alphas)
        if not (0.0 < pi <= 0.5):
            raise DomainError(f"source bias must lie in (0, 0.5], got {pi!r}")
        if len(a) < 1:
            raise DomainError("need at least one observation channel")
        for v in a:
            if not (0.0 <= v < 0.5):
                raise DomainError(f"every crossover must lie in [0, 0.5), got {v!r}")
        object.__setattr__(self, "source_bias", pi)
        object.__setattr__(self, "alphas", a)

    @property
    def L(self) -> int:
        return len(self.alphas)

    def observation_bias(self, l: int) -> float:
        """P[Y_l = 1]."""
        return star(self.source_bias, self.alphas[l])


@dataclass(frozen=True)
class SignWeightSpec:
    """Sign probabilities and log-likelihood weights (natural log)."""

    xis: tuple[float, ...]
    weights: tuple[float, ...]
    threshold: float

    @classmethod
    def from_xis(cls, xis, pi):
        xis = tuple(float(x) for x in xis)
        for x in xis:
            if not 0.0 <= x <= 1.0:
                raise DomainError(f"sign probability must lie in [0, 1], got {x!r}")
        return cls(xis, tuple(_log_ratio(x) for x in xis), _log_ratio(pi))

    def kernel_args(self):
        """(xi, finite weights, infinite-weight signs, tie tolerance)."""
        xi = np.asarray(self.xis, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        winf = np.where(np.isposinf(w), 1, np.where(np.isneginf(w), -1, 0)).astype(np.int64)
        w = np.where(np.isinf(w), 0.0, w)
        tol = TIE_RTOL * (float(np.sum(np.abs(w))) + abs(self.threshold))
        return xi, w, winf, tol


def _log_ratio(x):
    if x == 0.0:
        return math.inf
    if x == 1.0:
        return -math.inf
    return math.log1p(-x) - math.log(x)


def _rates(model: BinaryObservationModel, rates) -> np.ndarray:
    r = np.atleast_1d(np.asarray(rates, dtype=float))
    if r.shape != (model.L,):
        raise DomainError(f"expected {model.L} rates, got {r.size}")
    if np.any(~(r >= 0.0)):
        raise DomainError("rates must be nonnegative")
    return r


def local_drf(model: BinaryObservationModel, l: int, rate) -> float:
    """Hamming distortion-rate function of the l-th observation."""
    if not 0 <= l < model.L:
        raise DomainError(f"encoder index {l} out of range for L={model.L}")
    rate = float(rate)
    if not rate >= 0.0:
        raise DomainError(f"rate must be nonnegative, got {rate!r}")
    q = model.observation_bias(l)
    if rate == 0.0:
        # exact, rather than the bisection's approximation of q
        return q
    return inv_binary_entropy(max(0.0, binary_entropy(q) - rate))


def sign_weights(model: BinaryObservationModel, rates) -> SignWeightSpec:
    r = _rates(model, rates)
    xis = [star(model.alphas[l], local_drf(model, l, r[l])) for l in range(model.L)]
    return SignWeightSpec.from_xis(xis, model.source_bias)


def cedrf_exact(model: BinaryObservationModel, rates, backend=None) -> float:
    """CE distortion by enumerating all 2^L sign vectors.

    The comparison is ``>=`` for X=0 and ``<`` for X=1, i.e. ties decide 1.
    """
    if model.L > MAX_EXACT_L:
        raise SizeError(
            f"exact enumeration supports L <= {MAX_EXACT_L}, got L={model.L}; "
            "use cedrf_symmetric or cedrf_montecarlo_signs")
    spec = sign_weights(model, rates)
    return error_from_signs(spec, model.source_bias, backend=backend)


def error_from_signs(spec: SignWeightSpec, pi, backend=None) -> float:
    if len(spec.xis) > MAX_EXACT_L:
        raise SizeError(f"exact enumeration supports L <= {MAX_EXACT_L}")
    k = _kernels.get_kernels(backend)
    xi, w, winf, tol = spec.kernel_args()
    return float(k.sign_enumeration(xi, w, winf, float(spec.threshold), tol, float(pi)))


def symmetric_xi(alpha, sum_rate, L) -> float:
    """Sign probability for a uniform source with equal crossovers and rates."""
    model = BinaryObservationModel(0.5, (float(alpha),))
    return star(float(alpha), local_drf(model, 0, float(sum_rate) / int(L)))


def binomial_majority_error(xi, L) -> float:
    """P[Bin(L, xi) > L/2] + P[Bin(L, xi) = L/2] / 2."""
    L = int(L)
    if xi == 0.0:
        return 0.0
    if xi == 1.0:
        return 1.0
    k = np.arange(L // 2 + 1, L + 1)
    logc = special.gammaln(L + 1) - special.gammaln(k + 1) - special.gammaln(L - k + 1)
    terms = np.exp(logc + k * math.log(xi) + (L - k) * math.log1p(-xi))
    total = math.fsum(terms.tolist())
    if L % 2 == 0:
        m = L // 2
        logt = (special.gammaln(L + 1) - 2 * special.gammaln(m + 1)
                + m * (math.log(xi) + math.log1p(-xi)))
        total += 0.5 * math.exp(logt)
    return total


def cedrf_symmetric(alpha, sum_rate, L) -> float:
    """Uniform source, equal crossovers, rate ``sum_rate / L`` per encoder."""
    L = int(L)
    if L < 1:
        raise DomainError(f"L must be at least 1, got {L}")
    alpha = float(alpha)
    if not 0.0 <= alpha < 0.5:
        raise DomainError(f"crossover must lie in [0, 0.5), got {alpha!r}")
    sum_rate = float(sum_rate)
    if not sum_rate >= 0.0:
        raise DomainError(f"sum-rate must be nonnegative, got {sum_rate!r}")
    return binomial_majority_error(symmetric_xi(alpha, sum_rate, L), L)


def single_observer_rd(model: BinaryObservationModel, distortion) -> float:
    """Rate needed by a single CE encoder to reach end distortion ``distortion``."""
    if model.L != 1:
        raise DomainError(f"single-observer curve needs L=1, got L={model.L}")
    a = model.alphas[0]
    d = float(distortion)
    if not (a <= d <= model.source_bias):
        raise DomainError(f"distortion must lie in [{a!r}, {model.source_bias!r}], got {d!r}")
    q = model.observation_bias(0)
    return max(0.0, binary_entropy(q) - binary_entropy((d - a) / (1.0 - 2.0 * a)))


def idrf_binary_symmetric(alpha, distortion) -> float:
    """Indirect rate-distortion function of a uniform bit seen through BSC(alpha)."""
    alpha = float(alpha)
    d = float(distortion)
    if not 0.0 <= alpha < 0.5:
        raise DomainError(f"crossover must lie in [0, 0.5), got {alpha!r}")
    if not (alpha <= d <= 0.5):
        raise DomainError(f"distortion must lie in [{alpha!r}, 0.5], got {d!r}")
    return 1.0 - binary_entropy((d - alpha) / (1.0 - 2.0 * alpha))


def drf_bernoulli(pi, rate) -> float:
    """Hamming distortion-rate function of a Bernoulli(pi) source (no noise)."""
    pi = float(pi)
    return inv_binary_entropy(max(0.0, binary_entropy(pi) - float(rate)))


def idrf_binary(pi, alpha, rate) -> float:
    """Indirect distortion-rate function of Bernoulli(pi) seen through BSC(alpha).

    Reduces to a binary source ``Y`` with the amended distortion
    ``P[X != xhat | Y]`` and minimizes over the two forward-channel parameters
    ``a = P[xhat=1 | Y=0]``, ``b = P[xhat=0 | Y=1]`` subject to ``I(Y; xhat) <= rate``.
    The feasible set is convex and the objective linear, so a bounded scalar
    search over ``a`` with ``b`` on the constraint boundary finds the optimum.
    """
    pi = float(pi)
    alpha = float(alpha)
    rate = float(rate)
    if not 0.0 < pi <= 0.5:
        raise DomainError(f"source bias must lie in (0, 0.5], got {pi!r}")
    if not 0.0 <= alpha < 0.5:
        raise DomainError(f"crossover must lie in [0, 0.5), got {alpha!r}")
    if not rate >= 0.0:
        raise DomainError(f"rate must be nonnegative, got {rate!r}")
    q = star(pi, alpha)
    c0 = pi * alpha / (1.0 - q)          # P[X=1 | Y=0]
    c1 = pi * (1.0 - alpha) / q          # P[X=1 | Y=1]
    w0, w1 = 1.0 - 2.0 * c0, 2.0 * c1 - 1.0
    if w1 <= 0.0:
        return pi
    hq = binary_entropy(q)
    if rate >= hq:
        return alpha
    if rate == 0.0:
        return pi

    def info(a, b):
        return (binary_entropy((1.0 - q) * a + q * (1.0 - b))
                - (1.0 - q) * binary_entropy(a) - q * binary_entropy(b))

    def crossing(f, lo, hi):
        # f decreases from positive at lo; rounding can leave f(hi) slightly positive
        if f(hi) >= 0.0:
            return hi
        return optimize.brentq(f, lo, hi, xtol=1e-15)

    def b_of(a):
        if info(a, 0.0) <= rate:
            return 0.0
        return crossing(lambda b: info(a, b) - rate, 0.0, 1.0 - a)

    a_max = crossing(lambda a: info(a, 0.0) - rate, 0.0, 1.0)

    def dist(a):
        return alpha + (1.0 - q) * a * w0 + q * b_of(a) * w1

    res = optimize.minimize_scalar(dist, bounds=(0.0, a_max), method="bounded",
                                   options={"xatol": 1e-12})
    return float(min(res.fun, dist(0.0), dist(a_max)))


def cedrf_asymptotic(alpha, sum_rate) -> float:
    """Large-L limit of :func:`cedrf_symmetric` at fixed sum-rate."""
    alpha = float(alpha)
    sum_rate = float(sum_rate)
    if not 0.0 <= alpha < 0.5:
        raise DomainError(f"crossover must lie in [0, 0.5), got {alpha!r}")
    if not sum_rate >= 0.0:
        raise DomainError(f"sum-rate must be nonnegative, got {sum_rate!r}")
    return q_function(2.0 * math.sqrt(math.log(4.0) * sum_rate) * (0.5 - alpha))


def cedrf_asymptotic_bound(alpha, sum_rate) -> float:
    """Chernoff-type upper bound 2^(-4 (1/2 - alpha)^2 R_sum) / 2 on the limit."""
    alpha = float(alpha)
    sum_rate = float(sum_rate)
    if not 0.0 <= alpha < 0.5:
        raise DomainError(f"crossover must lie in [0, 0.5), got {alpha!r}")
    if not sum_rate >= 0.0:
        raise DomainError(f"sum-rate must be nonnegative, got {sum_rate!r}")
    return 0.5 * 2.0 ** (-4.0 * (0.5 - alpha) ** 2 * sum_rate)


def cedrf_montecarlo_signs(spec: SignWeightSpec, pi, n_samples, seed, backend=None):
    """Sampled estimate of the sign-vector error expression: (mean, stderr)."""
    n_samples = int(n_samples)
    if n_samples < 1:
        raise DomainError(f"n_samples must be at least 1, got {n_samples}")
    k = _kernels.get_kernels(backend)
    xi, w, winf, tol = spec.kernel_args()
    L = len(xi)
    vals = []
    for start in range(0, n_samples, _MC_BLOCK):
        count = min(_MC_BLOCK, n_samples - start)
        u = rng.uniforms(seed, rng.STREAM_SIGNS, start, count, L)
        vals.append(k.verbatim_terms(u < xi, w, winf, float(spec.threshold), tol, float(pi)))
    v = np.concatenate(vals)
    std = float(np.std(v, ddof=1)) if n_samples > 1 else 0.0
    return float(np.mean(v)), std / math.sqrt(n_samples)
