"""Monte Carlo of the distortion-achieving test channels.

Every estimator draws its randomness from :mod:`cedrf.rng`, keyed by the
sample (or trial) index, and processes samples in fixed-size blocks. The
``parallel_chunks`` setting only decides how blocks are spread over worker
threads, so results are bit-identical for any value.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels, rng
from .binary import BinaryObservationModel, local_drf, sign_weights
from .errors import DomainError, SizeError
from .gaussian import GaussianObservationModel, as_model, householder_basis, waterfilling
from .rdmath import star

BLOCK = 1 << 16
MAX_CODEBOOK_BITS = 26


@dataclass(frozen=True)
class SimulationConfig:
    n_samples: int
    seed: int
    parallel_chunks: int = 1

    def __post_init__(self):
        if int(self.n_samples) < 1:
            raise DomainError(f"n_samples must be at least 1, got {self.n_samples!r}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if int(self.parallel_chunks) < 1:
            raise DomainError(f"parallel_chunks must be at least 1, got {self.parallel_chunks!r}")


@dataclass(frozen=True)
class SimulationResult:
    mean_distortion: float
    std_error: float
    n_samples: int
    local_distortions: tuple[float, ...]
    local_std_errors: tuple[float, ...] = field(default=())

    def as_dict(self):
        return {
            "mean_distortion": self.mean_distortion,
            "std_error": self.std_error,
            "n_samples": self.n_samples,
            "local_distortions": list(self.local_distortions),
            "local_std_errors": list(self.local_std_errors),
        }


@dataclass(frozen=True)
class CodebookExperimentConfig:
    blocklength: int
    rate: float
    n_trials: int
    seed: int

    @property
    def codebook_bits(self) -> int:
        # guard against n*R landing a hair below an integer
        return int(math.floor(self.blocklength * self.rate + 1e-9))

    def __post_init__(self):
        if int(self.blocklength) < 1:
            raise DomainError(f"blocklength must be at least 1, got {self.blocklength!r}")
        if not float(self.rate) >= 0.0:
            raise DomainError(f"rate must be nonnegative, got {self.rate!r}")
        if int(self.n_trials) < 1:
            raise DomainError(f"n_trials must be at least 1, got {self.n_trials!r}")
        if self.codebook_bits > MAX_CODEBOOK_BITS:
            raise SizeError(
                f"codebook of 2^{self.codebook_bits} words exceeds 2^{MAX_CODEBOOK_BITS}")


def _run_blocks(fn, n_total, chunks, block=BLOCK):
    starts = list(range(0, n_total, block))
    jobs = [(s, min(block, n_total - s)) for s in starts]
    if chunks <= 1 or len(jobs) <= 1:
        return [fn(s, c) for s, c in jobs]
    with ThreadPoolExecutor(max_workers=chunks) as pool:
        return list(pool.map(lambda job: fn(*job), jobs))


def _summarize(parts) -> SimulationResult:
    err = np.concatenate([p[0] for p in parts])
    local = np.concatenate([p[1] for p in parts], axis=0)
    n = err.shape[0]
    se = float(np.std(err, ddof=1)) / math.sqrt(n) if n > 1 else 0.0
    lse = (np.std(local, axis=0, ddof=1) / math.sqrt(n)) if n > 1 else np.zeros(local.shape[1])
    return SimulationResult(float(np.mean(err)), se, n,
                            tuple(float(v) for v in np.mean(local, axis=0)),
                            tuple(float(v) for v in lse))


# ------------------------------------------------------------------ Gaussian


def _lmmse(gain, noise_var, obs):
    """LMMSE estimate of a unit-variance X from obs = gain*X + independent noise."""
    active = noise_var > 0
    g, s = gain[active], noise_var[active]
    denom = 1.0 + float(np.sum(g * g / s))
    return obs[:, active] @ (g / s) / denom


def simulate_gaussian_distributed(model, rates, config: SimulationConfig) -> SimulationResult:
    """Separate scalar test channels per observation, then LMMSE fusion."""
    model = as_model(model)
    r = np.atleast_1d(np.asarray(rates, dtype=float))
    if r.shape != (model.L,) or np.any(~(r >= 0)):
        raise DomainError(f"expected {model.L} nonnegative rates")
    gam = np.asarray(model.gammas)
    L = model.L
    x = 2.0 ** (-2.0 * r)
    dist = x * (1.0 + gam)
    gain = np.sqrt(gam) * (1.0 - x)
    noise_var = (1.0 - x) * (1.0 + gam * x)

    def block(start, count):
        n = rng.normals(config.seed, rng.STREAM_GAUSS_DISTRIBUTED, start, count, 1 + 2 * L)
        X = n[:, 0]
        Y = np.sqrt(gam) * X[:, None] + n[:, 1:L + 1]
        Yh = (1.0 - x) * Y + np.sqrt(dist * (1.0 - x)) * n[:, L + 1:]
        Xh = _lmmse(gain, noise_var, Yh)
        return (X - Xh) ** 2, (Y - Yh) ** 2

    return _summarize(_run_blocks(block, int(config.n_samples), int(config.parallel_chunks)))


def simulate_gaussian_centralized(model, rate, config: SimulationConfig) -> SimulationResult:
    """Joint encoding by reverse waterfilling over the eigen-components of Y.

    ``local_distortions`` holds the per-component MSE, which should equal
    ``min(theta, lambda_l)``.
    """
    model = as_model(model)
    L = model.L
    a = model.coefficients
    U = householder_basis(a)  # column l is the l-th eigenvector
    wf = waterfilling(model, rate)
    cr = np.asarray(wf.component_rates)
    lam = np.asarray(wf.eigenvalues)
    x = 2.0 ** (-2.0 * cr)
    dist = lam * x
    gain = (1.0 - x) * (U.T @ a)
    noise_var = (1.0 - x) ** 2 + dist * (1.0 - x)

    def block(start, count):
        n = rng.normals(config.seed, rng.STREAM_GAUSS_CENTRALIZED, start, count, 1 + 2 * L)
        X = n[:, 0]
        Y = a * X[:, None] + n[:, 1:L + 1]
        W = Y @ U
        Wt = (1.0 - x) * W + np.sqrt(dist * (1.0 - x)) * n[:, L + 1:]
        Xh = _lmmse(gain, noise_var, Wt)
        return (X - Xh) ** 2, (W - Wt) ** 2

    return _summarize(_run_blocks(block, int(config.n_samples), int(config.parallel_chunks)))


# ------------------------------------------------------------------ binary


def forward_channel(model: BinaryObservationModel, l: int, rate):
    """(P[Yhat=1], P[Yhat=1 | Y=0], P[Yhat=1 | Y=1], D) for encoder ``l``.

    Obtained by Bayes inversion of the backward channel Y = Yhat xor W with
    P[W=1] = D; at zero rate (D = q) the reproduction is the constant 0.
    """
    q = model.observation_bias(l)
    d = local_drf(model, l, rate)
    if d >= q:
        return 0.0, 0.0, 0.0, q
    s = (q - d) / (1.0 - 2.0 * d)
    return s, s * d / (1.0 - q), s * (1.0 - d) / q, d


def _binary_setup(model, rates):
    r = np.atleast_1d(np.asarray(rates, dtype=float))
    if r.shape != (model.L,) or np.any(~(r >= 0)):
        raise DomainError(f"expected {model.L} nonnegative rates")
    fc = [forward_channel(model, l, r[l]) for l in range(model.L)]
    p0 = np.array([f[1] for f in fc])
    p1 = np.array([f[2] for f in fc])
    spec = sign_weights(model, r)
    return p0, p1, spec


def _binary_block(model, p0, p1, seed, start, count):
    L = model.L
    u = rng.uniforms(seed, rng.STREAM_BINARY, start, count, 2 + 2 * L)
    X = u[:, 0] < model.source_bias
    Z = u[:, 1:L + 1] < np.asarray(model.alphas)
    Y = X[:, None] ^ Z
    Yh = u[:, L + 1:2 * L + 1] < np.where(Y, p1, p0)
    return X, Y, Yh, u[:, 2 * L + 1]


def simulate_binary(model: BinaryObservationModel, rates, config: SimulationConfig,
                    backend=None) -> SimulationResult:
    """End-to-end bit-flip chain with symbolwise MAP decoding and fair-coin ties."""
    p0, p1, spec = _binary_setup(model, rates)
    xi, w, winf, tol = spec.kernel_args()
    k = _kernels.get_kernels(backend)
    T = float(spec.threshold)

    def block(start, count):
        X, Y, Yh, coin = _binary_block(model, p0, p1, config.seed, start, count)
        Xh = k.map_decisions(Yh, w, winf, T, tol, coin)
        return (Xh != X).astype(np.float64), (Y != Yh).astype(np.float64)

    return _summarize(_run_blocks(block, int(config.n_samples), int(config.parallel_chunks)))


def binary_joint_counts(model: BinaryObservationModel, rates, config: SimulationConfig):
    """Counts of (Y_l, Yhat_l), shape (L, 2, 2), from the simulate_binary draws."""
    p0, p1, _ = _binary_setup(model, rates)

    def block(start, count):
        _, Y, Yh, _ = _binary_block(model, p0, p1, config.seed, start, count)
        c = np.zeros((model.L, 2, 2), dtype=np.int64)
        for y in (0, 1):
            for yh in (0, 1):
                c[:, y, yh] = np.sum((Y == y) & (Yh == yh), axis=0)
        return c

    return sum(_run_blocks(block, int(config.n_samples), int(config.parallel_chunks)))


def backward_joint_law(model: BinaryObservationModel, rates) -> np.ndarray:
    """P[Y_l = y, Yhat_l = yh] implied by the backward channel, shape (L, 2, 2)."""
    r = np.atleast_1d(np.asarray(rates, dtype=float))
    out = np.zeros((model.L, 2, 2))
    for l in range(model.L):
        s, _, _, d = forward_channel(model, l, r[l])
        for yh, ps in ((0, 1.0 - s), (1, s)):
            out[l, yh, yh] = ps * (1.0 - d)
            out[l, 1 - yh, yh] = ps * d
    return out


def testchannel_error_exact(model: BinaryObservationModel, rates, max_L=16) -> float:
    """Exact expected error of :func:`simulate_binary` by enumeration.

    Sums over X and all reproduction vectors with the true conditional law
    P[Yhat_l | X] of the simulated chain. Independent of the sign-vector
    formula, which treats the reproduction errors as independent of X.
    """
    if model.L > max_L:
        raise SizeError(f"test-channel enumeration supports L <= {max_L}")
    p0, p1, spec = _binary_setup(model, rates)
    xi, w, winf, tol = spec.kernel_args()
    T = float(spec.threshold)
    a = np.asarray(model.alphas)
    # P[Yhat_l = 1 | X = x]
    given = {0: (1 - a) * p0 + a * p1, 1: a * p0 + (1 - a) * p1}
    L = model.L
    masks = np.arange(1 << L)
    bits = ((masks[:, None] >> np.arange(L)) & 1).astype(bool)
    S = np.where(bits, 1.0, -1.0)
    s, ninf = S @ w, S @ winf
    p_one = np.where(ninf > 0, 1.0, np.where(ninf < 0, 0.0,
                     np.where(s > T + tol, 1.0, np.where(s < T - tol, 0.0, 0.5))))
    total = 0.0
    for xval, px in ((0, 1.0 - model.source_bias), (1, model.source_bias)):
        pv = np.prod(np.where(bits, given[xval], 1.0 - given[xval]), axis=1)
        wrong = p_one if xval == 0 else 1.0 - p_one
        total += px * math.fsum((pv * wrong).tolist())
    return total


# ------------------------------------------------------------------ codebook


def simulate_binary_codebook(model: BinaryObservationModel, cfg: CodebookExperimentConfig,
                             backend=None) -> SimulationResult:
    """Random-codebook encoding of one observation at finite blocklength.

    Per trial: a fresh codebook of 2^floor(nR) i.i.d. words from the
    reproduction marginal, minimum-Hamming-distance encoding (lowest index on
    ties) and symbolwise MAP decoding. Statistics are over trials.
    """
    if model.L != 1:
        raise DomainError(f"codebook experiment needs L=1, got L={model.L}")
    n = int(cfg.blocklength)
    M = 1 << cfg.codebook_bits
    d = local_drf(model, 0, cfg.rate)
    q = model.observation_bias(0)
    s = 0.0 if d >= q else (q - d) / (1.0 - 2.0 * d)
    spec = sign_weights(model, [cfg.rate])
    _, w, winf, tol = spec.kernel_args()
    T = float(spec.threshold)
    k = _kernels.get_kernels(backend)
    width = (M + 3) * n
    pi, alpha = model.source_bias, model.alphas[0]

    end = np.empty(int(cfg.n_trials))
    local = np.empty(int(cfg.n_trials))
    for t in range(int(cfg.n_trials)):
        u = rng.uniforms(cfg.seed, rng.STREAM_CODEBOOK, t, 1, width)[0]
        X = u[:n] < pi
        Y = X ^ (u[n:2 * n] < alpha)
        coin = u[2 * n:3 * n]
        book = (u[3 * n:] < s).reshape(M, n)
        idx = k.nearest_codeword(_kernels.pack_bits(book), _kernels.pack_bits(Y))
        Yh = book[idx]
        Xh = k.map_decisions(Yh[:, None], w, winf, T, tol, coin)
        end[t] = np.mean(Xh != X)
        local[t] = np.mean(Yh != Y)

    nt = int(cfg.n_trials)
    se = float(np.std(end, ddof=1)) / math.sqrt(nt) if nt > 1 else 0.0
    lse = float(np.std(local, ddof=1)) / math.sqrt(nt) if nt > 1 else 0.0
    return SimulationResult(float(end.mean()), se, nt, (float(local.mean()),), (lse,))


def symmetric_codebook_oracle(alpha, blocklength, rate):
    """Exact expected (end, local) distortion of the codebook experiment.

    Valid for a uniform source, where the codewords are uniform and the
    distance from Y to each codeword is Binomial(n, 1/2). The decoder then
    follows the reproduction, so the end error is alpha * (local error).
    """
    from scipy.stats import binom

    n = int(blocklength)
    M = 2 ** int(math.floor(n * rate + 1e-9))
    dd = np.arange(n + 1)
    surv = (1.0 - binom.cdf(dd, n, 0.5)) ** M
    local = float(np.sum(surv)) / n
    return star(alpha, local), local
