"""Hot inner loops with a numba path and a pure-numpy path.

The numba path is used when numba imports and ``CEDRF_DISABLE_NUMBA`` is not
set to a true value. Both paths implement the same contracts; tests run them
side by side. Infinite log-weights (an error-free observation) are passed as
``w[l] = 0`` with ``winf[l] = +1/-1`` so comparisons stay well-defined.
"""
import math
import os

import numpy as np

_FLAG = os.environ.get("CEDRF_DISABLE_NUMBA", "").strip().lower()
_DISABLED = _FLAG in ("1", "true", "yes", "on")

try:
    if _DISABLED:
        raise ImportError
    from numba import njit
    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

BACKEND = "numba" if HAVE_NUMBA else "numpy"

_NP_BLOCK = 1 << 14

# ---------------------------------------------------------------- numpy path


def _sum_and_inf(S, w, winf):
    return S @ w, S @ winf


def sign_enumeration_np(xi, w, winf, threshold, tol, pi):
    """Exact P[sum S_l w_l >= T] and P[-sum S_l w_l < T] by enumeration.

    Returns the weighted error ``(1-pi)*P0 + pi*P1``.
    """
    L = xi.shape[0]
    shifts = np.arange(L, dtype=np.int64)
    winf = winf.astype(np.float64)
    parts0, parts1 = [], []
    for start in range(0, 1 << L, _NP_BLOCK):
        masks = np.arange(start, min(start + _NP_BLOCK, 1 << L), dtype=np.int64)
        bits = ((masks[:, None] >> shifts) & 1).astype(bool)
        prob = np.prod(np.where(bits, xi, 1.0 - xi), axis=1)
        S = np.where(bits, 1.0, -1.0)
        s, ninf = _sum_and_inf(S, w, winf)
        ge = np.where(ninf > 0, True, np.where(ninf < 0, False, s >= threshold - tol))
        lt = np.where(ninf > 0, True, np.where(ninf < 0, False, -s < threshold - tol))
        parts0.append(float(np.sum(prob[ge])))
        parts1.append(float(np.sum(prob[lt])))
    return (1.0 - pi) * math.fsum(parts0) + pi * math.fsum(parts1)


def verbatim_terms_np(S_pos, w, winf, threshold, tol, pi):
    """Per-sample value of the error expression for sampled sign vectors."""
    S = np.where(S_pos, 1.0, -1.0)
    s, ninf = _sum_and_inf(S, w, winf.astype(np.float64))
    ge = np.where(ninf > 0, True, np.where(ninf < 0, False, s >= threshold - tol))
    lt = np.where(ninf > 0, True, np.where(ninf < 0, False, -s < threshold - tol))
    return (1.0 - pi) * ge + pi * lt


def map_decisions_np(yhat, w, winf, threshold, tol, coin):
    """Decide X=1 when the log-likelihood ratio exceeds ``threshold``.

    Ties (within ``tol``) are broken by ``coin < 0.5``.
    """
    S = np.where(yhat, 1.0, -1.0)
    s, ninf = _sum_and_inf(S, w, winf.astype(np.float64))
    finite = np.where(s > threshold + tol, True,
                      np.where(s < threshold - tol, False, coin < 0.5))
    return np.where(ninf > 0, True, np.where(ninf < 0, False, finite))


if hasattr(np, "bitwise_count"):
    def _popcount(x):
        return np.bitwise_count(x)
else:  # numpy < 2.0
    _POP8 = np.array([bin(i).count("1") for i in range(256)], dtype=np.uint8)

    def _popcount(x):
        return _POP8[x.view(np.uint8)].reshape(x.shape + (8,)).sum(-1)


def nearest_codeword_np(codebook, word):
    """Index of the codeword closest in Hamming distance (lowest index on ties)."""
    d = _popcount(codebook ^ word).sum(axis=1, dtype=np.int64)
    return int(np.argmin(d))


# ---------------------------------------------------------------- numba path

if HAVE_NUMBA:

    @njit(cache=True, nogil=True)
    def sign_enumeration_nb(xi, w, winf, threshold, tol, pi):
        L = xi.shape[0]
        acc0 = 0.0
        c0 = 0.0
        acc1 = 0.0
        c1 = 0.0
        for mask in range(1 << L):
            prob = 1.0
            s = 0.0
            ninf = 0
            for l in range(L):
                if (mask >> l) & 1:
                    prob *= xi[l]
                    s += w[l]
                    ninf += winf[l]
                else:
                    prob *= 1.0 - xi[l]
                    s -= w[l]
                    ninf -= winf[l]
            if prob == 0.0:
                continue
            if ninf > 0:
                ge = True
                lt = True
            elif ninf < 0:
                ge = False
                lt = False
            else:
                ge = s >= threshold - tol
                lt = -s < threshold - tol
            # Kahan summation: up to 2^24 terms
            if ge:
                y = prob - c0
                t = acc0 + y
                c0 = (t - acc0) - y
                acc0 = t
            if lt:
                y = prob - c1
                t = acc1 + y
                c1 = (t - acc1) - y
                acc1 = t
        return (1.0 - pi) * acc0 + pi * acc1

    @njit(cache=True, nogil=True)
    def verbatim_terms_nb(S_pos, w, winf, threshold, tol, pi):
        n, L = S_pos.shape
        out = np.empty(n)
        for i in range(n):
            s = 0.0
            ninf = 0
            for l in range(L):
                if S_pos[i, l]:
                    s += w[l]
                    ninf += winf[l]
                else:
                    s -= w[l]
                    ninf -= winf[l]
            if ninf > 0:
                out[i] = 1.0
            elif ninf < 0:
                out[i] = 0.0
            else:
                v = 0.0
                if s >= threshold - tol:
                    v += 1.0 - pi
                if -s < threshold - tol:
                    v += pi
                out[i] = v
        return out

    @njit(cache=True, nogil=True)
    def map_decisions_nb(yhat, w, winf, threshold, tol, coin):
        n, L = yhat.shape
        out = np.empty(n, dtype=np.bool_)
        for i in range(n):
            s = 0.0
            ninf = 0
            for l in range(L):
                if yhat[i, l]:
                    s += w[l]
                    ninf += winf[l]
                else:
                    s -= w[l]
                    ninf -= winf[l]
            if ninf > 0:
                out[i] = True
            elif ninf < 0:
                out[i] = False
            elif s > threshold + tol:
                out[i] = True
            elif s < threshold - tol:
                out[i] = False
            else:
                out[i] = coin[i] < 0.5
        return out

    @njit(cache=True, nogil=True)
    def _popcount64(x):
        x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
        x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
        x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
        return (x * np.uint64(0x0101010101010101)) >> np.uint64(56)

    @njit(cache=True, nogil=True)
    def nearest_codeword_nb(codebook, word):
        M, K = codebook.shape
        best = -1
        best_d = np.uint64(0xFFFFFFFFFFFFFFFF)
        for m in range(M):
            d = np.uint64(0)
            for k in range(K):
                d += _popcount64(codebook[m, k] ^ word[k])
            if d < best_d:
                best_d = d
                best = m
        return best


def get_kernels(backend=None):
    """Namespace of kernel functions for ``backend`` ('numba' or 'numpy')."""
    backend = backend or BACKEND
    if backend == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba backend requested but unavailable or disabled")
        return _Kernels(sign_enumeration_nb, verbatim_terms_nb, map_decisions_nb,
                        nearest_codeword_nb)
    if backend == "numpy":
        return _Kernels(sign_enumeration_np, verbatim_terms_np, map_decisions_np,
                        nearest_codeword_np)
    raise ValueError(f"unknown backend {backend!r}")


class _Kernels:
    __slots__ = ("sign_enumeration", "verbatim_terms", "map_decisions", "nearest_codeword")

    def __init__(self, sign_enumeration, verbatim_terms, map_decisions, nearest_codeword):
        self.sign_enumeration = sign_enumeration
        self.verbatim_terms = verbatim_terms
        self.map_decisions = map_decisions
        self.nearest_codeword = nearest_codeword


def pack_bits(bits: np.ndarray) -> np.ndarray:
    """Pack the last axis of a boolean array into little-endian uint64 words."""
    bits = np.asarray(bits, dtype=bool)
    n = bits.shape[-1]
    nwords = max(1, -(-n // 64))
    padded = np.zeros(bits.shape[:-1] + (nwords * 64,), dtype=bool)
    padded[..., :n] = bits
    packed = np.packbits(padded, axis=-1, bitorder="little")
    return np.ascontiguousarray(packed).view("<u8").reshape(bits.shape[:-1] + (nwords,))
