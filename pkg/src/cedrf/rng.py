"""Counter-based random streams keyed by (seed, stream, sample index).

Sample ``i`` of a stream always receives the same raw words, no matter how
the sample range is split into blocks or distributed over workers. This is
done by positioning numpy's Philox-4x64 counter at the first block owned by
the sample; each sample owns a whole number of 4-word Philox blocks.
"""
import numpy as np
from scipy import special

# stream identifiers; distinct streams never share a Philox key
STREAM_GAUSS_DISTRIBUTED = 1
STREAM_GAUSS_CENTRALIZED = 2
STREAM_BINARY = 3
STREAM_SIGNS = 4
STREAM_CODEBOOK = 5

_WORDS_PER_BLOCK = 4
_U53 = 2.0 ** -53


def _key(seed: int, stream: int) -> int:
    seed = int(seed)
    if not 0 <= seed < 2 ** 64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed!r}")
    return seed | (int(stream) << 64)


def blocks_per_sample(width: int) -> int:
    return -(-int(width) // _WORDS_PER_BLOCK)


def raw_words(seed: int, stream: int, start: int, count: int, width: int) -> np.ndarray:
    """Raw uint64 words, shape (count, width), for samples start..start+count-1."""
    bps = blocks_per_sample(width)
    gen = np.random.Philox(key=_key(seed, stream), counter=int(start) * bps)
    raw = gen.random_raw(int(count) * bps * _WORDS_PER_BLOCK)
    return raw.reshape(int(count), bps * _WORDS_PER_BLOCK)[:, :width]


def to_uniform(raw: np.ndarray) -> np.ndarray:
    """Map uint64 words to doubles strictly inside (0, 1)."""
    return ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * _U53


def uniforms(seed, stream, start, count, width) -> np.ndarray:
    return to_uniform(raw_words(seed, stream, start, count, width))


def normals(seed, stream, start, count, width) -> np.ndarray:
    # inverse-CDF keeps one uniform per normal, so sample layout stays fixed
    return special.ndtri(uniforms(seed, stream, start, count, width))
