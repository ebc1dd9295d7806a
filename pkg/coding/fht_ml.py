from functools import lru_cache

import numpy as np

from config import Config
from errors import RejectedInput
from logs import setup_logging
from models import CodeParams, FirstOrderEstimate
from coding.rm_core import dimension, generator_rows
from coding.streams import trial_stream
from coding.words import as_word, check_length, from_pm, is_power_of_two, log2_length, to_pm

logger = setup_logging("fht_ml")


def hadamard_spectrum(y):
    """
    Integer Walsh-Hadamard spectrum of a +-1 word (or a batch along the last axis).

    output[s] = sum_x y(x) * (-1)^(x.s), computed with the in-place butterfly in
    m' * 2^m' additions. Bit j of s pairs with stride 2^j, so s is indexed the
    same way as points.
    """
    a = np.array(y, dtype=np.int64)
    n = a.shape[-1]
    if not is_power_of_two(n):
        raise RejectedInput(f"spectrum length {n} is not a power of two")
    shape = a.shape
    h = 1
    while h < n:
        a = a.reshape(shape[:-1] + (-1, 2, h))
        a = np.stack((a[..., 0, :] + a[..., 1, :], a[..., 0, :] - a[..., 1, :]), axis=-2)
        h *= 2
    return a.reshape(shape)


def _pick(spectrum):
    best = np.abs(spectrum).max()
    plus = np.flatnonzero(spectrum == best)
    minus = np.flatnonzero(spectrum == -best)
    tied = plus.size + minus.size > 1
    if plus.size:
        return FirstOrderEstimate(s=int(plus[0]), sigma=1, tied=bool(tied))
    return FirstOrderEstimate(s=int(minus[0]), sigma=-1, tied=bool(tied))


def ml_decode_first_order(y):
    """
    ML decoding of a first-order RM word.

    Returns the (s, sigma) maximizing sigma * spectrum[s]; ties go to sigma=+1,
    then to the smallest s. tied is set when the maximizer was not unique.
    """
    y = as_word(y)
    if log2_length(y) < 1:
        raise RejectedInput("first-order decoding needs a word of length at least 2")
    return _pick(hadamard_spectrum(to_pm(y)))


def _characters(s_bits):
    """Rows (x.s mod 2) over all points x; the coordinate doubled in last (z_1) ends up most significant."""
    words = np.zeros((s_bits.shape[0], 1), dtype=np.uint8)
    for j in range(s_bits.shape[1] - 1, -1, -1):
        words = np.concatenate([words, words ^ s_bits[:, j:j + 1]], axis=1)
    return words


def estimate_to_word(e, m):
    """The codeword sigma * chi_s as a 0/1 word of length 2^m."""
    if not 0 <= e.s < (1 << m) or e.sigma not in (1, -1):
        raise RejectedInput(f"invalid first-order estimate {e} for m'={m}")
    s_bits = ((e.s >> np.arange(m - 1, -1, -1)) & 1).astype(np.uint8)
    chi = to_pm(_characters(s_bits[None, :])[0])
    return from_pm(e.sigma * chi)


def _message_bits(start, stop, dim):
    ints = np.arange(start, stop, dtype=np.int64)
    return (ints[:, None] >> np.arange(dim - 1, -1, -1)) & 1


def _block_rows(n):
    return max(1, Config.CODEBOOK_CHUNK_BYTES // (8 * n))


def _codeword_blocks(params, dim):
    rows = generator_rows(params).astype(np.int64)
    step = _block_rows(params.n)
    for start in range(0, 1 << dim, step):
        stop = min(start + step, 1 << dim)
        yield ((_message_bits(start, stop, dim) @ rows) & 1).astype(np.uint8)


@lru_cache(maxsize=8)
def _cached_codebook(m, r, dim):
    book = np.concatenate(list(_codeword_blocks(CodeParams(m, r), dim)))
    book.setflags(write=False)
    logger.info(f"Cached codebook of RM({m},{r}): {book.shape[0]} codewords")
    return book


def codebook_chunks(params):
    """Yield every codeword of the code, in blocks of bounded size."""
    dim = dimension(params)
    if dim > Config.BRUTE_FORCE_MAX_DIM:
        raise RejectedInput(f"{params} has dimension {dim} > {Config.BRUTE_FORCE_MAX_DIM}, too large for exhaustive search")
    if (1 << dim) * params.n <= Config.CODEBOOK_CACHE_LIMIT:
        yield _cached_codebook(params.m, params.r, dim)
        return
    yield from _codeword_blocks(params, dim)


def brute_force_search(y, params):
    """
    Exhaustive minimum-distance decoding that also reports whether the minimum was shared.

    Returns:
        tuple: (closest codeword, True when more than one codeword attains its distance)
    """
    y = as_word(y)
    check_length(y, params.n)
    best_dist, best_word, attained = None, None, 0
    for book in codebook_chunks(params):
        dist = np.count_nonzero(book != y, axis=1)
        d = int(dist.min())
        rows = book[dist == d]
        word = rows[np.lexsort(rows.T[::-1])[0]]
        if best_dist is None or d < best_dist:
            best_dist, best_word, attained = d, word, len(rows)
        elif d == best_dist:
            attained += len(rows)
            if word.tobytes() < best_word.tobytes():
                best_word = word
    return best_word.copy(), attained > 1


def brute_force_ml(y, params):
    """
    Exhaustive minimum-distance decoding.

    Ties go to the codeword that is smallest when read as a binary number with
    index 0 most significant.
    """
    return brute_force_search(y, params)[0]


def _noise_batch(batch, n):
    return max(1, min(batch, Config.NOISE_BATCH_BYTES // (8 * n)))


def ml_success_rate(m, p, trials, seed, batch=4096):
    """
    Monte Carlo estimate of Pr[ML decoding of BSC(p) noise on RM(m', 1) returns (0, +1)].

    Under the tie rule the decoder returns (0, +1) exactly when spectrum[0] attains
    the largest magnitude.
    """
    if m < 1:
        raise RejectedInput(f"m' must be at least 1, got {m}")
    batch = _noise_batch(batch, 1 << m)
    successes = 0
    for first in range(0, trials, batch):
        count = min(batch, trials - first)
        rng = trial_stream(seed, first // batch)
        noise = (rng.random((count, 1 << m)) < p).astype(np.uint8)
        spectrum = hadamard_spectrum(to_pm(noise))
        successes += int(np.count_nonzero(spectrum[:, 0] >= np.abs(spectrum).max(axis=1)))
    return successes / trials


def decode_first_order_batch(words):
    """
    ML-decode each row of a (n, 2^m') batch of first-order words.

    Returns:
        tuple: (decoded rows as 0/1 words, number of rows whose maximizer was tied)
    """
    words = np.asarray(words, dtype=np.uint8)
    m = log2_length(words[0])
    spectra = hadamard_spectrum(to_pm(words))
    best = np.abs(spectra).max(axis=1, keepdims=True)
    plus, minus = spectra == best, spectra == -best
    tied = plus.sum(axis=1) + minus.sum(axis=1) > 1
    has_plus = plus.any(axis=1)
    s = np.where(has_plus, plus.argmax(axis=1), minus.argmax(axis=1)).astype(np.int64)
    s_bits = ((s[:, None] >> np.arange(m - 1, -1, -1)) & 1).astype(np.uint8)
    decoded = _characters(s_bits) ^ (~has_plus)[:, None].astype(np.uint8)
    return decoded, int(np.count_nonzero(tied))
