from functools import lru_cache
from itertools import combinations

import numpy as np
from scipy.special import comb

from errors import RejectedInput
from logs import setup_logging
from models import CodeParams
from coding.words import as_word, check_length, log2_length

logger = setup_logging("rm_core")


def dimension(params):
    """Number of monomials of degree <= r in m variables."""
    return sum(int(comb(params.m, i, exact=True)) for i in range(params.r + 1))


def min_distance(params):
    return 1 << (params.m - params.r)


def monomials(params):
    """
    Variable subsets S (0-based, variable 0 is z_1) of every monomial of degree <= r,
    degree ascending, then lexicographic on S. This is the MessageVector order.
    """
    return [s for d in range(params.r + 1) for s in combinations(range(params.m), d)]


@lru_cache(maxsize=None)
def point_coordinates(m):
    """(2^m, m) matrix whose row i is the point z of index i, z_1 first."""
    idx = np.arange(1 << m, dtype=np.int64)
    shifts = np.arange(m - 1, -1, -1, dtype=np.int64)
    coords = ((idx[:, None] >> shifts) & 1).astype(np.uint8)
    coords.setflags(write=False)
    return coords


@lru_cache(maxsize=None)
def _generator(m, r):
    params = CodeParams(m, r)
    coords = point_coordinates(m)
    rows = np.empty((dimension(params), 1 << m), dtype=np.uint8)
    for i, subset in enumerate(monomials(params)):
        # empty product evaluates to the all-ones row
        rows[i] = np.prod(coords[:, list(subset)], axis=1, dtype=np.uint8)
    rows.setflags(write=False)
    logger.debug(f"Built generator of {params}: {rows.shape[0]} rows")
    return rows


def generator_rows(params):
    """Evaluation vectors of the monomials, one row per message coefficient."""
    return _generator(params.m, params.r)


def xor_butterfly(coefficients):
    """
    GF(2) Moebius transform along the last axis (it is its own inverse).

    Maps the algebraic normal form (coefficient of the monomial whose variables
    are the set bits of the index) to the evaluation word, and back, in
    m * 2^m XORs and without any dense matrix.
    """
    a = np.array(coefficients, dtype=np.uint8)
    n = a.shape[-1]
    shape = a.shape
    h = 1
    while h < n:
        view = a.reshape(shape[:-1] + (-1, 2, h))
        view[..., 1, :] ^= view[..., 0, :]
        h *= 2
    return a


@lru_cache(maxsize=None)
def _monomial_masks(m, r):
    # index of monomial S in a length-2^m coefficient array, variable j on bit m-1-j
    masks = np.array([sum(1 << (m - 1 - j) for j in s) for s in monomials(CodeParams(m, r))], dtype=np.int64)
    masks.setflags(write=False)
    return masks


@lru_cache(maxsize=None)
def _degrees(m):
    deg = np.zeros(1 << m, dtype=np.uint8)
    h = 1
    while h < (1 << m):
        deg.reshape(-1, 2, h)[:, 1, :] += 1
        h *= 2
    deg.setflags(write=False)
    return deg


def encode(msg, params):
    """
    Encode a message vector into its codeword.

    Args:
        msg (sequence of {0,1}): One coefficient per monomial, in MessageVector order.
        params (CodeParams): The code.

    Returns:
        np.ndarray: The evaluation of the polynomial msg describes, at every point.
    """
    msg = as_word(msg)
    masks = _monomial_masks(params.m, params.r)
    if len(msg) != len(masks):
        raise RejectedInput(f"message of length {len(msg)} does not match dimension {len(masks)} of {params}")
    coefficients = np.zeros(params.n, dtype=np.uint8)
    coefficients[masks] = msg
    return xor_butterfly(coefficients)


def pack(word):
    """Bit-pack a word into one integer, index 0 most significant."""
    word = np.asarray(word, dtype=np.uint8)
    pad = (-len(word)) % 8
    packed = np.packbits(np.concatenate([word, np.zeros(pad, dtype=np.uint8)]))
    return int.from_bytes(packed.tobytes(), "big") >> pad


def reduce_vector(v, basis):
    while v:
        row = basis.get(v.bit_length() - 1)
        if row is None:
            break
        v ^= row
    return v


def xor_basis(rows):
    """Echelon basis {leading bit: row} of packed rows; its size is the GF(2) rank."""
    basis = {}
    for row in rows:
        v = reduce_vector(row, basis)
        if v:
            basis[v.bit_length() - 1] = v
    return basis


def gf2_rank(words):
    return len(xor_basis(pack(w) for w in words))


def anf_coefficients(word):
    """Algebraic normal form of a word: the coefficient of every monomial, indexed like points."""
    word = as_word(word)
    log2_length(word)
    return xor_butterfly(word)


def is_codeword(word, params):
    """True iff the polynomial evaluated by word has degree at most r."""
    word = as_word(word)
    check_length(word, params.n)
    return not np.any(anf_coefficients(word)[_degrees(params.m) > params.r])
