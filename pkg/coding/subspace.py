from functools import lru_cache
from itertools import combinations, product

import numpy as np

from config import Config
from errors import RejectedInput
from logs import setup_logging
from models import CosetIndexMap, ProjectionTables, Subspace
from coding.rm_core import reduce_vector
from coding.words import check_length

logger = setup_logging("subspace")


def gaussian_binomial(m, k):
    """
    Number of k-dimensional subspaces of F2^m, computed exactly.

    Args:
        m (int): Ambient dimension.
        k (int): Subspace dimension, 0 <= k <= m.

    Returns:
        int: prod_{i<k} (2^m - 2^i) / (2^k - 2^i).
    """
    if not 0 <= k <= m:
        raise RejectedInput(f"gaussian binomial needs 0 <= k <= m, got m={m}, k={k}")
    num, den = 1, 1
    for i in range(k):
        num *= (1 << m) - (1 << i)
        den *= (1 << k) - (1 << i)
    return num // den


def canonical_basis(vectors):
    """Reduced row echelon form of independent vectors, leading bit descending."""
    rows = {}
    for v in vectors:
        v = reduce_vector(v, rows)
        if not v:
            raise RejectedInput("subspace basis vectors are linearly dependent")
        rows[v.bit_length() - 1] = v
    # clear every pivot column outside its own row
    for pivot in sorted(rows):
        for other in rows:
            if other != pivot and rows[other] >> pivot & 1:
                rows[other] ^= rows[pivot]
    return tuple(rows[p] for p in sorted(rows, reverse=True))


def subspace_from_basis(m, vectors):
    vectors = [int(v) for v in vectors]
    if any(not 0 < v < (1 << m) for v in vectors):
        raise RejectedInput(f"basis vectors must be nonzero points of F2^{m}")
    basis = canonical_basis(vectors)
    return Subspace(ambient_m=m, dim_k=len(basis), basis=basis)


@lru_cache(maxsize=None)
def _enumerate(m, k):
    found = []
    for pivots in combinations(range(m - 1, -1, -1), k):
        pivot_set = set(pivots)
        # free coordinates of a row sit below its pivot and outside other pivot columns
        free = [[q for q in range(p) if q not in pivot_set] for p in pivots]
        slots = [(row, q) for row, cols in enumerate(free) for q in cols]
        for bits in product((0, 1), repeat=len(slots)):
            basis = [1 << p for p in pivots]
            for (row, q), bit in zip(slots, bits):
                basis[row] |= bit << q
            found.append(Subspace(ambient_m=m, dim_k=k, basis=tuple(basis)))
    found.sort(key=lambda s: s.basis)
    logger.debug(f"Enumerated {len(found)} subspaces of dimension {k} in F2^{m}")
    return tuple(found)


def enumerate_subspaces(m, k):
    """All k-dimensional subspaces of F2^m, sorted by canonical basis."""
    if not 1 <= k <= m:
        raise RejectedInput(f"subspace enumeration needs 1 <= k <= m, got m={m}, k={k}")
    return _enumerate(m, k)


def coset_index_map(s):
    """
    Fix the coset indexing of a subspace.

    The complement basis is built greedily from e_1, ..., e_m (e_1 = z_1), keeping
    each standard vector independent of everything accumulated so far. A point's
    coset index is its coefficient vector on the complement basis, first
    complement vector most significant.
    """
    m, k = s.ambient_m, s.dim_k
    accumulated = {}
    for b in s.basis:
        v = reduce_vector(b, accumulated)
        accumulated[v.bit_length() - 1] = v
    complement = []
    for j in range(m):
        e = 1 << (m - 1 - j)
        v = reduce_vector(e, accumulated)
        if v:
            accumulated[v.bit_length() - 1] = v
            complement.append(e)

    # elimination over the combined basis, tagging which combined vectors make up each row
    combined = list(s.basis) + complement
    rows = {}
    for i, vec in enumerate(combined):
        v, tag = vec, 1 << i
        while v and (v.bit_length() - 1) in rows:
            rv, rt = rows[v.bit_length() - 1]
            v, tag = v ^ rv, tag ^ rt
        rows[v.bit_length() - 1] = (v, tag)

    images = []
    for j in range(m):
        v, tag = 1 << (m - 1 - j), 0
        while v:
            rv, rt = rows[v.bit_length() - 1]
            v, tag = v ^ rv, tag ^ rt
        coset = 0
        for i in range(m - k):
            coset |= (tag >> (k + i) & 1) << (m - k - 1 - i)
        images.append(coset)

    return CosetIndexMap(subspace=s, complement_basis=tuple(complement), images=tuple(images))


def project(y, cmap):
    """
    XOR y over every coset of the map's subspace.

    Works on a single word or on a batch whose last axis is the word.

    Returns:
        np.ndarray: Word(s) of length 2^(m-k), indexed by coset index.
    """
    y = np.asarray(y, dtype=np.uint8)
    n = 1 << cmap.subspace.ambient_m
    if y.shape[-1] != n:
        raise RejectedInput(f"expected words of length {n}, got {y.shape[-1]}")
    return np.bitwise_xor.reduce(y[..., cmap.members], axis=-1)


@lru_cache(maxsize=None)
def projection_tables(m, k):
    """Every k-dimensional subspace of F2^m with its coset map, kept for reuse across decodes."""
    maps = tuple(coset_index_map(s) for s in enumerate_subspaces(m, k))
    images = np.array([c.images for c in maps], dtype=np.int32)
    complements = np.array([c.complement_basis for c in maps], dtype=np.int32).reshape(len(maps), m - k)
    elements = np.stack([c.subspace.elements for c in maps]).astype(np.int32)
    for table in (images, complements, elements):
        table.setflags(write=False)
    logger.info(f"Precomputed {len(maps)} coset maps for k={k} in F2^{m}")
    return ProjectionTables(m=m, k=k, maps=maps, images=images, complements=complements, elements=elements)


def chunk_rows(tables):
    """Subspaces per block, so one block of coset tables fits Config.PROJECTION_CHUNK_BYTES."""
    return max(1, Config.PROJECTION_CHUNK_BYTES // (32 << tables.m))


def coset_indices(tables, start, stop):
    """index_of rows of subspaces start..stop-1, shape (stop-start, 2^m)."""
    m = tables.m
    points = np.arange(1 << m, dtype=np.int32)
    images = tables.images[start:stop]
    index_of = np.zeros((len(images), 1 << m), dtype=np.int32)
    for j in range(m):
        index_of ^= ((points >> (m - 1 - j)) & 1)[None, :] * images[:, j:j + 1]
    return index_of


def _coset_members(tables, start, stop):
    complements = tables.complements[start:stop]
    reps = np.zeros((len(complements), 1), dtype=np.int32)
    for i in range(complements.shape[1] - 1, -1, -1):
        reps = np.concatenate([reps, reps ^ complements[:, i:i + 1]], axis=1)
    return reps[:, :, None] ^ tables.elements[start:stop, None, :]


def project_chunks(y, tables):
    """
    Projections of y onto the subspaces of tables, one block of subspaces at a time.

    Yields:
        tuple: (start, stop, projections of shape (stop-start, 2^(m-k))).
    """
    y = np.asarray(y, dtype=np.uint8)
    check_length(y, 1 << tables.m)
    step = chunk_rows(tables)
    for start in range(0, len(tables.maps), step):
        stop = min(start + step, len(tables.maps))
        yield start, stop, np.bitwise_xor.reduce(y[_coset_members(tables, start, stop)], axis=-1)


def project_all(y, tables):
    """Projections of y onto every subspace in tables, shape (n, 2^(m-k))."""
    return np.concatenate([raw for _, _, raw in project_chunks(y, tables)])


def subspace_chain(m, k, depth):
    """
    A fixed chain of subspaces for nested projections: at each step the span of
    the k lowest standard vectors of the current ambient space.
    """
    if depth * k > m - 1:
        raise RejectedInput(f"{depth} nested projections of dimension {k} need m > {depth * k}, got m={m}")
    chain = []
    for step in range(depth):
        ambient = m - step * k
        s = subspace_from_basis(ambient, [1 << i for i in range(k)])
        chain.append(coset_index_map(s))
    return chain
