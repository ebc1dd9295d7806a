import tracemalloc

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from config import Config
from errors import RejectedInput
from models import CodeParams
from coding.rm_core import dimension, encode, is_codeword
from coding.subspace import (
    canonical_basis,
    chunk_rows,
    coset_indices,
    coset_index_map,
    enumerate_subspaces,
    gaussian_binomial,
    project,
    project_all,
    project_chunks,
    projection_tables,
    subspace_chain,
    subspace_from_basis,
)


@pytest.mark.parametrize("m, k, expected", [
    (3, 1, 7), (4, 1, 15), (4, 2, 35), (5, 2, 155), (6, 3, 1395), (5, 0, 1), (5, 5, 1),
])
def test_gaussian_binomial(m, k, expected):
    assert gaussian_binomial(m, k) == expected


def test_gaussian_binomial_rejects_k_above_m():
    with pytest.raises(RejectedInput):
        gaussian_binomial(3, 4)


@pytest.mark.parametrize("m", [1, 2, 3, 4, 5])
def test_enumeration_count_matches_gaussian_binomial(m):
    for k in range(1, m + 1):
        found = enumerate_subspaces(m, k)
        assert len(found) == gaussian_binomial(m, k)
        assert len(set(s.basis for s in found)) == len(found)
        assert list(found) == sorted(found, key=lambda s: s.basis)


def test_enumerated_subspaces_are_closed_under_xor():
    for s in enumerate_subspaces(4, 2):
        elems = set(int(v) for v in s.elements)
        assert len(elems) == 4
        assert all(a ^ b in elems for a in elems for b in elems)


def test_canonical_basis_identifies_equal_spans():
    assert subspace_from_basis(3, [3, 1]) == subspace_from_basis(3, [2, 1])
    assert subspace_from_basis(3, [3, 1]).basis == (2, 1)
    assert canonical_basis([6, 5]) == (5, 3)


def test_dependent_basis_is_rejected():
    with pytest.raises(RejectedInput):
        subspace_from_basis(3, [3, 1, 2])


@pytest.mark.parametrize("m, k", [(3, 1), (4, 2), (5, 2), (5, 3)])
def test_coset_index_map_is_a_linear_quotient(m, k):
    points = np.arange(1 << m)
    for s in enumerate_subspaces(m, k)[:20]:
        cmap = coset_index_map(s)
        index_of = cmap.index_of
        a, b = np.meshgrid(points, points)
        assert_array_equal(index_of[a ^ b], index_of[a] ^ index_of[b])
        for v in s.elements:
            assert_array_equal(index_of[points ^ v], index_of)
        assert_array_equal(np.bincount(index_of), np.full(1 << (m - k), 1 << k))
        assert cmap.members.shape == (1 << (m - k), 1 << k)


def test_project_xors_each_coset():
    s = subspace_from_basis(2, [1])
    y = np.array([1, 0, 0, 0], dtype=np.uint8)
    assert_array_equal(project(y, coset_index_map(s)), [1, 0])


def test_project_rejects_wrong_length():
    cmap = coset_index_map(subspace_from_basis(3, [1]))
    with pytest.raises(RejectedInput):
        project(np.zeros(4, dtype=np.uint8), cmap)


@pytest.mark.slow
@pytest.mark.parametrize("m", [4, 5, 6])
@pytest.mark.parametrize("r", [2, 3])
@pytest.mark.parametrize("k", [1, 2])
def test_projections_of_codewords_are_codewords(m, r, k):
    params, child = CodeParams(m, r), CodeParams(m - k, r - k)
    tables = projection_tables(m, k)
    rng = np.random.default_rng(1000 * m + 10 * r + k)
    for _ in range(200):
        c = encode(rng.integers(0, 2, dimension(params)), params)
        assert all(is_codeword(w, child) for w in project_all(c, tables))


@pytest.mark.parametrize("m, k", [(4, 1), (5, 2)])
def test_projection_is_linear(m, k):
    tables = projection_tables(m, k)
    rng = np.random.default_rng(21)
    for _ in range(20):
        a, b = rng.integers(0, 2, (2, 1 << m)).astype(np.uint8)
        assert_array_equal(project_all(a ^ b, tables), project_all(a, tables) ^ project_all(b, tables))


def test_projection_tables_match_single_maps():
    tables = projection_tables(4, 1)
    y = np.random.default_rng(5).integers(0, 2, 16).astype(np.uint8)
    stacked = project_all(y, tables)
    for row, cmap in zip(stacked, tables.maps):
        assert_array_equal(row, project(y, cmap))


def test_subspace_chain_depth_limit():
    assert len(subspace_chain(10, 1, 2)) == 2
    assert subspace_chain(10, 1, 2)[1].subspace.ambient_m == 9
    with pytest.raises(RejectedInput):
        subspace_chain(4, 2, 2)


@pytest.mark.parametrize("basis, index_of, complement", [
    ([1], [0, 0, 1, 1], (2,)),
    ([2], [0, 1, 0, 1], (1,)),
    ([3], [0, 1, 1, 0], (2,)),
])
def test_coset_maps_in_the_plane(basis, index_of, complement):
    cmap = coset_index_map(subspace_from_basis(2, basis))
    assert cmap.complement_basis == complement
    assert_array_equal(cmap.index_of, index_of)
    for t, coset in enumerate(cmap.members):
        assert_array_equal(np.flatnonzero(cmap.index_of == t), coset)


@pytest.mark.parametrize("m, k", [(4, 1), (5, 2)])
def test_block_size_does_not_change_projections(monkeypatch, m, k):
    tables = projection_tables(m, k)
    y = np.random.default_rng(9).integers(0, 2, 1 << m).astype(np.uint8)
    whole = project_all(y, tables)
    monkeypatch.setattr(Config, "PROJECTION_CHUNK_BYTES", 1)
    assert chunk_rows(tables) == 1
    assert_array_equal(project_all(y, tables), whole)
    starts = [start for start, _, _ in project_chunks(y, tables)]
    assert starts == list(range(len(tables.maps)))


def test_coset_indices_match_single_maps():
    tables = projection_tables(5, 2)
    rows = coset_indices(tables, 10, 20)
    for row, cmap in zip(rows, tables.maps[10:20]):
        assert_array_equal(row, cmap.index_of)


def test_projection_tables_stay_small():
    projection_tables.cache_clear()
    tracemalloc.start()
    try:
        tables = projection_tables(12, 1)
        _, peak = tracemalloc.get_traced_memory()
    finally:
        tracemalloc.stop()
    assert len(tables.maps) == 4095
    assert peak < 64 * 2 ** 20
