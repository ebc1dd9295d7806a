import tracemalloc

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from errors import RejectedInput
from models import CodeParams
from coding.rm_core import (
    anf_coefficients,
    dimension,
    encode,
    generator_rows,
    gf2_rank,
    is_codeword,
    min_distance,
    monomials,
    pack,
    point_coordinates,
    xor_butterfly,
)
from coding.words import from_pm, hamming_distance, parse_bits, parse_word, to_ascii, to_hex, to_pm


def test_dimension_and_distance():
    assert dimension(CodeParams(4, 2)) == 11
    assert dimension(CodeParams(5, 1)) == 6
    assert dimension(CodeParams(3, 3)) == 8
    assert min_distance(CodeParams(4, 2)) == 4


def test_monomial_order_is_degree_then_lexicographic():
    assert monomials(CodeParams(3, 2)) == [(), (0,), (1,), (2,), (0, 1), (0, 2), (1, 2)]


def test_points_put_z1_in_the_most_significant_bit():
    coords = point_coordinates(2)
    assert_array_equal(coords, [[0, 0], [0, 1], [1, 0], [1, 1]])


@pytest.mark.parametrize("msg, expected", [
    ("100", "1111"),
    ("010", "0011"),
    ("001", "0101"),
    ("111", "1001"),
])
def test_encode_small_first_order(msg, expected):
    assert to_ascii(encode(parse_bits(msg), CodeParams(2, 1))) == expected


def test_encode_rejects_wrong_message_length():
    with pytest.raises(RejectedInput):
        encode([1, 0], CodeParams(2, 1))


@pytest.mark.parametrize("m, r", [(3, 1), (4, 2), (5, 3), (6, 2)])
def test_generator_has_full_rank(m, r):
    params = CodeParams(m, r)
    assert gf2_rank(generator_rows(params)) == dimension(params)


def test_every_generator_row_is_a_codeword_of_weight_at_least_d():
    params = CodeParams(5, 2)
    for row in generator_rows(params):
        assert is_codeword(row, params)
        assert row.sum() >= min_distance(params)


def test_random_codewords_pass_membership():
    params = CodeParams(6, 3)
    rng = np.random.default_rng(11)
    for _ in range(50):
        c = encode(rng.integers(0, 2, dimension(params)), params)
        assert is_codeword(c, params)
        flipped = c.copy()
        flipped[rng.integers(params.n)] ^= 1
        assert not is_codeword(flipped, params)


@pytest.mark.parametrize("m", range(1, 7))
def test_every_encoded_message_is_a_codeword(m):
    rng = np.random.default_rng(100 + m)
    for r in range(m + 1):
        params = CodeParams(m, r)
        for msg in rng.integers(0, 2, (1000, dimension(params))):
            assert is_codeword(encode(msg, params), params)


@pytest.mark.parametrize("m, r", [(3, 1), (4, 2), (6, 3), (8, 5)])
def test_encode_is_linear_and_matches_the_generator(m, r):
    params = CodeParams(m, r)
    rows = generator_rows(params).astype(np.int64)
    rng = np.random.default_rng(m * 10 + r)
    for _ in range(20):
        a, b = rng.integers(0, 2, (2, dimension(params)))
        assert_array_equal(encode(a ^ b, params), encode(a, params) ^ encode(b, params))
        assert_array_equal(encode(a, params), (a @ rows) & 1)


_SMALL_CODES = [(m, r) for m in range(1, 12) for r in range(m + 1) if dimension(CodeParams(m, r)) <= 12]


@pytest.mark.parametrize("m, r", _SMALL_CODES)
def test_minimum_weight_is_exact(m, r):
    params = CodeParams(m, r)
    dim = dimension(params)
    messages = (np.arange(1, 1 << dim)[:, None] >> np.arange(dim)) & 1
    weights = ((messages @ generator_rows(params).astype(np.int64)) & 1).sum(axis=1)
    assert weights.min() == min_distance(params) == 1 << (m - r)


def test_anf_of_a_monomial_has_one_coefficient():
    # z_1 z_3 in F2^3 sits at mask 0b101
    word = encode([0] * 5 + [1, 0], CodeParams(3, 2))
    assert_array_equal(np.flatnonzero(anf_coefficients(word)), [0b101])
    assert_array_equal(xor_butterfly(anf_coefficients(word)), word)


def test_long_codes_encode_without_a_dense_generator():
    params = CodeParams(16, 8)
    msg = np.random.default_rng(16).integers(0, 2, dimension(params))
    tracemalloc.start()
    try:
        c = encode(msg, params)
        _, peak = tracemalloc.get_traced_memory()
    finally:
        tracemalloc.stop()
    assert len(c) == 1 << 16
    assert peak < 32 * 2 ** 20
    assert is_codeword(c, params)
    assert not is_codeword(c, CodeParams(16, 7))


def test_full_order_code_contains_every_word():
    params = CodeParams(3, 3)
    rng = np.random.default_rng(3)
    assert is_codeword(rng.integers(0, 2, 8), params)


def test_pack_reads_index_zero_as_most_significant():
    assert pack([1, 0, 0, 0, 0, 0, 0, 0, 0, 1]) == 513
    assert pack([0, 1]) == 1


def test_code_params_bounds():
    with pytest.raises(RejectedInput):
        CodeParams(21, 1)
    with pytest.raises(RejectedInput):
        CodeParams(3, 4)
    assert str(CodeParams(4, 2)) == "RM(4,2)"


class TestWords:

    def test_hex_first_nibble_holds_lowest_indices(self):
        assert_array_equal(parse_word("0x8"), [1, 0, 0, 0])
        assert to_ascii(parse_word("0x81")) == "10000001"
        assert to_hex(parse_word("10000001")) == "0x81"

    @pytest.mark.parametrize("text", ["101", "10a1", "0x", "", "0b1010"])
    def test_malformed_words_are_rejected(self, text):
        with pytest.raises(RejectedInput):
            parse_word(text)

    def test_plus_minus_mapping(self):
        assert_array_equal(to_pm([0, 1, 1]), [1, -1, -1])
        assert_array_equal(from_pm([1, -1]), [0, 1])
        with pytest.raises(RejectedInput):
            from_pm([1, 0])

    def test_hamming_distance(self):
        assert hamming_distance(parse_word("0110"), parse_word("0011")) == 2
