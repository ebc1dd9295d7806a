from itertools import product
import tracemalloc

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from config import Config
from errors import RejectedInput
from models import CodeParams, FirstOrderEstimate
from coding.fht_ml import (
    brute_force_ml,
    brute_force_search,
    codebook_chunks,
    decode_first_order_batch,
    estimate_to_word,
    hadamard_spectrum,
    ml_decode_first_order,
    ml_success_rate,
)
from coding.rm_core import dimension, encode
from coding.words import hamming_distance, parse_word, to_pm


def test_spectrum_of_all_zero_word():
    assert_array_equal(hadamard_spectrum(to_pm(np.zeros(8, dtype=np.uint8))), [8, 0, 0, 0, 0, 0, 0, 0])


def test_spectrum_matches_direct_correlation():
    rng = np.random.default_rng(2)
    y = to_pm(rng.integers(0, 2, 32))
    x = np.arange(32)
    direct = [int(np.sum(y * (-1) ** np.array([bin(v & s).count("1") for v in x]))) for s in range(32)]
    assert_array_equal(hadamard_spectrum(y), direct)


def test_spectrum_rejects_non_power_of_two():
    with pytest.raises(RejectedInput):
        hadamard_spectrum([1, -1, 1])


@pytest.mark.parametrize("m", [2, 3, 4])
def test_noiseless_first_order_words_decode_to_themselves(m):
    for s in range(1 << m):
        for sigma in (1, -1):
            word = estimate_to_word(FirstOrderEstimate(s=s, sigma=sigma), m)
            e = ml_decode_first_order(word)
            assert (e.s, e.sigma, e.tied) == (s, sigma, False)


def test_tie_rule_prefers_plus_then_smallest_index():
    assert ml_decode_first_order([1, 0, 0, 0]) == FirstOrderEstimate(s=0, sigma=1, tied=True)
    assert ml_decode_first_order([0, 1, 1, 1]) == FirstOrderEstimate(s=1, sigma=1, tied=True)


def test_brute_force_breaks_ties_to_the_smallest_codeword():
    assert_array_equal(brute_force_ml([1, 0, 0, 0], CodeParams(2, 1)), [0, 0, 0, 0])


@pytest.mark.parametrize("m", [2, 3])
def test_fht_decoder_is_ml_on_every_word(m):
    params = CodeParams(m, 1)
    for bits in product((0, 1), repeat=1 << m):
        y = np.array(bits, dtype=np.uint8)
        fht = estimate_to_word(ml_decode_first_order(y), m)
        assert hamming_distance(fht, y) == hamming_distance(brute_force_ml(y, params), y)


@pytest.mark.slow
def test_fht_decoder_is_ml_on_random_words_of_length_16():
    params = CodeParams(4, 1)
    rng = np.random.default_rng(20240)
    for _ in range(10_000):
        y = rng.integers(0, 2, 16).astype(np.uint8)
        fht = estimate_to_word(ml_decode_first_order(y), 4)
        assert hamming_distance(fht, y) == hamming_distance(brute_force_ml(y, params), y)


def test_batch_decoder_matches_single_calls():
    rng = np.random.default_rng(9)
    words = rng.integers(0, 2, (40, 8)).astype(np.uint8)
    decoded, ties = decode_first_order_batch(words)
    estimates = [ml_decode_first_order(w) for w in words]
    for row, e in zip(decoded, estimates):
        assert_array_equal(row, estimate_to_word(e, 3))
    assert ties == sum(e.tied for e in estimates)


def test_brute_force_recovers_codewords_within_half_distance():
    params = CodeParams(4, 2)
    rng = np.random.default_rng(4)
    c = encode(rng.integers(0, 2, dimension(params)), params)
    y = c.copy()
    y[5] ^= 1
    assert_array_equal(brute_force_ml(y, params), c)


def test_exhaustive_search_is_capped():
    with pytest.raises(RejectedInput):
        next(codebook_chunks(CodeParams(10, 3)))


def test_ml_success_rate_trends():
    assert ml_success_rate(6, 0.1, 4000, seed=1) > ml_success_rate(3, 0.1, 4000, seed=1)
    assert ml_success_rate(5, 0.05, 4000, seed=2) > ml_success_rate(5, 0.2, 4000, seed=2)


def test_single_bit_word_decodes_to_zero_without_a_tie():
    assert ml_decode_first_order(parse_word("00000001")) == FirstOrderEstimate(s=0, sigma=1, tied=False)


@pytest.mark.parametrize("m", [1, 3, 6])
def test_spectrum_is_an_involution_up_to_scale(m):
    y = to_pm(np.random.default_rng(m).integers(0, 2, 1 << m))
    spectrum = hadamard_spectrum(y)
    assert_array_equal(hadamard_spectrum(spectrum), (1 << m) * y)
    assert int(np.sum(spectrum * spectrum)) == (1 << m) ** 2


def test_spectrum_measures_distance_to_each_character():
    m = 5
    y = np.random.default_rng(17).integers(0, 2, 1 << m).astype(np.uint8)
    spectrum = hadamard_spectrum(to_pm(y))
    for s in range(1 << m):
        chi = estimate_to_word(FirstOrderEstimate(s=s, sigma=1), m)
        assert spectrum[s] / (1 << m) == 1 - 2 * hamming_distance(y, chi) / (1 << m)


def test_untied_decoding_commutes_with_adding_a_codeword():
    m = 5
    rng = np.random.default_rng(23)
    untied = 0
    for _ in range(300):
        y = (rng.random(1 << m) < 0.2).astype(np.uint8)
        c = estimate_to_word(FirstOrderEstimate(s=int(rng.integers(1 << m)), sigma=int(rng.choice([1, -1]))), m)
        plain, shifted = ml_decode_first_order(y), ml_decode_first_order(y ^ c)
        assert plain.tied == shifted.tied
        if not plain.tied:
            untied += 1
            assert_array_equal(estimate_to_word(shifted, m), estimate_to_word(plain, m) ^ c)
    assert untied > 0


def test_brute_force_reports_ties():
    assert brute_force_search([1, 0, 0, 0], CodeParams(2, 1))[1]
    word, tied = brute_force_search([1, 0, 0, 0, 0, 0, 0, 0], CodeParams(3, 1))
    assert_array_equal(word, np.zeros(8))
    assert not tied


def test_streamed_codebook_gives_the_cached_answer(monkeypatch):
    params = CodeParams(4, 2)
    words = np.random.default_rng(31).integers(0, 2, (8, 16)).astype(np.uint8)
    cached = [brute_force_search(y, params) for y in words]
    monkeypatch.setattr(Config, "CODEBOOK_CACHE_LIMIT", 0)
    monkeypatch.setattr(Config, "CODEBOOK_CHUNK_BYTES", 1)
    assert sum(len(book) for book in codebook_chunks(params)) == 1 << dimension(params)
    for y, (word, tied) in zip(words, cached):
        streamed, streamed_tied = brute_force_search(y, params)
        assert_array_equal(streamed, word)
        assert streamed_tied == tied


def test_brute_force_on_a_long_code_stays_in_bounded_memory():
    params = CodeParams(12, 1)
    c = estimate_to_word(FirstOrderEstimate(s=1234, sigma=-1), 12)
    y = c.copy()
    y[np.random.default_rng(3).choice(4096, 100, replace=False)] ^= 1
    tracemalloc.start()
    try:
        decoded = brute_force_ml(y, params)
        _, peak = tracemalloc.get_traced_memory()
    finally:
        tracemalloc.stop()
    assert_array_equal(decoded, c)
    assert peak < 64 * 2 ** 20
