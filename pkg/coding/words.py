"""
Words are 1-D numpy uint8 arrays of 0/1 of length 2^m.

Index i holds the point z = (z_1, ..., z_m) whose binary expansion is i with
z_1 the most significant bit, so array order is the lexicographic order on F2^m.
No function here or elsewhere mutates a Word it was handed.
"""

import re

import numpy as np

from errors import RejectedInput

_ASCII = re.compile(r"^[01]+$")
_HEX = re.compile(r"^0[xX]([0-9a-fA-F]+)$")
_NIBBLE = np.arange(3, -1, -1, dtype=np.uint8)


def is_power_of_two(n):
    return n > 0 and n & (n - 1) == 0


def log2_length(word):
    """Return m for a word of length 2^m."""
    n = len(word)
    if not is_power_of_two(n):
        raise RejectedInput(f"word length {n} is not a power of two")
    return n.bit_length() - 1


def check_length(word, n):
    if len(word) != n:
        raise RejectedInput(f"expected a word of length {n}, got {len(word)}")


def as_word(bits):
    """Coerce any 0/1 sequence into a Word."""
    word = np.asarray(bits, dtype=np.uint8)
    if word.ndim != 1:
        raise RejectedInput(f"a word must be one-dimensional, got shape {word.shape}")
    if word.size and word.max() > 1:
        raise RejectedInput("a word may only contain the bits 0 and 1")
    return word


def parse_bits(text):
    """
    Parse a bit string of any length from its text form.

    Args:
        text (str): Either a 0/1 ASCII string, or a hex string with a 0x prefix
            whose first nibble holds the lowest four indices.

    Returns:
        np.ndarray: The parsed bits.
    """
    text = text.strip()
    hex_match = _HEX.match(text)
    if hex_match:
        nibbles = np.array([int(c, 16) for c in hex_match.group(1)], dtype=np.uint8)
        word = ((nibbles[:, None] >> _NIBBLE) & 1).ravel()
    elif _ASCII.match(text):
        word = np.frombuffer(text.encode("ascii"), dtype=np.uint8) - ord("0")
    else:
        raise RejectedInput(f"malformed word {text!r}: expected 0/1 digits or 0x-prefixed hex")
    return word.astype(np.uint8)


def parse_word(text):
    """Parse a word, which must have power-of-two length."""
    word = parse_bits(text)
    if not is_power_of_two(len(word)):
        raise RejectedInput(f"malformed word {text!r}: length {len(word)} is not a power of two")
    return word


def to_ascii(word):
    return (np.asarray(word, dtype=np.uint8) + ord("0")).tobytes().decode("ascii")


def to_hex(word):
    word = np.asarray(word, dtype=np.uint8)
    if len(word) % 4:
        raise RejectedInput(f"hex form needs a length divisible by 4, got {len(word)}")
    nibbles = word.reshape(-1, 4) @ (1 << _NIBBLE.astype(np.int64))
    return "0x" + "".join(f"{v:x}" for v in nibbles)


def format_vector(v, m):
    """Hex form of a point of F2^m held as an integer (z_1 most significant)."""
    return f"{v:0{max(1, (m + 3) // 4)}x}"


def to_pm(word):
    """The +-1 form a^{pm}_i = (-1)^{a_i}."""
    return 1 - 2 * np.asarray(word, dtype=np.int64)


def from_pm(values):
    values = np.asarray(values)
    if not np.all(np.abs(values) == 1):
        raise RejectedInput("a +-1 word may only contain the values -1 and +1")
    return (values < 0).astype(np.uint8)


def hamming_weight(word):
    return int(np.count_nonzero(word))


def hamming_distance(a, b):
    return int(np.count_nonzero(np.asarray(a) != np.asarray(b)))
