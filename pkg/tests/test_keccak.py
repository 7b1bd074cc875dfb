import hashlib

import pytest
from hypothesis import given, strategies as st

from sapkit.keccak import keccak256

# published digests for the 0x01-padded variant
KNOWN_VECTORS = [
    (b"", "c5d2460186f7233c927e7db2dcc703c0e500b653ca82273b7bfad8045d85a470"),
    (b"abc", "4e03657aea45a94fc7d47ba826c8d667c0d1e6e33a64a036ec44f58fa12d6c45"),
    (b"testing", "5f16f4c7f149ac4f9510d9cf8cf384038ad348b3bcdc01915f95de12df9d1b02"),
]


@pytest.mark.parametrize("message,digest", KNOWN_VECTORS)
def test_known_vectors(message, digest):
    assert keccak256(message).hex() == digest


def test_not_sha3():
    # same permutation, different padding byte: digests must disagree
    assert keccak256(b"abc") != hashlib.sha3_256(b"abc").digest()


def test_multi_block_inputs():
    # exercise 1, 2, and 3 absorbed blocks (rate = 136 bytes)
    seen = set()
    for size in (0, 1, 135, 136, 137, 271, 272, 273, 500):
        digest = keccak256(b"\xa5" * size)
        assert len(digest) == 32
        seen.add(digest)
    assert len(seen) == 9


@given(st.binary(max_size=512))
def test_deterministic_and_sized(data):
    first = keccak256(data)
    assert first == keccak256(bytes(data))
    assert len(first) == 32


@given(st.binary(min_size=1, max_size=256), st.integers(min_value=0, max_value=7))
def test_bit_flip_changes_digest(data, bit):
    flipped = bytearray(data)
    flipped[0] ^= 1 << bit
    assert keccak256(data) != keccak256(bytes(flipped))
